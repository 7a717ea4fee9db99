"""Link-level benchmark workbench for the LTE downlink shared channel."""

__version__ = "0.1.0"
