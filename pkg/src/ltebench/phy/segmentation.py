"""Code-block segmentation onto the turbo interleaver sizes.

Per-code-block CRC-24B is not attached: with 6 PRB the transport block plus
CRC never exceeds 6144 bits, so the chain only ever sees one code block.
Multi-block inputs are still split deterministically, with the filler
placed at the head of the first block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qpp import valid_block_sizes

MAX_K = 6144


@dataclass(frozen=True)
class CodeBlock:
    bits: np.ndarray
    filler: int = 0

    @property
    def k(self) -> int:
        return int(self.bits.size)


def smallest_valid_k(length: int) -> int:
    for k in valid_block_sizes():
        if k >= length:
            return k
    raise ValueError(f"no interleaver size holds {length} bits")


def segmentation_sizes(b: int) -> tuple[int, int, int]:
    """(code blocks, K of the first block, filler bits) for a ``b``-bit input."""
    if b < 1:
        raise ValueError("segmentation input must be non-empty")
    c = -(-b // MAX_K)
    per_block = -(-b // c)
    k = smallest_valid_k(per_block)
    filler = c * k - b
    return c, k, filler


def segment_code_blocks(bits) -> list[CodeBlock]:
    bits = np.asarray(bits, dtype=np.uint8)
    c, k, filler = segmentation_sizes(bits.size)
    padded = np.concatenate([np.zeros(filler, dtype=np.uint8), bits])
    blocks = []
    for i in range(c):
        chunk = padded[i * k:(i + 1) * k]
        blocks.append(CodeBlock(chunk, filler if i == 0 else 0))
    return blocks


def desegment(blocks) -> np.ndarray:
    """Concatenate decoded blocks and drop head filler."""
    parts = []
    for block in blocks:
        parts.append(np.asarray(block.bits, dtype=np.uint8)[block.filler:])
    return np.concatenate(parts)
