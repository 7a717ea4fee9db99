from __future__ import annotations

from collections import deque

from .registry import Packet

CAPACITY_FACTOR = 4


class FifoOverflow(RuntimeError):
    pass


class FifoChannel:
    """Bounded FIFO of packets; capacity counts elements, not packets.

    Without an explicit capacity the bound is fixed on the first push to
    ``CAPACITY_FACTOR`` times that payload, i.e. four iterations' worth for
    the fixed-size payloads of a PHY chain.
    """

    def __init__(self, name: str, kind: str, capacity: int | None = None):
        self.name = name
        self.kind = kind
        self.capacity = capacity
        self._queue: deque[Packet] = deque()
        self._level = 0
        self.pushed = 0
        self.popped = 0

    def push(self, packet: Packet) -> None:
        n = len(packet)
        if self.capacity is None:
            self.capacity = max(CAPACITY_FACTOR * n, 1)
        if self._level + n > self.capacity:
            raise FifoOverflow(
                f"FIFO {self.name}: {self._level} + {n} elements exceeds capacity {self.capacity}"
            )
        self._queue.append(packet)
        self._level += n
        self.pushed += n

    def pop(self) -> Packet:
        if not self._queue:
            raise RuntimeError(f"FIFO {self.name} is empty")
        packet = self._queue.popleft()
        n = len(packet)
        self._level -= n
        self.popped += n
        return packet

    @property
    def level(self) -> int:
        return self._level

    def __len__(self) -> int:
        return len(self._queue)
