"""CRC-24A over bit arrays (generator 0x864CFB, zero initial state)."""

from __future__ import annotations

import numpy as np

CRC24A_POLY = 0x864CFB
CRC_LEN = 24
_MASK = (1 << CRC_LEN) - 1


def _build_table() -> list[int]:
    table = []
    for byte in range(256):
        reg = byte << (CRC_LEN - 8)
        for _ in range(8):
            reg = ((reg << 1) ^ CRC24A_POLY) if reg & (1 << (CRC_LEN - 1)) else reg << 1
        table.append(reg & _MASK)
    return table


_TABLE = _build_table()


def crc24a_remainder(bits) -> int:
    """Remainder of bits(x) * x^24 modulo the generator, as an integer."""
    bits = np.asarray(bits, dtype=np.uint8)
    head = bits.size % 8
    reg = 0
    for b in bits[:head]:
        top = ((reg >> (CRC_LEN - 1)) & 1) ^ int(b)
        reg = (reg << 1) & _MASK
        if top:
            reg ^= CRC24A_POLY & _MASK
    for byte in np.packbits(bits[head:]).tolist():
        reg = ((reg << 8) & _MASK) ^ _TABLE[((reg >> (CRC_LEN - 8)) ^ byte) & 0xFF]
    return reg


def _int_to_bits(value: int, n: int) -> np.ndarray:
    return np.array([(value >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def crc24a_attach(bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size == 0:
        raise ValueError("CRC attachment needs a non-empty bit sequence")
    return np.concatenate([bits, _int_to_bits(crc24a_remainder(bits), CRC_LEN)])


def crc24a_check(bits) -> bool:
    """True iff ``bits`` (payload followed by 24 parity bits) is a codeword."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size <= CRC_LEN:
        return False
    payload, parity = bits[:-CRC_LEN], bits[-CRC_LEN:]
    return crc24a_remainder(payload) == int("".join(map(str, parity.tolist())), 2)
