"""Randomness and clock injection.

Every scheme in the package draws randomness through a RandomSource so
that protocol transcripts are reproducible: seeded sources squeeze a
SHAKE-256 stream, unseeded ones defer to the OS.  The Clock abstraction
plays the same role for timestamps.
"""

from __future__ import annotations

import hashlib
import os
import time


class RandomSource:
    """Byte/scalar source; deterministic iff constructed with a seed."""

    def __init__(self, seed: bytes | None = None):
        self._seed = seed
        self._counter = 0
        self._buf = b""

    @property
    def deterministic(self) -> bool:
        return self._seed is not None

    def read(self, n: int) -> bytes:
        if self._seed is None:
            return os.urandom(n)
        while len(self._buf) < n:
            block = hashlib.shake_256(
                self._seed + b"|block|" + self._counter.to_bytes(8, "big")
            ).digest(128)
            self._buf += block
            self._counter += 1
        out, self._buf = self._buf[:n], self._buf[n:]
        return out

    def scalar(self, modulus: int, allow_zero: bool = False) -> int:
        """Uniform scalar in [1, modulus) (or [0, modulus) if allow_zero)."""
        span = modulus if allow_zero else modulus - 1
        nbytes = (modulus.bit_length() + 128 + 7) // 8
        v = int.from_bytes(self.read(nbytes), "big") % span
        return v if allow_zero else v + 1

    def uuid4(self) -> bytes:
        """16 random bytes with RFC 4122 version-4 bits set."""
        b = bytearray(self.read(16))
        b[6] = (b[6] & 0x0F) | 0x40
        b[8] = (b[8] & 0x3F) | 0x80
        return bytes(b)

    def child(self, label: str) -> "RandomSource":
        """Independent stream derived from this source (stable per label)."""
        if self._seed is None:
            return RandomSource()
        sub = hashlib.shake_256(self._seed + b"|child|" + label.encode()).digest(32)
        return RandomSource(sub)


class Clock:
    """Wall-clock time in whole UNIX seconds."""

    def now(self) -> int:
        return int(time.time())


class LogicalClock(Clock):
    """Deterministic clock: starts at a fixed epoch, advances per query."""

    def __init__(self, start: int = 1_750_000_000, step: int = 1):
        self._t = start
        self._step = step

    def now(self) -> int:
        t = self._t
        self._t += self._step
        return t

    def advance(self, seconds: int) -> None:
        self._t += seconds
