"""Simplex sets and their bitstring encodings."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Sequence


def encode_simplex(simplex: Sequence[int], n: int) -> str:
    """n-bit string with bit ``i`` (read left to right) set iff vertex ``i`` is in ``simplex``.

    >>> encode_simplex((0, 1, 3), 4)
    '1101'
    """
    bits = ["0"] * n
    prev = -1
    for v in simplex:
        if not 0 <= v < n:
            raise ValueError(f"vertex {v} out of range for n={n}")
        if v <= prev:
            raise ValueError(f"simplex {tuple(simplex)} is not strictly ascending")
        bits[v] = "1"
        prev = v
    return "".join(bits)


def decode_simplex(bits: str) -> tuple[int, ...]:
    return tuple(i for i, b in enumerate(bits) if b == "1")


def colex_rank(simplex: Sequence[int]) -> int:
    """Rank of an ascending tuple among all tuples of the same size in colexicographic order."""
    return sum(comb(v, i + 1) for i, v in enumerate(simplex))


def colex_unrank(rank: int, size: int) -> tuple[int, ...]:
    out = []
    for i in range(size, 0, -1):
        v = i - 1
        while comb(v + 1, i) <= rank:
            v += 1
        rank -= comb(v, i)
        out.append(v)
    return tuple(reversed(out))


@dataclass(frozen=True)
class SimplexSet:
    """The r-simplices of a clique complex, in lexicographic order."""

    r: int
    n: int
    simplices: tuple[tuple[int, ...], ...]
    source: str = field(default="", compare=False)

    def __post_init__(self):
        for s in self.simplices:
            if len(s) != self.r + 1:
                raise ValueError(f"simplex {s} has {len(s)} vertices, expected {self.r + 1}")

    def __len__(self) -> int:
        return len(self.simplices)

    def __iter__(self):
        return iter(self.simplices)

    @cached_property
    def encodings(self) -> tuple[str, ...]:
        return tuple(encode_simplex(s, self.n) for s in self.simplices)

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {s: i for i, s in enumerate(self.simplices)}

    @property
    def ambient_size(self) -> int:
        """C(n, r+1): the number of weight-(r+1) bitstrings."""
        return comb(self.n, self.r + 1)
