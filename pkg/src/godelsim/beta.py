"""Godel beta-function codec for finite sequences of naturals.

beta((b, c), i) is the remainder of b modulo 1 + (i+1)*c.  Any finite
sequence is realized by some pair via the Chinese Remainder Theorem, and
bounded enumeration of all realizing pairs supports a frequency reading
of "what comes next".
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence


class EmptyMatchSetError(Exception):
    """No pair within the bound reproduces the sequence; no frequencies exist."""


class TagCollisionError(Exception):
    """Two tagged sequences share an interaction tag and cannot be merged."""


@dataclass(frozen=True)
class BetaPair:
    b: int
    c: int

    def __post_init__(self) -> None:
        if self.b < 0:
            raise ValueError("b must be >= 0")
        if self.c < 1:
            raise ValueError("c must be >= 1")


@dataclass(frozen=True)
class TaggedSequence:
    """Property values tagged with strictly increasing interaction indices."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        tags = [tag for tag, _ in self.entries]
        if any(tag < 0 for tag in tags) or any(value < 0 for _, value in self.entries):
            raise ValueError("tags and values must be naturals")
        if any(a >= b for a, b in zip(tags, tags[1:])):
            raise ValueError("tags must be strictly increasing")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "TaggedSequence":
        return cls(tuple((int(tag), int(value)) for tag, value in pairs))

    @property
    def tags(self) -> tuple[int, ...]:
        return tuple(tag for tag, _ in self.entries)

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(value for _, value in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class NextValueDistribution:
    """Tally of predicted next values over all pairs matching a sequence."""

    bound: int
    counts: dict[int, int]
    total: int

    def frequency(self, value: int) -> Fraction:
        return Fraction(self.counts.get(value, 0), self.total)

    def frequencies(self) -> dict[int, Fraction]:
        return {value: Fraction(n, self.total) for value, n in sorted(self.counts.items())}


def _check_sequence(seq: Sequence[int]) -> None:
    if len(seq) == 0:
        raise ValueError("sequence must be non-empty")
    if any(v < 0 for v in seq):
        raise ValueError("sequence values must be naturals")


def beta_eval(pair: BetaPair, i: int) -> int:
    """Value of the pair's sequence at index ``i``: b mod (1 + (i+1)*c)."""
    if i < 0:
        raise ValueError("index must be >= 0")
    return pair.b % (1 + (i + 1) * pair.c)


def beta_encode(seq: Sequence[int]) -> BetaPair:
    """Constructively determine a pair realizing ``seq`` at indices 0..n.

    c is the factorial of max(n+1, max value), which makes the moduli
    1 + (i+1)*c pairwise coprime; b is the least CRT solution.
    """
    _check_sequence(seq)
    n = len(seq) - 1
    c = math.factorial(max(n + 1, max(seq)))
    moduli = [1 + (i + 1) * c for i in range(n + 1)]
    for i in range(len(moduli)):
        for j in range(i + 1, len(moduli)):
            if math.gcd(moduli[i], moduli[j]) != 1:
                raise AssertionError("moduli are not pairwise coprime")
    b, modulus = 0, 1
    for value, m in zip(seq, moduli):
        # CRT merge of b = value (mod m) into the running solution.
        inv = pow(modulus % m, -1, m)
        b = b + modulus * (((value - b) * inv) % m)
        modulus *= m
    return BetaPair(b % modulus, c)


def _congruences_for(seq: Sequence[int], c: int) -> Optional[tuple[int, int]]:
    """Least residue and modulus of all b with beta((b,c), i) = seq[i], or None."""
    residue, modulus = 0, 1
    for i, value in enumerate(seq):
        d = 1 + (i + 1) * c
        if value >= d:
            return None
        g = math.gcd(modulus, d)
        if (value - residue) % g != 0:
            return None
        step = d // g
        inv = pow((modulus // g) % step, -1, step) if step > 1 else 0
        residue = residue + modulus * ((((value - residue) // g) * inv) % step)
        modulus = modulus // g * d
        residue %= modulus
    return residue, modulus


def enumerate_matches(seq: Sequence[int], bound: int) -> list[BetaPair]:
    """All pairs with b <= bound, 1 <= c <= bound whose beta values reproduce ``seq``.

    Exhaustive within the bound; sorted lexicographically by (c, b).
    """
    _check_sequence(seq)
    if bound < 1:
        raise ValueError("bound must be >= 1")
    pairs: list[BetaPair] = []
    for c in range(1, bound + 1):
        solved = _congruences_for(seq, c)
        if solved is None:
            continue
        residue, modulus = solved
        pairs.extend(BetaPair(b, c) for b in range(residue, bound + 1, modulus))
    return pairs


def fit_characteristic_beta(seq: Sequence[int], bound: int) -> Optional[BetaPair]:
    """Lexicographically least (c, b) match within the bound, if any."""
    _check_sequence(seq)
    if bound < 1:
        raise ValueError("bound must be >= 1")
    for c in range(1, bound + 1):
        solved = _congruences_for(seq, c)
        if solved is not None and solved[0] <= bound:
            return BetaPair(solved[0], c)
    return None


def next_value_distribution(seq: Sequence[int], bound: int) -> NextValueDistribution:
    """Tally what each matching pair predicts at the index after the sequence."""
    matches = enumerate_matches(seq, bound)
    if not matches:
        raise EmptyMatchSetError(f"no pair within bound {bound} matches {list(seq)}")
    counts = Counter(beta_eval(pair, len(seq)) for pair in matches)
    return NextValueDistribution(bound, dict(counts), sum(counts.values()))


def superpose(first: TaggedSequence, second: TaggedSequence) -> TaggedSequence:
    """Chronological merge of two tagged sequences with disjoint tags."""
    overlap = set(first.tags) & set(second.tags)
    if overlap:
        raise TagCollisionError(f"tags occur in both sequences: {sorted(overlap)}")
    merged = sorted(first.entries + second.entries)
    return TaggedSequence(tuple(merged))
