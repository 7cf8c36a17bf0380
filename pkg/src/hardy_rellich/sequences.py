"""Finitely supported sequences on {0, 1, 2, ...} and positive weight sequences.

Storage is 0-based and index 0 is the boundary slot (A_0, Lambda_0 = lambda_0),
so every formula can refer to it explicitly.  Reads outside the stored range,
including negative indices, return exact zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

from .precision import abs_sq, precise, real_sum, to_real


class InvalidHorizonError(ValueError):
    pass


class InvalidOrderError(ValueError):
    pass


class BoundaryConditionError(ValueError):
    pass


def _is_zero(x) -> bool:
    return x == 0


@dataclass(frozen=True, init=False)
class FiniteSequence:
    """A complex sequence with finite support, stored as values[0..support_end]."""

    values: tuple

    def __init__(self, values: Iterable = ()):
        vals = list(values)
        while vals and _is_zero(vals[-1]):
            vals.pop()
        object.__setattr__(self, "values", tuple(vals))

    @classmethod
    def dirichlet(cls, values: Sequence) -> "FiniteSequence":
        """Sequence with A(0) = 0 enforced; ``values`` starts at index 0."""
        if values and not _is_zero(values[0]):
            raise BoundaryConditionError("Dirichlet sequences need value(0) = 0")
        return cls(values)

    @classmethod
    def rellich(cls, values: Sequence) -> "FiniteSequence":
        """Sequence with A(0) = A(1) = 0 enforced; ``values`` starts at index 0."""
        if any(not _is_zero(v) for v in list(values)[:2]):
            raise BoundaryConditionError("Rellich sequences need value(0) = value(1) = 0")
        return cls(values)

    @classmethod
    def unit(cls, k: int, value=1) -> "FiniteSequence":
        return cls([0] * k + [value])

    @classmethod
    def from_mapping(cls, entries: dict) -> "FiniteSequence":
        if not entries:
            return cls()
        if min(entries) < 0:
            raise ValueError("negative index in sequence entries")
        vals = [0] * (max(entries) + 1)
        for k, v in entries.items():
            vals[k] = v
        return cls(vals)

    @property
    def support_end(self) -> int:
        """Largest index with a nonzero value; -1 for the zero sequence."""
        return len(self.values) - 1

    def __call__(self, n: int):
        if n < 0 or n >= len(self.values):
            return 0
        return self.values[n]

    __getitem__ = __call__

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def is_zero(self) -> bool:
        return not self.values

    def vanishes_below(self, k: int) -> bool:
        return all(_is_zero(self(n)) for n in range(k))

    def padded(self, length: int) -> list:
        return [self(n) for n in range(length)]

    def map(self, fn: Callable) -> "FiniteSequence":
        return FiniteSequence(fn(v) for v in self.values)

    def __add__(self, other: "FiniteSequence") -> "FiniteSequence":
        m = max(len(self), len(other))
        return FiniteSequence(self(n) + other(n) for n in range(m))

    def __sub__(self, other: "FiniteSequence") -> "FiniteSequence":
        m = max(len(self), len(other))
        return FiniteSequence(self(n) - other(n) for n in range(m))

    def scaled(self, factor) -> "FiniteSequence":
        return FiniteSequence(factor * v for v in self.values)


@dataclass(frozen=True)
class PositiveSequence:
    """Strictly positive real sequence: ``generator`` for n >= 1, ``zero_value`` at 0."""

    generator: Callable[[int], Any]
    zero_value: Any = 1
    name: str = ""

    def __post_init__(self):
        if not self.zero_value > 0:
            raise ValueError(f"zero_value must be positive, got {self.zero_value}")

    def __call__(self, n: int):
        if n == 0:
            return self.zero_value
        if n < 0:
            raise IndexError(f"{self.name or 'sequence'} is undefined at negative index {n}")
        v = self.generator(n)
        if not v > 0:
            raise ValueError(f"{self.name or 'sequence'}({n}) = {v} is not positive")
        return v

    def values(self, n_max: int, start: int = 1) -> list:
        return [self(n) for n in range(start, n_max + 1)]

    def partial_sum(self, n: int):
        """Lambda_n = lambda_1 + ... + lambda_n, with Lambda_0 = lambda_0."""
        if n == 0:
            return self.zero_value
        return real_sum(self(k) for k in range(1, n + 1))

    def with_zero_value(self, zero_value) -> "PositiveSequence":
        return PositiveSequence(self.generator, zero_value, self.name)


def constant_sequence(value=1, zero_value=1) -> PositiveSequence:
    return PositiveSequence(lambda n: value, zero_value, name=f"const:{value}")


@precise
def partial_sums(q: PositiveSequence, n_max: int, *, prec=None) -> PositiveSequence:
    """Q_n = q_1 + ... + q_n for n <= n_max (exact when q is integer/rational valued)."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    table = [None]
    acc = 0
    for k in range(1, n_max + 1):
        acc = acc + q(k)
        table.append(acc)

    def generator(n, _table=tuple(table)):
        if n > n_max:
            raise IndexError(f"partial sums were tabulated only up to {n_max}")
        return _table[n]

    return PositiveSequence(generator, q.zero_value, name=f"partial_sums({q.name})")


def weighted_partial_sum_transform(a: FiniteSequence, q: PositiveSequence,
                                   horizon: int | None = None) -> FiniteSequence:
    """A(n) = q_1 a(1) + ... + q_n a(n), recorded explicitly up to ``horizon``.

    Beyond the support of ``a`` the transform is constant; it is written out
    through ``horizon`` and set to zero after it, so the truncation is explicit.
    """
    end = a.support_end
    if horizon is None:
        horizon = max(end, 0)
    if horizon < end:
        raise InvalidHorizonError(f"horizon {horizon} is smaller than support_end {end}")
    out = [0]
    acc = 0
    for n in range(1, horizon + 1):
        if n <= end:
            acc = acc + q(n) * a(n)
        out.append(acc)
    return FiniteSequence(out)


def knopp_transform(a: FiniteSequence, alpha: int, horizon: int | None = None) -> FiniteSequence:
    """A(n) = sum_{k<=n} C(n-k+alpha-1, n-k) |a(k)| up to ``horizon``."""
    if alpha < 1:
        raise InvalidOrderError(f"Knopp order must be a positive integer, got {alpha}")
    end = a.support_end
    if horizon is None:
        horizon = max(end, 0)
    if horizon < end:
        raise InvalidHorizonError(f"horizon {horizon} is smaller than support_end {end}")
    mags = [abs(a(k)) for k in range(end + 1)]
    out = [0]
    for n in range(1, horizon + 1):
        acc = 0
        for k in range(1, min(n, end) + 1):
            if mags[k]:
                acc = acc + math.comb(n - k + alpha - 1, n - k) * mags[k]
        out.append(acc)
    return FiniteSequence(out)


@precise
def weighted_norm_sq(A: FiniteSequence, w: Callable[[int], Any], n_start: int = 1, *, prec=None):
    """Correctly rounded sum_{n >= n_start} w(n) |A(n)|^2."""
    terms = []
    for n in range(n_start, A.support_end + 1):
        v = A(n)
        if _is_zero(v):
            continue
        terms.append(to_real(w(n)) * abs_sq(v))
    return real_sum(terms)
