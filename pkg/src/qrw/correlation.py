"""Coincidence correlation functions over an exact state expansion.

The k-fold correlation at detectors ``m_1..m_k`` is the normally ordered
expectation ``<a+_{m1}..a+_{mk} a_{mk}..a_{m1}>``.  Over a Fock expansion
it reduces to a sum of falling factorials,

    raw = sum_s P(s) * prod_d s_d * (s_d - 1) * ... * (s_d - mu_d + 1),

where ``mu_d`` is how often detector ``d`` appears in the tuple.  All
results are exact rationals; a zero is a genuine dark coincidence, not a
rounding artifact.  For tuples with repeated detectors the value divided
by ``prod mu_d!`` is also reported, which reads as "detector d received
exactly mu_d photons" for saturated tuples.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, permutations
from math import factorial, prod
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import InvalidArgumentError
from .state import StateExpansion

DEFAULT_MAX_ZERO_SET_ORDER = 3


class DetectorTuple:
    """A multiset of 1-based detector indices.

    Stored sorted, so tuples built in any order compare and hash equal;
    permutation symmetry of the correlation functions is structural.
    """

    __slots__ = ("detectors", "multiplicity")

    def __init__(self, detectors: Iterable[int]):
        dets = []
        for d in detectors:
            if isinstance(d, bool) or not isinstance(d, int) or d < 1:
                raise InvalidArgumentError(
                    f"detector indices are 1-based ints, got {d!r}"
                )
            dets.append(d)
        if not dets:
            raise InvalidArgumentError("a detector tuple needs at least one index")
        object.__setattr__(self, "detectors", tuple(sorted(dets)))
        object.__setattr__(
            self, "multiplicity", MappingProxyType(dict(Counter(self.detectors)))
        )

    def __setattr__(self, name, value):
        raise AttributeError("DetectorTuple is immutable")

    @property
    def k(self) -> int:
        return len(self.detectors)

    @property
    def has_repeats(self) -> bool:
        return len(self.multiplicity) < len(self.detectors)

    def mirrored(self, num_modes: int) -> "DetectorTuple":
        return DetectorTuple(num_modes + 1 - d for d in self.detectors)

    def __iter__(self):
        return iter(self.detectors)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DetectorTuple):
            return NotImplemented
        return self.detectors == other.detectors

    def __hash__(self) -> int:
        return hash(self.detectors)

    def __repr__(self) -> str:
        return f"DetectorTuple{self.detectors!r}"


@dataclass(frozen=True)
class CorrelationValue:
    """Exact correlation result.

    ``raw`` is the normally ordered expectation.  ``interpretation`` is
    ``raw`` divided by the product of multiplicity factorials and is only
    present for tuples with repeated detectors.
    """

    raw: Fraction
    interpretation: Fraction | None = None

    @property
    def as_float(self) -> float:
        return float(self.raw)


_ZERO_PLAIN = CorrelationValue(Fraction(0))
_ZERO_REPEATED = CorrelationValue(Fraction(0), Fraction(0))


def _falling(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


def _as_tuple(detectors) -> DetectorTuple:
    return detectors if isinstance(detectors, DetectorTuple) else DetectorTuple(detectors)


def _check_range(tup: DetectorTuple, expansion: StateExpansion) -> None:
    if tup.detectors[-1] > expansion.num_modes:
        raise InvalidArgumentError(
            f"detector {tup.detectors[-1]} out of range 1..{expansion.num_modes}"
        )


def _value(raw_weight: int, expansion: StateExpansion, mu: Mapping[int, int]) -> CorrelationValue:
    raw = Fraction(raw_weight, expansion.denominator)
    repeats = any(m > 1 for m in mu.values())
    if not repeats:
        return CorrelationValue(raw)
    return CorrelationValue(raw, raw / prod(factorial(m) for m in mu.values()))


def gk(expansion: StateExpansion, detectors) -> CorrelationValue:
    """k-fold correlation at an arbitrary detector multiset.

    Tuples longer than the photon number are allowed and give exactly 0.
    """
    tup = _as_tuple(detectors)
    _check_range(tup, expansion)
    acc = 0
    mu_items = tuple(tup.multiplicity.items())
    for fock, term in expansion.terms.items():
        f = 1
        for d, mu in mu_items:
            s = fock[d - 1]
            if s < mu:
                f = 0
                break
            f *= _falling(s, mu)
        if f:
            acc += term.weight * f
    return _value(acc, expansion, tup.multiplicity)


def onefold_distribution(expansion: StateExpansion) -> list[CorrelationValue]:
    """Mean photon number at each detector; sums to the photon total."""
    acc = [0] * expansion.num_modes
    for fock, term in expansion.terms.items():
        for d, s in enumerate(fock):
            if s:
                acc[d] += term.weight * s
    return [
        CorrelationValue(Fraction(w, expansion.denominator)) for w in acc
    ]


def twofold_matrix(expansion: StateExpansion) -> list[list[CorrelationValue]]:
    """Full 2L x 2L twofold correlation matrix, symmetric by construction.

    Entry ``[m-1][n-1]`` equals ``gk(expansion, {m, n})``; symmetric
    entries share one value object.
    """
    n_modes = expansion.num_modes
    acc: dict[tuple[int, int], int] = {}
    for fock, term in expansion.terms.items():
        support = [(d, s) for d, s in enumerate(fock) if s]
        w = term.weight
        for i, (d1, s1) in enumerate(support):
            if s1 >= 2:
                acc[(d1, d1)] = acc.get((d1, d1), 0) + w * s1 * (s1 - 1)
            for d2, s2 in support[i + 1:]:
                acc[(d1, d2)] = acc.get((d1, d2), 0) + w * s1 * s2
    matrix = [[_ZERO_PLAIN] * n_modes for _ in range(n_modes)]
    for m in range(n_modes):
        matrix[m][m] = _ZERO_REPEATED
    for (d1, d2), weight in acc.items():
        raw = Fraction(weight, expansion.denominator)
        if d1 == d2:
            matrix[d1][d1] = CorrelationValue(raw, raw / 2)
        else:
            value = CorrelationValue(raw)
            matrix[d1][d2] = value
            matrix[d2][d1] = value
    return matrix


def threefold_cube(expansion: StateExpansion) -> list[list[list[CorrelationValue]]]:
    """Full 2L x 2L x 2L threefold correlation array.

    All six index orders of a detector triple share one value object, so
    the permutation symmetry holds by construction.
    """
    n_modes = expansion.num_modes
    acc: dict[tuple[int, int, int], int] = {}
    for fock, term in expansion.terms.items():
        support = [d for d, s in enumerate(fock) if s]
        w = term.weight
        for combo in combinations_with_replacement(support, 3):
            f = 1
            for d, mu in Counter(combo).items():
                s = fock[d]
                if s < mu:
                    f = 0
                    break
                f *= _falling(s, mu)
            if f:
                acc[combo] = acc.get(combo, 0) + w * f
    cube = [
        [[_ZERO_PLAIN] * n_modes for _ in range(n_modes)] for _ in range(n_modes)
    ]
    for combo in combinations_with_replacement(range(n_modes), 3):
        weight = acc.get(combo, 0)
        mu = Counter(combo)
        if weight == 0:
            value = _ZERO_PLAIN if len(mu) == 3 else _ZERO_REPEATED
        else:
            raw = Fraction(weight, expansion.denominator)
            if len(mu) == 3:
                value = CorrelationValue(raw)
            else:
                value = CorrelationValue(
                    raw, raw / prod(factorial(m) for m in mu.values())
                )
        for m, n, l in set(permutations(combo)):
            cube[m][n][l] = value
    return cube


def joint_number_distribution(
    expansion: StateExpansion, m: int, n: int
) -> list[list[Fraction]]:
    """Number-resolving joint distribution of two distinct detectors.

    ``P[i][j]`` is the exact probability that detector ``m`` receives
    exactly ``i`` photons while detector ``n`` receives exactly ``j``.
    """
    for name, d in (("m", m), ("n", n)):
        if isinstance(d, bool) or not isinstance(d, int) or not 1 <= d <= expansion.num_modes:
            raise InvalidArgumentError(
                f"{name} must be a detector index in 1..{expansion.num_modes}, got {d!r}"
            )
    if m == n:
        raise InvalidArgumentError(
            "detectors must differ; use the single-detector marginal for m = n"
        )
    size = expansion.total_photons + 1
    table = [[Fraction(0)] * size for _ in range(size)]
    for fock, term in expansion.terms.items():
        table[fock[m - 1]][fock[n - 1]] += Fraction(term.weight, expansion.denominator)
    return table


def zero_set(
    expansion: StateExpansion,
    k: int,
    *,
    allow_large: bool = False,
) -> list[DetectorTuple]:
    """All k-tuples whose correlation is exactly zero.

    A tuple is nonzero exactly when some stored term dominates its
    multiplicities, so the scan never evaluates a falling factorial.
    Orders above 3 are refused unless ``allow_large`` is set.
    """
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise InvalidArgumentError(f"k must be a positive int, got {k!r}")
    if k > DEFAULT_MAX_ZERO_SET_ORDER and not allow_large:
        raise InvalidArgumentError(
            f"k = {k} above the default cap of {DEFAULT_MAX_ZERO_SET_ORDER}; "
            "pass allow_large to scan higher orders"
        )
    nonzero: set[tuple[int, ...]] = set()
    for fock in expansion.terms:
        support = [d + 1 for d, s in enumerate(fock) if s]
        for combo in combinations_with_replacement(support, k):
            if combo in nonzero:
                continue
            if all(fock[d - 1] >= mu for d, mu in Counter(combo).items()):
                nonzero.add(combo)
    return [
        DetectorTuple(combo)
        for combo in combinations_with_replacement(range(1, expansion.num_modes + 1), k)
        if combo not in nonzero
    ]
