"""Exact expansion of a two-mode Fock input over the pyramid's detectors.

A ``|N,M>`` input is expanded by raising the two propagated single-photon
columns to the powers ``N`` and ``M`` and collecting like creation-operator
monomials, instead of pushing the full multiphoton product through every
splitter.  Each collected term keeps its Gaussian-integer coefficient, so
every probability is an exact rational and destructive-interference zeros
are exact, never a tolerance call.

For a term with occupations ``s`` the probability is

    (prod_k s_k!) * |coefficient|^2 / (N! * M! * 2**(L*(N+M)))

where the coefficient is the Gaussian integer accumulated over all ways of
splitting ``s`` between the two columns, multinomial weights included.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, factorial, prod
from types import MappingProxyType
from typing import Iterator, Mapping, NamedTuple

from .errors import InternalDefectError, InvalidArgumentError, ResourceBoundError
from .lattice import TransferMatrix

DEFAULT_MAX_PHOTONS = 6
DEFAULT_MAX_TERMS = 2_000_000


class FockVector(tuple):
    """Occupation numbers over the 2L detector modes.

    A plain tuple subclass: hashable, lexicographically ordered, immutable.
    """

    def __new__(cls, occupations) -> "FockVector":
        occ = tuple(occupations)
        for n in occ:
            if isinstance(n, bool) or not isinstance(n, int) or n < 0:
                raise InvalidArgumentError(
                    f"occupations must be non-negative ints, got {n!r}"
                )
        return super().__new__(cls, occ)

    @property
    def total(self) -> int:
        return sum(self)

    def reversed_(self) -> "FockVector":
        return FockVector(self[::-1])

    def __repr__(self) -> str:
        return f"FockVector{tuple(self)!r}"


class Term(NamedTuple):
    """One nonzero expansion term: Gaussian coefficient and its weight.

    ``weight`` is ``prod(s_k!) * (g_re**2 + g_im**2)``; dividing it by the
    expansion denominator gives the term's probability.
    """

    g_re: int
    g_im: int
    weight: int


class StateExpansion:
    """Full output superposition of an ``|N,M>`` input after ``L`` levels.

    Terms with an exactly-zero coefficient are not stored; absence of a
    valid occupation key means its probability is exactly zero.
    """

    def __init__(
        self,
        level_count: int,
        photons: tuple[int, int],
        terms: dict[FockVector, Term],
    ):
        self.level_count = level_count
        self.photons = photons
        total = photons[0] + photons[1]
        self.total_photons = total
        self.num_modes = 2 * level_count
        self.denominator = (
            factorial(photons[0]) * factorial(photons[1]) * (1 << (level_count * total))
        )
        for fock in terms:
            if len(fock) != self.num_modes or fock.total != total:
                raise InternalDefectError(f"malformed term key {fock!r}")
        self._terms = terms

    @property
    def terms(self) -> Mapping[FockVector, Term]:
        return MappingProxyType(self._terms)

    def _validate_key(self, fock) -> FockVector:
        key = fock if isinstance(fock, FockVector) else FockVector(fock)
        if len(key) != self.num_modes:
            raise InvalidArgumentError(
                f"occupation vector must have {self.num_modes} modes, got {len(key)}"
            )
        if key.total != self.total_photons:
            raise InvalidArgumentError(
                f"occupation total must be {self.total_photons}, got {key.total}"
            )
        return key

    def probability(self, fock) -> Fraction:
        """Exact probability of one outcome; zero for absent valid keys."""
        key = self._validate_key(fock)
        term = self._terms.get(key)
        if term is None:
            return Fraction(0)
        return Fraction(term.weight, self.denominator)

    def coefficient(self, fock) -> tuple[int, int]:
        """Gaussian-integer coefficient of one outcome (over the implicit
        ``sqrt(N! M!) * sqrt(2)**(L(N+M)) / sqrt(prod s_k!)`` scale)."""
        key = self._validate_key(fock)
        term = self._terms.get(key)
        return (0, 0) if term is None else (term.g_re, term.g_im)

    def amplitude_sq_components(self, fock) -> tuple[Fraction, Fraction]:
        """Exact ``|Re amplitude|**2`` and ``|Im amplitude|**2`` of one outcome."""
        key = self._validate_key(fock)
        term = self._terms.get(key)
        if term is None:
            return (Fraction(0), Fraction(0))
        occ_factorial = prod(factorial(n) for n in key)
        return (
            Fraction(occ_factorial * term.g_re * term.g_re, self.denominator),
            Fraction(occ_factorial * term.g_im * term.g_im, self.denominator),
        )

    def probabilities(self) -> dict[FockVector, Fraction]:
        """Stored outcomes and their probabilities, lexicographic key order."""
        return {
            key: Fraction(self._terms[key].weight, self.denominator)
            for key in sorted(self._terms)
        }

    def sorted_terms(self) -> Iterator[tuple[FockVector, Term]]:
        for key in sorted(self._terms):
            yield key, self._terms[key]

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateExpansion):
            return NotImplemented
        return (
            self.level_count == other.level_count
            and self.photons == other.photons
            and self._terms == other._terms
        )

    def __repr__(self) -> str:
        return (
            f"StateExpansion(L={self.level_count}, photons={self.photons}, "
            f"{len(self._terms)} terms)"
        )


def _gmul(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gpow(g: tuple[int, int], n: int) -> tuple[int, int]:
    out = (1, 0)
    for _ in range(n):
        out = _gmul(out, g)
    return out


def _column_pairs(column, level_count: int) -> list[tuple[int, int]]:
    # Rescale every entry to the common denominator sqrt(2)**L.
    return [a.numerator_at(level_count) for a in column]


def _weighted_multisets(
    pairs: list[tuple[int, int]], count: int, num_modes: int
) -> Iterator[tuple[tuple[int, ...], tuple[int, int]]]:
    """All ``count``-photon placements over one column's nonzero modes.

    Yields (occupation tuple, coefficient) with the multinomial weight
    ``count! / prod(multiplicities!)`` already folded into the Gaussian
    coefficient.
    """
    if count == 0:
        yield (0,) * num_modes, (1, 0)
        return
    support = [k for k, g in enumerate(pairs) if g != (0, 0)]
    for combo in combinations_with_replacement(support, count):
        mult = Counter(combo)
        weight = factorial(count)
        g = (1, 0)
        occ = [0] * num_modes
        for mode, e in mult.items():
            weight //= factorial(e)
            g = _gmul(g, _gpow(pairs[mode], e))
            occ[mode] = e
        yield tuple(occ), (weight * g[0], weight * g[1])


def expand(
    transfer: TransferMatrix,
    photons_left: int,
    photons_right: int,
    *,
    max_photons: int = DEFAULT_MAX_PHOTONS,
    max_terms: int | None = DEFAULT_MAX_TERMS,
) -> StateExpansion:
    """Expand ``|photons_left, photons_right>`` through the transfer matrix.

    Raises ResourceBoundError, quoting the multiset-count estimate, when
    the requested expansion exceeds the configured caps.
    """
    for name, value in (("photons_left", photons_left), ("photons_right", photons_right)):
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise InvalidArgumentError(f"{name} must be a non-negative int, got {value!r}")
    total = photons_left + photons_right
    if total < 1:
        raise InvalidArgumentError("at least one photon is required")
    num_modes = transfer.detector_count
    estimate = comb(total + num_modes - 1, total)
    if total > max_photons:
        raise ResourceBoundError(
            f"{total} photons exceed the cap of {max_photons}; the expansion "
            f"would touch up to {estimate} Fock terms"
        )
    if max_terms is not None and estimate > max_terms:
        raise ResourceBoundError(
            f"expansion could produce {estimate} Fock terms, above the cap of {max_terms}"
        )

    level = transfer.level_count
    left_pairs = _column_pairs(transfer.left_column, level)
    right_pairs = _column_pairs(transfer.right_column, level)
    left_parts = list(_weighted_multisets(left_pairs, photons_left, num_modes))
    right_parts = list(_weighted_multisets(right_pairs, photons_right, num_modes))

    acc: dict[tuple[int, ...], tuple[int, int]] = {}
    for occ_l, g_l in left_parts:
        for occ_r, g_r in right_parts:
            occ = tuple(a + b for a, b in zip(occ_l, occ_r))
            g = _gmul(g_l, g_r)
            prev = acc.get(occ)
            acc[occ] = g if prev is None else (prev[0] + g[0], prev[1] + g[1])

    terms: dict[FockVector, Term] = {}
    for occ, (g_re, g_im) in acc.items():
        if g_re == 0 and g_im == 0:
            continue
        weight = prod(factorial(n) for n in occ) * (g_re * g_re + g_im * g_im)
        terms[FockVector(occ)] = Term(g_re, g_im, weight)

    expansion = StateExpansion(level, (photons_left, photons_right), terms)
    total_weight = sum(t.weight for t in terms.values())
    if total_weight != expansion.denominator:
        raise InternalDefectError(
            f"probabilities sum to {total_weight}/{expansion.denominator}, expected 1"
        )
    return expansion


def mirror(expansion: StateExpansion) -> StateExpansion:
    """Left-right flip: reverses every occupation vector and swaps the
    input photon counts.  Exactly equal to expanding the swapped input."""
    flipped = {
        key.reversed_(): term for key, term in expansion.terms.items()
    }
    return StateExpansion(
        expansion.level_count,
        (expansion.photons[1], expansion.photons[0]),
        flipped,
    )
