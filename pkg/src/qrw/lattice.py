"""Beam-splitter pyramid geometry and exact single-photon propagation.

The network is a staggered pyramid of symmetric 50/50 beam splitters:
level ``l`` holds ``l`` splitters, and a photon injected into the single
splitter at level 1 cascades down to ``2L`` detectors below level ``L``.
Detectors are numbered 1..2L left to right; splitter ``j`` of the final
level feeds detectors ``2j-1`` (its left output) and ``2j`` (its right
output).

Conventions, fixed project-wide:

* reflection keeps the photon on the same side of a splitter and
  multiplies the amplitude by ``i/sqrt(2)``;
* transmission crosses to the other side and multiplies by ``1/sqrt(2)``.

Every amplitude in the system is therefore a Gaussian integer divided by
a power of ``sqrt(2)``, which :class:`HalfPowerAmplitude` represents
exactly.  No floating point enters any computation; floats exist only
for presentation (:meth:`HalfPowerAmplitude.to_complex`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

from .errors import InternalDefectError, InvalidArgumentError

DEFAULT_MAX_LEVEL = 24

Side = str  # "left" | "right"
SIDES = ("left", "right")

VACUUM = ("vacuum",)


def _as_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{name} must be an int, got {type(value).__name__}")
    return value


class HalfPowerAmplitude:
    """Exact complex amplitude ``(re + im*i) / sqrt(2)**half_exp``.

    ``re`` and ``im`` are arbitrary-precision integers, ``half_exp`` a
    non-negative count of half powers of two in the denominator.  Values
    are kept canonical: while both parts are even and ``half_exp >= 2``
    the triple is reduced by one full power of two, and the exact zero is
    always stored as ``(0, 0, 0)``.  Equality and hashing follow the
    canonical form.

    Instances are immutable.  Addition requires the two operands'
    ``half_exp`` to share parity, otherwise the sum leaves the ring the
    type represents; in a pyramid this never happens because amplitudes
    meeting at a splitter have traversed the same number of splitters.
    """

    __slots__ = ("re", "im", "half_exp")

    def __init__(self, re: int, im: int = 0, half_exp: int = 0):
        re = _as_int(re, "re")
        im = _as_int(im, "im")
        half_exp = _as_int(half_exp, "half_exp")
        if half_exp < 0:
            raise ValueError(f"half_exp must be non-negative, got {half_exp}")
        while half_exp >= 2 and re % 2 == 0 and im % 2 == 0:
            re //= 2
            im //= 2
            half_exp -= 2
        if re == 0 and im == 0:
            half_exp = 0
        self.re = re
        self.im = im
        self.half_exp = half_exp

    # -- algebra ---------------------------------------------------------

    def __add__(self, other: "HalfPowerAmplitude") -> "HalfPowerAmplitude":
        if not isinstance(other, HalfPowerAmplitude):
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if (self.half_exp - other.half_exp) % 2 != 0:
            raise ValueError(
                "cannot add amplitudes whose half_exp parities differ "
                f"({self.half_exp} vs {other.half_exp})"
            )
        h = max(self.half_exp, other.half_exp)
        ar, ai = self.numerator_at(h)
        br, bi = other.numerator_at(h)
        return HalfPowerAmplitude(ar + br, ai + bi, h)

    def __neg__(self) -> "HalfPowerAmplitude":
        return HalfPowerAmplitude(-self.re, -self.im, self.half_exp)

    def __sub__(self, other: "HalfPowerAmplitude") -> "HalfPowerAmplitude":
        if not isinstance(other, HalfPowerAmplitude):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: "HalfPowerAmplitude") -> "HalfPowerAmplitude":
        if not isinstance(other, HalfPowerAmplitude):
            return NotImplemented
        return HalfPowerAmplitude(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
            self.half_exp + other.half_exp,
        )

    def scaled(self, factor: int) -> "HalfPowerAmplitude":
        """Multiply by an ordinary integer."""
        factor = _as_int(factor, "factor")
        return HalfPowerAmplitude(self.re * factor, self.im * factor, self.half_exp)

    def times_i(self) -> "HalfPowerAmplitude":
        return HalfPowerAmplitude(-self.im, self.re, self.half_exp)

    def conjugate(self) -> "HalfPowerAmplitude":
        return HalfPowerAmplitude(self.re, -self.im, self.half_exp)

    def numerator_at(self, half_exp: int) -> tuple[int, int]:
        """Gaussian-integer numerator when written over ``sqrt(2)**half_exp``."""
        if self.is_zero:
            return (0, 0)
        diff = half_exp - self.half_exp
        if diff < 0 or diff % 2 != 0:
            raise ValueError(
                f"cannot rescale half_exp {self.half_exp} to {half_exp}"
            )
        f = 1 << (diff // 2)
        return (self.re * f, self.im * f)

    # -- queries ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def abs_squared(self) -> Fraction:
        """Exact squared modulus ``(re**2 + im**2) / 2**half_exp``."""
        return Fraction(self.re * self.re + self.im * self.im, 1 << self.half_exp)

    def to_complex(self) -> complex:
        """Float rendering for presentation; never used internally."""
        scale = 2.0 ** (-self.half_exp / 2.0)
        return complex(self.re * scale, self.im * scale)

    def exact_str(self) -> str:
        """Render like ``(-1+0i)/2^3`` (or ``/2^(3/2)`` for odd exponents)."""
        sign = "+" if self.im >= 0 else "-"
        num = f"({self.re}{sign}{abs(self.im)}i)"
        if self.half_exp == 0:
            return num
        if self.half_exp % 2 == 0:
            return f"{num}/2^{self.half_exp // 2}"
        return f"{num}/2^({self.half_exp}/2)"

    def __eq__(self, other) -> bool:
        if not isinstance(other, HalfPowerAmplitude):
            return NotImplemented
        return (
            self.re == other.re
            and self.im == other.im
            and self.half_exp == other.half_exp
        )

    def __hash__(self) -> int:
        return hash((self.re, self.im, self.half_exp))

    def __repr__(self) -> str:
        return f"HalfPowerAmplitude({self.re}, {self.im}, {self.half_exp})"


ZERO = HalfPowerAmplitude(0, 0, 0)
ONE = HalfPowerAmplitude(1, 0, 0)
TRANSMIT = HalfPowerAmplitude(1, 0, 1)  # 1/sqrt(2)
REFLECT = HalfPowerAmplitude(0, 1, 1)   # i/sqrt(2)


@dataclass(frozen=True)
class Network:
    """Wiring of a beam-splitter pyramid.

    ``wiring`` maps each splitter input slot ``(level, index, side)`` to
    its feed: ``("source", level-1, index', side')`` for an upstream
    output port, ``("input", side)`` for one of the two photon injection
    ports on the level-1 splitter, or ``("vacuum",)`` for an open edge
    port.  ``output_ports`` lists the final-level ports in detector
    order, so detector ``k`` is ``output_ports[k-1]``.
    """

    level_count: int
    beam_splitters: tuple[tuple[int, int], ...]
    wiring: Mapping[tuple[int, int, Side], tuple]
    output_ports: tuple[tuple[int, Side], ...]

    @property
    def detector_count(self) -> int:
        return 2 * self.level_count


def build_network(level_count: int, *, max_level: int = DEFAULT_MAX_LEVEL) -> Network:
    """Construct the pyramid with ``level_count`` levels.

    Level ``l+1`` splitter ``j`` takes its left input from the right
    output of splitter ``j-1`` above (vacuum for ``j = 1``) and its right
    input from the left output of splitter ``j`` above (vacuum for
    ``j = l+1``).  Deterministic for a given ``level_count``.
    """
    level_count = _as_int(level_count, "level_count")
    if not 1 <= level_count <= max_level:
        raise InvalidArgumentError(
            f"level_count must be within 1..{max_level}, got {level_count}"
        )
    splitters = []
    wiring: dict[tuple[int, int, Side], tuple] = {}
    for level in range(1, level_count + 1):
        for index in range(1, level + 1):
            splitters.append((level, index))
            if level == 1:
                wiring[(1, 1, "left")] = ("input", "left")
                wiring[(1, 1, "right")] = ("input", "right")
                continue
            if index == 1:
                wiring[(level, index, "left")] = VACUUM
            else:
                wiring[(level, index, "left")] = ("source", level - 1, index - 1, "right")
            if index == level:
                wiring[(level, index, "right")] = VACUUM
            else:
                wiring[(level, index, "right")] = ("source", level - 1, index, "left")
    ports = tuple(
        (index, side)
        for index in range(1, level_count + 1)
        for side in SIDES
    )
    return Network(
        level_count=level_count,
        beam_splitters=tuple(splitters),
        wiring=MappingProxyType(wiring),
        output_ports=ports,
    )


def validate_network(network: Network) -> None:
    """Check the structural invariants; raise InternalDefectError on failure."""
    level = network.level_count
    expected = tuple((l, j) for l in range(1, level + 1) for j in range(1, l + 1))
    if network.beam_splitters != expected:
        raise InternalDefectError("beam splitter list does not form a pyramid")
    if len(network.output_ports) != 2 * level:
        raise InternalDefectError("final level must expose 2L output ports")
    inputs = 0
    for (l, j) in expected:
        for side in SIDES:
            feed = network.wiring.get((l, j, side))
            if feed is None:
                raise InternalDefectError(f"missing wiring for {(l, j, side)}")
            if feed[0] == "input":
                inputs += 1
                if l != 1:
                    raise InternalDefectError("injection ports only exist at level 1")
            elif feed[0] == "source":
                _, sl, sj, sside = feed
                if sl != l - 1 or not 1 <= sj <= sl:
                    raise InternalDefectError(f"bad source for {(l, j, side)}: {feed}")
            elif feed != VACUUM:
                raise InternalDefectError(f"unknown feed {feed}")
    if inputs != 2:
        raise InternalDefectError("exactly two non-vacuum external inputs required")
    # Every interior output must feed exactly one next-level slot.
    fed: dict[tuple, int] = {}
    for key, feed in network.wiring.items():
        if feed[0] == "source":
            fed[feed[1:]] = fed.get(feed[1:], 0) + 1
    for l in range(1, level):
        for j in range(1, l + 1):
            for side in SIDES:
                if fed.get((l, j, side), 0) != 1:
                    raise InternalDefectError(
                        f"output port {(l, j, side)} must feed exactly one slot"
                    )


def propagate_single(network: Network, input_side: Side) -> tuple[HalfPowerAmplitude, ...]:
    """Exact detector amplitudes for one photon injected on ``input_side``.

    Applies the splitter substitution level by level: an amplitude on the
    left input adds ``i*a/sqrt(2)`` to the left output and ``a/sqrt(2)``
    to the right output, and mirrored for the right input.
    """
    if input_side not in SIDES:
        raise InvalidArgumentError(f"input_side must be 'left' or 'right', got {input_side!r}")

    def resolve(feed) -> HalfPowerAmplitude:
        if feed == VACUUM:
            return ZERO
        if feed[0] == "input":
            return ONE if feed[1] == input_side else ZERO
        return outputs[feed[1:]]

    outputs: dict[tuple[int, int, Side], HalfPowerAmplitude] = {}
    for level in range(1, network.level_count + 1):
        for index in range(1, level + 1):
            left_in = resolve(network.wiring[(level, index, "left")])
            right_in = resolve(network.wiring[(level, index, "right")])
            outputs[(level, index, "left")] = REFLECT * left_in + TRANSMIT * right_in
            outputs[(level, index, "right")] = TRANSMIT * left_in + REFLECT * right_in
    final = network.level_count
    return tuple(outputs[(final, index, side)] for index, side in network.output_ports)


@dataclass(frozen=True)
class TransferMatrix:
    """Single-photon isometry of the pyramid: one exact amplitude column
    per injection side, indexed by detector (entry ``k-1`` is detector
    ``k``)."""

    level_count: int
    left_column: tuple[HalfPowerAmplitude, ...]
    right_column: tuple[HalfPowerAmplitude, ...]

    @property
    def detector_count(self) -> int:
        return 2 * self.level_count

    def column(self, input_side: Side) -> tuple[HalfPowerAmplitude, ...]:
        if input_side == "left":
            return self.left_column
        if input_side == "right":
            return self.right_column
        raise InvalidArgumentError(f"input_side must be 'left' or 'right', got {input_side!r}")


def transfer_matrix(network: Network) -> TransferMatrix:
    """Propagate both injection sides and package the verified columns."""
    left = propagate_single(network, "left")
    right = propagate_single(network, "right")
    matrix = TransferMatrix(network.level_count, left, right)
    _verify_transfer(matrix)
    return matrix


def _verify_transfer(matrix: TransferMatrix) -> None:
    level = matrix.level_count
    n = matrix.detector_count
    for column in (matrix.left_column, matrix.right_column):
        total = sum((a.abs_squared() for a in column), Fraction(0))
        if total != 1:
            raise InternalDefectError(f"column norm is {total}, expected 1")
        for a in column:
            if a.half_exp > level or (level - a.half_exp) % 2 != 0:
                raise InternalDefectError(
                    f"entry {a!r} cannot come from {level} splitter traversals"
                )
    overlap = ZERO
    for u, v in zip(matrix.left_column, matrix.right_column):
        overlap = overlap + u * v.conjugate()
    if not overlap.is_zero:
        raise InternalDefectError(f"columns are not orthogonal: overlap {overlap!r}")
    for k in range(n):
        if matrix.right_column[k] != matrix.left_column[n - 1 - k]:
            raise InternalDefectError("right column is not the mirrored left column")
