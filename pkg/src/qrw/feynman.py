"""Path enumeration, coincidence diagrams, and brute-force oracles.

A single photon walking ``L`` levels makes ``L`` reflect-or-transmit
choices, so there are exactly ``2**L`` routes, each with amplitude
``i**r / sqrt(2)**L`` where ``r`` counts reflections.  Summing route
amplitudes per detector must reproduce the recursively propagated
transfer column; that cross-check, together with :func:`dense_simulate`
(which pushes the full multiphoton operator polynomial through every
splitter one at a time), is the package's independent route for
validating the fast column expansion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from math import comb, factorial, prod

from .correlation import DetectorTuple
from .errors import InternalDefectError, InvalidArgumentError, ResourceBoundError
from .lattice import (
    SIDES,
    VACUUM,
    HalfPowerAmplitude,
    Network,
    Side,
    TransferMatrix,
    ZERO,
)
from .state import FockVector, StateExpansion, Term

DEFAULT_MAX_PATH_LEVEL = 16
DEFAULT_MAX_DIAGRAM_STEPS = 40
DEFAULT_DENSE_MAX_PHOTONS = 4
DEFAULT_DENSE_MAX_LEVEL = 6

REFLECT_STEP = "reflect"
TRANSMIT_STEP = "transmit"

_I_POWERS = ((1, 0), (0, 1), (-1, 0), (0, -1))


@dataclass(frozen=True)
class PathRecord:
    """One single-photon route: an injection side plus L step choices."""

    input_side: Side
    steps: tuple[str, ...]
    reflections: int
    terminal_detector: int

    @property
    def amplitude(self) -> HalfPowerAmplitude:
        re, im = _I_POWERS[self.reflections % 4]
        return HalfPowerAmplitude(re, im, len(self.steps))

    def steps_string(self) -> str:
        return "".join("R" if s == REFLECT_STEP else "T" for s in self.steps)


@dataclass(frozen=True)
class DiagramSet:
    """Post-selected joint routes onto a fixed detector tuple.

    Each assignment gives every photon one route; the terminal multiset
    of every assignment equals ``detectors``.  Joint amplitudes are the
    per-assignment products, kept unsummed so individual interference
    contributions stay visible.
    """

    detectors: DetectorTuple
    assignments: tuple[tuple[PathRecord, ...], ...]
    joint_amplitudes: tuple[HalfPowerAmplitude, ...]

    def total_amplitude(self) -> HalfPowerAmplitude:
        total = ZERO
        for amp in self.joint_amplitudes:
            total = total + amp
        return total

    def __len__(self) -> int:
        return len(self.assignments)


def _downstream_map(network: Network) -> dict[tuple[int, int, Side], tuple[int, int, Side]]:
    # Invert the wiring: which next-level slot does each output port feed.
    feeds = {}
    for (level, index, slot), feed in network.wiring.items():
        if feed[0] == "source":
            feeds[feed[1:]] = (level, index, slot)
    return feeds


def _detector_of(network: Network) -> dict[tuple[int, Side], int]:
    return {port: k + 1 for k, port in enumerate(network.output_ports)}


def enumerate_paths(
    network: Network,
    input_side: Side,
    *,
    max_level: int = DEFAULT_MAX_PATH_LEVEL,
) -> list[PathRecord]:
    """All ``2**L`` single-photon routes for one injection side."""
    if input_side not in SIDES:
        raise InvalidArgumentError(f"input_side must be 'left' or 'right', got {input_side!r}")
    level = network.level_count
    if level > max_level:
        raise ResourceBoundError(
            f"enumerating {level} levels means 2^{level} = {2 ** level} paths, "
            f"above the cap of 2^{max_level}"
        )
    feeds = _downstream_map(network)
    detector_of = _detector_of(network)
    records = []
    for steps in product((REFLECT_STEP, TRANSMIT_STEP), repeat=level):
        bs, slot = (1, 1), input_side
        out_side = slot
        for depth, step in enumerate(steps, start=1):
            if step == REFLECT_STEP:
                out_side = slot
            else:
                out_side = "right" if slot == "left" else "left"
            if depth < level:
                nxt = feeds[(depth, bs[1], out_side)]
                bs = (nxt[0], nxt[1])
                slot = nxt[2]
        records.append(
            PathRecord(
                input_side=input_side,
                steps=steps,
                reflections=sum(1 for s in steps if s == REFLECT_STEP),
                terminal_detector=detector_of[(bs[1], out_side)],
            )
        )
    return records


def endpoint_amplitude(
    network: Network, input_side: Side, detector: int
) -> HalfPowerAmplitude:
    """Sum of route amplitudes ending at one detector.

    Must equal the corresponding transfer-matrix entry exactly; the two
    computations share nothing but the wiring.
    """
    if not 1 <= detector <= network.detector_count:
        raise InvalidArgumentError(
            f"detector must be in 1..{network.detector_count}, got {detector}"
        )
    total = ZERO
    for path in enumerate_paths(network, input_side):
        if path.terminal_detector == detector:
            total = total + path.amplitude
    return total


def diagrams_for(
    network: Network,
    photons,
    detectors,
    *,
    max_steps: int = DEFAULT_MAX_DIAGRAM_STEPS,
) -> DiagramSet:
    """All joint route assignments of the photons onto a detector tuple.

    ``photons`` lists each photon's injection side; one route per photon,
    and only assignments whose terminal multiset equals the tuple are
    kept.  Amplitudes of simultaneous routes multiply.
    """
    sides = tuple(photons)
    for side in sides:
        if side not in SIDES:
            raise InvalidArgumentError(f"photon sides must be 'left' or 'right', got {side!r}")
    tup = detectors if isinstance(detectors, DetectorTuple) else DetectorTuple(detectors)
    if tup.detectors[-1] > network.detector_count:
        raise InvalidArgumentError(
            f"detector {tup.detectors[-1]} out of range 1..{network.detector_count}"
        )
    if len(sides) != tup.k:
        raise InvalidArgumentError(
            f"standard diagrams need one photon per detector slot: "
            f"{len(sides)} photons vs tuple of {tup.k}"
        )
    level = network.level_count
    if tup.k * level > max_steps:
        raise ResourceBoundError(
            f"{tup.k} photons over {level} levels would enumerate "
            f"2^{tup.k * level} joint routes, above the cap of 2^{max_steps}"
        )
    by_side: dict[Side, dict[int, list[PathRecord]]] = {}
    for side in set(sides):
        grouped: dict[int, list[PathRecord]] = {}
        for path in enumerate_paths(network, side, max_level=level):
            grouped.setdefault(path.terminal_detector, []).append(path)
        by_side[side] = grouped

    assignments = []
    joint = []
    for ordering in sorted(set(permutations(tup.detectors))):
        buckets = [
            by_side[side].get(det, []) for side, det in zip(sides, ordering)
        ]
        for combo in product(*buckets):
            amp = combo[0].amplitude
            for path in combo[1:]:
                amp = amp * path.amplitude
            assignments.append(tuple(combo))
            joint.append(amp)
    return DiagramSet(
        detectors=tup,
        assignments=tuple(assignments),
        joint_amplitudes=tuple(joint),
    )


def simplified_feynman(
    transfer: TransferMatrix,
    photons_left: int,
    photons_right: int,
    detectors,
) -> Fraction:
    """Coincidence probability by the restricted multinomial shortcut.

    Keeps only the tuple's detectors in each single-photon column, raises
    the two truncated sums to the photon powers, and reads off the
    coefficient of the monomial matching the tuple's multiplicities.
    Returns the exact probability of that outcome; it vanishes whenever
    the tuple size differs from the photon total.
    """
    for name, value in (("photons_left", photons_left), ("photons_right", photons_right)):
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise InvalidArgumentError(f"{name} must be a non-negative int, got {value!r}")
    if photons_left + photons_right < 1:
        raise InvalidArgumentError("at least one photon is required")
    tup = detectors if isinstance(detectors, DetectorTuple) else DetectorTuple(detectors)
    if tup.detectors[-1] > transfer.detector_count:
        raise InvalidArgumentError(
            f"detector {tup.detectors[-1]} out of range 1..{transfer.detector_count}"
        )
    if tup.k > photons_left + photons_right:
        raise InvalidArgumentError(
            f"tuple of {tup.k} detectors exceeds the {photons_left + photons_right} photons"
        )
    support = tuple(tup.multiplicity)
    mu = tup.multiplicity
    level = transfer.level_count

    coefficient = ZERO
    # Split the tuple's occupancy between the two columns in every way
    # compatible with the photon counts; multinomial weights included.
    for split in product(*(range(mu[d] + 1) for d in support)):
        if sum(split) != photons_left:
            continue
        amp = HalfPowerAmplitude(
            _multinomial(photons_left, split)
            * _multinomial(photons_right, tuple(mu[d] - s for d, s in zip(support, split)))
        )
        for d, from_left in zip(support, split):
            u = transfer.left_column[d - 1]
            v = transfer.right_column[d - 1]
            for _ in range(from_left):
                amp = amp * u
            for _ in range(mu[d] - from_left):
                amp = amp * v
        coefficient = coefficient + amp
    occupancy_factorials = prod(factorial(m) for m in mu.values())
    norm = Fraction(
        occupancy_factorials,
        factorial(photons_left) * factorial(photons_right),
    )
    return coefficient.abs_squared() * norm


def _multinomial(total: int, parts) -> int:
    if sum(parts) != total:
        return 0
    out = factorial(total)
    for p in parts:
        out //= factorial(p)
    return out


def dense_simulate(
    network: Network,
    photons_left: int,
    photons_right: int,
    *,
    max_photons: int = DEFAULT_DENSE_MAX_PHOTONS,
    max_level: int = DEFAULT_DENSE_MAX_LEVEL,
) -> StateExpansion:
    """Oracle expansion: push the full operator polynomial splitter by splitter.

    Tracks every cross term of the ``(N+M)``-photon creation polynomial
    through each splitter in topological order, with no use of the
    single-photon column shortcut.  Deliberately small-scale; it exists
    to certify :func:`qrw.state.expand` exactly.
    """
    for name, value in (("photons_left", photons_left), ("photons_right", photons_right)):
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise InvalidArgumentError(f"{name} must be a non-negative int, got {value!r}")
    total = photons_left + photons_right
    if total < 1:
        raise InvalidArgumentError("at least one photon is required")
    if total > max_photons:
        raise ResourceBoundError(
            f"dense oracle caps at {max_photons} photons, requested {total}"
        )
    level = network.level_count
    if level > max_level:
        raise ResourceBoundError(
            f"dense oracle caps at {max_level} levels, requested {level}"
        )

    # Polynomial over creation operators: monomial -> Gaussian coefficient.
    # Monomials are sorted tuples of (mode key, exponent); mode keys are
    # ("in", side) for the injection ports and (level, index, side) for
    # splitter output ports.  A uniform 1/sqrt(2)**(L*total) is implied.
    start = []
    if photons_left:
        start.append((("in", "left"), photons_left))
    if photons_right:
        start.append((("in", "right"), photons_right))
    poly: dict[tuple, tuple[int, int]] = {tuple(start): (1, 0)}

    for lvl in range(1, level + 1):
        for index in range(1, lvl + 1):
            left_feed = network.wiring[(lvl, index, "left")]
            right_feed = network.wiring[(lvl, index, "right")]
            left_mode = None if left_feed == VACUUM else (
                ("in", left_feed[1]) if left_feed[0] == "input" else left_feed[1:]
            )
            right_mode = None if right_feed == VACUUM else (
                ("in", right_feed[1]) if right_feed[0] == "input" else right_feed[1:]
            )
            out_left = (lvl, index, "left")
            out_right = (lvl, index, "right")
            next_poly: dict[tuple, tuple[int, int]] = {}
            for monomial, coeff in poly.items():
                e_left = e_right = 0
                rest = []
                for mode, exp in monomial:
                    if mode == left_mode:
                        e_left = exp
                    elif mode == right_mode:
                        e_right = exp
                    else:
                        rest.append((mode, exp))
                if e_left == 0 and e_right == 0:
                    _accumulate(next_poly, tuple(monomial), coeff)
                    continue
                # left input -> (i*leftout + rightout), right -> (leftout + i*rightout)
                for j in range(e_left + 1):
                    for k in range(e_right + 1):
                        x = j + k
                        y = (e_left - j) + (e_right - k)
                        scale = comb(e_left, j) * comb(e_right, k)
                        rot = _I_POWERS[(j + (e_right - k)) % 4]
                        g = (coeff[0] * scale, coeff[1] * scale)
                        g = (
                            g[0] * rot[0] - g[1] * rot[1],
                            g[0] * rot[1] + g[1] * rot[0],
                        )
                        items = list(rest)
                        if x:
                            items.append((out_left, x))
                        if y:
                            items.append((out_right, y))
                        _accumulate(next_poly, tuple(sorted(items, key=_mode_order)), g)
            poly = {m: c for m, c in next_poly.items() if c != (0, 0)}

    detector_of = _detector_of(network)
    terms: dict[FockVector, Term] = {}
    for monomial, (g_re, g_im) in poly.items():
        occ = [0] * network.detector_count
        for mode, exp in monomial:
            if len(mode) != 3 or mode[0] != level:
                raise InternalDefectError(
                    f"unpropagated mode {mode!r} remains after level {level}"
                )
            occ[detector_of[(mode[1], mode[2])] - 1] = exp
        weight = prod(factorial(n) for n in occ) * (g_re * g_re + g_im * g_im)
        terms[FockVector(occ)] = Term(g_re, g_im, weight)
    return StateExpansion(level, (photons_left, photons_right), terms)


def _mode_order(item):
    mode, _ = item
    # Injection modes sort ahead of (level, index, side) output modes.
    return (0, mode) if mode[0] == "in" else (1, mode)


def _accumulate(poly: dict, monomial: tuple, coeff: tuple[int, int]) -> None:
    prev = poly.get(monomial)
    poly[monomial] = coeff if prev is None else (prev[0] + coeff[0], prev[1] + coeff[1])


def total_path_count(level_count: int, photons_left: int, photons_right: int) -> int:
    """Exact number of joint photon routes: ``2**(L*(N+M))``."""
    for name, value in (
        ("level_count", level_count),
        ("photons_left", photons_left),
        ("photons_right", photons_right),
    ):
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise InvalidArgumentError(f"{name} must be a non-negative int, got {value!r}")
    return 1 << (level_count * (photons_left + photons_right))


def pair_path_count(level: int, pair_index: int) -> int:
    """Single-photon routes into the splitter feeding one detector pair.

    Detector pairs share a final splitter; routes into splitter ``j`` of
    level ``l`` follow the binomial recurrence, so edge pairs always have
    exactly one route and interior ("central") pairs have several.
    """
    if isinstance(level, bool) or not isinstance(level, int) or level < 1:
        raise InvalidArgumentError(f"level must be a positive int, got {level!r}")
    if isinstance(pair_index, bool) or not isinstance(pair_index, int) or not 1 <= pair_index <= level:
        raise InvalidArgumentError(
            f"pair_index must be within 1..{level}, got {pair_index!r}"
        )
    return comb(level - 1, pair_index - 1)
