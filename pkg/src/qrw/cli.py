"""Command-line front end.

Subcommands build a pyramid, expand an input state, and emit exact
results as JSON, CSV, or an ASCII heatmap.  Exact rationals are written
as "num/den" decimal strings next to 17-significant-digit floats, so
payloads are portable and byte-identical across runs; provenance (tool
version, timestamp) goes to a ".meta.json" sidecar, never into the data.

Exit codes: 0 success, 2 invalid arguments, 3 resource-bound refusal,
4 oracle mismatch.  Errors print to stderr as "ERR <code>: message".
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from io import StringIO
from math import ceil
from pathlib import Path

from . import __version__
from .correlation import (
    CorrelationValue,
    DetectorTuple,
    gk,
    joint_number_distribution,
    onefold_distribution,
    threefold_cube,
    twofold_matrix,
    zero_set,
)
from .errors import (
    InvalidArgumentError,
    OracleMismatchError,
    ResourceBoundError,
)
from .feynman import (
    DEFAULT_MAX_PATH_LEVEL,
    dense_simulate,
    diagrams_for,
    endpoint_amplitude,
    enumerate_paths,
)
from .lattice import DEFAULT_MAX_LEVEL, build_network, transfer_matrix
from .state import DEFAULT_MAX_PHOTONS, DEFAULT_MAX_TERMS, expand

SCHEMA = "qrw/1"
FORMATS = ("json", "csv", "ascii")
GLYPH_RAMP = "123456789#"


@dataclass
class RunConfig:
    command: str
    level_count: int | None = None
    photons: tuple[int, int] | None = None
    detectors: tuple[int, ...] | None = None
    input_side: str | None = None
    k: int | None = None
    output_format: str = "json"
    output_path: str | None = None
    max_photons: int | None = None
    max_level: int | None = None
    allow_large: bool = False


# ---------------------------------------------------------------------------
# rendering helpers

def _frac(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _f17(value) -> str:
    return f"{float(value):.17g}"


def _leaf(value: CorrelationValue) -> dict:
    return {
        "raw": _frac(value.raw),
        "interp": None if value.interpretation is None else _frac(value.interpretation),
        "float": float(value.raw),
    }


def _raw_of(value) -> Fraction:
    return value.raw if isinstance(value, CorrelationValue) else Fraction(value)


def _glyph(value: Fraction, vmax: Fraction) -> str:
    if value == 0:
        return "."
    bucket = ceil(Fraction(10) * value / vmax)
    return GLYPH_RAMP[min(max(bucket, 1), 10) - 1]


def render_ascii(values) -> str:
    """Fixed-width glyph grid for a 1D distribution or a 2D matrix.

    Ten intensity steps scaled to the largest entry; exact zeros always
    render as '.' so dark ports stay visible.
    """
    if values and isinstance(values[0], (list, tuple)):
        grid = [[_raw_of(v) for v in row] for row in values]
    else:
        grid = [[_raw_of(v) for v in values]]
    vmax = max((cell for row in grid for cell in row), default=Fraction(0))
    cols = len(grid[0]) if grid else 0
    width = max(3, len(str(cols)) + 1)
    lines = ["    " + "".join(f"{c:>{width}}" for c in range(1, cols + 1))]
    labelled = len(grid) > 1
    for r, row in enumerate(grid, start=1):
        cells = "".join(f"{_glyph(v, vmax) if vmax else '.':>{width}}" for v in row)
        lines.append((f"{r:>4}" if labelled else "    ") + cells)
    return "\n".join(lines)


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buffer = StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue().rstrip("\n")


def _json_text(config_echo: dict, values) -> str:
    return json.dumps(
        {"schema": SCHEMA, "config": config_echo, "values": values}, indent=2
    )


# ---------------------------------------------------------------------------
# cap handling

def _cap(requested: int | None, default: int, allow_large: bool, flag: str) -> int:
    if requested is None:
        return default
    if requested > default and not allow_large:
        raise InvalidArgumentError(
            f"{flag} {requested} is above the default cap {default}; "
            "pass --allow-large to confirm"
        )
    return requested


def _network(config: RunConfig):
    cap = _cap(config.max_level, DEFAULT_MAX_LEVEL, config.allow_large, "--max-level")
    return build_network(config.level_count, max_level=cap)


def _expansion(config: RunConfig):
    transfer = transfer_matrix(_network(config))
    photon_cap = _cap(
        config.max_photons, DEFAULT_MAX_PHOTONS, config.allow_large, "--max-photons"
    )
    max_terms = None if config.allow_large else DEFAULT_MAX_TERMS
    return expand(
        transfer,
        config.photons[0],
        config.photons[1],
        max_photons=photon_cap,
        max_terms=max_terms,
    )


# ---------------------------------------------------------------------------
# one artifact per command: json text, csv text, ascii text

def _config_echo(config: RunConfig) -> dict:
    echo: dict = {"command": config.command}
    if config.level_count is not None:
        echo["level"] = config.level_count
    if config.photons is not None:
        echo["photons"] = list(config.photons)
    if config.detectors is not None:
        echo["tuple"] = sorted(config.detectors)
    if config.input_side is not None:
        echo["side"] = config.input_side
    if config.k is not None:
        echo["k"] = config.k
    return echo


def _artifact_transfer(config: RunConfig) -> dict:
    matrix = transfer_matrix(_network(config))
    echo = _config_echo(config)

    def entries(column):
        out = []
        for det, amp in enumerate(column, start=1):
            prob = amp.abs_squared()
            out.append(
                {
                    "detector": det,
                    "re": str(amp.re),
                    "im": str(amp.im),
                    "half_exp": amp.half_exp,
                    "amplitude": amp.exact_str(),
                    "prob": {"raw": _frac(prob), "float": float(prob)},
                }
            )
        return out

    values = {"left": entries(matrix.left_column), "right": entries(matrix.right_column)}
    rows = [
        [side, str(e["detector"]), e["re"], e["im"], str(e["half_exp"]),
         e["amplitude"], e["prob"]["raw"], _f17(e["prob"]["float"])]
        for side in ("left", "right")
        for e in values[side]
    ]
    ascii_text = "\n".join(
        [
            "left injection probabilities:",
            render_ascii([a.abs_squared() for a in matrix.left_column]),
            "right injection probabilities:",
            render_ascii([a.abs_squared() for a in matrix.right_column]),
        ]
    )
    return {
        "json": _json_text(echo, values),
        "csv": _csv_text(
            ["side", "detector", "re", "im", "half_exp", "amplitude", "prob_raw", "prob_float"],
            rows,
        ),
        "ascii": ascii_text,
    }


def _artifact_state(config: RunConfig) -> dict:
    expansion = _expansion(config)
    echo = _config_echo(config)
    values = []
    for fock, term in expansion.sorted_terms():
        p = expansion.probability(fock)
        re_sq, im_sq = expansion.amplitude_sq_components(fock)
        sign = "+" if term.g_im >= 0 else "-"
        values.append(
            {
                "occupations": list(fock),
                "raw": _frac(p),
                "float": float(p),
                "re_sq": _frac(re_sq),
                "im_sq": _frac(im_sq),
                "coeff": f"({term.g_re}{sign}{abs(term.g_im)}i)",
            }
        )
    rows = [
        [" ".join(str(n) for n in v["occupations"]), v["raw"], _f17(v["float"]),
         v["re_sq"], v["im_sq"], v["coeff"]]
        for v in values
    ]
    ascii_lines = [
        f"|{','.join(str(n) for n in v['occupations'])}>  p = {v['raw']} = {v['float']:.6f}"
        for v in values
    ]
    return {
        "json": _json_text(echo, values),
        "csv": _csv_text(["occupations", "raw", "float", "re_sq", "im_sq", "coeff"], rows),
        "ascii": "\n".join(ascii_lines),
    }


def _artifact_onefold(config: RunConfig) -> dict:
    dist = onefold_distribution(_expansion(config))
    echo = _config_echo(config)
    rows = [
        [str(d), _frac(v.raw), "", _f17(v.raw)] for d, v in enumerate(dist, start=1)
    ]
    return {
        "json": _json_text(echo, [_leaf(v) for v in dist]),
        "csv": _csv_text(["detector", "raw", "interpretation", "float"], rows),
        "ascii": render_ascii(dist),
    }


def _interp_cell(value: CorrelationValue) -> str:
    return "" if value.interpretation is None else _frac(value.interpretation)


def _artifact_twofold(config: RunConfig) -> dict:
    matrix = twofold_matrix(_expansion(config))
    echo = _config_echo(config)
    rows = [
        [str(m + 1), str(n + 1), _frac(v.raw), _interp_cell(v), _f17(v.raw)]
        for m, row in enumerate(matrix)
        for n, v in enumerate(row)
    ]
    return {
        "json": _json_text(echo, [[_leaf(v) for v in row] for row in matrix]),
        "csv": _csv_text(["m", "n", "raw", "interpretation", "float"], rows),
        "ascii": render_ascii(matrix),
    }


def _artifact_threefold(config: RunConfig) -> dict:
    cube = threefold_cube(_expansion(config))
    echo = _config_echo(config)
    n_modes = len(cube)
    rows = [
        [str(m + 1), str(n + 1), str(l + 1), _frac(v.raw), _interp_cell(v), _f17(v.raw)]
        for m, plane in enumerate(cube)
        for n, row in enumerate(plane)
        for l, v in enumerate(row)
    ]
    ascii_layers = []
    for l in range(n_modes):
        ascii_layers.append(f"layer l = {l + 1}")
        ascii_layers.append(
            render_ascii([[cube[m][n][l] for n in range(n_modes)] for m in range(n_modes)])
        )
    layer_texts = []
    for l in range(n_modes):
        layer_echo = dict(echo)
        layer_echo["layer"] = l + 1
        layer_values = [[_leaf(cube[m][n][l]) for n in range(n_modes)] for m in range(n_modes)]
        layer_texts.append(_json_text(layer_echo, layer_values))
    return {
        "json": _json_text(
            echo, [[[_leaf(v) for v in row] for row in plane] for plane in cube]
        ),
        "csv": _csv_text(["m", "n", "l", "raw", "interpretation", "float"], rows),
        "ascii": "\n".join(ascii_layers),
        "layers": layer_texts,
    }


def _artifact_kfold(config: RunConfig) -> dict:
    expansion = _expansion(config)
    tup = DetectorTuple(config.detectors)
    value = gk(expansion, tup)
    echo = _config_echo(config)
    dets = " ".join(str(d) for d in tup.detectors)
    return {
        "json": _json_text(echo, _leaf(value)),
        "csv": _csv_text(
            ["detectors", "raw", "interpretation", "float"],
            [[dets, _frac(value.raw), _interp_cell(value), _f17(value.raw)]],
        ),
        "ascii": f"G^{tup.k}({dets}) raw = {_frac(value.raw)}"
        + (
            f", same-detector interpretation = {_frac(value.interpretation)}"
            if value.interpretation is not None
            else ""
        ),
    }


def _artifact_numberdist(config: RunConfig) -> dict:
    expansion = _expansion(config)
    dets = sorted(config.detectors)
    if len(config.detectors) != 2:
        raise InvalidArgumentError(
            f"numberdist needs a tuple of exactly two detectors, got {len(config.detectors)}"
        )
    table = joint_number_distribution(expansion, dets[0], dets[1])
    echo = _config_echo(config)
    values = [
        [{"raw": _frac(p), "interp": None, "float": float(p)} for p in row]
        for row in table
    ]
    rows = [
        [str(i), str(j), _frac(p), "", _f17(p)]
        for i, row in enumerate(table)
        for j, p in enumerate(row)
    ]
    return {
        "json": _json_text(echo, values),
        "csv": _csv_text(["i", "j", "raw", "interpretation", "float"], rows),
        "ascii": render_ascii(table),
    }


def _artifact_paths(config: RunConfig) -> dict:
    network = _network(config)
    cap = _cap(config.max_level, DEFAULT_MAX_PATH_LEVEL, config.allow_large, "--max-level")
    records = enumerate_paths(network, config.input_side, max_level=cap)
    echo = _config_echo(config)
    values = [
        {
            "side": p.input_side,
            "steps": p.steps_string(),
            "reflections": p.reflections,
            "detector": p.terminal_detector,
            "amplitude": p.amplitude.exact_str(),
        }
        for p in records
    ]
    rows = [
        [v["side"], v["steps"], str(v["reflections"]), str(v["detector"]), v["amplitude"]]
        for v in values
    ]
    ascii_lines = [
        f"{v['steps']}  -> D{v['detector']}  {v['amplitude']}" for v in values
    ]
    return {
        "json": _json_text(echo, values),
        "csv": _csv_text(["side", "steps", "reflections", "detector", "amplitude"], rows),
        "ascii": "\n".join(ascii_lines),
    }


def _artifact_diagrams(config: RunConfig) -> dict:
    network = _network(config)
    photons = ["left"] * config.photons[0] + ["right"] * config.photons[1]
    kwargs = {}
    if config.allow_large:
        kwargs["max_steps"] = len(photons) * network.level_count
    diagram = diagrams_for(network, photons, DetectorTuple(config.detectors), **kwargs)
    echo = _config_echo(config)
    values = {
        "tuple": list(diagram.detectors.detectors),
        "assignments": [
            {
                "paths": [
                    {
                        "side": p.input_side,
                        "steps": p.steps_string(),
                        "detector": p.terminal_detector,
                        "amplitude": p.amplitude.exact_str(),
                    }
                    for p in assignment
                ],
                "joint_amplitude": amp.exact_str(),
            }
            for assignment, amp in zip(diagram.assignments, diagram.joint_amplitudes)
        ],
        "total_amplitude": diagram.total_amplitude().exact_str(),
    }
    rows = []
    for idx, assignment in enumerate(values["assignments"], start=1):
        for path in assignment["paths"]:
            rows.append(
                [str(idx), path["side"], path["steps"], str(path["detector"]),
                 path["amplitude"], assignment["joint_amplitude"]]
            )
    ascii_lines = []
    for idx, assignment in enumerate(values["assignments"], start=1):
        legs = ", ".join(
            f"{p['side']}:{p['steps']}->D{p['detector']}" for p in assignment["paths"]
        )
        ascii_lines.append(f"assignment {idx}: {legs}  joint {assignment['joint_amplitude']}")
    ascii_lines.append(f"total amplitude {values['total_amplitude']}")
    return {
        "json": _json_text(echo, values),
        "csv": _csv_text(
            ["assignment", "side", "steps", "detector", "amplitude", "joint_amplitude"],
            rows,
        ),
        "ascii": "\n".join(ascii_lines),
    }


def _artifact_zeros(config: RunConfig) -> dict:
    expansion = _expansion(config)
    zeros = zero_set(expansion, config.k, allow_large=config.allow_large)
    echo = _config_echo(config)
    values = [list(z.detectors) for z in zeros]
    rows = [[str(config.k), " ".join(str(d) for d in z)] for z in values]
    ascii_lines = [" ".join(f"D{d}" for d in z) for z in values] or ["(none)"]
    return {
        "json": _json_text(echo, values),
        "csv": _csv_text(["k", "detectors"], rows),
        "ascii": "\n".join(ascii_lines),
    }


_ARTIFACTS = {
    "transfer": _artifact_transfer,
    "state": _artifact_state,
    "onefold": _artifact_onefold,
    "twofold": _artifact_twofold,
    "threefold": _artifact_threefold,
    "kfold": _artifact_kfold,
    "numberdist": _artifact_numberdist,
    "paths": _artifact_paths,
    "diagrams": _artifact_diagrams,
    "zeros": _artifact_zeros,
}


# ---------------------------------------------------------------------------
# oracle cross-check

def _run_oracle_check(config: RunConfig) -> int:
    grid_photons = config.max_photons if config.max_photons is not None else 3
    grid_level = config.max_level if config.max_level is not None else 5
    if grid_photons < 1 or grid_level < 1:
        raise InvalidArgumentError("oracle-check grid bounds must be positive")
    expansions = 0
    for level in range(1, grid_level + 1):
        network = build_network(level, max_level=max(DEFAULT_MAX_LEVEL, grid_level))
        matrix = transfer_matrix(network)
        if level <= DEFAULT_MAX_PATH_LEVEL:
            for side, column in (("left", matrix.left_column), ("right", matrix.right_column)):
                for det in range(1, network.detector_count + 1):
                    summed = endpoint_amplitude(network, side, det)
                    if summed != column[det - 1]:
                        raise OracleMismatchError(
                            f"path sum at level {level}, {side} injection, detector {det}: "
                            f"{summed!r} vs transfer entry {column[det - 1]!r}"
                        )
            print(f"ok level {level}: path sums match the transfer matrix "
                  f"({2 * network.detector_count} endpoints)")
        for total in range(1, grid_photons + 1):
            for n_left in range(total + 1):
                n_right = total - n_left
                dense = dense_simulate(
                    network, n_left, n_right,
                    max_photons=grid_photons, max_level=grid_level,
                )
                fast = expand(
                    matrix, n_left, n_right,
                    max_photons=max(DEFAULT_MAX_PHOTONS, grid_photons),
                )
                if fast != dense:
                    raise OracleMismatchError(
                        f"expansion mismatch at level {level}, photons ({n_left},{n_right})"
                    )
                expansions += 1
                print(f"ok level {level} photons ({n_left},{n_right}): "
                      f"expansion matches the dense oracle ({len(fast.terms)} terms)")
    print(f"all configurations exact ({expansions} expansions over {grid_level} levels)")
    return 0


# ---------------------------------------------------------------------------
# emission and entry points

def _emit(config: RunConfig, artifact: dict) -> None:
    text = artifact[config.output_format]
    if config.output_path is None:
        print(text)
        return
    out = Path(config.output_path)
    out.write_text(text + "\n")
    if config.command == "threefold" and config.output_format == "json":
        for l, layer_text in enumerate(artifact["layers"], start=1):
            layer_path = out.with_name(f"{out.stem}.layer{l:02d}{out.suffix}")
            layer_path.write_text(layer_text + "\n")
    sidecar = {
        "tool": f"qrw {__version__}",
        "created": datetime.now(timezone.utc).isoformat(),
        "config": _config_echo(config),
        "format": config.output_format,
    }
    Path(str(out) + ".meta.json").write_text(json.dumps(sidecar, indent=2) + "\n")


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit code."""
    try:
        if config.command == "oracle-check":
            return _run_oracle_check(config)
        artifact = _ARTIFACTS[config.command](config)
        _emit(config, artifact)
        return 0
    except InvalidArgumentError as exc:
        print(f"ERR 2: {exc}", file=sys.stderr)
        return 2
    except ResourceBoundError as exc:
        print(f"ERR 3: {exc}", file=sys.stderr)
        return 3
    except OracleMismatchError as exc:
        print(f"ERR 4: {exc}", file=sys.stderr)
        return 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"ERR 2: {message}\n")


def _photons_arg(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected N,M, got {text!r}")
    n, m = (int(p) for p in parts)
    if n < 0 or m < 0:
        raise ValueError("photon counts must be non-negative")
    return (n, m)


def _tuple_arg(text: str) -> tuple[int, ...]:
    parts = tuple(int(p) for p in text.split(",") if p != "")
    if not parts:
        raise ValueError("expected a comma-separated detector list")
    if any(d < 1 for d in parts):
        raise ValueError("detector indices are 1-based")
    return parts


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="qrw",
        description="Exact multiphoton walks on a 50/50 beam-splitter pyramid.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, level=True, photons=False, detectors=False):
        if level:
            p.add_argument("--level", type=int, required=True, help="number of levels L")
        if photons:
            p.add_argument(
                "--photons", type=_photons_arg, required=True, metavar="N,M",
                help="photons at the left and right input",
            )
        if detectors:
            p.add_argument(
                "--tuple", type=_tuple_arg, required=True, metavar="D1,D2,...",
                dest="detectors", help="detector indices (order irrelevant)",
            )
        p.add_argument("--format", choices=FORMATS, default="json")
        p.add_argument("--out", metavar="PATH", help="write the artifact to PATH")
        p.add_argument("--max-photons", type=int, help="override the photon cap")
        p.add_argument("--max-level", type=int, help="override the level cap")
        p.add_argument(
            "--allow-large", action="store_true",
            help="confirm caps above the defaults",
        )

    common(sub.add_parser("transfer", help="exact single-photon transfer matrix"))
    common(sub.add_parser("state", help="full output superposition"), photons=True)
    common(sub.add_parser("onefold", help="mean photon number per detector"), photons=True)
    common(sub.add_parser("twofold", help="twofold coincidence matrix"), photons=True)
    common(sub.add_parser("threefold", help="threefold coincidence cube"), photons=True)
    common(
        sub.add_parser("kfold", help="coincidence value at one detector tuple"),
        photons=True, detectors=True,
    )
    common(
        sub.add_parser("numberdist", help="joint photon-number distribution of two detectors"),
        photons=True, detectors=True,
    )
    p_paths = sub.add_parser("paths", help="enumerate single-photon routes")
    p_paths.add_argument("--side", choices=("left", "right"), required=True)
    common(p_paths)
    common(
        sub.add_parser("diagrams", help="post-selected joint routes onto a tuple"),
        photons=True, detectors=True,
    )
    p_zeros = sub.add_parser("zeros", help="tuples with exactly zero coincidence")
    p_zeros.add_argument("--k", type=int, required=True, help="tuple order")
    common(p_zeros, photons=True)
    p_oracle = sub.add_parser(
        "oracle-check",
        help="cross-check the column expansion against the dense and path oracles",
    )
    p_oracle.add_argument("--max-photons", type=int, default=3, help="photon grid bound")
    p_oracle.add_argument("--max-level", type=int, default=5, help="level grid bound")
    p_oracle.add_argument("--format", choices=FORMATS, default="json", help=argparse.SUPPRESS)
    p_oracle.add_argument("--out", help=argparse.SUPPRESS)
    p_oracle.add_argument("--allow-large", action="store_true", help=argparse.SUPPRESS)
    return parser


def parse_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    return RunConfig(
        command=ns.command,
        level_count=getattr(ns, "level", None),
        photons=getattr(ns, "photons", None),
        detectors=getattr(ns, "detectors", None),
        input_side=getattr(ns, "side", None),
        k=getattr(ns, "k", None),
        output_format=getattr(ns, "format", "json"),
        output_path=getattr(ns, "out", None),
        max_photons=getattr(ns, "max_photons", None),
        max_level=getattr(ns, "max_level", None),
        allow_large=getattr(ns, "allow_large", False),
    )


def main(argv=None) -> None:
    sys.exit(run(parse_args(argv)))
