"""Command-line front end: set I/O, seeded generation, experiment drivers.

Every command resolves its parameters from (in increasing precedence)
built-in defaults, an optional key=value config file, and command-line
flags, then emits CSV or JSON prefixed with comment lines that record the
resolved configuration.  Output formatting is locale-free with round-trip
float reprs, and the worker-pool reductions preserve input order, so a
rerun with the same configuration is byte-identical regardless of the
thread count.

Exit codes: 0 on success, 2 for validation or I/O problems, 3 when a size
cap is exceeded, 4 when a hard bound or internal assertion fails.
"""
from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .corners import (
    PlaneSet,
    corner_count_by_difference,
    hyperplane_views,
    integer_corner_scan,
    popular_difference,
)
from .errors import BoundViolation, CapExceededError, GroupMismatchError, ValidationError
from .groups import parse_group_spec
from .regularity import double_regularity, parse_growth_spec
from .variational import minimize_T, pipeline_lower_bound, sweep_and_envelope

_ZSCAN_CAP = 512

_KNOWN_KEYS = (
    "group",
    "density",
    "seed",
    "set_file",
    "rho",
    "delta",
    "eps",
    "growth",
    "grid_n",
    "restarts",
    "threads",
    "out",
)

_DEFAULTS = {
    "seed": "0",
    "rho": "1/4",
    "eps": "0.25",
    "growth": "poly:2,1",
    "grid_n": "6",
    "restarts": "8",
}


def _to_int(value: str, key: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ValidationError(f"{key} must be an integer, got {value!r}")


def _to_float(value: str, key: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ValidationError(f"{key} must be a number, got {value!r}")


def _to_fraction(value: str, key: str) -> Fraction:
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"{key} must be a rational like 1/4 or 0.25, got {value!r}")


def _to_float_list(value: str, key: str) -> list[float]:
    parts = [p.strip() for p in value.split(",") if p.strip()]
    if not parts:
        raise ValidationError(f"{key} must list at least one number")
    return [_to_float(p, key) for p in parts]


def _read_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}")
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValidationError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _KNOWN_KEYS:
            raise ValidationError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = value.strip()
    return out


def _resolve(args) -> dict[str, str]:
    resolved = dict(_DEFAULTS)
    if args.config is not None:
        resolved.update(_read_config_file(args.config))
    for key in _KNOWN_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
    return resolved


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _plain(x):
    """Recursively convert numpy scalars and Fractions for json emission."""
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    return x


def _header(command: str, entries: list[tuple[str, str]]) -> str:
    lines = [f"# cornerlab {command}"]
    lines += [f"# {k}={v}" for k, v in entries]
    return "\n".join(lines) + "\n"


def _emit(out_path: str | None, text: str) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text)


def _load_plane_set(resolved: dict[str, str]) -> tuple[PlaneSet, list[tuple[str, str]]]:
    """Build the input set and the header entries describing its source."""
    set_file = resolved.get("set_file")
    if set_file is not None:
        A = PlaneSet.load(set_file)
        if "group" in resolved:
            wanted = parse_group_spec(resolved["group"])
            if wanted != A.group:
                raise GroupMismatchError(
                    f"set file holds {A.group.spec_string()}, flags say {wanted.spec_string()}"
                )
        return A, [("group", A.group.spec_string()), ("set_file", set_file)]
    group_text = resolved.get("group")
    density_text = resolved.get("density")
    if group_text is None or density_text is None:
        raise ValidationError("need --set-file, or --group together with --density")
    densities = _to_float_list(density_text, "density")
    if len(densities) != 1:
        raise ValidationError("this command takes exactly one density")
    group = parse_group_spec(group_text)
    seed = _to_int(resolved["seed"], "seed")
    A = PlaneSet.random(group, densities[0], seed)
    return A, [
        ("group", group.spec_string()),
        ("density", repr(densities[0])),
        ("seed", str(seed)),
    ]


def _element_repr(element) -> str:
    return ":".join(str(c) for c in element.coords)


def cmd_scan(resolved: dict[str, str]) -> int:
    A, source = _load_plane_set(resolved)
    group = A.group
    threads = _to_int(resolved["threads"], "threads") if "threads" in resolved else None
    profile = corner_count_by_difference(A, threads=threads)
    d_star, best = popular_difference(A, profile)
    alpha = A.density
    rows = ["d_index,d_repr,count"]
    for d in range(group.order):
        rows.append(f"{d},{_element_repr(group.element(d))},{int(profile.counts[d])}")
    summary = (
        f"# summary alpha={_fmt(alpha)} d_star_index={d_star.index}"
        f" d_star={_element_repr(d_star)} count={best}"
        f" alpha3_bound={_fmt(alpha**3 * group.order**2)}"
    )
    body = "\n".join(rows + [summary]) + "\n"
    _emit(resolved.get("out"), _header("scan", source) + body)
    return 0


def cmd_popular(resolved: dict[str, str]) -> int:
    A, source = _load_plane_set(resolved)
    threads = _to_int(resolved["threads"], "threads") if "threads" in resolved else None
    profile = corner_count_by_difference(A, threads=threads)
    d_star, best = popular_difference(A, profile)
    alpha = A.density
    lines = [
        f"alpha={_fmt(alpha)}",
        f"d_star_index={d_star.index}",
        f"d_star={_element_repr(d_star)}",
        f"count={best}",
        f"alpha3_bound={_fmt(alpha**3 * A.group.order**2)}",
    ]
    _emit(resolved.get("out"), _header("popular", source) + "\n".join(lines) + "\n")
    return 0


def cmd_zscan(resolved: dict[str, str]) -> int:
    A, source = _load_plane_set(resolved)
    if A.group.rank != 1:
        raise ValidationError("integer scan needs a rank-one group Zn")
    n = A.group.order
    if n > _ZSCAN_CAP:
        raise CapExceededError(f"integer scan capped at n <= {_ZSCAN_CAP}, got {n}")
    rho = _to_fraction(resolved["rho"], "rho")
    result = integer_corner_scan(A.bits, rho=rho)
    rows = ["d,count"]
    for d in sorted(result.profile):
        rows.append(f"{d},{result.profile[d]}")
    summary = (
        f"# summary best_d={result.difference} count={result.count}"
        f" candidates={len(result.profile)}"
    )
    body = "\n".join(rows + [summary]) + "\n"
    entries = source + [("rho", str(rho))]
    _emit(resolved.get("out"), _header("zscan", entries) + body)
    return 0


def _sweep_entries(resolved: dict[str, str], alphas: list[float], n: int, restarts: int, seed: int):
    return [
        ("density", ",".join(repr(a) for a in alphas)),
        ("grid_n", str(n)),
        ("restarts", str(restarts)),
        ("seed", str(seed)),
    ]


def _run_sweep(resolved: dict[str, str]):
    if "density" not in resolved:
        raise ValidationError("need --density with one or more samples")
    alphas = _to_float_list(resolved["density"], "density")
    n = _to_int(resolved["grid_n"], "grid_n")
    restarts = _to_int(resolved["restarts"], "restarts")
    seed = _to_int(resolved["seed"], "seed")
    threads = _to_int(resolved["threads"], "threads") if "threads" in resolved else None
    return alphas, n, restarts, seed, threads


def cmd_variational(resolved: dict[str, str]) -> int:
    alphas, n, restarts, seed, threads = _run_sweep(resolved)
    rows = ["alpha,m_hat,envelope,alpha3,alpha4,n,restarts,seed"]
    if len(alphas) == 1:
        a = alphas[0]
        value = minimize_T(a, n, restarts=restarts, seed=seed).value
        samples = [(a, value, value, seed)]
    else:
        env = sweep_and_envelope(
            alphas, n, restarts=restarts, seed=seed, threads=threads
        )
        samples = [
            (a, env.values[i], env.envelope_at(a), seed + i)
            for i, a in enumerate(alphas)
        ]
    for a, m_hat, env_val, row_seed in samples:
        rows.append(
            f"{_fmt(a)},{_fmt(m_hat)},{_fmt(env_val)},{_fmt(a**3)},{_fmt(a**4)},"
            f"{n},{restarts},{row_seed}"
        )
    entries = _sweep_entries(resolved, alphas, n, restarts, seed)
    _emit(resolved.get("out"), _header("variational", entries) + "\n".join(rows) + "\n")
    return 0


def cmd_envelope(resolved: dict[str, str]) -> int:
    alphas, n, restarts, seed, threads = _run_sweep(resolved)
    if len(alphas) < 2:
        raise ValidationError("envelope needs at least two density samples")
    env = sweep_and_envelope(alphas, n, restarts=restarts, seed=seed, threads=threads)
    rows = ["alpha,envelope"]
    for a, v in zip(env.hull_alphas, env.hull_values):
        rows.append(f"{_fmt(a)},{_fmt(v)}")
    entries = _sweep_entries(resolved, alphas, n, restarts, seed)
    _emit(resolved.get("out"), _header("envelope", entries) + "\n".join(rows) + "\n")
    return 0


def cmd_regularize(resolved: dict[str, str]) -> int:
    A, source = _load_plane_set(resolved)
    eps = _to_float(resolved["eps"], "eps")
    growth = parse_growth_spec(resolved["growth"])
    seed = _to_int(resolved["seed"], "seed")
    views = [v.astype(float) for v in hyperplane_views(A)]
    dr = double_regularity(views, eps=eps, F=growth, group=A.group, seed=seed)
    report = {
        "group": A.group.spec_string(),
        "order": A.group.order,
        "density": A.density,
        "eps": eps,
        "growth": growth.spec_string(),
        "seed": seed,
        "rounds": dr.rounds,
        "degenerate": dr.degenerate,
        "pi_parts": dr.pi.part_count,
        "pi_next_parts": dr.pi_next.part_count,
        "round_records": dr.round_records,
        "bohr": {
            "rounds": dr.bohr.rounds,
            "frequencies": len(dr.bohr.bohr_set.freqs),
            "radius": str(dr.bohr.bohr_set.radius),
            "width": str(dr.bohr.partition.width),
            "measure": float(dr.bohr.bohr_set.measure()),
            "achieved_l2": dr.bohr.achieved_l2,
            "achieved_linf": dr.bohr.achieved_linf,
            "linf_bound": dr.bohr.linf_bound,
            "linf_hypothesis": dr.bohr.linf_hypothesis,
            "degenerate": dr.bohr.degenerate,
            "history": dr.bohr.history,
        },
        "f1_norms": dr.f1_norms,
        "f2_cut_estimates": dr.f2_cut_estimates,
        "cut_certified": dr.cut_certified,
    }
    entries = source + [("eps", _fmt(eps)), ("growth", growth.spec_string())]
    body = json.dumps(_plain(report), indent=2) + "\n"
    _emit(resolved.get("out"), _header("regularize", entries) + body)
    return 0


def cmd_pipeline(resolved: dict[str, str]) -> int:
    A, source = _load_plane_set(resolved)
    eps = _to_float(resolved["eps"], "eps")
    growth = parse_growth_spec(resolved["growth"])
    seed = _to_int(resolved["seed"], "seed")
    report = pipeline_lower_bound(A, eps=eps, F=growth, seed=seed)
    entries = source + [("eps", _fmt(eps)), ("growth", growth.spec_string())]
    body = json.dumps(_plain(report), indent=2) + "\n"
    _emit(resolved.get("out"), _header("pipeline", entries) + body)
    return 0


_COMMANDS = {
    "scan": cmd_scan,
    "popular": cmd_popular,
    "zscan": cmd_zscan,
    "variational": cmd_variational,
    "envelope": cmd_envelope,
    "regularize": cmd_regularize,
    "pipeline": cmd_pipeline,
}


def _build_parser():
    import argparse

    parser = argparse.ArgumentParser(
        prog="cornerlab",
        description="corner statistics, regularization, and grid functional drivers",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "scan": "full difference profile N(d) of a plane set, as CSV",
        "popular": "most popular nonzero difference of a plane set",
        "zscan": "wraparound-free corner scan of a set in [n]^2",
        "variational": "estimate the grid functional minimum over a density grid",
        "envelope": "lower convex envelope knots of a density sweep",
        "regularize": "double regularity report for a plane set, as JSON",
        "pipeline": "end-to-end count vs box-model comparison, as JSON",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key=value parameter file; flags win")
        p.add_argument("--group", help="group spec such as Z12 or Z2xZ2xZ3")
        p.add_argument("--density", help="density in [0,1]; comma list for sweeps")
        p.add_argument("--seed", help="RNG seed (default 0)")
        p.add_argument("--set-file", dest="set_file", help="read the set from this file")
        p.add_argument("--rho", help="radius bound for zscan candidates (default 1/4)")
        p.add_argument("--delta", help="partition width; accepted for config compatibility")
        p.add_argument("--eps", help="regularity accuracy target (default 0.25)")
        p.add_argument("--growth", help="growth spec poly:c,k or exp:c (default poly:2,1)")
        p.add_argument("--grid-n", dest="grid_n", help="grid points per axis (default 6)")
        p.add_argument("--restarts", help="descent restarts per sample (default 8)")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--threads", help="worker threads; else CORNERLAB_THREADS, else 1")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        resolved = _resolve(args)
        return _COMMANDS[args.command](resolved)
    except (BoundViolation, AssertionError) as exc:
        print(f"cornerlab: bound violated: {exc}", file=sys.stderr)
        return 4
    except CapExceededError as exc:
        print(f"cornerlab: cap exceeded: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"cornerlab: invalid input: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cornerlab: i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
