"""Command-line scenario runner.

Subcommands: simulate, moments, info, bell-curve, verify, bench. Each consumes
a YAML config (see README for the schema) and writes CSV into the output
directory; --svg additionally renders a static line chart of two CSV columns.
Outputs are byte-identical for identical (config, seed).

Exit codes: 0 success, 2 config/parse problem, 3 validation problem,
4 numerical failure. Failures print one machine-parsable line to stderr:
``error: <category>: <reason>``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import run_bench
from .config import (
    ConfigError,
    ScenarioConfig,
    load_config,
    parse_initial_moments,
    parse_initial_state,
    parse_model,
    parse_partition,
    parse_rate,
    parse_time_grid,
)
from .dynamics import apply_propagator, evolve_state_grid, propagate_grid
from .errors import (
    DimensionError,
    DomainError,
    NumericalError,
    OneParticleError,
    ValidationError,
)
from .information import markov_decay_curve, mutual_information
from .integrators import StepPolicy
from .linalg import operator_norm
from .moments import evolve_moments_grid
from .states import assemble
from .verification import run_verification


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_csv(path: Path, header: list[str], rows, config_hash: str) -> None:
    lines = [f"# config_sha256={config_hash} tool_version={__version__}"]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def read_csv_columns(path: Path) -> tuple[list[str], np.ndarray]:
    lines = [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    return header, data


def write_svg_line_chart(path: Path, xs, ys, xlabel: str, ylabel: str) -> None:
    """Minimal static SVG polyline chart, deterministic output."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    width, height, margin = 640, 440, 60
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return margin + (x - x0) / (x1 - x0) * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin)

    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>',
        f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="1.5"/>',
        f'<text x="{width / 2:.0f}" y="{height - 15}" text-anchor="middle" '
        f'font-size="13">{xlabel}</text>',
        f'<text x="18" y="{height / 2:.0f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {height / 2:.0f})">{ylabel}</text>',
        f'<text x="{margin}" y="{height - margin + 18}" font-size="11">{_fmt(x0)}</text>',
        f'<text x="{width - margin}" y="{height - margin + 18}" text-anchor="end" '
        f'font-size="11">{_fmt(x1)}</text>',
        f'<text x="{margin - 6}" y="{height - margin}" text-anchor="end" '
        f'font-size="11">{_fmt(y0)}</text>',
        f'<text x="{margin - 6}" y="{margin + 4}" text-anchor="end" '
        f'font-size="11">{_fmt(y1)}</text>',
        "</svg>",
    ]
    path.write_text("\n".join(parts) + "\n", encoding="ascii")


def _maybe_svg(args, csv_path: Path) -> None:
    if not getattr(args, "svg", False):
        return
    header, data = read_csv_columns(csv_path)
    cols = getattr(args, "svg_columns", None)
    if cols:
        names = cols.split(",")
        if len(names) != 2 or any(nm not in header for nm in names):
            raise ConfigError(f"--svg-columns needs two of {header}, got {cols!r}")
        ix, iy = header.index(names[0]), header.index(names[1])
    else:
        ix, iy = 0, 1
    write_svg_line_chart(
        csv_path.with_suffix(".svg"), data[:, ix], data[:, iy], header[ix], header[iy]
    )


def _policy(cfg: ScenarioConfig) -> StepPolicy:
    raw = cfg.opt("steps", {})
    if not isinstance(raw, dict):
        raise ConfigError("config: 'steps' must be a mapping")
    return StepPolicy(
        steps_per_unit=int(raw.get("per_unit", 1000)),
        step_tol=float(raw.get("tolerance", 1e-10)),
    )


def _out_dir(args) -> Path:
    out = Path(getattr(args, "out", ".") or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _need_config(args) -> ScenarioConfig:
    if not getattr(args, "config", None):
        raise ConfigError("this subcommand needs --config <path>")
    return load_config(args.config)


def _check_scenario(cfg: ScenarioConfig, expected: str) -> None:
    if cfg.scenario != expected:
        raise ConfigError(f"config declares scenario {cfg.scenario!r}, command is {expected!r}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> int:
    cfg = _need_config(args)
    _check_scenario(cfg, "simulate")
    n = cfg.n
    if n < 1:
        raise ConfigError("simulate: n must be >= 1")
    grid = parse_time_grid(cfg.opt("time", {"stop": 5.0, "samples": 101}))
    model = parse_model(cfg.opt("model", {}), n)
    s0 = parse_initial_state(cfg.opt("initial_state", {"preset": "vacuum"}), n)
    policy = _policy(cfg)

    ts = grid.points()
    propagators = propagate_grid(model, ts, policy)
    rows = []
    for t, V in zip(ts, propagators):
        s_t = apply_propagator(s0, V)
        M = assemble(s_t)
        rows.append(
            (
                t,
                s_t.rho00,
                s_t.excited_weight(),
                float(np.linalg.norm(s_t.psi)),
                float(np.linalg.eigvalsh(M)[0]),
                operator_norm(V.matrix),
            )
        )
    out = _out_dir(args) / "simulate.csv"
    write_csv(
        out,
        ["t", "rho00", "trace_R", "psi_norm", "min_eigenvalue", "propagator_norm"],
        rows,
        cfg.sha256,
    )
    _maybe_svg(args, out)
    print(f"simulate: wrote {out} ({len(rows)} rows)")
    return 0


def cmd_moments(args) -> int:
    cfg = _need_config(args)
    _check_scenario(cfg, "moments")
    n = cfg.n
    if n < 1:
        raise ConfigError("moments: n must be >= 1")
    statistics = cfg.opt("statistics", "boson")
    grid = parse_time_grid(cfg.opt("time", {"stop": 5.0, "samples": 101}))
    model = parse_model(cfg.opt("model", {}), n)
    ms0 = parse_initial_moments(
        cfg.opt("initial_moments", {"preset": "fock", "occupations": [1] + [0] * (n - 1)}),
        n,
        statistics,
    )
    method = cfg.opt("method", "propagator")
    policy = _policy(cfg)

    ts = grid.points()
    trajectory = evolve_moments_grid(ms0, model, ts, method=method, policy=policy)
    header = ["t"]
    for j in range(1, n + 1):
        header += [f"m{j}_re", f"m{j}_im"]
    for label in ("Y", "Z"):
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                header += [f"{label}{i}{j}_re", f"{label}{i}{j}_im"]
    rows = []
    for t, ms in zip(ts, trajectory):
        row = [t]
        for v in ms.m:
            row += [v.real, v.imag]
        for Mx in (ms.Y, ms.Z):
            for v in Mx.reshape(-1):
                row += [v.real, v.imag]
        rows.append(row)
    out = _out_dir(args) / "moments.csv"
    write_csv(out, header, rows, cfg.sha256)
    _maybe_svg(args, out)
    print(f"moments: wrote {out} ({len(rows)} rows, method={method})")
    return 0


def cmd_info(args) -> int:
    cfg = _need_config(args)
    _check_scenario(cfg, "info")
    n = cfg.n
    if n < 1:
        raise ConfigError("info: n must be >= 1")
    first, second = parse_partition(cfg.opt("partition", None) or {}, n)
    s0 = parse_initial_state(cfg.opt("initial_state", {"preset": "uniform-diagonal"}), n)
    policy = _policy(cfg)

    if cfg.opt("model") is not None:
        grid = parse_time_grid(cfg.opt("time", {"stop": 5.0, "samples": 101}))
        model = parse_model(cfg.opt("model", {}), n)
        ts = grid.points()
        states = evolve_state_grid(s0, model, ts, policy)
    else:
        ts = np.array([0.0])
        states = [s0]

    rows = []
    for t, s_t in zip(ts, states):
        rep = mutual_information(s_t, first, second)
        p0, p1, p2 = rep.pi.probabilities
        rows.append((t, rep.total, rep.quantum_term, rep.classical_term, p0, p1, p2))
    out = _out_dir(args) / "info.csv"
    write_csv(
        out,
        ["t", "mutual_information", "quantum_term", "classical_term", "p0", "p1", "p2"],
        rows,
        cfg.sha256,
    )
    _maybe_svg(args, out)
    print(f"info: wrote {out} ({len(rows)} rows)")
    return 0


def cmd_bell_curve(args) -> int:
    if getattr(args, "config", None):
        cfg = load_config(args.config)
        _check_scenario(cfg, "bell-curve")
        gamma = parse_rate(cfg.opt("gamma", 1.0), "gamma")
        if callable(gamma):
            raise ConfigError("bell-curve: gamma must be a constant rate")
        grid = parse_time_grid(cfg.opt("time", {"stop": 6.0, "samples": 200}))
        sha = cfg.sha256
    else:
        gamma = args.gamma
        grid = parse_time_grid({"stop": args.stop, "samples": args.samples})
        sha = hashlib.sha256(
            json.dumps({"gamma": gamma, "stop": args.stop, "samples": args.samples}).encode()
        ).hexdigest()
    curve = markov_decay_curve(gamma, grid.points())
    out = _out_dir(args) / "bell_curve.csv"
    write_csv(out, ["t", "mutual_information"], curve, sha)
    _maybe_svg(args, out)
    peak = float(curve[:, 1].max())
    print(f"bell-curve: wrote {out} (peak {peak:.6f})")
    return 0


def cmd_verify(args) -> int:
    if getattr(args, "config", None):
        cfg = load_config(args.config)
        _check_scenario(cfg, "verify")
        seed = args.seed if args.seed is not None else cfg.seed
        n = cfg.n or 4
        states = int(cfg.opt("states", 6))
        models = int(cfg.opt("models", 2))
    else:
        seed = args.seed
        n = args.n
        states, models = 6, 2
    if seed is None:
        raise ConfigError("verify: a seed is mandatory (flag --seed or config key)")
    report = run_verification(int(seed), n=n, states=states, models=models)
    out = _out_dir(args) / "verify_report.json"
    out.write_text(report.to_json(), encoding="ascii")
    for line in report.summary_lines():
        print(line)
    print(f"verify: wrote {out}")
    return 0 if report.all_passed else 4


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    rows = run_bench(sizes=sizes, t=args.t, repeats=args.repeats, seed=args.seed or 7)
    sha = hashlib.sha256(
        json.dumps({"sizes": sizes, "t": args.t, "repeats": args.repeats}).encode()
    ).hexdigest()
    out = _out_dir(args) / "bench.csv"
    write_csv(out, ["n", "method", "wall_time"], [(r.n, r.method, r.wall_time) for r in rows], sha)
    for r in rows:
        print(f"bench: n={r.n:2d} {r.method:22s} {r.wall_time * 1e3:10.2f} ms")
    print(f"bench: wrote {out}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oneparticle",
        description="One-particle open-system scenarios, verification, and benchmarks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        p.add_argument("--config", help="YAML scenario config")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--svg", action="store_true", help="also render an SVG line chart")
        p.add_argument(
            "--svg-columns",
            default=None,
            help="comma-separated pair of CSV columns to plot (default: first two)",
        )

    p = sub.add_parser("simulate", help="propagator time series of a one-particle state")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("moments", help="moment dynamics time series")
    common(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("info", help="mutual information along the evolution")
    common(p)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("bell-curve", help="Markov-decay mutual information curve")
    common(p)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--stop", type=float, default=6.0)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_bell_curve)

    p = sub.add_parser("verify", help="run the oracle cross-check suite")
    common(p)
    p.add_argument("--n", type=int, default=4, help="mode count for the checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time liouvillian vs propagator, compiled vs python")
    common(p)
    p.add_argument("--sizes", default="2,3,4,5", help="comma-separated mode counts")
    p.add_argument("--t", type=float, default=1.0, help="evolution time")
    p.add_argument("--repeats", type=int, default=2)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: parse: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, DimensionError, DomainError) as exc:
        print(f"error: validation: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return 4
    except OneParticleError as exc:  # pragma: no cover - safety net
        print(f"error: internal: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
