"""Command-line front end.

Subcommands: `steady` (steady-state report for a named scenario),
`trajectories` (conditional trajectory ensemble as CSV), `sweep` (1- or
2-axis parameter sweep as long-format CSV) and `validate` (the full
oracle-vs-simulator check table).

Every invocation resolves flags over the JSON config over scenario defaults;
runs that write an output file also write a `<out>.meta.json` sidecar with
the fully resolved configuration, seed and package version, which is enough
to reproduce the output byte for byte.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 degenerate steady state.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .loop import DegenerateSteadyStateError, sample_ensemble, steady_state
from .metrics import linear_entropy, purity, von_neumann_entropy
from .quantum import maximally_mixed
from .scenarios import ConfigError, build_protocols, metric_row, resolve_config, scenario_kind
from .validate import run_all

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.15g}"
    return "" if x is None else str(x)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_sidecar(path: str, command: str, cfg: dict) -> None:
    meta = {"command": command, "config": cfg, "version": __version__}
    with open(path + ".meta.json", "w", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return cfg


_OVERRIDE_KEYS = ("scenario", "d", "tau", "tau1", "tau2", "gamma", "eta0", "chi",
                  "phi1", "a", "b", "seed", "steps", "ntraj", "threads")


def _overrides(args: argparse.Namespace) -> dict:
    ov = {k: getattr(args, k, None) for k in _OVERRIDE_KEYS}
    ov["lambda"] = getattr(args, "lam", None)
    return ov


def _resolved(args: argparse.Namespace) -> dict:
    return resolve_config(_load_config(args.config), _overrides(args))


def _threads(cfg: dict) -> int:
    return cfg["threads"] if cfg["threads"] > 0 else (os.cpu_count() or 1)


def cmd_steady(args: argparse.Namespace) -> int:
    cfg = _resolved(args)
    if scenario_kind(cfg["scenario"]) != "steady":
        raise ConfigError(f"scenario {cfg['scenario']!r} is not a single-protocol steady scenario")
    (_, p), = build_protocols(cfg).items()
    rho, gap = steady_state(p)
    spectrum = np.sort(np.linalg.eigvalsh(rho))[::-1]
    row = metric_row(cfg)

    print(f"scenario: {cfg['scenario']} (d={cfg['d']}, tau1={cfg['tau1']:g}, tau2={cfg['tau2']:g}, "
          f"lambda={cfg['lambda']:g}, gamma={cfg['gamma']:g})")
    print("spectrum: " + ", ".join(_fmt(float(x)) for x in spectrum))
    print(f"von Neumann entropy (normalised): {_fmt(von_neumann_entropy(rho, normalised=True))}")
    print(f"linear entropy: {_fmt(linear_entropy(rho))}")
    print(f"purity: {_fmt(purity(rho))}")
    print(f"rho11: {_fmt(float(rho[1, 1].real))}")
    print(f"spectral gap: {_fmt(gap)}")
    oracle_keys = [k for k in row if k.startswith("oracle")]
    if oracle_keys:
        for k in oracle_keys:
            print(f"{k}: {_fmt(row[k])}")
    else:
        print("oracle: none for this configuration")
    print("resolved config: " + json.dumps(cfg, sort_keys=True, default=str))

    if args.out:
        header = ["scenario"] + [f"alpha{i}" for i in range(len(spectrum))] + list(row.keys())
        values = [cfg["scenario"]] + [float(x) for x in spectrum] + [row[k] for k in row]
        _write_csv(args.out, header, [values])
        _write_sidecar(args.out, "steady", cfg)
    return EXIT_OK


def cmd_trajectories(args: argparse.Namespace) -> int:
    cfg = _resolved(args)
    protos = build_protocols(cfg)
    if scenario_kind(cfg["scenario"]) != "steady" or "mf" not in protos:
        raise ConfigError("trajectories need a measurement-feedback scenario (mf-*, ad-mf)")
    p = protos["mf"]
    ens = sample_ensemble(
        maximally_mixed(cfg["d"]), p, cfg["steps"], cfg["ntraj"],
        seed=cfg["seed"], threads=_threads(cfg),
    )
    header = ["trajectory_id", "step", "outcome", "probability", "entropy_normalised", "rho11"]
    rows: list[list] = []
    for i in range(cfg["ntraj"]):
        for t in range(cfg["steps"]):
            rows.append([i, t + 1, int(ens.outcomes[i, t]), float(ens.probabilities[i, t]),
                         float(ens.entropies[i, t]), float(ens.rho11[i, t])])
    mean_entropy = ens.entropies.mean(axis=0)
    mean_rho11 = ens.rho11.mean(axis=0)
    for t in range(cfg["steps"]):
        rows.append(["mean", t + 1, None, None, float(mean_entropy[t]), float(mean_rho11[t])])
    if args.out:
        _write_csv(args.out, header, rows)
        _write_sidecar(args.out, "trajectories", cfg)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(_fmt(x) for x in row))
    return EXIT_OK


def _parse_axis(spec: str) -> tuple[str, np.ndarray]:
    try:
        name, rng = spec.split("=", 1)
        lo, hi, count = rng.split(":")
        values = np.linspace(float(lo), float(hi), int(count))
    except ValueError as exc:
        raise ConfigError(f"bad sweep axis {spec!r}; expected name=lo:hi:count") from exc
    name = name.strip()
    allowed = {"tau", "tau1", "tau2", "lambda", "gamma", "eta0", "chi", "phi1", "a", "b"}
    if name not in allowed:
        raise ConfigError(f"cannot sweep {name!r}; allowed: {sorted(allowed)}")
    return name, values


def _apply_axis_value(cfg: dict, name: str, value: float) -> dict:
    out = dict(cfg)
    out[name] = float(value)
    if name == "tau":
        out["tau1"] = out["tau2"] = float(value)
    if name == "eta0":
        out["eta"] = {"eta0": float(value)}
    return out


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _resolved(args)
    axes = [_parse_axis(s) for s in (args.sweep or [])]
    if not 1 <= len(axes) <= 2:
        raise ConfigError(f"need 1 or 2 --sweep axes, got {len(axes)}")
    if len(axes) == 1:
        points = [(v,) for v in axes[0][1]]
    else:
        points = [(a, b) for a in axes[0][1] for b in axes[1][1]]

    rows = []
    header: list[str] | None = None
    for values in points:
        point_cfg = cfg
        for (name, _), v in zip(axes, values):
            point_cfg = _apply_axis_value(point_cfg, name, v)
        row = metric_row(point_cfg)
        if header is None:
            header = [name for name, _ in axes] + list(row.keys())
        rows.append([float(v) for v in values] + [row.get(k) for k in header[len(axes):]])
    assert header is not None

    if args.out:
        _write_csv(args.out, header, rows)
        _write_sidecar(args.out, "sweep", cfg | {"sweep": args.sweep})
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(_fmt(x) for x in row))
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        results = run_all(points=args.points, only=args.only)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc
    width = max(len(r.name) for r in results)
    failures = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        failures += 0 if r.passed else 1
        print(f"{status}  {r.name:<{width}}  {r.detail}")
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return EXIT_OK if failures == 0 else EXIT_VALIDATION


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON config file")
    sp.add_argument("--scenario", help="scenario name (overrides config)")
    sp.add_argument("--d", type=int, help="system/controller dimension")
    sp.add_argument("--tau", type=float, help="transmissivity of both couplings")
    sp.add_argument("--tau1", type=float, help="transmissivity of the first coupling")
    sp.add_argument("--tau2", type=float, help="transmissivity of the second coupling")
    sp.add_argument("--lambda", dest="lam", type=float, help="depolarising parameter (1 = no noise)")
    sp.add_argument("--gamma", type=float, help="amplitude-damping strength")
    sp.add_argument("--eta0", type=float, help="controller |0> population (qubit family)")
    sp.add_argument("--chi", type=float, help="in-loop rotation angle")
    sp.add_argument("--phi1", type=float, help="in-loop unitary phase")
    sp.add_argument("--a", type=float, help="POVM diagonal element a")
    sp.add_argument("--b", type=float, help="POVM diagonal element b")
    sp.add_argument("--seed", type=int, help="RNG seed")
    sp.add_argument("--steps", type=int, help="cycles per trajectory")
    sp.add_argument("--ntraj", type=int, help="number of trajectories")
    sp.add_argument("--threads", type=int, help="worker pool size (0 = hardware)")
    sp.add_argument("--out", help="output CSV path (writes a .meta.json sidecar)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qfeedback",
                                 description="collision-model quantum feedback simulator")
    ap.add_argument("--version", action="version", version=f"qfeedback {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("steady", help="steady-state report for a scenario")
    _add_common(sp)
    sp.set_defaults(func=cmd_steady)

    sp = sub.add_parser("trajectories", help="conditional trajectory ensemble CSV")
    _add_common(sp)
    sp.set_defaults(func=cmd_trajectories)

    sp = sub.add_parser("sweep", help="sweep 1-2 parameters, long-format CSV")
    _add_common(sp)
    sp.add_argument("--sweep", action="append", metavar="NAME=LO:HI:COUNT",
                    help="axis spec, repeatable (max twice)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("validate", help="run the oracle and property check table")
    sp.add_argument("--points", type=int, default=100, help="points per oracle grid")
    sp.add_argument("--only", help="run only checks whose name contains this substring")
    sp.set_defaults(func=cmd_validate)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateSteadyStateError as exc:
        print(f"degenerate steady state: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
