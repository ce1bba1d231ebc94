"""Command-line experiment runner.

Subcommands:
  psd        stationary distribution CSV plus mode summary JSON
  threshold  rate-ratio integral classification plus capacity-sweep tails
  evolve     master-equation evolution to the stationary law
  simulate   Gillespie ensemble with occupation statistics
  ode        deterministic trajectory or basin-classification grid
  sweep      mode-location scaling and discrete exponents over capacities

Parameters come from a named preset, a flat key = value config file, or
both (the config overrides the preset, command-line flags override both).
Every run writes the fully resolved configuration next to its outputs, so
any result can be reproduced byte for byte from the emitted file alone.
Exit codes: 0 success, 2 configuration or validation error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import asymptotics, deterministic, master_eq, ssa, stationary
from .model import CONFIG_KEYS, parse_config, params_from_config, params_to_config

#: Figure-caption parameter sets; the canonical reference configurations.
PRESETS = {
    "fig1a": {
        "lambda": "1.4", "mu": "1.0", "delta1": "0.45", "delta2": "0.1",
        "delta3": "1.45", "theta": "0.03", "N": "100", "r1": "0.99",
    },
    "fig1b": {
        "lambda": "1.7", "mu": "1.0", "delta1": "0.9", "delta2": "0.0",
        "delta3": "1.7", "theta": "0.03", "N": "100", "r1": "0.99",
    },
    "fig2a": {
        "lambda": "1.4", "mu": "1.0", "delta1": "0.45", "delta2": "0.1",
        "delta3": "1.45", "theta": "0.03", "N": "5000", "r1": "0.99",
    },
    "fig2b": {
        "lambda": "1.7", "mu": "1.0", "delta1": "0.9", "delta2": "0.0",
        "delta3": "1.7", "theta": "0.03", "N": "5000", "r1": "0.99",
    },
}

_MODEL_KEYS = set(CONFIG_KEYS)

#: Non-model keys each subcommand accepts, with defaults injected when the
#: run starts so the emitted effective config is complete.
_COMMAND_KEYS = {
    "psd": {},
    "threshold": {"n_list": "500,1000,2000,5000", "epsilon": "0.05"},
    "evolve": {"start": "delta0", "tol": "1e-8", "max_horizon": "1e6", "times": ""},
    "simulate": {
        "runs": "8", "x0": "", "t_end": "1000.0", "burn_in": "100.0",
        "seed": "0", "epsilon": "0.05",
    },
    "ode": {"x0": "", "t_end": "1000.0", "grid": "100"},
    "sweep": {"n_list": "100,200,400,800"},
}


def _write_atomic(path: Path, data: str) -> None:
    """Write-temp-then-rename so partial output never lands under the name."""
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data)
    os.replace(tmp, path)


def _emit_config(cfg: dict[str, str]) -> str:
    return "".join(f"{key} = {cfg[key]}\n" for key in sorted(cfg))


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _resolve_config(args, command: str) -> dict[str, str]:
    """Merge preset, config file and flags; validate keys; fill defaults."""
    cfg: dict[str, str] = {}
    if args.preset is not None:
        if args.preset not in PRESETS:
            raise ValueError(
                f"unknown preset {args.preset!r}; choose from {sorted(PRESETS)}"
            )
        cfg.update(PRESETS[args.preset])
    if args.config is not None:
        path = Path(args.config)
        if not path.exists():
            raise ValueError(f"config file not found: {path}")
        cfg.update(parse_config(path.read_text()))
    if not cfg:
        raise ValueError("no parameters: pass --preset, --config or both")

    allowed = _MODEL_KEYS | set(_COMMAND_KEYS[command])
    if args.seed is not None:
        if "seed" not in allowed:
            raise ValueError(f"--seed does not apply to the {command} command")
        cfg["seed"] = str(args.seed)
    if args.n_list is not None:
        if "n_list" not in allowed:
            raise ValueError(f"--n-list does not apply to the {command} command")
        cfg["n_list"] = args.n_list
    if args.epsilon is not None:
        if "epsilon" not in allowed:
            raise ValueError(f"--epsilon does not apply to the {command} command")
        cfg["epsilon"] = repr(float(args.epsilon))

    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise ValueError(f"unknown config keys for {command}: {', '.join(unknown)}")
    for key, default in _COMMAND_KEYS[command].items():
        cfg.setdefault(key, default)
    return cfg


def _cfg_float(cfg, key) -> float:
    try:
        return float(cfg[key])
    except ValueError:
        raise ValueError(f"config key {key!r} is not a number: {cfg[key]!r}") from None


def _cfg_int(cfg, key) -> int:
    try:
        return int(cfg[key])
    except ValueError:
        raise ValueError(f"config key {key!r} is not an integer: {cfg[key]!r}") from None


def _cfg_int_list(cfg, key) -> list[int]:
    try:
        return [int(v) for v in cfg[key].split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"config key {key!r} is not a comma list of integers: {cfg[key]!r}") from None


def _finish(out_dir: Path, cfg: dict[str, str], params) -> None:
    # Re-emit the model keys canonically so the round-trip is exact even if
    # the input config spelled numbers differently.
    cfg.update(params_to_config(params))
    _write_atomic(out_dir / "effective_config.cfg", _emit_config(cfg))


def cmd_psd(cfg: dict[str, str], out_dir: Path) -> None:
    params = params_from_config(cfg)
    dist = stationary.psd_product(params)
    profile = stationary.mode_profile(dist)
    buf = io.StringIO()
    dist.to_csv(buf)
    _write_atomic(out_dir / "psd.csv", buf.getvalue())
    _write_atomic(out_dir / "modes.json", _json_text(profile.to_summary()))
    _finish(out_dir, cfg, params)


def cmd_threshold(cfg: dict[str, str], out_dir: Path) -> None:
    params = params_from_config(cfg)
    report = asymptotics.markov_exponent(params)
    diagnostic = asymptotics.limit_distribution_diagnostic(
        params, _cfg_int_list(cfg, "n_list"), _cfg_float(cfg, "epsilon")
    )
    _write_atomic(out_dir / "threshold.json", _json_text(report.to_summary()))
    buf = io.StringIO()
    diagnostic.to_csv(buf)
    _write_atomic(out_dir / "diagnostic.csv", buf.getvalue())
    _finish(out_dir, cfg, params)


def _start_vector(label: str, dimension: int) -> master_eq.ProbabilityVector:
    if label == "delta0":
        return master_eq.ProbabilityVector.point_mass(0, dimension)
    if label == "deltaN":
        return master_eq.ProbabilityVector.point_mass(dimension - 1, dimension)
    if label == "uniform":
        return master_eq.ProbabilityVector.uniform(dimension)
    if label.startswith("state:"):
        return master_eq.ProbabilityVector.point_mass(int(label.split(":", 1)[1]), dimension)
    raise ValueError(f"unknown start {label!r}; use delta0, deltaN, uniform or state:<i>")


def cmd_evolve(cfg: dict[str, str], out_dir: Path) -> None:
    params = params_from_config(cfg)
    gen = master_eq.build_generator(params)
    p = _start_vector(cfg["start"], gen.dimension)
    times = [float(v) for v in cfg["times"].split(",") if v.strip()]
    if times:
        if sorted(times) != times or times[0] < 0:
            raise ValueError("times must be nonnegative and ascending")
        lines = ["t,state,prob\n"]
        previous = 0.0
        for t in times:
            p = master_eq.evolve(gen, p, t - previous)
            previous = t
            lines.extend(
                f"{t!r},{i},{float(p.probs[i])!r}\n" for i in range(gen.dimension)
            )
        _write_atomic(out_dir / "evolve.csv", "".join(lines))
        summary = {"start": cfg["start"], "checkpoints": times, "mode": "checkpoints"}
    else:
        witness, horizon = master_eq.converge_to_stationary(
            gen, p, _cfg_float(cfg, "tol"), max_horizon=_cfg_float(cfg, "max_horizon")
        )
        target = stationary.psd_product(params)
        lines = ["state,prob\n"]
        lines.extend(
            f"{i},{float(witness.probs[i])!r}\n" for i in range(gen.dimension)
        )
        _write_atomic(out_dir / "final.csv", "".join(lines))
        summary = {
            "start": cfg["start"],
            "mode": "converge",
            "horizon": horizon,
            "achieved_tv": master_eq.total_variation(witness.probs, target.probs),
        }
    _write_atomic(out_dir / "evolve_summary.json", _json_text(summary))
    _finish(out_dir, cfg, params)


def cmd_simulate(cfg: dict[str, str], out_dir: Path) -> None:
    params = params_from_config(cfg)
    x0 = _cfg_int(cfg, "x0") if cfg["x0"] else params.capacity_n // 2
    cfg["x0"] = str(x0)
    t_end = _cfg_float(cfg, "t_end")
    burn_in = _cfg_float(cfg, "burn_in")
    seed = _cfg_int(cfg, "seed")
    summary = ssa.ensemble(
        params, _cfg_int(cfg, "runs"), x0, t_end, seed,
        burn_in=burn_in, epsilon=_cfg_float(cfg, "epsilon"),
    )
    buf = io.StringIO()
    ssa.simulate(params, x0, t_end, seed).to_csv(buf)
    _write_atomic(out_dir / "trajectory.csv", buf.getvalue())

    n = params.capacity_n
    lines = ["state,density,mean_frequency\n"]
    lines.extend(
        f"{i},{i / n!r},{float(summary.mean_occupation[i])!r}\n" for i in range(n + 1)
    )
    _write_atomic(out_dir / "occupation.csv", "".join(lines))
    _write_atomic(out_dir / "ensemble.json", _json_text({
        "extinction_mass": summary.extinction_mass,
        "persistence_mass": summary.persistence_mass,
        "epsilon": summary.epsilon,
        "seeds": list(summary.seeds),
        "t_end": summary.t_end,
        "burn_in": summary.burn_in,
    }))
    _finish(out_dir, cfg, params)


def cmd_ode(cfg: dict[str, str], out_dir: Path) -> None:
    params = params_from_config(cfg)
    t_end = _cfg_float(cfg, "t_end")
    if cfg["x0"]:
        traj = deterministic.integrate(params, _cfg_float(cfg, "x0"), t_end)
        buf = io.StringIO()
        traj.to_csv(buf)
        _write_atomic(out_dir / "ode.csv", buf.getvalue())
        _write_atomic(out_dir / "ode_summary.json", _json_text({
            "x0": _cfg_float(cfg, "x0"),
            "classification": traj.classification,
            "x_plus": traj.x_plus,
        }))
    else:
        grid = _cfg_int(cfg, "grid")
        if grid < 2:
            raise ValueError("grid must be >= 2")
        lines = ["x0,classification,t_final\n"]
        for x0 in np.linspace(0.0, 1.0, grid):
            traj = deterministic.integrate(params, float(x0), t_end)
            lines.append(f"{float(x0)!r},{traj.classification},{float(traj.times[-1])!r}\n")
        _write_atomic(out_dir / "basin.csv", "".join(lines))
    _finish(out_dir, cfg, params)


def cmd_sweep(cfg: dict[str, str], out_dir: Path) -> None:
    params = params_from_config(cfg)
    n_list = _cfg_int_list(cfg, "n_list")
    rows = stationary.mode_scaling_check(params, n_list)
    lines = ["N,i_plus,mode_density,scaled_gap,discrete_exponent\n"]
    for n, density, gap in rows:
        exponent = asymptotics.discrete_markov_exponent(params, n)
        lines.append(f"{n},{round(density * n)},{density!r},{gap!r},{exponent!r}\n")
    _write_atomic(out_dir / "sweep.csv", "".join(lines))
    _finish(out_dir, cfg, params)


_COMMANDS = {
    "psd": cmd_psd,
    "threshold": cmd_threshold,
    "evolve": cmd_evolve,
    "simulate": cmd_simulate,
    "ode": cmd_ode,
    "sweep": cmd_sweep,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alleechain",
        description="Birth-death chain numerics for the logistic model "
        "with mate limitation and immigration.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", help="flat key = value parameter file")
        p.add_argument("--preset", help=f"named parameter set: {', '.join(sorted(PRESETS))}")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--seed", type=int, help="base RNG seed (simulate)")
        p.add_argument("--n-list", help="comma-separated capacities (threshold, sweep)")
        p.add_argument("--epsilon", type=float, help="tail threshold (threshold, simulate)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args, args.command)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](cfg, out_dir)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
