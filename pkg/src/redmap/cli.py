"""``redmap`` command-line front end.

Every subcommand accepts ``--config <json>``, ``--out <dir>``, ``--seed`` and
``--format csv|json``. Exit codes: 0 success, 1 usage or configuration
error, 2 scenario error (a singular map, an entangled input where a product
is required, ...).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import dynmap as dm
from . import golden as pc
from . import reporting as rp
from . import scenarios as sc
from .errors import ConfigError, RedmapError, SingularMap, UnknownScenario
from .unitaries import GateConvention, local_operator, named_gate, pauli, unitary_root

MAP_SCENARIOS = ("sqrtcnot", "cnot_twice", "sqrtcphase")
SCENARIOS = MAP_SCENARIOS + ("mc", "preinitial", "augment", "dimratio", "conventions", "reproduce")
SUBCOMMANDS = {
    "sweep": MAP_SCENARIOS,
    "spectrum": MAP_SCENARIOS,
    "preinitial": ("preinitial",),
    "mcfraction": ("mc",),
    "augment": ("augment",),
    "dimratio": ("dimratio",),
    "conventions": ("conventions",),
    "reproduce-paper": ("reproduce",),
}
SWEEP_HEADER = ("theta", "lambda_minus", "lambda_plus", "verdict", "residual")
ZERO_EIG_RTOL = 1e-9
U64 = 2**64


@dataclass
class RunConfig:
    command: str = "sweep"
    scenario: str = "sqrtcnot"
    theta: float = math.pi / 6
    theta_grid: tuple | None = None
    t_grid: tuple = (0.0, 2 * math.pi, 64)
    generator: str = "cphase_projector"
    gate: str = "SQRT_CNOT"
    local_ops: tuple = ()
    convention: GateConvention | None = None
    seed: int = 0
    ensemble: str = "theorem_family"
    n_samples: int = 200
    s: float = 0.5
    d_s: int = 2
    d_e: tuple = (2, 4, 8, 16, 32, 64, 128, 256, 512, 1024)
    out: str | None = None
    format: str = "csv"

    def thetas(self) -> list[float]:
        if self.theta_grid is None:
            return [self.theta]
        lo, hi, n = self.theta_grid
        return [float(x) for x in np.linspace(lo, hi, n)]

    def times(self) -> list[float]:
        lo, hi, n = self.t_grid
        return [float(x) for x in np.linspace(lo, hi, n)]


# -- configuration -----------------------------------------------------------

def _finite(name, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number")
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite")
    return float(value)


def _count(name, value, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer")
    if value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value}")
    return value


def _grid(name, value) -> tuple:
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigError(f"{name} must be [start, stop, count]")
    lo, hi = _finite(f"{name}[0]", value[0]), _finite(f"{name}[1]", value[1])
    n = _count(f"{name}[2]", value[2])
    if hi < lo:
        raise ConfigError(f"{name} stop must not be below start")
    return (lo, hi, n)


def _seed(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or not 0 <= value < U64:
        raise ConfigError("seed must be an integer in [0, 2^64)")
    return value


def _local_op(i, record) -> dict:
    if not isinstance(record, dict) or set(record) - {"env", "system", "root"}:
        raise ConfigError(f"local_ops[{i}] must be an object with keys env, system, root")
    env, system = record.get("env", "z"), record.get("system", "x")
    for key, name in (("env", env), ("system", system)):
        if name not in ("i", "x", "y", "z"):
            raise ConfigError(f"local_ops[{i}].{key} must be one of i, x, y, z")
    return {"env": env, "system": system, "root": _count(f"local_ops[{i}].root", record.get("root", 1))}


def parse_config(text: str, command: str | None = None) -> RunConfig:
    """Strictly validated :class:`RunConfig` from a JSON document.

    Unknown keys, out-of-range values and unknown scenarios are errors.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    known = {f.name for f in fields(RunConfig)} - {"command"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
    cfg = RunConfig()
    scenario = raw.get("scenario")
    if scenario is not None:
        if scenario not in SCENARIOS:
            raise UnknownScenario(f"unknown scenario {scenario!r}; expected one of {', '.join(SCENARIOS)}")
        cfg.scenario = scenario
    if command is not None:
        allowed = SUBCOMMANDS[command]
        if scenario is None:
            cfg.scenario = allowed[0]
        elif cfg.scenario not in allowed:
            raise ConfigError(f"scenario {cfg.scenario!r} does not fit subcommand {command!r}")
        cfg.command = command
    elif scenario is not None:
        cfg.command = next(c for c, allowed in SUBCOMMANDS.items() if cfg.scenario in allowed)
    if "theta" in raw:
        cfg.theta = _finite("theta", raw["theta"])
    if "theta_grid" in raw:
        cfg.theta_grid = _grid("theta_grid", raw["theta_grid"])
    if "t_grid" in raw:
        cfg.t_grid = _grid("t_grid", raw["t_grid"])
    if "generator" in raw:
        if raw["generator"] not in ("h_phi", "cphase_projector"):
            raise ConfigError("generator must be 'h_phi' or 'cphase_projector'")
        cfg.generator = raw["generator"]
    if "gate" in raw:
        if not isinstance(raw["gate"], str) or raw["gate"].upper() not in ("CNOT", "SQRT_CNOT", "CPHASE", "SQRT_CPHASE"):
            raise ConfigError("gate must be one of CNOT, SQRT_CNOT, CPHASE, SQRT_CPHASE")
        cfg.gate = raw["gate"].upper()
    if "local_ops" in raw:
        if not isinstance(raw["local_ops"], list) or not raw["local_ops"]:
            raise ConfigError("local_ops must be a non-empty list")
        cfg.local_ops = tuple(_local_op(i, r) for i, r in enumerate(raw["local_ops"]))
    if raw.get("convention") is not None:
        try:
            cfg.convention = GateConvention.from_dict(raw["convention"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad convention: {exc}") from None
    if "seed" in raw:
        cfg.seed = _seed(raw["seed"])
    if "ensemble" in raw:
        if raw["ensemble"] not in ("haar_full", "theorem_family"):
            raise ConfigError("ensemble must be 'haar_full' or 'theorem_family'")
        cfg.ensemble = raw["ensemble"]
    if "n_samples" in raw:
        cfg.n_samples = _count("n_samples", raw["n_samples"])
    if "s" in raw:
        cfg.s = _finite("s", raw["s"])
        if not 0 < cfg.s <= 1:
            raise ConfigError("s must lie in (0, 1]")
    if "d_s" in raw:
        cfg.d_s = _count("d_s", raw["d_s"], 2)
    if "d_e" in raw:
        if not isinstance(raw["d_e"], list) or not raw["d_e"]:
            raise ConfigError("d_e must be a non-empty list")
        cfg.d_e = tuple(_count("d_e", v, 2) for v in raw["d_e"])
    if "out" in raw:
        if not isinstance(raw["out"], str):
            raise ConfigError("out must be a path string")
        cfg.out = raw["out"]
    if "format" in raw:
        if raw["format"] not in ("csv", "json"):
            raise ConfigError("format must be 'csv' or 'json'")
        cfg.format = raw["format"]
    return cfg


# -- commands ----------------------------------------------------------------

def extreme_pair(spectrum) -> tuple[float, float]:
    """Smallest and largest Choi eigenvalue after dropping numerical zeros."""
    w = np.asarray(spectrum, dtype=float)
    scale = max(1.0, float(np.max(np.abs(w))))
    nonzero = w[np.abs(w) > ZERO_EIG_RTOL * scale]
    if nonzero.size < 2:
        return float(w.min()), float(w.max())
    return float(nonzero.min()), float(nonzero.max())


SCENARIO_FNS = {
    "sqrtcnot": sc.scenario_sqrtcnot,
    "cnot_twice": sc.scenario_cnot_twice,
    "sqrtcphase": sc.scenario_sqrtcphase,
}


def _sweep_row(scenario: str, conv, theta: float):
    try:
        rep = SCENARIO_FNS[scenario](theta, conv)
    except SingularMap:
        return (theta, math.nan, math.nan, "SINGULAR", ""), None
    lo, hi = extreme_pair(rep.spectrum)
    residual = "" if rep.residual_vs_paper is None else rep.residual_vs_paper
    return (theta, lo, hi, rep.verdict, residual), rep


def cmd_sweep(cfg: RunConfig) -> dict[str, str]:
    conv = cfg.convention or sc.default_convention()
    results = sc.parallel_map(lambda t: _sweep_row(cfg.scenario, conv, t), cfg.thetas())
    if cfg.format == "csv":
        return {"sweep.csv": rp.to_csv(SWEEP_HEADER, [row for row, _ in results])}
    records = [
        rep.to_dict() if rep is not None else {"scenario_id": cfg.scenario, "params": {"theta": row[0]}, "verdict": "SINGULAR"}
        for row, rep in results
    ]
    return {"sweep.json": rp.to_json(records)}


def cmd_spectrum(cfg: RunConfig) -> dict[str, str]:
    """Full Choi spectrum at each theta; a singular map is a scenario error."""
    conv = cfg.convention or sc.default_convention()
    reports = [SCENARIO_FNS[cfg.scenario](t, conv) for t in cfg.thetas()]
    if cfg.format == "json":
        return {"spectrum.json": rp.to_json([r.to_dict() for r in reports])}
    n = reports[0].spectrum.size
    header = ("theta",) + tuple(f"lambda_{i}" for i in range(n)) + ("verdict",)
    rows = [(r.params["theta"], *[float(x) for x in r.spectrum], r.verdict) for r in reports]
    return {"spectrum.csv": rp.to_csv(header, rows)}


def cmd_preinitial(cfg: RunConfig) -> dict[str, str]:
    profile = sc.backward_entropy_profile(cfg.times(), cfg.generator)
    h = sc.H_PHI if cfg.generator == "h_phi" else sc.CPHASE_PROJECTOR
    search = sc.search_pre_initial(sc.psi_theta(cfg.theta), h)
    if cfg.format == "json":
        return {
            "preinitial.json": rp.to_json(
                {
                    "generator": cfg.generator,
                    "profile": [
                        {
                            "t": p.t,
                            "reduced_state": {"re": p.reduced_state.real, "im": p.reduced_state.imag},
                            "entropy_bits": p.entropy_bits,
                            "entropy_nats": p.entropy_nats,
                        }
                        for p in profile
                    ],
                    "search": {"theta": cfg.theta, **asdict(search)},
                }
            )
        }
    header = ("t", "rho00", "rho01_re", "rho01_im", "rho11", "entropy_bits", "entropy_nats")
    rows = [
        (p.t, p.reduced_state[0, 0].real, p.reduced_state[0, 1].real, p.reduced_state[0, 1].imag,
         p.reduced_state[1, 1].real, p.entropy_bits, p.entropy_nats)
        for p in profile
    ]
    found = "" if search.s is None else search.s
    return {
        "preinitial.csv": rp.to_csv(header, rows),
        "preinitial_search.csv": rp.to_csv(
            ("theta", "s", "min_entropy_bits", "s_at_min"), [(cfg.theta, found, search.min_entropy, search.s_at_min)]
        ),
    }


def cmd_mcfraction(cfg: RunConfig) -> dict[str, str]:
    phi = sc.psi_theta(cfg.theta)
    res = sc.mc_cp_fraction(phi, cfg.ensemble, cfg.n_samples, cfg.seed, cfg.s)
    record = {
        "ensemble": cfg.ensemble,
        "theta": cfg.theta,
        "n": cfg.n_samples,
        "seed": cfg.seed,
        "fraction": res.fraction,
        "stderr": res.stderr,
        "n_cp": res.n_cp,
        "n_ncp": res.n_ncp,
        "n_singular": res.n_singular,
    }
    if cfg.format == "json":
        return {"mcfraction.json": rp.to_json({**record, "verdicts": list(res.verdicts)})}
    return {"mcfraction.csv": rp.to_csv(tuple(record), [tuple(record.values())])}


def _augment_rows(cfg: RunConfig):
    if not cfg.local_ops:
        return [(label, n, res) for label, n, res, _, _ in pc.augmentation_table(cfg.theta)]
    conv = cfg.convention or sc.default_convention()
    u_se = named_gate(cfg.gate, conv)
    phi = sc.psi_theta(cfg.theta)
    out = []
    for op in cfg.local_ops:
        env = np.eye(2, dtype=complex) if op["env"] == "i" else pauli(op["env"])
        system = np.eye(2, dtype=complex) if op["system"] == "i" else pauli(op["system"])
        system = unitary_root(system, op["root"], conv.root_branch)
        label = f"s{op['env']}_x_{'root' + str(op['root']) if op['root'] > 1 else ''}s{op['system']}"
        out.append((label, op["root"], sc.augmentation_check(u_se, local_operator(system, env, conv), phi, conv)))
    return out


def cmd_augment(cfg: RunConfig) -> dict[str, str]:
    rows = _augment_rows(cfg)
    if cfg.format == "json":
        return {
            "augment.json": rp.to_json(
                [{"label": label, "root": n, "locality_preserved": r.locality_preserved,
                  "verdict": r.verdict, "min_eigenvalue": r.min_eigenvalue} for label, n, r in rows]
            )
        }
    header = ("label", "root", "locality_preserved", "verdict", "min_eigenvalue")
    return {
        "augment.csv": rp.to_csv(
            header, [(label, n, str(r.locality_preserved).lower(), r.verdict, r.min_eigenvalue) for label, n, r in rows]
        )
    }


def cmd_dimratio(cfg: RunConfig) -> dict[str, str]:
    rows = [(cfg.d_s, d_e, sc.dimension_ratio(cfg.d_s, d_e)) for d_e in cfg.d_e]
    if cfg.format == "json":
        return {"dimratio.json": rp.to_json([{"d_s": a, "d_e": b, **asdict(r)} for a, b, r in rows])}
    header = ("d_s", "d_e", "exact", "paper_approx", "limit")
    return {"dimratio.csv": rp.to_csv(header, [(a, b, r.exact, r.paper_approx, r.limit) for a, b, r in rows])}


def cmd_conventions(cfg: RunConfig) -> dict[str, str]:
    fit = sc.convention_search(strict=False)
    if cfg.format == "json":
        return {"conventions.json": rp.to_json(fit.to_dict())}
    header = ("control_slot", "root_branch", "tensor_order", "state_reading", "cnot_twice", "sqrtcnot", "family", "identity")
    rows = [
        (r["convention"]["control_slot"], r["convention"]["root_branch"], r["convention"]["tensor_order"],
         r["state_reading"], r["cnot_twice"], r["sqrtcnot"], r["family"], r["identity"])
        for r in fit.table
    ]
    return {"conventions.csv": rp.to_csv(header, rows)}


def cmd_reproduce(cfg: RunConfig) -> dict[str, str]:
    checks = pc.run_all(cfg.seed)
    fit = sc._cached_fit()
    report = {
        "seed": cfg.seed,
        "convention": fit.to_dict() | {"table": []},
        "checks": [c.to_dict() for c in checks],
        "passed": sum(c.passed for c in checks),
        "total": len(checks),
    }
    sweep_cfg = RunConfig(command="sweep", scenario="sqrtcnot", theta_grid=(0.0, 1.5, 64))
    return {
        "reproduce.json": rp.to_json(report),
        "checks.csv": rp.to_csv(
            ("check", "status", "value", "tolerance"),
            [(c.name, "PASS" if c.passed else "FAIL", "" if c.value is None else float(c.value),
              "" if c.tolerance is None else float(c.tolerance)) for c in checks],
        ),
        "sweep_sqrtcnot.csv": cmd_sweep(sweep_cfg)["sweep.csv"],
    }


COMMANDS = {
    "sweep": cmd_sweep,
    "spectrum": cmd_spectrum,
    "preinitial": cmd_preinitial,
    "mcfraction": cmd_mcfraction,
    "augment": cmd_augment,
    "dimratio": cmd_dimratio,
    "conventions": cmd_conventions,
    "reproduce-paper": cmd_reproduce,
}


def _pass_table(report_json: str) -> str:
    report = json.loads(report_json)
    width = max(len(c["name"]) for c in report["checks"])
    lines = [f"{c['name']:<{width}}  {'PASS' if c['passed'] else 'FAIL'}" for c in report["checks"]]
    lines.append(f"{report['passed']}/{report['total']} checks passed")
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute ``cfg``; outputs go to ``cfg.out`` or, without one, to stdout."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        outputs = COMMANDS[cfg.command](cfg)
    except SingularMap as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except RedmapError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    if cfg.out is not None:
        try:
            for name, text in outputs.items():
                rp.atomic_write(Path(cfg.out) / name, text)
        except OSError as exc:
            print(f"error: {exc}", file=stderr)
            return 1
    if cfg.command == "reproduce-paper":
        stdout.write(_pass_table(outputs["reproduce.json"]))
    elif cfg.out is None:
        for text in outputs.values():
            stdout.write(text)
    else:
        for name in outputs:
            print(Path(cfg.out) / name, file=stdout)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="redmap", description="Reduced dynamical maps and their complete positivity.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON run configuration")
        p.add_argument("--out", help="output directory (default: print to stdout)")
        p.add_argument("--seed", type=int, help="RNG seed, overrides the config")
        p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
        if name in ("sweep", "spectrum"):
            p.add_argument("--scenario", choices=MAP_SCENARIOS)
        if name in ("sweep", "spectrum", "preinitial", "mcfraction", "augment"):
            p.add_argument("--theta", type=float)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else "{}"
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text, args.command)
        if getattr(args, "scenario", None):
            cfg.scenario = args.scenario
        if getattr(args, "theta", None) is not None:
            cfg.theta = _finite("theta", args.theta)
            cfg.theta_grid = None
        if args.seed is not None:
            cfg.seed = _seed(args.seed)
        if args.out is not None:
            cfg.out = args.out
        if args.format is not None:
            cfg.format = args.format
    except (ConfigError, UnknownScenario) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
