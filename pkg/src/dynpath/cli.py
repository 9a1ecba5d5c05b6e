"""Command-line interface.

Subcommands: ``ett``, ``pmf``, ``simulate``, ``validate``, ``sweep``.
Path configurations come from a key-value text file:

    # one assignment per line, '#' starts a comment
    p = 0.5
    q = 0.5
    model = cant_start        # or resume / retransmit_identical / retransmit_resampled
    edge = 1 0                # <initial 0|1> <constant length>
    edge = 0 pmf 0:0.5 2:0.5  # <initial 0|1> pmf <value>:<prob> ...
    # optional command defaults, overridable by flags:
    # k, samples, seed, horizon, sweep_param, sweep_from, sweep_to, sweep_step

Unknown keys are rejected.  Scalar output is ``key = value`` lines with 12
significant digits; tabular output is CSV with a header row.  Exit codes:
0 success, 1 invalid input, 2 divergent expectation, 3 numerical failure,
4 simulation timeout.  DYNPATH_THREADS caps worker parallelism (absent
means single-threaded); results never depend on the thread count.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .errors import (
    ConfigurationError,
    InfiniteExpectation,
    NumericalSingularity,
    SimulationTimeout,
)
from .model import EdgeDynamics, FailureModel, LengthDist, PathSpec
from .oracle import mc_estimate
from .pgf import ett, pmf
from .validation import run_validation

_SCALAR_KEYS = {
    "p": float,
    "q": float,
    "model": str,
    "k": int,
    "samples": int,
    "seed": int,
    "horizon": int,
    "sweep_param": str,
    "sweep_from": float,
    "sweep_to": float,
    "sweep_step": float,
}


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration file: dynamics, model, edges, command defaults."""

    p: float
    q: float
    model: str
    edges: tuple[tuple[int, LengthDist], ...]
    k: int | None = None
    samples: int | None = None
    seed: int | None = None
    horizon: int | None = None
    sweep_param: str | None = None
    sweep_from: float | None = None
    sweep_to: float | None = None
    sweep_step: float | None = None

    def path(self) -> PathSpec:
        bits = tuple(b for b, _ in self.edges)
        lengths = tuple(ld for _, ld in self.edges)
        try:
            model = FailureModel(self.model)
        except ValueError:
            names = ", ".join(m.value for m in FailureModel)
            raise ConfigurationError(f"unknown model {self.model!r}; expected one of {names}")
        try:
            return PathSpec(bits, lengths, EdgeDynamics(self.p, self.q), model)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc


def _parse_edge(rest: str) -> tuple[int, LengthDist]:
    parts = rest.split()
    if len(parts) < 2:
        raise ConfigurationError(f"edge needs an initial state and a length: {rest!r}")
    if parts[0] not in ("0", "1"):
        raise ConfigurationError(f"edge initial state must be 0 or 1, got {parts[0]!r}")
    initial = int(parts[0])
    if parts[1] == "pmf":
        pairs = []
        for item in parts[2:]:
            try:
                v, pr = item.split(":")
                pairs.append((int(v), float(pr)))
            except ValueError:
                raise ConfigurationError(f"bad pmf entry {item!r}, expected value:prob")
        if not pairs:
            raise ConfigurationError("pmf edge needs at least one value:prob pair")
        try:
            return initial, LengthDist.from_pairs(pairs)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc
    if len(parts) != 2:
        raise ConfigurationError(f"constant edge takes exactly one length: {rest!r}")
    try:
        return initial, LengthDist.constant(int(parts[1]))
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc


def _edge_text(initial: int, ld: LengthDist) -> str:
    if ld.is_constant:
        return f"edge = {initial} {ld.values[0]}"
    body = " ".join(f"{v}:{pr!r}" for v, pr in zip(ld.values, ld.probs))
    return f"edge = {initial} pmf {body}"


def parse_config_text(text: str) -> RunConfig:
    """Parse the key-value configuration format; unknown keys are rejected."""
    scalars: dict[str, object] = {}
    edges: list[tuple[int, LengthDist]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "edge":
            edges.append(_parse_edge(value))
        elif key in _SCALAR_KEYS:
            if key in scalars:
                raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
            try:
                scalars[key] = _SCALAR_KEYS[key](value)
            except ValueError:
                raise ConfigurationError(f"line {lineno}: bad value for {key!r}: {value!r}")
        else:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
    for required in ("p", "q", "model"):
        if required not in scalars:
            raise ConfigurationError(f"missing required key {required!r}")
    if not edges:
        raise ConfigurationError("configuration defines no edges")
    cfg = RunConfig(edges=tuple(edges), **scalars)  # type: ignore[arg-type]
    cfg.path()  # re-validate every module-level invariant on load
    return cfg


def config_to_text(cfg: RunConfig) -> str:
    """Serialize a configuration; parsing the result reproduces it exactly."""
    lines = [f"p = {cfg.p!r}", f"q = {cfg.q!r}", f"model = {cfg.model}"]
    lines += [_edge_text(b, ld) for b, ld in cfg.edges]
    for key in ("k", "samples", "seed", "horizon", "sweep_param", "sweep_from", "sweep_to", "sweep_step"):
        val = getattr(cfg, key)
        if val is not None:
            lines.append(f"{key} = {val!r}" if isinstance(val, float) else f"{key} = {val}")
    return "\n".join(lines) + "\n"


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _thread_count() -> int:
    raw = os.environ.get("DYNPATH_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def cmd_ett(cfg: RunConfig, out) -> int:
    total, per_node = ett(cfg.path())
    out.write(f"ett = {_fmt(total)}\n")
    for i in range(1, len(per_node)):
        out.write(f"arrival_{i} = {_fmt(per_node[i])}\n")
    return 0


def cmd_pmf(cfg: RunConfig, k: int | None, fmt: str, out) -> int:
    result = pmf(cfg.path(), k)
    if fmt == "csv":
        out.write("t,prob\n")
        for t, pr in enumerate(result.coeffs):
            out.write(f"{t},{_fmt(pr)}\n")
        out.write(f"tail,{_fmt(result.tail_mass)}\n")
    else:
        for t, pr in enumerate(result.coeffs):
            out.write(f"t_{t} = {_fmt(pr)}\n")
        out.write(f"tail = {_fmt(result.tail_mass)}\n")
    return 0


def cmd_simulate(cfg: RunConfig, samples: int, seed: int, hist_path: str, out) -> int:
    result = mc_estimate(cfg.path(), samples, seed)
    with open(hist_path, "w", encoding="utf-8") as fh:
        fh.write("t,count\n")
        for t in sorted(result.histogram):
            fh.write(f"{t},{result.histogram[t]}\n")
    out.write(f"mean = {_fmt(result.mean)}\n")
    out.write(f"stderr = {_fmt(result.stderr)}\n")
    out.write(f"samples = {result.samples}\n")
    out.write(f"seed = {result.seed}\n")
    out.write(f"histogram = {hist_path}\n")
    return 0


def cmd_validate(max_n: int, inject_fault: bool, out) -> int:
    report = run_validation(max_n, inject_fault=inject_fault)
    for check in report.checks:
        status = "pass" if check.passed else "FAIL"
        out.write(f"check {check.name} = {status} ({check.detail})\n")
    if report.eq1_rows:
        out.write("eq1_discrepancy_table:\n")
        out.write("n,p,q,D,max_abs_dev,t_at_max,printed_at_D,exact_at_D\n")
        for n, p, q, big_d, dev, t_at, pd, ed in report.eq1_rows:
            out.write(
                f"{n},{_fmt(p)},{_fmt(q)},{big_d},{_fmt(dev)},{t_at},{_fmt(pd)},{_fmt(ed)}\n"
            )
    out.write(f"result = {'pass' if report.passed else 'FAIL'}\n")
    return 0 if report.passed else 1


def cmd_sweep(cfg: RunConfig, param: str, start: float, stop: float, step: float, out) -> int:
    if param not in ("p", "q"):
        raise ConfigurationError(f"sweep parameter must be p or q, got {param!r}")
    if step <= 0:
        raise ConfigurationError(f"sweep step must be positive, got {step}")
    values = []
    v = start
    while v <= stop + 1e-12:
        values.append(round(v, 12))
        v += step

    def one(value: float) -> float:
        swept = replace(cfg, **{param: value})
        return ett(swept.path())[0]

    workers = min(_thread_count(), max(len(values), 1))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, values))
    else:
        results = [one(v) for v in values]
    out.write("param,value,ett\n")
    for v, e in zip(values, results):
        out.write(f"{param},{_fmt(v)},{_fmt(e)}\n")
    if param == "p":
        for (v1, e1), (v2, e2) in zip(zip(values, results), zip(values[1:], results[1:])):
            if e2 > e1 + 1e-9:
                sys.stderr.write(
                    f"warning: ETT increased from {_fmt(e1)} to {_fmt(e2)} "
                    f"between p={_fmt(v1)} and p={_fmt(v2)}\n"
                )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynpath",
        description="Exact traversal-time analysis for paths of intermittently available links",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ett = sub.add_parser("ett", help="expected traversal time and per-node arrivals")
    p_ett.add_argument("--config", required=True)

    p_pmf = sub.add_parser("pmf", help="latency distribution up to degree K")
    p_pmf.add_argument("--config", required=True)
    p_pmf.add_argument("--k", type=int, default=None)
    p_pmf.add_argument("--format", choices=("csv", "kv"), default="kv")

    p_sim = sub.add_parser("simulate", help="seeded Monte Carlo estimate")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--samples", type=int, default=None)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--histogram", default="dynpath_histogram.csv")

    p_val = sub.add_parser("validate", help="oracle-equivalence and reduction checks")
    p_val.add_argument("--max-n", type=int, required=True)
    p_val.add_argument("--inject-fault", action="store_true", help="self-test: force a failure")

    p_sweep = sub.add_parser("sweep", help="ETT across a parameter range, CSV output")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--param", choices=("p", "q"), default=None)
    p_sweep.add_argument("--from", dest="start", type=float, default=None)
    p_sweep.add_argument("--to", dest="stop", type=float, default=None)
    p_sweep.add_argument("--step", type=float, default=None)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args.max_n, args.inject_fault, out)
        cfg = load_config(args.config)
        if args.command == "ett":
            return cmd_ett(cfg, out)
        if args.command == "pmf":
            return cmd_pmf(cfg, args.k if args.k is not None else cfg.k, args.format, out)
        if args.command == "simulate":
            samples = args.samples if args.samples is not None else (cfg.samples or 100_000)
            seed = args.seed if args.seed is not None else (cfg.seed or 0)
            return cmd_simulate(cfg, samples, seed, args.histogram, out)
        if args.command == "sweep":
            param = args.param or cfg.sweep_param
            start = args.start if args.start is not None else cfg.sweep_from
            stop = args.stop if args.stop is not None else cfg.sweep_to
            step = args.step if args.step is not None else cfg.sweep_step
            if param is None or start is None or stop is None or step is None:
                raise ConfigurationError("sweep needs --param, --from, --to and --step")
            return cmd_sweep(cfg, param, start, stop, step, out)
        raise ConfigurationError(f"unknown command {args.command!r}")
    except (ConfigurationError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except InfiniteExpectation as exc:
        sys.stderr.write(f"error: divergent expectation: {exc}\n")
        return 2
    except NumericalSingularity as exc:
        sys.stderr.write(f"error: numerical failure: {exc}\n")
        return 3
    except SimulationTimeout as exc:
        sys.stderr.write(f"error: simulation timeout: {exc}\n")
        return 4


def entrypoint() -> None:
    sys.exit(main())
