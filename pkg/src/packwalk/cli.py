"""Command-line entry point: ``packwalk {run,verify,sweep,export}``.

Exit codes: 0 success, 2 usage, 3 resource limit, 4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import textio
from .builder import (CoinTable, WalkConfig, build_coin_circuit, build_coin_circuit_optimized,
                      build_walk_step, reference_table, structural_depth, structural_width)
from .circuit import CostModel, SizeError, circuit_depth, circuit_width
from .compiler import compile_circuit, compiled_metrics
from .simulator import (MAX_DENSE_WIRES, StateVector, direct_walk_oracle,
                        position_distribution, run_walk, sample)
from .verify import seeded_tables, sweep

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE, EXIT_VERIFY = 0, 2, 3, 4
RUN_TOLERANCE = 1e-8
VERIFY_TOLERANCE = 1e-10


class UsageError(ValueError):
    pass


@dataclass
class RunSpec:
    n: int = 3
    m: int = 0
    steps: int = 100
    shots: int = 10000
    seed: int | None = None
    coins: str = "table"
    optimized: bool = False
    position: int = 0
    coin: int = 0
    cost_model: str = "linear"
    out: str | None = None


def resolve_coins(source: str, n: int, seed: int | None) -> CoinTable:
    """``table`` (bundled 8-site angles), ``random``, ``identity`` or a JSON file path."""
    if source == "table":
        table = reference_table()
    elif source == "random":
        if seed is None:
            raise UsageError("--coins random needs --seed")
        return CoinTable.random(n, seed)
    elif source == "identity":
        return CoinTable.identity(n)
    else:
        try:
            table = CoinTable.load(source)
        except OSError as exc:
            raise UsageError(f"cannot read coin file {source!r}: {exc}") from None
    if table.n != n:
        raise UsageError(f"coin table has {len(table)} entries, n={n} needs {1 << n}")
    return table


def _spec_from(args: argparse.Namespace) -> RunSpec:
    values = {}
    if getattr(args, "config", None):
        try:
            values.update(json.loads(Path(args.config).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"bad config file: {exc}") from None
    known = {f.name for f in fields(RunSpec)}
    unknown = set(values) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for name in known:
        val = getattr(args, name, None)
        if val is not None:
            values[name] = val
    spec = RunSpec(**values)
    if spec.n < 1 or not 0 <= spec.m <= spec.n:
        raise UsageError("need n >= 1 and 0 <= m <= n")
    if spec.steps < 0 or spec.shots < 0:
        raise UsageError("steps and shots must be >= 0")
    return spec


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_run(spec: RunSpec) -> int:
    coins = resolve_coins(spec.coins, spec.n, spec.seed)
    config = WalkConfig(spec.n, spec.m, coins, spec.steps, spec.optimized,
                        CostModel.named(spec.cost_model))
    if config.layout.n_wires > MAX_DENSE_WIRES:
        raise SizeError(f"n={spec.n}, m={spec.m} needs {config.layout.n_wires} wires; "
                        f"dense limit is {MAX_DENSE_WIRES}")
    state = run_walk(config, spec.position, spec.coin)
    exact = position_distribution(state, config.layout)
    start = StateVector.basis(spec.n + 1, spec.position | (spec.coin << spec.n))
    oracle_state = direct_walk_oracle(spec.n, coins, spec.steps, start)
    oracle = position_distribution(oracle_state, config.layout)
    linf = float(np.max(np.abs(exact.probabilities - oracle.probabilities)))
    seed = spec.seed if spec.seed is not None else 0
    hist = sample(exact, spec.shots, seed)
    report = {
        "spec": asdict(spec),
        "wires": config.layout.n_wires,
        "exact": exact.to_dict(),
        "histogram": hist.to_dict(),
        "oracle": oracle.to_dict(),
        "linf": linf,
        "passed": linf < RUN_TOLERANCE,
    }
    _write(json.dumps(report, indent=2) + "\n", spec.out)
    return EXIT_OK if linf < RUN_TOLERANCE else EXIT_VERIFY


def cmd_verify(n_max: int, seeds: list[int], coins: str = "random", optimized: bool = False,
               out: str | None = None) -> int:
    if n_max < 1:
        raise UsageError("--n-max must be >= 1")
    if coins == "random":
        tables_for = seeded_tables(seeds)
    else:
        tables_for = lambda n: [(coins, resolve_coins(coins, n, None))]
    rows = sweep(n_max, tables_for, optimized)
    worst = max(r["max_error"] for r in rows)
    report = {"rows": rows, "max_error": worst, "tolerance": VERIFY_TOLERANCE,
              "passed": worst < VERIFY_TOLERANCE}
    _write(json.dumps(report, indent=2) + "\n", out)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


SWEEP_COLUMNS = ["n", "m", "structural_depth", "structural_width", "compiled_depth",
                 "compiled_width", "compiled_size", "formula_depth", "match"]


def sweep_rows(n: int, cost: CostModel, compile_: bool = True, coins: CoinTable | None = None
               ) -> list[dict]:
    """One row per m.  ``structural_*`` are measured on the built circuit
    (per-pack-sum depth), ``formula_depth`` is the closed form."""
    coins = coins or CoinTable.random(n, 0)
    rows = []
    for m in range(n + 1):
        circuit = build_coin_circuit(n, m, coins)
        depth = circuit_depth(circuit, cost, "per-pack-sum")
        width = circuit_width(circuit, cost)
        formula = structural_depth(n, m, cost)
        row = {"n": n, "m": m, "structural_depth": depth, "structural_width": width,
               "compiled_depth": "", "compiled_width": "", "compiled_size": "",
               "formula_depth": formula,
               "match": depth == formula and width == structural_width(n, m, cost)}
        if compile_:
            metrics = compiled_metrics(circuit)
            row.update(compiled_depth=metrics["depth"], compiled_width=metrics["width"],
                       compiled_size=metrics["size"])
        rows.append(row)
    return rows


def rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (str(v).lower() if isinstance(v, bool) else v)
                         for k, v in row.items()})
    return buf.getvalue()


def cmd_sweep(n: int, cost_model: str = "linear", compile_: bool = True,
              coins: CoinTable | None = None, out: str | None = None) -> int:
    if n < 1:
        raise UsageError("--n must be >= 1")
    rows = sweep_rows(n, CostModel.named(cost_model), compile_, coins)
    _write(rows_to_csv(rows, SWEEP_COLUMNS), out)
    return EXIT_OK if all(r["match"] for r in rows) else EXIT_VERIFY


def cmd_export(n: int, m: int, coins: CoinTable, optimized: bool = False, compile_: bool = False,
               step: bool = False, out: str | None = None) -> int:
    if step:
        circuit = build_walk_step(WalkConfig(n, m, coins, optimized=optimized))
    else:
        builder = build_coin_circuit_optimized if optimized else build_coin_circuit
        circuit = builder(n, m, coins)
    _write(textio.dumps(compile_circuit(circuit) if compile_ else circuit), out)
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="packwalk", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--n", type=int)
        sp.add_argument("--m", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--coins", help="table | random | identity | path to JSON coin file")
        sp.add_argument("--optimized", action="store_true", default=None)
        sp.add_argument("--out")

    run = sub.add_parser("run", help="simulate the walk and compare with the matrix oracle")
    common(run)
    run.add_argument("--steps", type=int)
    run.add_argument("--shots", type=int)
    run.add_argument("--position", type=int)
    run.add_argument("--coin", type=int, choices=(0, 1))
    run.add_argument("--cost-model", dest="cost_model", choices=("atomic", "linear"))
    run.add_argument("--config", help="JSON file with run settings; flags override it")

    ver = sub.add_parser("verify", help="check U|S> = (C (x) I)|S> on all basis inputs")
    ver.add_argument("--n-max", dest="n_max", type=int, default=3)
    ver.add_argument("--seeds", type=int, default=3, help="number of random coin tables")
    ver.add_argument("--seed", type=int, default=0, help="first seed")
    ver.add_argument("--coins", default="random", help="random | identity | table | path")
    ver.add_argument("--optimized", action="store_true")
    ver.add_argument("--out")

    sw = sub.add_parser("sweep", help="depth/width table over m as CSV")
    sw.add_argument("--n", type=int, required=True)
    sw.add_argument("--cost-model", dest="cost_model", choices=("atomic", "linear"),
                    default="linear")
    sw.add_argument("--no-compile", dest="compile", action="store_false")
    sw.add_argument("--coins", default="random")
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--out")

    ex = sub.add_parser("export", help="write a circuit in the text format")
    common(ex)
    ex.add_argument("--compile", action="store_true")
    ex.add_argument("--step", action="store_true", help="include the shift")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(_spec_from(args))
        if args.command == "verify":
            seeds = list(range(args.seed, args.seed + args.seeds))
            return cmd_verify(args.n_max, seeds, args.coins, args.optimized, args.out)
        if args.command == "sweep":
            coins = resolve_coins(args.coins, args.n, args.seed)
            return cmd_sweep(args.n, args.cost_model, args.compile, coins, args.out)
        n = args.n if args.n is not None else 2
        m = args.m if args.m is not None else 0
        if n < 1 or not 0 <= m <= n:
            raise UsageError("need n >= 1 and 0 <= m <= n")
        seed = args.seed if args.seed is not None else 0
        coins = resolve_coins(args.coins or "random", n, seed)
        return cmd_export(n, m, coins, bool(args.optimized), args.compile, args.step, args.out)
    except SizeError as exc:
        print(f"packwalk: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"packwalk: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
