"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines, or
``python tests/test_acceptance.py`` for a standalone report.
"""
import itertools
import time

import numpy as np
import pytest

from packwalk.builder import (CoinTable, WalkConfig, build_coin_circuit,
                              build_coin_circuit_optimized, build_pack, build_q0, build_q10,
                              build_q11, build_q2, build_shift_circuit, build_walk_step,
                              reference_table, structural_depth)
from packwalk.circuit import (Circuit, CostModel, Kind, WireLayout, circuit_depth,
                              circuit_unitary, circuit_width, swap)
from packwalk.compiler import compile_circuit, compiled_metrics, phase_aligned_distance
from packwalk.simulator import direct_walk_oracle, position_distribution, run_walk, sample
from packwalk.verify import basis_sweep_error

from conftest import walker_block

ATOMIC = CostModel.atomic()
SEEDS = (0, 1, 2)


def verdict(number, title, ok, detail):
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})")
    assert ok, detail


def test_criterion_1_coin_circuit_correctness():
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(1, 5):
        tables = [CoinTable.random(n, s) for s in SEEDS]
        for m, coins in itertools.product(range(n + 1), tables):
            worst = max(worst, basis_sweep_error(build_coin_circuit(n, m, coins), coins))
    elapsed = time.perf_counter() - t0
    verdict(1, "U|S> = (C (x) I)|S> for n<=4, all m, 3 seeds", worst < 1e-12 and elapsed < 60,
            f"max error {worst:.2e}, {elapsed:.1f} s")


def test_criterion_2_depth_formula():
    bad = []
    for n in range(1, 7):
        coins = CoinTable.identity(n)
        for m in range(n + 1):
            r = n - m
            delta = int(m == 0)
            measured = circuit_depth(build_coin_circuit(n, m, coins), ATOMIC, "per-pack-sum")
            closed = (1 << r) * (20 * m + 2 * ATOMIC.toffoli_depth(r) + 8 * delta - 5) - 2
            if measured != closed or structural_depth(n, m, ATOMIC) != closed:
                bad.append(("U", n, m, measured, closed))
            subs = {
                "Q0": (circuit_depth(build_q0(0, n, m, coins), ATOMIC), 1),
                "Q2": (circuit_depth(build_q2(n, m), ATOMIC), 5 * m - 2 * (1 - delta)),
                "Q10": (circuit_depth(build_q10(n, m), ATOMIC), m - 1 + delta),
            }
            last = (1 << r) - 1
            for i in range(1 << r):
                want = 1 - int(i == last) + ATOMIC.toffoli_depth(r) + 3 * m
                subs[f"Q11[{i}]"] = (circuit_depth(build_q11(i, n, m), ATOMIC), want)
            bad += [(name, n, m, got, want) for name, (got, want) in subs.items() if got != want]
    verdict(2, "per-pack-sum depth equals closed form, n<=6, atomic", not bad,
            f"{len(bad)} mismatches" + (f", first {bad[0]}" if bad else ""))


def test_criterion_3_width_formula():
    bad = [(n, m) for n in range(1, 9) for m in range(n + 1)
           if circuit_width(build_coin_circuit(n, m, CoinTable.identity(n)), ATOMIC)
           != n + (1 << (m + 1))]
    verdict(3, "width equals n + 2^(m+1), n<=8", not bad, f"{len(bad)} mismatches")


def test_criterion_4_reference_walk():
    t0 = time.perf_counter()
    coins = reference_table()
    oracle = position_distribution(direct_walk_oracle(3, coins, 100), WireLayout(3, 0))
    dists = []
    for m in range(4):
        cfg = WalkConfig(3, m, coins, steps=100)
        dists.append(position_distribution(run_walk(cfg), cfg.layout).probabilities)
    linf = max(float(np.max(np.abs(d - oracle.probabilities))) for d in dists)
    pair = max(float(np.max(np.abs(a - b))) for a, b in itertools.combinations(dists, 2))
    elapsed = time.perf_counter() - t0
    verdict(4, "n=3 table coins, 100 steps, m=0..3 vs oracle",
            linf < 1e-10 and pair < 1e-12 and elapsed < 120,
            f"Linf {linf:.2e}, pairwise {pair:.2e}, {elapsed:.1f} s")


def test_criterion_5_optimized_variant():
    worst, fewer_ok = 0.0, True
    for n in range(1, 5):
        for m in range(n + 1):
            for s in SEEDS:
                coins = CoinTable.random(n, s)
                plain = build_coin_circuit(n, m, coins)
                opt = build_coin_circuit_optimized(n, m, coins)
                a, leak_a = walker_block(plain, n)
                b, leak_b = walker_block(opt, n)
                worst = max(worst, float(np.max(np.abs(a - b))), leak_a, leak_b)
            nots = [sum(g.kind is Kind.NOT for g in c.gates) for c in (plain, opt)]
            if n - m >= 2 and not nots[1] < nots[0]:
                fewer_ok = False
    # full-space agreement is reported only
    full = max(float(np.max(np.abs(
        circuit_unitary(build_coin_circuit(n, m, CoinTable.random(n, 0)))
        - circuit_unitary(build_coin_circuit_optimized(n, m, CoinTable.random(n, 0))))))
        for n in range(1, 4) for m in range(n + 1) if n + (1 << (m + 1)) <= 10)
    verdict(5, "optimized variant equals plain on |S>, fewer NOTs when n-m>=2",
            worst < 1e-12 and fewer_ok,
            f"max diff {worst:.2e}, fewer NOTs: {fewer_ok}, full-matrix diff {full:.2e} (info)")


def builder_outputs_up_to_8_wires():
    for n, m in itertools.product(range(1, 7), range(2)):
        if m > n or n + (1 << (m + 1)) > 8:
            continue
        coins = CoinTable.random(n, n + 10 * m)
        yield f"U({n},{m})", build_coin_circuit(n, m, coins)
        yield f"U'({n},{m})", build_coin_circuit_optimized(n, m, coins)
        yield f"S({n})", build_shift_circuit(n, m)
        yield f"pack0({n},{m})", build_pack(0, n, m, coins)
        if n <= 5:
            yield f"step({n},{m})", build_walk_step(WalkConfig(n, m, coins))


def test_criterion_6_compiler_round_trip():
    worst, name = 0.0, ""
    for label, c in builder_outputs_up_to_8_wires():
        d = phase_aligned_distance(circuit_unitary(compile_circuit(c)), circuit_unitary(c))
        if d >= worst:
            worst, name = d, label
    lone = compile_circuit(Circuit(WireLayout(1, 0), (swap(0, 1),)))
    three_cnots = [g.kind for g in lone.gates] == ["CNOT"] * 3
    verdict(6, "compiled unitary equals source (<= 8 wires); SWAP is 3 CNOTs",
            worst < 1e-9 and three_cnots, f"max distance {worst:.2e} at {name}")


def test_criterion_7_compiled_trend():
    coins = CoinTable.random(4, 0)
    rows = [compiled_metrics(build_coin_circuit(4, m, coins)) for m in range(5)]
    depth = [r["depth"] for r in rows]
    width = [r["width"] for r in rows]
    size = [r["size"] for r in rows]
    ok = (all(a >= b for a, b in zip(depth, depth[1:]))
          and all(a < b for a, b in zip(width, width[1:])))
    size_note = "decreasing" if all(a > b for a, b in zip(size, size[1:])) else "not monotone"
    verdict(7, "n=4 compiled depth non-increasing, width increasing in m", ok,
            f"depth {depth}, width {width}, size {size} ({size_note}, informational)")


def test_criterion_8_sampling():
    coins = reference_table()
    cfg = WalkConfig(3, 0, coins, steps=100)
    exact = position_distribution(run_walk(cfg), cfg.layout)
    hist = sample(exact, 10000, seed=0)
    tv = 0.5 * float(np.sum(np.abs(hist.frequencies() - exact.probabilities)))
    verdict(8, "10000 seeded shots within TV 0.05 of exact", tv < 0.05, f"TV {tv:.4f}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-s", "-q"]))
