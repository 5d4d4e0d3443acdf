"""Checks of the coin circuit against the block-diagonal coin matrix on |S> states."""
from __future__ import annotations

from typing import Callable

import numpy as np

from .builder import CoinTable, build_coin_circuit, build_coin_circuit_optimized
from .circuit import Circuit
from .simulator import coin_operator_matrix, propagate_basis


def basis_sweep_error(circuit: Circuit, coins: CoinTable) -> float:
    """Max amplitude error of ``circuit`` vs ``C (x) I`` over all walker basis inputs.

    Inputs have every ancilla at 0; any output weight on a nonzero ancilla
    configuration counts as error.
    """
    n = coins.n
    dim = 1 << (n + 1)
    expected = coin_operator_matrix(n, coins)
    err = 0.0
    for col in range(dim):
        out = propagate_basis(circuit, col)
        for idx, amp in out.items():
            want = expected[idx, col] if idx < dim else 0.0
            err = max(err, abs(amp - want))
        for row in np.flatnonzero(expected[:, col]):
            if int(row) not in out:
                err = max(err, abs(expected[row, col]))
    return err


def sweep(n_max: int, tables_for: Callable[[int], list[tuple[str, CoinTable]]],
          optimized: bool = False) -> list[dict]:
    """Error rows for every ``1 <= n <= n_max``, ``0 <= m <= n`` and each
    named coin table ``tables_for(n)`` returns."""
    builder = build_coin_circuit_optimized if optimized else build_coin_circuit
    rows = []
    for n in range(1, n_max + 1):
        cases = tables_for(n)
        for m in range(n + 1):
            for name, coins in cases:
                err = basis_sweep_error(builder(n, m, coins), coins)
                rows.append({"n": n, "m": m, "coins": name, "max_error": err})
    return rows


def seeded_tables(seeds: list[int]) -> Callable[[int], list[tuple[str, CoinTable]]]:
    return lambda n: [(f"seed={s}", CoinTable.random(n, s)) for s in seeds]
