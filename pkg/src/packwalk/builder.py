"""Construction of the pack-based position-dependent coin circuit.

The coin operator on ``2**n`` sites is applied in ``2**(n-m)`` sequential
packs.  Each pack flags the ``2**m`` sites it is responsible for on a one-hot
ancillary position register, routes the principal coin onto the matching
ancillary coin wire, applies the ``2**m`` coins in one layer, then uncomputes.

All builders return circuits in execution order (first gate acts first).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .circuit import (Circuit, CircuitError, CostModel, WireLayout, cnot, coin,
                      concat, inverse, mcx, not_gate, swap)

Angles = tuple[float, float, float, float]
_ANGLE_KEYS = ("alpha", "theta", "phi", "lambda")


@dataclass(frozen=True)
class CoinTable:
    """Per-site coin angles ``(alpha, theta, phi, lambda)``, entry k for site k."""

    n: int
    angles: tuple[Angles, ...]

    def __post_init__(self):
        if len(self.angles) != 1 << self.n:
            raise ValueError(f"need {1 << self.n} coin entries for n={self.n}, "
                             f"got {len(self.angles)}")
        for row in self.angles:
            if len(row) != 4 or not all(math.isfinite(a) for a in row):
                raise ValueError(f"bad coin angles {row!r}")

    def __getitem__(self, k: int) -> Angles:
        return self.angles[k]

    def __len__(self) -> int:
        return len(self.angles)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> CoinTable:
        n = int(round(math.log2(len(rows)))) if rows else -1
        return cls(n, tuple(tuple(float(a) for a in r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> CoinTable:
        return cls(n, ((0.0, 0.0, 0.0, 0.0),) * (1 << n))

    @classmethod
    def uniform(cls, n: int, angles: Sequence[float]) -> CoinTable:
        return cls(n, (tuple(float(a) for a in angles),) * (1 << n))

    @classmethod
    def random(cls, n: int, seed: int) -> CoinTable:
        """alpha, theta drawn from [0, pi); phi, lambda from [-pi, pi)."""
        rng = np.random.default_rng(seed)
        size = 1 << n
        ab = rng.uniform(0.0, np.pi, size=(size, 2))
        pl = rng.uniform(-np.pi, np.pi, size=(size, 2))
        return cls(n, tuple((float(a), float(t), float(p), float(l))
                            for (a, t), (p, l) in zip(ab, pl)))

    def to_json(self) -> str:
        return json.dumps([dict(zip(_ANGLE_KEYS, row)) for row in self.angles], indent=2)

    @classmethod
    def from_json(cls, text: str) -> CoinTable:
        data = json.loads(text)
        if not isinstance(data, list):
            raise ValueError("coin file must hold a JSON array")
        try:
            rows = [tuple(float(entry[k]) for k in _ANGLE_KEYS) for entry in data]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"coin entries need keys {_ANGLE_KEYS}") from exc
        if len(rows) == 0 or len(rows) & (len(rows) - 1):
            raise ValueError("number of coin entries must be a power of two")
        return cls.from_rows(rows)

    @classmethod
    def load(cls, path: str | Path) -> CoinTable:
        return cls.from_json(Path(path).read_text())


def reference_table() -> CoinTable:
    """The bundled 8-site angle table used for the n=3 distribution runs."""
    return CoinTable.load(Path(__file__).with_name("data") / "reference_coins.json")


@dataclass(frozen=True)
class WalkConfig:
    n: int
    m: int
    coins: CoinTable
    steps: int = 1
    optimized: bool = False
    cost: CostModel = field(default_factory=CostModel)

    def __post_init__(self):
        _check(self.n, self.m)
        if self.coins.n != self.n:
            raise ValueError(f"coin table is for n={self.coins.n}, walk has n={self.n}")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")

    @property
    def layout(self) -> WireLayout:
        return WireLayout(self.n, self.m)


def _check(n: int, m: int) -> WireLayout:
    if n < 1:
        raise CircuitError("walk builders need at least one position qubit")
    return WireLayout(n, m)


def _check_stage(i: int, n: int, m: int) -> None:
    if not 0 <= i < 1 << (n - m):
        raise CircuitError(f"stage {i} out of range for n={n}, m={m}")


def ancilla_index_l(k: int) -> int:
    """Index of the first ancillary coin holding copies of position bit ``k``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    l = 1
    for j in range(1, k + 1):
        l = (1 << (j - 1)) - 1 + l
    return l


def build_q0(i: int, n: int, m: int, coins: CoinTable) -> Circuit:
    """Coins ``C_{i 2^m + k}`` on ``s_k``, each controlled by ``b'_k``."""
    layout = _check(n, m)
    _check_stage(i, n, m)
    size = layout.pack_size
    gates = tuple(coin(layout.s(k), coins[i * size + k], [layout.bp(k)]) for k in range(size))
    return Circuit(layout, gates).labelled("Q0")


def build_q10(n: int, m: int) -> Circuit:
    """Fan out position bits ``b_1..b_{m-1}`` onto the ancillary coins.

    Bit ``b_k`` ends up copied ``2**k - 1`` times on ``s_{l_k} ..``, doubling
    the number of copies per round so the whole fan-out takes ``m - 1`` layers.
    """
    layout = _check(n, m)
    gates = []
    for j in range(m - 1):
        for k in range(j + 1, m):
            lk = ancilla_index_l(k)
            if j == 0:
                gates.append(cnot(layout.b(k), layout.s(lk)))
                continue
            gates.append(cnot(layout.b(k), layout.s(lk + (1 << j) - 1)))
            for p in range((1 << j) - 1):
                gates.append(cnot(layout.s(lk + p), layout.s(lk + p + (1 << j))))
    return Circuit(layout, tuple(gates)).labelled("Q10")


def stage_flips(i: int, n: int, m: int) -> list[int]:
    """Position bits flipped so the stage-i Toffoli fires on ``b_{n-1}..b_m == i``."""
    return [k for k in range(m, n) if (i >> (k - m)) & 1 == 0]


def optimized_flips(i: int, n: int, m: int) -> list[int]:
    """Flips left once consecutive stages' flips have cancelled."""
    return [k for k in range(m, n) if i % (1 << (k - m)) == 0]


def build_generalized_toffoli(i: int, n: int, m: int, flips: Sequence[int] | None = None
                              ) -> Circuit:
    """NOTs on the zero bits of ``i`` then an (n-m)-controlled NOT onto ``b'_0``."""
    layout = _check(n, m)
    _check_stage(i, n, m)
    if flips is None:
        flips = stage_flips(i, n, m)
    gates = [not_gate(layout.b(k)) for k in flips]
    gates.append(mcx([layout.b(k) for k in range(m, n)], layout.bp(0)))
    return Circuit(layout, tuple(gates))


def _controlled_swaps(layout: WireLayout) -> list:
    gates = []
    for j in range(layout.m):
        half = 1 << j
        gates.append(swap(layout.bp(0), layout.bp(half), [layout.b(j)]))
        lj = ancilla_index_l(j)
        for k in range(1, half):
            gates.append(swap(layout.bp(k), layout.bp(k + half), [layout.s(lj + k - 1)]))
    return gates


def build_q11(i: int, n: int, m: int, flips: Sequence[int] | None = None) -> Circuit:
    """Stage-i Toffoli followed by the controlled-SWAP layers ``B_0 .. B_{m-1}``.

    Layer ``B_j`` moves the flag from ``b'_k`` to ``b'_{k+2^j}`` when position
    bit ``j`` is set; all but the first swap read ``b_j`` from its copies.
    """
    layout = _check(n, m)
    toffoli = build_generalized_toffoli(i, n, m, flips)
    return Circuit(layout, toffoli.gates + tuple(_controlled_swaps(layout))).labelled("Q11")


def build_q1(i: int, n: int, m: int, flips: Sequence[int] | None = None) -> Circuit:
    layout = _check(n, m)
    q10 = build_q10(n, m)
    return concat(layout, [q10, build_q11(i, n, m, flips), inverse(q10)])


def build_q2(n: int, m: int) -> Circuit:
    """Route the principal coin to ``s_p`` where ``b'_p`` is the set flag.

    A CNOT cascade first accumulates, on the top wire of each block of the
    one-hot register, whether the flag lies in that block's upper half; a
    binary tree of controlled SWAPs then halves the candidate range per layer,
    undoing one level of the cascade after each layer.
    """
    layout = _check(n, m)
    top = layout.pack_size - 1
    gates = []
    for j in range(m - 1):
        for k in range((1 << (m - j - 1)) - 1):
            gates.append(cnot(layout.bp(top - (1 << j) - (k << (j + 1))),
                              layout.bp(top - (k << (j + 1)))))
    for j in range(m):
        width = 1 << (m - j)
        for k in range(1 << j):
            gates.append(swap(layout.s(k * width), layout.s(k * width + width // 2),
                              [layout.bp((k + 1) * width - 1)]))
        if j < m - 1:
            step = 1 << (m - j - 1)
            for l in range((1 << (j + 1)) - 1):
                gates.append(cnot(layout.bp(top - step // 2 - l * step),
                                  layout.bp(top - l * step)))
    return Circuit(layout, tuple(gates)).labelled("Q2")


def build_pack(i: int, n: int, m: int, coins: CoinTable) -> Circuit:
    layout = _check(n, m)
    q1 = build_q1(i, n, m)
    q2 = build_q2(n, m)
    return concat(layout, [q1, q2, build_q0(i, n, m, coins), inverse(q2), inverse(q1)])


def build_pack_optimized(i: int, n: int, m: int, coins: CoinTable) -> Circuit:
    """Pack whose position-bit flips are left in place for the next stage.

    Only correct as part of the full product over all stages.
    """
    layout = _check(n, m)
    p1 = build_q1(i, n, m, optimized_flips(i, n, m))
    p1_bar = inverse(build_q1(i, n, m, flips=()))
    q2 = build_q2(n, m)
    return concat(layout, [p1, q2, build_q0(i, n, m, coins), inverse(q2), p1_bar])


def _coins_for(n: int, coins: CoinTable) -> None:
    if coins.n != n:
        raise ValueError(f"coin table is for n={coins.n}, circuit has n={n}")


def build_coin_circuit(n: int, m: int, coins: CoinTable) -> Circuit:
    layout = _check(n, m)
    _coins_for(n, coins)
    return concat(layout, [build_pack(i, n, m, coins) for i in range(1 << (n - m))])


def build_coin_circuit_optimized(n: int, m: int, coins: CoinTable) -> Circuit:
    layout = _check(n, m)
    _coins_for(n, coins)
    return concat(layout, [build_pack_optimized(i, n, m, coins) for i in range(1 << (n - m))])


def build_shift_circuit(n: int, m: int = 0) -> Circuit:
    """Cyclic decrement of the position when the coin is 0, increment when 1.

    Each cascade flips ``b_j`` (highest first) when all lower bits are 0
    (borrow) or all are 1 (carry).
    """
    layout = _check(n, m)
    s0 = layout.principal_coin
    gates = []
    for positive in (False, True):
        for j in reversed(range(n)):
            ctrls = [(layout.b(p), positive) for p in range(j)] + [(s0, positive)]
            gates.append(mcx(ctrls, layout.b(j)))
    return Circuit(layout, tuple(gates)).labelled("S")


def build_walk_step(config: WalkConfig) -> Circuit:
    builder = build_coin_circuit_optimized if config.optimized else build_coin_circuit
    coin_part = builder(config.n, config.m, config.coins)
    return coin_part + build_shift_circuit(config.n, config.m)


def structural_width(n: int, m: int, cost: CostModel | None = None) -> int:
    cost = cost or CostModel()
    WireLayout(n, m)
    return n + (1 << (m + 1)) + cost.toffoli_width(n - m)


def structural_depth(n: int, m: int, cost: CostModel | None = None) -> int:
    """Closed-form depth of the unoptimized coin circuit."""
    cost = cost or CostModel()
    WireLayout(n, m)
    per_pack = 20 * m + 2 * cost.toffoli_depth(n - m) + 8 * (m == 0) - 5
    return (1 << (n - m)) * per_pack - 2
