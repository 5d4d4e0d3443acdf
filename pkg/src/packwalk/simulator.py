"""Dense statevector execution, position marginals, sampling and the matrix oracle."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .builder import CoinTable, WalkConfig, build_walk_step
from .circuit import Circuit, CircuitError, Gate, Kind, SizeError, WireLayout
from .kernels import coin_unitary

__all__ = [
    "StateVector", "Distribution", "Histogram", "coin_unitary", "apply_circuit",
    "position_distribution", "sample", "coin_operator_matrix", "shift_matrix",
    "direct_walk_oracle", "run_walk", "propagate_basis", "MAX_DENSE_WIRES",
]

MAX_DENSE_WIRES = 26
NORM_TOL = 1e-10


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    n_wires: int

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n_wires,):
            raise ValueError(f"expected {1 << self.n_wires} amplitudes, "
                             f"got shape {self.amplitudes.shape}")
        norm = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm^2 is {norm}, not 1")

    @classmethod
    def basis(cls, n_wires: int, index: int = 0) -> StateVector:
        if n_wires > MAX_DENSE_WIRES:
            raise SizeError(f"{n_wires} wires exceed the dense limit of {MAX_DENSE_WIRES}")
        amps = np.zeros(1 << n_wires, dtype=complex)
        amps[index] = 1.0
        return cls(amps, n_wires)

    @classmethod
    def walker(cls, layout: WireLayout, position: int = 0, coin: int = 0) -> StateVector:
        """Walker at ``position`` with coin ``coin``, every ancilla at 0."""
        if not 0 <= position < 1 << layout.n or coin not in (0, 1):
            raise ValueError("initial position or coin out of range")
        return cls.basis(layout.n_wires, position | (coin << layout.n))


@dataclass(frozen=True)
class Distribution:
    probabilities: np.ndarray

    def __post_init__(self):
        p = self.probabilities
        if np.any(p < -1e-15) or abs(float(p.sum()) - 1.0) > NORM_TOL:
            raise ValueError("not a probability distribution")

    def to_dict(self) -> dict[str, float]:
        return {str(k): float(v) for k, v in enumerate(self.probabilities)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        return _csv(enumerate(self.probabilities.tolist()))


@dataclass(frozen=True)
class Histogram:
    counts: np.ndarray
    shots: int
    seed: int

    def __post_init__(self):
        if int(self.counts.sum()) != self.shots:
            raise ValueError("counts do not add up to the number of shots")

    def frequencies(self) -> np.ndarray:
        return self.counts / self.shots if self.shots else np.zeros(len(self.counts))

    def to_dict(self) -> dict[str, int]:
        return {str(k): int(v) for k, v in enumerate(self.counts)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        return _csv(enumerate(self.counts.tolist()))


def _csv(rows: Iterable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["position", "value"])
    writer.writerows(rows)
    return buf.getvalue()


def apply_circuit(state: StateVector, circuit) -> StateVector:
    """Run every gate of ``circuit`` (abstract or compiled) on a copy of ``state``."""
    w = circuit.n_wires
    if state.n_wires != w:
        raise ValueError(f"state has {state.n_wires} wires, circuit has {w}")
    psi = state.amplitudes.copy().reshape((2,) * w)
    for g in circuit.gates:
        g.apply(psi, w)
    out = psi.reshape(-1)
    ph = getattr(circuit, "phase", 0.0)
    if ph:
        out = out * np.exp(1j * ph)
    return StateVector(out, w)


def position_distribution(state: StateVector, layout: WireLayout) -> Distribution:
    probs = np.abs(state.amplitudes) ** 2
    # position bits are the low n bits of the index
    probs = probs.reshape(-1, 1 << layout.n).sum(axis=0)
    return Distribution(probs)


def ancilla_weight(state: StateVector, layout: WireLayout) -> float:
    """Probability mass on basis states with any ancilla wire set."""
    probs = np.abs(state.amplitudes) ** 2
    return float(probs.reshape(-1, 1 << (layout.n + 1))[1:].sum())


def sample(dist: Distribution, shots: int, seed: int) -> Histogram:
    """Inverse-CDF draws from numpy's PCG64 generator seeded with ``seed``."""
    if shots < 0:
        raise ValueError("shots must be >= 0")
    p = dist.probabilities
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    draws = np.searchsorted(cdf, rng.random(shots), side="right")
    counts = np.bincount(np.minimum(draws, len(p) - 1), minlength=len(p))
    return Histogram(counts, shots, seed)


def coin_operator_matrix(n: int, coins: CoinTable) -> np.ndarray:
    """``sum_k |k><k| (x) C_k`` with index ``k + 2^n * coin``."""
    size = 1 << n
    if coins.n != n:
        raise ValueError("coin table size does not match n")
    mat = np.zeros((2 * size, 2 * size), dtype=complex)
    for k in range(size):
        c = coin_unitary(*coins[k])
        for a in range(2):
            for b in range(2):
                mat[k + a * size, k + b * size] = c[a, b]
    return mat


def shift_matrix(n: int) -> np.ndarray:
    size = 1 << n
    mat = np.zeros((2 * size, 2 * size))
    for k in range(size):
        mat[(k - 1) % size, k] = 1.0
        mat[size + (k + 1) % size, size + k] = 1.0
    return mat


def direct_walk_oracle(n: int, coins: CoinTable, steps: int,
                       initial: StateVector | None = None) -> StateVector:
    """Apply ``(S C)^steps`` to ``initial`` on the n+1 walker wires only."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    size = 1 << n
    if initial is None:
        initial = StateVector.basis(n + 1, 0)
    if initial.n_wires != n + 1:
        raise ValueError(f"oracle state must have {n + 1} wires")
    blocks = np.array([coin_unitary(*coins[k]) for k in range(size)])
    psi = initial.amplitudes.reshape(2, size)
    for _ in range(steps):
        psi = np.einsum("kab,bk->ak", blocks, psi)
        psi = np.stack([np.roll(psi[0], -1), np.roll(psi[1], 1)])
    return StateVector(psi.reshape(-1).copy(), n + 1)


def walker_marginal(state: StateVector, layout: WireLayout) -> np.ndarray:
    """Amplitudes on the n+1 walker wires, assuming ancillas are all 0."""
    return state.amplitudes[: 1 << (layout.n + 1)]


def run_walk(config: WalkConfig, position: int = 0, coin: int = 0,
             check_ancillas: bool = True) -> StateVector:
    """Simulate ``config.steps`` circuit steps from ``|position, coin>``.

    Ancillas are asserted to be back at 0 after every step.
    """
    layout = config.layout
    if layout.n_wires > MAX_DENSE_WIRES:
        raise SizeError(f"{layout.n_wires} wires exceed the dense limit of {MAX_DENSE_WIRES}")
    step = build_walk_step(config)
    state = StateVector.walker(layout, position, coin)
    for t in range(config.steps):
        state = apply_circuit(state, step)
        if check_ancillas:
            leak = ancilla_weight(state, layout)
            if leak > NORM_TOL:
                raise CircuitError(f"ancillas not restored after step {t} (weight {leak:.3e})")
    return state


def _bit(index: int, wire: int) -> int:
    return (index >> wire) & 1


def _fires(index: int, controls) -> bool:
    return all(_bit(index, w) == int(pol) for w, pol in controls)


def propagate_basis(circuit: Circuit, amplitudes: Mapping[int, complex] | int
                    ) -> dict[int, complex]:
    """Push a sparse superposition of basis states through ``circuit``.

    Permutation gates relabel indices and COIN gates split at most one entry
    into two, so wide circuits stay cheap on basis inputs.
    """
    if isinstance(amplitudes, int):
        amplitudes = {amplitudes: 1.0 + 0j}
    state = dict(amplitudes)
    for g in circuit.gates:
        state = _sparse_gate(g, state)
    return state


def _sparse_gate(g: Gate, state: dict[int, complex]) -> dict[int, complex]:
    out: dict[int, complex] = {}
    if g.kind is Kind.COIN:
        t = g.targets[0]
        u = g.matrix()
        for idx, amp in state.items():
            if not _fires(idx, g.controls):
                out[idx] = out.get(idx, 0) + amp
                continue
            b = _bit(idx, t)
            base = idx & ~(1 << t)
            for a in (0, 1):
                val = u[a, b] * amp
                if val != 0:
                    key = base | (a << t)
                    out[key] = out.get(key, 0) + val
        return out
    for idx, amp in state.items():
        if _fires(idx, g.controls):
            if g.kind is Kind.SWAP:
                a, b = g.targets
                if _bit(idx, a) != _bit(idx, b):
                    idx ^= (1 << a) | (1 << b)
            else:
                idx ^= 1 << g.targets[0]
        out[idx] = out.get(idx, 0) + amp
    return out
