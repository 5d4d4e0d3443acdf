"""Lowering of abstract circuits to {RX, RY, RZ, P, CNOT}.

Multi-controlled NOTs with three or more controls use a linear scheme that
borrows one idle wire in an unknown state when the layout has one, and an
ancilla-free controlled-V recursion (quadratic gate count) otherwise.
Global phase is accumulated in ``CompiledCircuit.phase``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from . import kernels
from .circuit import Circuit, CircuitError, Gate, Kind, WireLayout, asap_depth

BASIS_KINDS = ("RX", "RY", "RZ", "P", "CNOT")
_ROTATIONS = {"RX": kernels.rx, "RY": kernels.ry, "RZ": kernels.rz, "P": kernels.phase}
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


@dataclass(frozen=True)
class BasisGate:
    """A basis gate; CNOT wires are ``(control, target)``."""

    kind: str
    wires: tuple[int, ...]
    param: float | None = None

    def __post_init__(self):
        if self.kind not in BASIS_KINDS:
            raise CircuitError(f"unknown basis gate {self.kind!r}")
        if self.kind == "CNOT":
            if len(self.wires) != 2 or self.wires[0] == self.wires[1] or self.param is not None:
                raise CircuitError("CNOT takes two distinct wires and no parameter")
        elif len(self.wires) != 1 or self.param is None or not math.isfinite(self.param):
            raise CircuitError(f"{self.kind} takes one wire and one finite angle")

    def matrix(self) -> np.ndarray:
        if self.kind == "CNOT":
            return kernels.CNOT
        return _ROTATIONS[self.kind](self.param)

    def apply(self, psi: np.ndarray, w: int) -> None:
        if self.kind == "CNOT":
            kernels.apply_x(psi, w, self.wires[1], [(self.wires[0], True)])
        else:
            kernels.apply_1q(psi, w, self.wires[0], self.matrix())

    def inverse(self) -> BasisGate:
        if self.kind == "CNOT":
            return self
        return BasisGate(self.kind, self.wires, -self.param)


@dataclass(frozen=True)
class CompiledCircuit:
    layout: WireLayout
    gates: tuple[BasisGate, ...]
    phase: float = 0.0

    def __post_init__(self):
        w = self.layout.n_wires
        for g in self.gates:
            if any(x >= w for x in g.wires):
                raise CircuitError(f"{g} touches a wire outside the {w}-wire layout")

    @property
    def n_wires(self) -> int:
        return self.layout.n_wires


def rz_gate(w: int, a: float) -> BasisGate:
    return BasisGate("RZ", (w,), float(a))


def ry_gate(w: int, a: float) -> BasisGate:
    return BasisGate("RY", (w,), float(a))


def cnot_gate(c: int, t: int) -> BasisGate:
    return BasisGate("CNOT", (c, t))


def coin_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """Angles ``(alpha, theta, phi, lambda)`` of the coin form of a 2x2 unitary."""
    c, s = abs(u[0, 0]), abs(u[1, 0])
    theta = 2 * math.atan2(s, c)
    if s < 1e-14:
        alpha = float(np.angle(u[0, 0]))
        return alpha, 0.0, float(np.angle(u[1, 1])) - alpha, 0.0
    if c < 1e-14:
        alpha = float(np.angle(u[1, 0]))
        return alpha, theta, 0.0, float(np.angle(-u[0, 1])) - alpha
    alpha = float(np.angle(u[0, 0]))
    return (alpha, theta, float(np.angle(u[1, 0])) - alpha,
            float(np.angle(-u[0, 1])) - alpha)


def decompose_1q(alpha: float, theta: float, phi: float, lam: float,
                 wire: int = 0) -> tuple[list[BasisGate], float]:
    """``K = e^{i(alpha + (phi+lam)/2)} RZ(phi) RY(theta) RZ(lam)``.

    Returns gates in execution order and the global phase.
    """
    ph = alpha + (phi + lam) / 2
    if theta == 0:
        total = phi + lam
        return ([rz_gate(wire, total)] if total else []), ph
    gates = []
    if lam:
        gates.append(rz_gate(wire, lam))
    gates.append(ry_gate(wire, theta))
    if phi:
        gates.append(rz_gate(wire, phi))
    return gates, ph


def decompose_controlled_1q(control: int, target: int,
                            angles: Sequence[float]) -> list[BasisGate]:
    """Exact controlled coin: ``A X B X C`` on the target with ``ABC = I``
    and the coin's phase moved onto the control as a P gate."""
    alpha, theta, phi, lam = angles
    gamma = alpha + (phi + lam) / 2
    gates: list[BasisGate] = []
    if theta == 0:
        beta = phi + lam
        if beta:
            gates += [rz_gate(target, beta / 2), cnot_gate(control, target),
                      rz_gate(target, -beta / 2), cnot_gate(control, target)]
    else:
        if lam - phi:
            gates.append(rz_gate(target, (lam - phi) / 2))
        gates.append(cnot_gate(control, target))
        if phi + lam:
            gates.append(rz_gate(target, -(phi + lam) / 2))
        gates.append(ry_gate(target, -theta / 2))
        gates.append(cnot_gate(control, target))
        gates.append(ry_gate(target, theta / 2))
        if phi:
            gates.append(rz_gate(target, phi))
    if gamma:
        gates.append(BasisGate("P", (control,), float(gamma)))
    return gates


def _sqrt_unitary(u: np.ndarray) -> np.ndarray:
    t, z = scipy.linalg.schur(u, output="complex")
    return z @ np.diag(np.sqrt(np.diag(t))) @ z.conj().T


class _Emitter:
    def __init__(self):
        self.gates: list[BasisGate] = []
        self.phase = 0.0

    def add_phase(self, ph: float) -> None:
        # kept reduced: an unreduced running sum drifts by ~1e-10 rad
        self.phase = math.remainder(self.phase + ph, 2 * math.pi)

    def x(self, w: int) -> None:
        # X = i RX(pi)
        self.gates.append(BasisGate("RX", (w,), math.pi))
        self.add_phase(math.pi / 2)

    def u(self, w: int, angles: Sequence[float]) -> None:
        gates, ph = decompose_1q(*angles, wire=w)
        self.gates += gates
        self.add_phase(ph)

    def cu(self, c: int, t: int, angles: Sequence[float]) -> None:
        self.gates += decompose_controlled_1q(c, t, angles)

    def h(self, w: int) -> None:
        self.u(w, coin_angles(_H))

    def toffoli(self, c1: int, c2: int, t: int) -> None:
        T, Tdg = math.pi / 4, -math.pi / 4
        p = lambda w, a: self.gates.append(BasisGate("P", (w,), a))
        cx = lambda c, tt: self.gates.append(cnot_gate(c, tt))
        self.h(t)
        cx(c2, t); p(t, Tdg); cx(c1, t); p(t, T)
        cx(c2, t); p(t, Tdg); cx(c1, t)
        p(c2, T); p(t, T)
        self.h(t)
        cx(c1, c2); p(c1, T); p(c2, Tdg); cx(c1, c2)

    def mcx(self, controls: Sequence[tuple[int, bool]], t: int,
            idle: Sequence[int] = ()) -> None:
        negs = [w for w, pol in controls if not pol]
        for w in negs:
            self.x(w)
        self._mcx_pos([w for w, _ in controls], t, idle)
        for w in negs:
            self.x(w)

    def _mcx_pos(self, ctrls: list[int], t: int, idle: Sequence[int]) -> None:
        k = len(ctrls)
        if k == 0:
            self.x(t)
        elif k == 1:
            self.gates.append(cnot_gate(ctrls[0], t))
        elif k == 2:
            self.toffoli(ctrls[0], ctrls[1], t)
        elif idle:
            self._mcx_one_dirty(ctrls, t, idle[0])
        else:
            self._mcu_free(ctrls, t, _X)

    def _vchain(self, ctrls: list[int], t: int, dirty: list[int]) -> None:
        """k controls with k-2 borrowed wires in any state: 4(k-2) Toffolis."""
        k = len(ctrls)
        if k <= 2:
            self._mcx_pos(ctrls, t, ())
            return
        a = dirty[: k - 2]
        if len(a) < k - 2:
            raise CircuitError("not enough borrowed wires for the Toffoli chain")

        def ladder():
            for i in range(k - 2, 1, -1):
                self.toffoli(ctrls[i], a[i - 2], a[i - 1])
            self.toffoli(ctrls[0], ctrls[1], a[0])
            for i in range(2, k - 1):
                self.toffoli(ctrls[i], a[i - 2], a[i - 1])

        self.toffoli(ctrls[k - 1], a[k - 3], t)
        ladder()
        self.toffoli(ctrls[k - 1], a[k - 3], t)
        ladder()

    def _mcx_one_dirty(self, ctrls: list[int], t: int, spare: int) -> None:
        half = (len(ctrls) + 1) // 2
        first, second = ctrls[:half], ctrls[half:]
        for _ in range(2):
            self._vchain(second + [spare], t, first)
            self._vchain(first, spare, second + [t])

    def _mcu_free(self, ctrls: list[int], t: int, u: np.ndarray) -> None:
        k = len(ctrls)
        if k == 0:
            self.u(t, coin_angles(u))
            return
        if k == 1:
            self.cu(ctrls[0], t, coin_angles(u))
            return
        if k == 2 and np.allclose(u, _X, atol=1e-15):
            self.toffoli(ctrls[0], ctrls[1], t)
            return
        v = _sqrt_unitary(u)
        v_angles = coin_angles(v)
        vdg_angles = coin_angles(v.conj().T)
        last, rest = ctrls[-1], ctrls[:-1]
        self.cu(last, t, v_angles)
        self._mcx_pos(rest, last, [t])
        self.cu(last, t, vdg_angles)
        self._mcx_pos(rest, last, [t])
        self._mcu_free(rest, t, v)


def decompose_mcx(controls: Sequence[int | tuple[int, bool]], target: int,
                  idle: Sequence[int] = ()) -> tuple[list[BasisGate], float]:
    """Basis gates (and global phase) for a multi-controlled NOT."""
    em = _Emitter()
    ctrls = [c if isinstance(c, tuple) else (c, True) for c in controls]
    em.mcx(ctrls, target, idle)
    return em.gates, em.phase


def _lower(gate: Gate, em: _Emitter, n_wires: int) -> None:
    idle = [w for w in range(n_wires) if w not in gate.wires]
    negs = [w for w, pol in gate.controls if not pol]
    ctrls = [w for w, _ in gate.controls]
    if gate.kind in (Kind.NOT, Kind.MCX):
        em.mcx(list(gate.controls), gate.targets[0], idle)
        return
    for w in negs:
        em.x(w)
    if gate.kind is Kind.SWAP:
        a, b = gate.targets
        if not ctrls:
            em.gates += [cnot_gate(a, b), cnot_gate(b, a), cnot_gate(a, b)]
        else:
            em.gates.append(cnot_gate(b, a))
            em._mcx_pos(ctrls + [a], b, idle)
            em.gates.append(cnot_gate(b, a))
    elif gate.kind is Kind.COIN:
        t = gate.targets[0]
        if not ctrls:
            em.u(t, gate.params)
        elif len(ctrls) == 1:
            em.cu(ctrls[0], t, gate.params)
        else:
            em._mcu_free(ctrls, t, gate.matrix())
    else:
        raise CircuitError(f"cannot lower {gate.kind!r}")
    for w in negs:
        em.x(w)


def _merge_phase(h: BasisGate, g: BasisGate) -> float | None:
    """Global phase left when ``g`` directly follows ``h``, or None if they don't cancel."""
    if h.kind != g.kind or h.wires != g.wires:
        return None
    if h.kind == "CNOT":
        return 0.0
    turns = (h.param + g.param) / (2 * math.pi)
    q = round(turns)
    if abs(turns - q) > 1e-12:
        return None
    # R(2 pi q) = (-1)^q I for the rotations, P(2 pi q) = I
    return 0.0 if h.kind == "P" else math.pi * q


def cancel_inverse_pairs(gates: Sequence[BasisGate], phase: float = 0.0
                         ) -> tuple[list[BasisGate], float]:
    """Remove adjacent pairs that multiply to identity up to global phase."""
    out: list[BasisGate | None] = []
    stacks: dict[int, list[int]] = {}
    for g in gates:
        tops = {stacks[w][-1] if stacks.get(w) else None for w in g.wires}
        if len(tops) == 1:
            j = tops.pop()
            if j is not None and set(out[j].wires) == set(g.wires):
                dphase = _merge_phase(out[j], g)
                if dphase is not None:
                    out[j] = None
                    phase = math.remainder(phase + dphase, 2 * math.pi)
                    for w in g.wires:
                        stacks[w].pop()
                    continue
        for w in g.wires:
            stacks.setdefault(w, []).append(len(out))
        out.append(g)
    return [g for g in out if g is not None], phase


def compile_circuit(circuit: Circuit, optimize: bool = True) -> CompiledCircuit:
    em = _Emitter()
    for g in circuit.gates:
        _lower(g, em, circuit.n_wires)
    gates, phase = em.gates, em.phase
    if optimize:
        gates, phase = cancel_inverse_pairs(gates, phase)
    return CompiledCircuit(circuit.layout, tuple(gates), math.remainder(phase, 2 * math.pi))


compile = compile_circuit


def inverse_compiled(circuit: CompiledCircuit) -> CompiledCircuit:
    return CompiledCircuit(circuit.layout, tuple(g.inverse() for g in reversed(circuit.gates)),
                           -circuit.phase)


def compiled_metrics(circuit: Circuit | CompiledCircuit) -> dict[str, int]:
    if isinstance(circuit, Circuit):
        circuit = compile_circuit(circuit)
    return {
        "depth": asap_depth((g.wires, 1) for g in circuit.gates),
        "width": circuit.n_wires,
        "size": len(circuit.gates),
    }


def phase_aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``min_phi ||a - e^{i phi} b||_F``."""
    overlap = np.vdot(b, a)
    rot = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(a - rot * b))
