"""Gate-level circuit IR, register layout and structural analyzers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels

MAX_UNITARY_WIRES = 12


class CircuitError(ValueError):
    """Raised for structurally invalid gates or circuits."""


class SizeError(ValueError):
    """Raised when a dense object would be too large to build."""


@dataclass(frozen=True)
class WireLayout:
    """Wire assignment for a walk on ``2**n`` sites with packs of ``2**m`` coins.

    Wires are numbered position bits ``b_0..b_{n-1}``, then the principal coin
    ``s_0``, the ancillary coins ``s_1..s_{2^m-1}`` and finally the ancillary
    positions ``b'_0..b'_{2^m-1}``.
    """

    n: int
    m: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.m <= self.n:
            raise CircuitError(f"need 0 <= m <= n, got n={self.n}, m={self.m}")

    @property
    def pack_size(self) -> int:
        return 1 << self.m

    @property
    def n_wires(self) -> int:
        return self.n + 2 * self.pack_size

    def b(self, p: int) -> int:
        if not 0 <= p < self.n:
            raise CircuitError(f"position bit {p} out of range")
        return p

    def s(self, k: int) -> int:
        if not 0 <= k < self.pack_size:
            raise CircuitError(f"coin wire s_{k} out of range")
        return self.n + k

    def bp(self, k: int) -> int:
        if not 0 <= k < self.pack_size:
            raise CircuitError(f"ancillary position b'_{k} out of range")
        return self.n + self.pack_size + k

    @property
    def position_wires(self) -> tuple[int, ...]:
        return tuple(range(self.n))

    @property
    def principal_coin(self) -> int:
        return self.n

    @property
    def ancillary_coins(self) -> tuple[int, ...]:
        return tuple(self.s(k) for k in range(1, self.pack_size))

    @property
    def ancillary_positions(self) -> tuple[int, ...]:
        return tuple(self.bp(k) for k in range(self.pack_size))

    @property
    def ancilla_wires(self) -> tuple[int, ...]:
        return self.ancillary_coins + self.ancillary_positions

    def wire_names(self) -> list[str]:
        names = [f"b{p}" for p in range(self.n)]
        names += [f"s{k}" for k in range(self.pack_size)]
        names += [f"b'{k}" for k in range(self.pack_size)]
        return names


class Kind(str, Enum):
    NOT = "NOT"
    COIN = "COIN"
    SWAP = "SWAP"
    MCX = "MCX"


@dataclass(frozen=True)
class Gate:
    """One abstract gate.

    ``controls`` holds ``(wire, positive)`` pairs; a negative control fires
    on ``|0>``.  ``params`` is ``(alpha, theta, phi, lambda)`` for COIN.
    """

    kind: Kind
    targets: tuple[int, ...]
    controls: tuple[tuple[int, bool], ...] = ()
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if not isinstance(self.kind, Kind):
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        n_targets = 2 if self.kind is Kind.SWAP else 1
        if len(self.targets) != n_targets:
            raise CircuitError(f"{self.kind.value} takes {n_targets} target(s)")
        wires = list(self.targets) + [w for w, _ in self.controls]
        if len(set(wires)) != len(wires):
            raise CircuitError(f"repeated wire in {self}")
        if any(w < 0 for w in wires):
            raise CircuitError("negative wire index")
        if self.kind is Kind.NOT and self.controls:
            raise CircuitError("controlled NOT must be expressed as MCX")
        if self.kind is Kind.MCX and not self.controls:
            raise CircuitError("MCX needs at least one control")
        if self.kind is Kind.COIN:
            if len(self.params) != 4 or not all(math.isfinite(p) for p in self.params):
                raise CircuitError("COIN needs four finite angles")
        elif self.params:
            raise CircuitError(f"{self.kind.value} takes no parameters")

    @property
    def wires(self) -> tuple[int, ...]:
        return self.targets + tuple(w for w, _ in self.controls)

    def matrix(self) -> np.ndarray:
        """Target-space 2x2 matrix (NOT, MCX, COIN only)."""
        if self.kind is Kind.COIN:
            return kernels.coin_unitary(*self.params)
        if self.kind in (Kind.NOT, Kind.MCX):
            return np.array([[0, 1], [1, 0]], dtype=complex)
        raise CircuitError("SWAP has no single-wire matrix")

    def adjoint(self) -> Gate:
        if self.kind is not Kind.COIN:
            return self
        # K(a, t, p, l)^dagger = K(-a, -t, -l, -p)
        a, t, p, l = self.params
        return Gate(Kind.COIN, self.targets, self.controls, (-a, -t, -l, -p))

    def relabel(self, mapping: Sequence[int]) -> Gate:
        return Gate(self.kind, tuple(mapping[t] for t in self.targets),
                    tuple((mapping[w], pol) for w, pol in self.controls), self.params)

    def apply(self, psi: np.ndarray, w: int) -> None:
        if self.kind is Kind.SWAP:
            kernels.apply_swap(psi, w, *self.targets, self.controls)
        elif self.kind is Kind.COIN:
            kernels.apply_1q(psi, w, self.targets[0], self.matrix(), self.controls)
        else:
            kernels.apply_x(psi, w, self.targets[0], self.controls)


def not_gate(target: int) -> Gate:
    return Gate(Kind.NOT, (target,))


def mcx(controls: Iterable[int | tuple[int, bool]], target: int) -> Gate:
    """Multi-controlled NOT; bare ints are positive controls, no controls gives NOT."""
    ctrls = tuple(c if isinstance(c, tuple) else (c, True) for c in controls)
    if not ctrls:
        return not_gate(target)
    return Gate(Kind.MCX, (target,), ctrls)


def cnot(control: int, target: int) -> Gate:
    return Gate(Kind.MCX, (target,), ((control, True),))


def swap(a: int, b: int, controls: Iterable[int | tuple[int, bool]] = ()) -> Gate:
    ctrls = tuple(c if isinstance(c, tuple) else (c, True) for c in controls)
    return Gate(Kind.SWAP, (a, b), ctrls)


def coin(target: int, angles: Sequence[float],
         controls: Iterable[int | tuple[int, bool]] = ()) -> Gate:
    ctrls = tuple(c if isinstance(c, tuple) else (c, True) for c in controls)
    return Gate(Kind.COIN, (target,), ctrls, tuple(float(a) for a in angles))


@dataclass(frozen=True)
class Segment:
    label: str
    start: int
    stop: int


@dataclass(frozen=True)
class Circuit:
    """Ordered gates over a layout, with optional labelled depth segments.

    Segments partition (part of) the gate list; ``circuit_depth`` in
    ``per-pack-sum`` mode adds up their individual ASAP depths.
    """

    layout: WireLayout
    gates: tuple[Gate, ...] = ()
    segments: tuple[Segment, ...] = field(default=(), compare=False)

    def __post_init__(self):
        w = self.layout.n_wires
        for g in self.gates:
            if any(x >= w for x in g.wires):
                raise CircuitError(f"{g} touches a wire outside the {w}-wire layout")
        for seg in self.segments:
            if not 0 <= seg.start <= seg.stop <= len(self.gates):
                raise CircuitError(f"bad segment {seg}")

    @property
    def n_wires(self) -> int:
        return self.layout.n_wires

    def __len__(self) -> int:
        return len(self.gates)

    def labelled(self, label: str) -> Circuit:
        """Same gates as a single segment named ``label``."""
        segs = (Segment(label, 0, len(self.gates)),) if self.gates else ()
        return Circuit(self.layout, self.gates, segs)

    def __add__(self, other: Circuit) -> Circuit:
        return concat(self.layout, [self, other])

    def segment_circuits(self) -> list[tuple[str, Circuit]]:
        """Split into segment sub-circuits; uncovered runs become unlabelled ones."""
        out: list[tuple[str, Circuit]] = []
        pos = 0
        for seg in sorted(self.segments, key=lambda s: s.start):
            if seg.start > pos:
                out.append(("", Circuit(self.layout, self.gates[pos:seg.start])))
            out.append((seg.label, Circuit(self.layout, self.gates[seg.start:seg.stop])))
            pos = seg.stop
        if pos < len(self.gates):
            out.append(("", Circuit(self.layout, self.gates[pos:])))
        return out


def concat(layout: WireLayout, parts: Iterable[Circuit]) -> Circuit:
    gates: list[Gate] = []
    segments: list[Segment] = []
    for part in parts:
        if part.layout != layout:
            raise CircuitError("cannot concatenate circuits on different layouts")
        off = len(gates)
        segments.extend(Segment(s.label, s.start + off, s.stop + off) for s in part.segments)
        gates.extend(part.gates)
    return Circuit(layout, tuple(gates), tuple(segments))


def inverse(circuit: Circuit) -> Circuit:
    total = len(circuit.gates)
    segs = tuple(
        Segment(_dagger(s.label), total - s.stop, total - s.start)
        for s in reversed(circuit.segments)
    )
    gates = tuple(g.adjoint() for g in reversed(circuit.gates))
    return Circuit(circuit.layout, gates, segs)


def _dagger(label: str) -> str:
    if not label:
        return label
    return label[:-1] if label.endswith("†") else label + "†"


def _atomic_depth(x: int) -> int:
    return 1


def _linear_depth(x: int) -> int:
    return 1 if x < 2 else max(1, 8 * x - 6)


def _no_ancilla(x: int) -> int:
    return 0


@dataclass(frozen=True)
class CostModel:
    """Depth/width accounting for abstract gates.

    ``toffoli_depth(x)`` and ``toffoli_width(x)`` give the depth and extra
    wires of an x-controlled NOT; x = 0 is a bare NOT and must cost 1.
    """

    swap_cost: int = 3
    toffoli_depth: Callable[[int], int] = _atomic_depth
    toffoli_width: Callable[[int], int] = _no_ancilla
    name: str = "atomic"

    def __post_init__(self):
        if self.toffoli_depth(0) != 1:
            raise ValueError("a 0-controlled Toffoli is a NOT and has depth 1")

    @classmethod
    def atomic(cls) -> CostModel:
        return cls()

    @classmethod
    def linear(cls) -> CostModel:
        return cls(toffoli_depth=_linear_depth, name="linear")

    @classmethod
    def named(cls, name: str) -> CostModel:
        try:
            return {"atomic": cls.atomic, "linear": cls.linear}[name]()
        except KeyError:
            raise ValueError(f"unknown cost model {name!r}") from None

    def gate_cost(self, gate: Gate) -> int:
        if gate.kind is Kind.SWAP:
            return self.swap_cost
        if gate.kind is Kind.COIN:
            return 1
        if gate.kind is Kind.NOT:
            return self.toffoli_depth(0)
        if gate.kind is Kind.MCX:
            return self.toffoli_depth(len(gate.controls))
        raise CircuitError(f"unknown gate kind {gate.kind!r}")


def asap_depth(ops: Iterable[tuple[Sequence[int], int]]) -> int:
    """Greedy earliest-layer schedule length.

    Each op is ``(wires, cost)`` and holds all of its wires for ``cost``
    consecutive layers.
    """
    free: dict[int, int] = {}
    depth = 0
    for wires, cost in ops:
        start = max((free.get(w, 0) for w in wires), default=0)
        end = start + cost
        for w in wires:
            free[w] = end
        depth = max(depth, end)
    return depth


def circuit_depth(circuit: Circuit, cost: CostModel | None = None,
                  mode: str = "asap") -> int:
    cost = cost or CostModel()
    if mode == "asap":
        return asap_depth((g.wires, cost.gate_cost(g)) for g in circuit.gates)
    if mode == "per-pack-sum":
        return sum(circuit_depth(part, cost, "asap") for _, part in circuit.segment_circuits())
    raise ValueError(f"unknown depth mode {mode!r}")


def circuit_width(circuit: Circuit, cost: CostModel | None = None) -> int:
    cost = cost or CostModel()
    extra = max((cost.toffoli_width(len(g.controls)) for g in circuit.gates
                 if g.kind is Kind.MCX), default=0)
    return circuit.n_wires + extra


def circuit_size(circuit: Circuit) -> int:
    return len(circuit.gates)


def circuit_unitary(circuit) -> np.ndarray:
    """Dense matrix of ``circuit``; column k is the image of basis state k.

    Works for anything with ``n_wires`` and ``gates`` whose gates implement
    ``apply``; a ``phase`` attribute, if present, is folded in.
    """
    w = circuit.n_wires
    if w > MAX_UNITARY_WIRES:
        raise SizeError(f"refusing to build a {w}-wire unitary (limit {MAX_UNITARY_WIRES})")
    dim = 1 << w
    psi = np.eye(dim, dtype=complex).reshape((2,) * w + (dim,))
    for g in circuit.gates:
        g.apply(psi, w)
    u = psi.reshape(dim, dim)
    ph = getattr(circuit, "phase", 0.0)
    return u * np.exp(1j * ph) if ph else u


def relabel(circuit: Circuit, mapping: Sequence[int]) -> Circuit:
    """Apply a wire permutation ``mapping[old] = new`` to every gate."""
    if sorted(mapping) != list(range(circuit.n_wires)):
        raise CircuitError("relabel mapping must be a permutation of the wires")
    return Circuit(circuit.layout, tuple(g.relabel(mapping) for g in circuit.gates),
                   circuit.segments)


def gate_census(circuit: Circuit) -> dict[str, int]:
    counts: dict[str, int] = {}
    for g in circuit.gates:
        counts[g.kind.value] = counts.get(g.kind.value, 0) + 1
    return counts
