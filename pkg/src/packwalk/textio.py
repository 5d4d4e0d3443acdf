"""Line-oriented text form for abstract and compiled circuits.

One gate per line::

    KIND target [target] [ctrl +w -w ...] [params x ...]

Header lines start with ``#``: the format tag, ``layout n=.. m=..``, then
``segment <label> <start> <stop>`` (abstract) or ``phase <x>`` (compiled).
"""
from __future__ import annotations

from .circuit import Circuit, CircuitError, Gate, Kind, Segment, WireLayout
from .compiler import BASIS_KINDS, BasisGate, CompiledCircuit

ABSTRACT_TAG = "# packwalk circuit v1"
COMPILED_TAG = "# packwalk compiled v1"


def _ctrl_text(controls) -> list[str]:
    if not controls:
        return []
    return ["ctrl"] + [("+" if pol else "-") + str(w) for w, pol in controls]


def _params_text(params) -> list[str]:
    return ["params"] + [repr(float(p)) for p in params] if params else []


def dumps(circuit: Circuit | CompiledCircuit) -> str:
    lay = circuit.layout
    lines = []
    if isinstance(circuit, CompiledCircuit):
        lines += [COMPILED_TAG, f"# layout n={lay.n} m={lay.m}",
                  f"# phase {float(circuit.phase)!r}"]
        for g in circuit.gates:
            if g.kind == "CNOT":
                fields = ["CNOT", str(g.wires[1])] + _ctrl_text([(g.wires[0], True)])
            else:
                fields = [g.kind, str(g.wires[0])] + _params_text([g.param])
            lines.append(" ".join(fields))
    else:
        lines += [ABSTRACT_TAG, f"# layout n={lay.n} m={lay.m}"]
        lines += [f"# segment {s.label} {s.start} {s.stop}" for s in circuit.segments]
        for g in circuit.gates:
            fields = [g.kind.value] + [str(t) for t in g.targets]
            fields += _ctrl_text(g.controls) + _params_text(g.params)
            lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def _parse_gate_line(line: str) -> tuple[str, list[int], list[tuple[int, bool]], list[float]]:
    tokens = line.split()
    kind, rest = tokens[0], tokens[1:]
    targets: list[int] = []
    controls: list[tuple[int, bool]] = []
    params: list[float] = []
    section = "targets"
    for tok in rest:
        if tok in ("ctrl", "params"):
            section = tok
        elif section == "targets":
            targets.append(int(tok))
        elif section == "ctrl":
            if tok[0] not in "+-":
                raise CircuitError(f"control {tok!r} needs a +/- polarity")
            controls.append((int(tok[1:]), tok[0] == "+"))
        else:
            params.append(float(tok))
    return kind, targets, controls, params


def loads(text: str) -> Circuit | CompiledCircuit:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] not in (ABSTRACT_TAG, COMPILED_TAG):
        raise CircuitError("missing circuit header")
    compiled = lines[0] == COMPILED_TAG
    layout = None
    phase = 0.0
    segments = []
    gates = []
    for ln in lines[1:]:
        if ln.startswith("#"):
            key, *vals = ln[1:].split()
            if key == "layout":
                kv = dict(v.split("=") for v in vals)
                layout = WireLayout(int(kv["n"]), int(kv["m"]))
            elif key == "segment":
                segments.append(Segment(vals[0], int(vals[1]), int(vals[2])))
            elif key == "phase":
                phase = float(vals[0])
            continue
        kind, targets, controls, params = _parse_gate_line(ln)
        if compiled:
            if kind not in BASIS_KINDS:
                raise CircuitError(f"{kind!r} is not a basis gate")
            if kind == "CNOT":
                gates.append(BasisGate("CNOT", (controls[0][0], targets[0])))
            else:
                gates.append(BasisGate(kind, (targets[0],), params[0]))
        else:
            try:
                k = Kind(kind)
            except ValueError:
                raise CircuitError(f"unknown gate kind {kind!r}") from None
            gates.append(Gate(k, tuple(targets), tuple(controls), tuple(params)))
    if layout is None:
        raise CircuitError("missing layout line")
    if compiled:
        return CompiledCircuit(layout, tuple(gates), phase)
    return Circuit(layout, tuple(gates), tuple(segments))


def dump(circuit: Circuit | CompiledCircuit, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(circuit))


def load(path) -> Circuit | CompiledCircuit:
    with open(path) as fh:
        return loads(fh.read())
