"""Adjustable-depth circuits for position-dependent coins of discrete-time quantum walks."""
from .builder import (CoinTable, WalkConfig, build_coin_circuit, build_coin_circuit_optimized,
                      build_shift_circuit, build_walk_step, reference_table, structural_depth,
                      structural_width)
from .circuit import (Circuit, CircuitError, CostModel, Gate, Kind, SizeError, WireLayout,
                      circuit_depth, circuit_size, circuit_unitary, circuit_width, inverse)
from .compiler import CompiledCircuit, compile_circuit, compiled_metrics
from .simulator import (Distribution, Histogram, StateVector, apply_circuit, direct_walk_oracle,
                        position_distribution, run_walk, sample)

__version__ = "0.1.0"

__all__ = [
    "CoinTable", "WalkConfig", "build_coin_circuit", "build_coin_circuit_optimized",
    "build_shift_circuit", "build_walk_step", "reference_table", "structural_depth",
    "structural_width", "Circuit", "CircuitError", "CostModel", "Gate", "Kind", "SizeError",
    "WireLayout", "circuit_depth", "circuit_size", "circuit_unitary", "circuit_width", "inverse",
    "CompiledCircuit", "compile_circuit", "compiled_metrics", "Distribution", "Histogram",
    "StateVector", "apply_circuit", "direct_walk_oracle", "position_distribution", "run_walk",
    "sample",
]
