import numpy as np
import pytest

from packwalk.simulator import propagate_basis


def walker_block(circuit, n):
    """Matrix of ``circuit`` on walker basis inputs, with ancilla leakage returned separately."""
    dim = 1 << (n + 1)
    mat = np.zeros((dim, dim), dtype=complex)
    leak = 0.0
    for col in range(dim):
        for idx, amp in propagate_basis(circuit, col).items():
            if idx < dim:
                mat[idx, col] += amp
            else:
                leak = max(leak, abs(amp))
    return mat, leak


@pytest.fixture
def block():
    return walker_block
