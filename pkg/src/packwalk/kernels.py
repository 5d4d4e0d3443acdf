"""In-place gate kernels on a statevector held as a ``(2,) * w`` tensor.

Wire ``p`` is bit ``2**p`` of the flat basis index (little-endian), so with
C-order reshaping it lives on tensor axis ``w - 1 - p``.  Trailing axes beyond
the first ``w`` are batch axes and are left untouched, which is how whole
unitaries are pushed through the same kernels.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

Controls = Sequence[tuple[int, bool]]


def coin_unitary(alpha: float, theta: float, phi: float, lam: float) -> np.ndarray:
    """Coin matrix ``e^{i alpha} [[c, -e^{i lam} s], [e^{i phi} s, e^{i(phi+lam)} c]]``
    with ``c = cos(theta/2)`` and ``s = sin(theta/2)``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.exp(1j * alpha) * np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=complex,
    )


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(lam: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * lam), 0], [0, np.exp(0.5j * lam)]], dtype=complex)


def phase(lam: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * lam)]], dtype=complex)


CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def _index(w: int, fixed: dict[int, int]) -> tuple:
    idx: list = [slice(None)] * w
    # length-1 slices keep the result a view even when every axis is fixed
    for wire, bit in fixed.items():
        idx[w - 1 - wire] = slice(bit, bit + 1)
    return tuple(idx)


def _fixed(controls: Controls) -> dict[int, int]:
    return {wire: int(positive) for wire, positive in controls}


def apply_x(psi: np.ndarray, w: int, target: int, controls: Controls = ()) -> None:
    fixed = _fixed(controls)
    lo = psi[_index(w, {**fixed, target: 0})]
    hi = psi[_index(w, {**fixed, target: 1})]
    tmp = lo.copy()
    lo[...] = hi
    hi[...] = tmp


def apply_swap(psi: np.ndarray, w: int, a: int, b: int, controls: Controls = ()) -> None:
    fixed = _fixed(controls)
    ab = psi[_index(w, {**fixed, a: 0, b: 1})]
    ba = psi[_index(w, {**fixed, a: 1, b: 0})]
    tmp = ab.copy()
    ab[...] = ba
    ba[...] = tmp


def apply_1q(psi: np.ndarray, w: int, target: int, matrix: np.ndarray,
             controls: Controls = ()) -> None:
    fixed = _fixed(controls)
    lo = psi[_index(w, {**fixed, target: 0})]
    hi = psi[_index(w, {**fixed, target: 1})]
    new_lo = matrix[0, 0] * lo + matrix[0, 1] * hi
    hi[...] = matrix[1, 0] * lo + matrix[1, 1] * hi
    lo[...] = new_lo
