"""Exact density-matrix simulation for small n.

Independent ground truth for the frame engine and the bounds: no code here is
shared with the propagation pipeline. Diagonal gates act as entrywise phase
masks, the damping channel acts per qubit through its Kraus pair, and Born
probabilities are read in the Hadamard basis.

Bit convention used everywhere in this package: qubit 0 is the most significant
bit of a computational-basis index, so index == int(bitstring, 2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit_model import CPHASE, RZ, Circuit

DENSE_N_CAP = 14


@dataclass
class DenseState:
    """A 2^n x 2^n density matrix (or truncated Hermitian matrix) with its qubit count."""

    n: int
    rho: np.ndarray

    def validate_state(self, herm_tol: float = 1e-12, trace_tol: float = 1e-12,
                       psd_tol: float = -1e-10) -> list[str]:
        """Violations of the state invariants (empty for a physical state)."""
        problems = []
        if self.rho.shape != (1 << self.n, 1 << self.n):
            problems.append(f"shape {self.rho.shape} does not match n={self.n}")
            return problems
        if np.max(np.abs(self.rho - self.rho.conj().T)) > herm_tol:
            problems.append("not Hermitian")
        tr = complex(np.trace(self.rho))
        if abs(tr - 1.0) > trace_tol:
            problems.append(f"trace {tr} != 1")
        if np.min(np.linalg.eigvalsh(self.rho)) < psd_tol:
            problems.append("not positive semidefinite")
        return problems


def _qubit_view(mat: np.ndarray, n: int, q: int) -> np.ndarray:
    """Reshape so axis 1 (row side) and axis 4 (column side) are qubit q's bit."""
    a = 1 << q           # indices of more significant qubits
    b = 1 << (n - 1 - q)  # less significant qubits
    return mat.reshape(a, 2, b, a, 2, b)


def apply_damping_dense(rho: np.ndarray, n: int, p: float) -> None:
    """One amplitude-damping layer on every qubit, in place.

    Per qubit: the |1><1| block refeeds the |0><0| block with weight p, the
    off-diagonal blocks shrink by sqrt(1-p), the |1><1| block by (1-p).
    """
    root = np.sqrt(1.0 - p)
    for q in range(n):
        v = _qubit_view(rho, n, q)
        v[:, 0, :, :, 0, :] += p * v[:, 1, :, :, 1, :]
        v[:, 0, :, :, 1, :] *= root
        v[:, 1, :, :, 0, :] *= root
        v[:, 1, :, :, 1, :] *= 1.0 - p


def layer_phase_vector(circuit: Circuit, layer: tuple, indices: np.ndarray) -> np.ndarray:
    """Accumulated diagonal phase phi(z) of one gate layer over all basis indices."""
    n = circuit.n
    phi = np.zeros(indices.shape, dtype=float)
    for g in layer:
        if g.kind == RZ:
            bit = (indices >> (n - 1 - g.targets[0])) & 1
            # e^{i theta Z}: +theta on |0>, -theta on |1>
            phi += g.theta * (1.0 - 2.0 * bit)
        elif g.kind == CPHASE:
            all_ones = np.ones(indices.shape, dtype=bool)
            for q in g.targets:
                all_ones &= ((indices >> (n - 1 - q)) & 1).astype(bool)
            phi += g.theta * all_ones
        else:
            raise ValueError(f"unknown gate kind {g.kind!r}")
    return phi


def evolve_dense(circuit: Circuit) -> DenseState:
    """Run the full noisy circuit on |+><+|^n exactly."""
    n = circuit.n
    if n > DENSE_N_CAP:
        raise ValueError(f"dense oracle capped at n <= {DENSE_N_CAP}, got {n}")
    dim = 1 << n
    rho = np.full((dim, dim), 1.0 / dim, dtype=complex)
    indices = np.arange(dim)
    for layer in circuit.layers:
        if layer:
            phi = layer_phase_vector(circuit, layer, indices)
            mask = np.exp(1j * phi)
            rho *= mask[:, None]
            rho *= mask.conj()[None, :]
        apply_damping_dense(rho, n, circuit.p)
    return DenseState(n=n, rho=rho)


def hadamard_conjugate(mat: np.ndarray, n: int) -> np.ndarray:
    """H^{tensor n} M H^{tensor n}, one qubit at a time (no 2^n x 2^n Hadamard matrix)."""
    out = mat.astype(complex, copy=True)
    for q in range(n):
        v = _qubit_view(out, n, q)
        r00 = v[:, 0, :, :, 0, :].copy()
        r01 = v[:, 0, :, :, 1, :].copy()
        r10 = v[:, 1, :, :, 0, :].copy()
        r11 = v[:, 1, :, :, 1, :].copy()
        v[:, 0, :, :, 0, :] = (r00 + r01 + r10 + r11) / 2.0
        v[:, 0, :, :, 1, :] = (r00 - r01 + r10 - r11) / 2.0
        v[:, 1, :, :, 0, :] = (r00 + r01 - r10 - r11) / 2.0
        v[:, 1, :, :, 1, :] = (r00 - r01 - r10 + r11) / 2.0
    return out


def born_distribution(state: DenseState | np.ndarray, n: int | None = None) -> np.ndarray:
    """P(x) = <x_H| rho |x_H> over Hadamard-basis outcomes x, indexed like basis states.

    Outcome bit 0 means |+>, bit 1 means |->.
    """
    if isinstance(state, DenseState):
        mat, n = state.rho, state.n
    else:
        mat = state
        if n is None:
            raise ValueError("n required when passing a bare matrix")
    return np.real(np.diag(hadamard_conjugate(mat, n)))


def distances(a: np.ndarray, b: np.ndarray, n: int) -> tuple[float, float, float]:
    """(Hilbert-Schmidt, trace, Hadamard-diagonal TVD) distances between Hermitian matrices."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = a - b
    hs = float(np.linalg.norm(diff))
    td = 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
    tvd = 0.5 * float(np.sum(np.abs(born_distribution(a, n) - born_distribution(b, n))))
    return hs, td, tvd
