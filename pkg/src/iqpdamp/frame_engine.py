"""Exact propagation of operator-frame strings through noisy IQP circuits.

A frame string is a tensor product, over qubits, of elements from the
overcomplete single-qubit frame {I(a) = |0><0| + a|1><1|, sigma_plus, sigma_minus},
carrying one global complex coefficient beta. Diagonal gates and amplitude
damping map every frame string to finitely many frame strings, so strings can
be pushed through a whole circuit in closed form: two-qubit controlled phases
never branch, an l-local controlled phase branches into at most 2^(l-1) + 1
strings, and damping rescales coefficients while contracting the diagonal
arguments a_t.

beta is stored as a complex logarithm (real part: log magnitude, imaginary
part: phase) so deep circuits at large n cannot underflow; beta == 0 is the
special value log_beta.real == -inf.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterator

import numpy as np

from .circuit_model import CPHASE, RZ, Circuit

PLUS = 1    # sigma_plus = |1><0|
MINUS = -1  # sigma_minus = |0><1|
DIAG = 0    # I(a) = |0><0| + a|1><1|

_LOG_ZERO = complex(-math.inf, 0.0)


def _log_of(z: complex) -> complex:
    return _LOG_ZERO if z == 0 else cmath.log(z)


@dataclass
class FrameString:
    """One frame string: per-qubit slot kinds, diagonal arguments, and log(beta)."""

    n: int
    kinds: tuple[int, ...]
    diag_args: dict[int, complex]
    log_beta: complex
    accumulated_phase: float = 0.0

    @property
    def beta(self) -> complex:
        if self.log_beta.real == -math.inf:
            return 0.0
        return cmath.exp(self.log_beta)

    @property
    def offdiag_count(self) -> int:
        return sum(1 for k in self.kinds if k != DIAG)

    def offdiag_slots(self) -> list[tuple[int, int]]:
        """(qubit, sign) for every non-diagonal slot."""
        return [(q, k) for q, k in enumerate(self.kinds) if k != DIAG]

    def copy(self) -> "FrameString":
        return FrameString(self.n, self.kinds, dict(self.diag_args),
                           self.log_beta, self.accumulated_phase)

    def adjoint(self) -> "FrameString":
        """Slotwise Hermitian conjugate: Plus <-> Minus, conjugated args and beta."""
        return FrameString(
            self.n,
            tuple(-k for k in self.kinds),
            {q: a.conjugate() for q, a in self.diag_args.items()},
            self.log_beta.conjugate(),
            -self.accumulated_phase,
        )

    def scale(self, factor: complex) -> None:
        self.log_beta += _log_of(factor)

    def to_matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n realization, for oracle cross-checks at small n."""
        out = np.array([[1.0 + 0.0j]])
        for q in range(self.n):
            k = self.kinds[q]
            if k == PLUS:
                block = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
            elif k == MINUS:
                block = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
            else:
                block = np.array([[1.0, 0.0], [0.0, self.diag_args[q]]], dtype=complex)
            out = np.kron(out, block)
        return self.beta * out


# A BranchSet is a list of FrameStrings with the branch weights already folded
# into each string's beta; the factor relative to the parent is recoverable as
# exp(child.log_beta - parent.log_beta).
BranchSet = list


def initial_strings(n: int, max_offdiag: int) -> Iterator[FrameString]:
    """All strings in the expansion of |+><+|^n with at most max_offdiag sigmas.

    Order: off-diagonal count ascending, positions lexicographic, then sign
    pattern lexicographic (Plus before Minus). Every string has beta = 2^-n and
    all diagonal arguments equal to 1. Count: sum_j 2^j C(n, j).
    """
    if not (0 <= max_offdiag <= n):
        raise ValueError(f"max_offdiag must be in [0, {n}], got {max_offdiag}")
    log_beta = complex(-n * math.log(2.0), 0.0)
    for j in range(max_offdiag + 1):
        for positions in combinations(range(n), j):
            pos_set = set(positions)
            diag = {q: 1.0 + 0.0j for q in range(n) if q not in pos_set}
            for signs in product((PLUS, MINUS), repeat=j):
                kinds = [DIAG] * n
                for q, s in zip(positions, signs):
                    kinds[q] = s
                yield FrameString(n, tuple(kinds), dict(diag), log_beta)


def apply_single_qubit_rotation(s: FrameString, qubit: int, theta: float,
                                defer: bool = False) -> FrameString:
    """Conjugate by e^{i theta Z} on one qubit: sigma_+/- pick up e^{-/+ 2i theta}."""
    if not (0 <= qubit < s.n):
        raise IndexError(f"qubit {qubit} out of range [0, {s.n})")
    out = s.copy()
    k = s.kinds[qubit]
    if k != DIAG:
        if defer:
            out.accumulated_phase += -2.0 * theta * k
        else:
            out.log_beta += complex(0.0, -2.0 * theta * k)
    return out


def llocal_branch(s: FrameString, targets: tuple[int, ...], theta: float) -> BranchSet:
    """Conjugate by the l-local controlled phase C(theta) on `targets`.

    The gate multiplies a ket by e^{i theta} iff all target bits are 1, so its
    action on a string depends only on the slots it covers:
      - all targets diagonal: unchanged;
      - targets holding both a sigma_plus and a sigma_minus: unchanged (neither
        the ket nor the bra side can reach all-ones);
      - same-sign sigmas with m diagonal targets: m=0 is a pure phase, m=1
        absorbs the phase into the diagonal argument, m>=2 yields the identity
        branch plus 2^m branches whose diagonal arguments become +/-1 with the
        old arguments folded into the branch weights.
    Branch count is at most 2^(l-1) + 1. The matrices of the returned branches
    sum to the exact conjugation.
    """
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target in {targets}")
    for q in targets:
        if not (0 <= q < s.n):
            raise IndexError(f"target {q} out of range [0, {s.n})")

    offdiag = [q for q in targets if s.kinds[q] != DIAG]
    diag = [q for q in targets if s.kinds[q] == DIAG]
    if not offdiag:
        return [s.copy()]
    signs = {s.kinds[q] for q in offdiag}
    if len(signs) > 1:
        return [s.copy()]
    sign = signs.pop()
    phase = cmath.exp(1j * sign * theta)

    if not diag:
        out = s.copy()
        out.log_beta += complex(0.0, sign * theta)
        return [out]
    if len(diag) == 1:
        out = s.copy()
        out.diag_args[diag[0]] *= phase
        return [out]

    m = len(diag)
    branches = [s.copy()]  # identity branch
    prod_a = 1.0 + 0.0j
    for q in diag:
        prod_a *= s.diag_args[q]
    base = (phase - 1.0) * prod_a / (2 ** m)
    if base == 0:
        return branches
    for pattern in product((0, 1), repeat=m):
        b = s.copy()
        b.scale(base * (-1) ** sum(pattern))
        for q, x in zip(diag, pattern):
            b.diag_args[q] = -1.0 + 0.0j if x else 1.0 + 0.0j
        branches.append(b)
    return branches


def apply_cphase2(s: FrameString, q1: int, q2: int, theta: float) -> FrameString:
    """Two-qubit controlled phase; never branches."""
    if q1 == q2:
        raise ValueError("cphase targets must differ")
    branches = llocal_branch(s, (q1, q2), theta)
    assert len(branches) == 1
    return branches[0]


def apply_damping_layer(s: FrameString, p: float) -> FrameString:
    """One amplitude-damping layer on all qubits.

    sigma slots scale beta by sqrt(1-p) each; every diagonal slot contributes a
    factor (1 + a p) to beta and contracts a -> a(1-p)/(1+ap). A zero factor
    (only reachable at p=1 with a=-1) sends beta to exactly 0.
    """
    if not (0.0 < p <= 1.0):
        raise ValueError(f"p must lie in (0,1], got {p}")
    out = s.copy()
    off = s.offdiag_count
    if off:
        out.log_beta += complex(0.5 * off * math.log1p(-p) if p < 1.0 else -math.inf, 0.0)
    shrink = 1.0 - p
    for q, a in out.diag_args.items():
        w = 1.0 + a * p
        if w == 0:
            out.log_beta = _LOG_ZERO
            out.diag_args[q] = 0.0j
            continue
        out.log_beta += _log_of(w)
        out.diag_args[q] = a * shrink / w
    return out


def propagate(s: FrameString, circuit: Circuit) -> BranchSet:
    """Push one string through the whole circuit.

    Per layer, controlled-phase gates are applied (branching when l >= 3 covers
    same-sign sigmas with two or more diagonal slots) and then the damping
    layer. Single-qubit rotations commute with damping on frame strings, so
    they are deferred: their total phase is accumulated per string and flushed
    into beta at the end. Strings whose beta hits exactly 0 are dropped.
    """
    if s.n != circuit.n:
        raise ValueError(f"string has n={s.n}, circuit has n={circuit.n}")
    work: BranchSet = [s.copy()]
    for layer in circuit.layers:
        for g in layer:
            if g.kind == RZ:
                work = [apply_single_qubit_rotation(b, g.targets[0], g.theta, defer=True)
                        for b in work]
            elif g.kind == CPHASE:
                nxt: BranchSet = []
                for b in work:
                    nxt.extend(llocal_branch(b, g.targets, g.theta))
                work = nxt
            else:
                raise ValueError(f"unknown gate kind {g.kind!r}")
        work = [apply_damping_layer(b, circuit.p) for b in work]
        work = [b for b in work if b.log_beta.real != -math.inf]
    for b in work:
        if b.accumulated_phase:
            b.log_beta += complex(0.0, b.accumulated_phase)
            b.accumulated_phase = 0.0
    return work


def canonicalize(s: FrameString) -> tuple[tuple[int, ...], FrameString]:
    """Stable-sort slots to (Plus, Minus, Diag) order.

    Returns (perm, canonical) where perm[i] is the source qubit now sitting at
    position i; un-permuting the canonical string recovers the original.
    """
    order = {PLUS: 0, MINUS: 1, DIAG: 2}
    perm = tuple(sorted(range(s.n), key=lambda q: (order[s.kinds[q]], q)))
    kinds = tuple(s.kinds[q] for q in perm)
    args = {i: s.diag_args[q] for i, q in enumerate(perm) if s.kinds[q] == DIAG}
    return perm, FrameString(s.n, kinds, args, s.log_beta, s.accumulated_phase)


def unpermute(perm: tuple[int, ...], s: FrameString) -> FrameString:
    """Invert canonicalize: send the slot at position i back to qubit perm[i]."""
    kinds = [DIAG] * s.n
    args: dict[int, complex] = {}
    for i, q in enumerate(perm):
        kinds[q] = s.kinds[i]
        if s.kinds[i] == DIAG:
            args[q] = s.diag_args[i]
    return FrameString(s.n, tuple(kinds), args, s.log_beta, s.accumulated_phase)


def reconstruct_dense(strings: Iterator[FrameString] | list, n: int) -> np.ndarray:
    """Sum of branch matrices; test/oracle helper for small n."""
    out = np.zeros((1 << n, 1 << n), dtype=complex)
    for b in strings:
        out += b.to_matrix()
    return out
