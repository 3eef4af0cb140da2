"""Hamming-weight operator basis: indexing, counting, and sparse coefficient extraction.

The basis element o = |a><b| is indexed by the ket/bra bitstrings (a, b); its
weight is popcount(a) + popcount(b) and its zero-block count is the number of
qubit positions where both bits are 0. A state propagated through a noisy IQP
circuit is approximated by keeping every coefficient alpha_(a,b) = <a|rho|b> of
weight at most a cutoff k; those coefficients are read off propagated frame
strings, each weight-(<=k) index being supported by exactly one initial string.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from .circuit_model import Circuit
from .frame_engine import DIAG, MINUS, PLUS, FrameString, initial_strings, propagate


@dataclass(frozen=True)
class HWIndex:
    """One ket-bra basis index; bit i of ket/bra is qubit i read MSB-first."""

    n: int
    ket: int
    bra: int

    @property
    def weight(self) -> int:
        return self.ket.bit_count() + self.bra.bit_count()

    @property
    def zero_blocks(self) -> int:
        return self.n - (self.ket | self.bra).bit_count()

    def bitstrings(self) -> tuple[str, str]:
        return format(self.ket, f"0{self.n}b"), format(self.bra, f"0{self.n}b")


def zero_block_range(h: int, n: int) -> tuple[int, int]:
    """(max, min) possible zero-block counts among weight-h operators on n qubits."""
    if not (0 <= h <= 2 * n):
        raise ValueError(f"weight must be in [0, {2*n}], got {h}")
    return n - (h + 1) // 2, max(0, n - h)


def count_weight_h_with_r_zeroblocks(h: int, r: int, n: int) -> int:
    """Number of weight-h ket-bra indices with exactly r zero blocks.

    Counting blocks of the four kinds, r blocks are (0,0), w = h - n + r are
    (1,1) and u = 2(n - r) - h are off-diagonal with 2 sign choices each:
    multinomial(n; r, w, u) * 2^u. Summed over r this gives C(2n, h).
    """
    mu, lo = zero_block_range(h, n)
    if not (lo <= r <= mu):
        raise ValueError(f"zero-block count {r} outside [{lo}, {mu}] for h={h}, n={n}")
    w = h - n + r
    u = n - r - w
    return math.comb(n, r) * math.comb(n - r, w) * (2 ** u)


class HWCoefficientTable:
    """Sparse map from (ket, bra) bitmask pairs to complex coefficients, weight <= cutoff."""

    def __init__(self, n: int, cutoff: int):
        if not (0 <= cutoff <= 2 * n):
            raise ValueError(f"cutoff must be in [0, {2*n}], got {cutoff}")
        self.n = n
        self.cutoff = cutoff
        self.data: dict[tuple[int, int], complex] = {}

    def __len__(self) -> int:
        return len(self.data)

    def add(self, ket: int, bra: int, value: complex) -> None:
        if ket.bit_count() + bra.bit_count() > self.cutoff:
            raise ValueError("entry weight exceeds cutoff")
        key = (ket, bra)
        self.data[key] = self.data.get(key, 0.0) + value

    def get(self, ket: int, bra: int) -> complex:
        return self.data.get((ket, bra), 0.0)

    def max_size(self) -> int:
        """Upper limit sum_{m<=cutoff} C(2n, m) on the number of entries."""
        return sum(math.comb(2 * self.n, m) for m in range(min(self.cutoff, 2 * self.n) + 1))

    def hermiticity_defect(self) -> float:
        worst = 0.0
        for (ket, bra), v in self.data.items():
            worst = max(worst, abs(v - self.data.get((bra, ket), 0.0).conjugate()))
        return worst

    def sorted_items(self) -> list[tuple[tuple[int, int], complex]]:
        return sorted(self.data.items(),
                      key=lambda kv: (kv[0][0].bit_count() + kv[0][1].bit_count(), kv[0][0], kv[0][1]))

    def serialize(self) -> str:
        """One `<ket-bits> <bra-bits> <re> <im>` line per entry, sorted by (weight, ket, bra)."""
        width = self.n
        lines = []
        for (ket, bra), v in self.sorted_items():
            lines.append(f"{ket:0{width}b} {bra:0{width}b} "
                         f"{format(v.real, '.17g')} {format(v.imag, '.17g')}")
        return "\n".join(lines) + ("\n" if lines else "")

    def trace(self) -> complex:
        return sum(v for (ket, bra), v in self.data.items() if ket == bra)

    def to_dense(self):
        """Dense matrix realization for small-n cross-checks."""
        import numpy as np

        out = np.zeros((1 << self.n, 1 << self.n), dtype=complex)
        for (ket, bra), v in self.data.items():
            out[ket, bra] += v
        return out


def parse_table(text: str) -> HWCoefficientTable:
    """Inverse of HWCoefficientTable.serialize; cutoff is the largest weight present."""
    entries = []
    n = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"line {lineno}: expected 'ket bra re im', got {line!r}")
        ket_s, bra_s, re_s, im_s = parts
        if n is None:
            n = len(ket_s)
        if len(ket_s) != n or len(bra_s) != n:
            raise ValueError(f"line {lineno}: inconsistent bitstring width")
        entries.append((int(ket_s, 2), int(bra_s, 2), complex(float(re_s), float(im_s))))
    if n is None:
        raise ValueError("empty table document")
    cutoff = max((k.bit_count() + b.bit_count() for k, b, _ in entries), default=0)
    table = HWCoefficientTable(n, cutoff)
    for ket, bra, v in entries:
        table.add(ket, bra, v)
    return table


def _string_masks(s: FrameString) -> tuple[int, int, list[int]]:
    """(ket bits from Plus slots, bra bits from Minus slots, diagonal positions)."""
    ket = bra = 0
    diag: list[int] = []
    for q, kind in enumerate(s.kinds):
        bit = 1 << (s.n - 1 - q)
        if kind == PLUS:
            ket |= bit
        elif kind == MINUS:
            bra |= bit
        else:
            diag.append(q)
    return ket, bra, diag


def _contributions(branch: FrameString, cutoff: int) -> Iterator[tuple[int, int, complex]]:
    """(ket, bra, alpha contribution) of one propagated branch, weights <= cutoff."""
    from itertools import combinations

    m = branch.offdiag_count
    if m > cutoff:
        return
    beta = branch.beta
    if beta == 0:
        return
    ket0, bra0, diag = _string_masks(branch)
    n = branch.n
    yield ket0, bra0, beta
    for j in range(1, (cutoff - m) // 2 + 1):
        for subset in combinations(diag, j):
            value = beta
            bits = 0
            for q in subset:
                value *= branch.diag_args[q]
                bits |= 1 << (n - 1 - q)
            yield ket0 | bits, bra0 | bits, value


def extract_coefficients(branches: Iterable[FrameString], cutoff: int,
                         n: int | None = None) -> HWCoefficientTable:
    """Assemble the weight-<=cutoff coefficient table from propagated branches.

    A branch with off-diagonal slots exactly matching an index (a, b)
    contributes beta times the product, over diagonal slots inside the index's
    (1,1) positions, of the final argument a_t; all other indices get 0 from it.
    """
    branches = iter(branches)
    first = next(branches, None)
    if first is None:
        if n is None:
            raise ValueError("cannot infer n from an empty branch collection")
        return HWCoefficientTable(n, cutoff)
    if n is not None and first.n != n:
        raise ValueError(f"branch has n={first.n}, expected {n}")
    table = HWCoefficientTable(first.n, cutoff)

    def feed(branch: FrameString) -> None:
        for ket, bra, v in _contributions(branch, cutoff):
            table.add(ket, bra, v)

    feed(first)
    for b in branches:
        if b.n != table.n:
            raise ValueError(f"branch has n={b.n}, expected {table.n}")
        feed(b)
    return table


def build_table(circuit: Circuit, cutoff: int, mirror: bool = True) -> HWCoefficientTable:
    """Propagate every needed initial string through `circuit` and extract the table.

    With mirror=True only one string of each Hermitian-conjugate pair is
    propagated; the partner's contributions are the mirrored conjugates, which
    makes the table exactly Hermitian.
    """
    n = circuit.n
    table = HWCoefficientTable(n, cutoff)
    max_off = min(cutoff, n)
    for s in initial_strings(n, max_off):
        slots = s.offdiag_slots()
        if mirror and slots and slots[0][1] == MINUS:
            continue  # covered by its adjoint's mirror
        for branch in propagate(s, circuit):
            for ket, bra, v in _contributions(branch, cutoff):
                table.add(ket, bra, v)
                if mirror and slots:
                    table.add(bra, ket, v.conjugate())
    return table
