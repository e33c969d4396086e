"""Linear algebra over the two-element field, on int bitsets.

Sign systems (products of +-1 unknowns equal to prescribed +-1 values)
become linear systems here through the sign/bit dictionary +1 <-> 0,
-1 <-> 1, under which sign products turn into XOR sums.  Rows are stored
as arbitrary-width Python ints, bit i = variable i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import DimensionError


def sign_to_bit(s: int) -> int:
    if s == 1:
        return 0
    if s == -1:
        return 1
    raise DimensionError(f"expected a sign in {{-1, +1}}, got {s}")


def bit_to_sign(b: int) -> int:
    if b == 0:
        return 1
    if b == 1:
        return -1
    raise DimensionError(f"expected a bit in {{0, 1}}, got {b}")


def bits_of(mask: int, n_vars: int) -> tuple[int, ...]:
    """Expand a bitset into an explicit 0/1 tuple of length n_vars."""
    return tuple((mask >> i) & 1 for i in range(n_vars))


@dataclass
class GF2System:
    """XOR-sum constraints: for each row, XOR of the support bits = rhs."""

    n_vars: int
    rows: list[tuple[int, int]] = field(default_factory=list)

    def add_row(self, support: Iterable[int], rhs: int) -> None:
        """Add the constraint xor(x_i for i in support) = rhs (0-based vars)."""
        if rhs not in (0, 1):
            raise DimensionError(f"rhs must be 0 or 1, got {rhs}")
        mask = 0
        for i in support:
            if not 0 <= int(i) < self.n_vars:
                raise DimensionError(f"variable {i} out of range 0..{self.n_vars - 1}")
            mask ^= 1 << int(i)
        self.rows.append((mask, rhs))

    def satisfied_by(self, assignment: int) -> bool:
        """Check an assignment bitset against every row."""
        return all(bin(mask & assignment).count("1") % 2 == rhs
                   for mask, rhs in self.rows)


@dataclass(frozen=True)
class GF2Solution:
    """Particular solution plus a basis of the homogeneous solution space.

    Basis vector t has a lone 1 among the free columns, at free_cols[t];
    its remaining bits sit on pivot columns.
    """

    n_vars: int
    particular: int
    null_basis: tuple[int, ...]
    free_cols: tuple[int, ...]
    rank: int

    @property
    def nullity(self) -> int:
        return len(self.null_basis)

    def members(self):
        """Iterate the full solution coset (2^nullity assignments)."""
        for combo in range(1 << self.nullity):
            vec = self.particular
            for t in range(self.nullity):
                if (combo >> t) & 1:
                    vec ^= self.null_basis[t]
            yield vec

    def contains(self, assignment: int) -> bool:
        """Coset membership by eliminating assignment - particular."""
        diff = assignment ^ self.particular
        for f, vec in zip(self.free_cols, self.null_basis):
            if (diff >> f) & 1:
                diff ^= vec
        return diff == 0


def gf2_solve(system: GF2System) -> GF2Solution | None:
    """Reduced row echelon solve; None when the system is inconsistent.

    Pivots take the lowest available column, so the particular solution
    (free variables zero) and the basis are canonical for a given row
    order.  Basis vectors are emitted in free-column order, each with a
    single 1 among the free columns.
    """
    m = system.n_vars
    work = [(mask, rhs) for mask, rhs in system.rows]
    pivot_of_col: dict[int, int] = {}
    r = 0
    for col in range(m):
        pivot = next((i for i in range(r, len(work)) if (work[i][0] >> col) & 1), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        for i in range(len(work)):
            if i != r and (work[i][0] >> col) & 1:
                work[i] = (work[i][0] ^ work[r][0], work[i][1] ^ work[r][1])
        pivot_of_col[col] = r
        r += 1
        if r == len(work):
            break
    if any(mask == 0 and rhs == 1 for mask, rhs in work):
        return None

    particular = 0
    for col, row in pivot_of_col.items():
        if work[row][1]:
            particular ^= 1 << col

    free_cols = [c for c in range(m) if c not in pivot_of_col]
    basis = []
    for f in free_cols:
        vec = 1 << f
        for col, row in pivot_of_col.items():
            if (work[row][0] >> f) & 1:
                vec ^= 1 << col
        basis.append(vec)
    return GF2Solution(n_vars=m, particular=particular,
                       null_basis=tuple(basis), free_cols=tuple(free_cols),
                       rank=len(pivot_of_col))
