"""Dense principal minor assignment: rebuild a signed kernel from its
principal minors of orders 1..4 and describe every solution.

The reconstruction runs in four stages:

1. Orders 1 and 2 give the diagonal, the off-diagonal magnitudes, and
   the relating signs, via det(K_ij) = K_ii K_jj - eps_ij K_ij^2.
2. Orders 3 and 4 give the traveling sums pi(S) by subtracting, from the
   prescribed minor, every permutation class that does not involve a
   full-length cycle (those classes only need quantities already known).
3. Each positive triangle fixes the sign of one oriented entry product;
   each 4-subset's traveling sum is matched against the +-1 patterns of
   its positive 4-cycles, which is unambiguous under the magnitude
   genericity condition.
4. The oriented-product sign constraints form a linear system over
   GF(2) in the upper-triangle entry signs; Gaussian elimination yields
   one solution (free signs set to +1) and the null-space basis that
   generates all of them.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import gf2, graph
from .errors import (
    AmbiguousSignWarning,
    CapabilityError,
    DimensionError,
    GenericityError,
    InconsistentMinorsError,
    NotDenseError,
)
from .kernel import SignedKernel, check_magnitude_genericity, normalize_subset
from .moments import MinorList

DENSITY_TOL = 1e-8
SIGN_TOL = 1e-12
# Sign-decision tolerances adapt to the scale of the quantity being
# matched: effective tol = max(sign_tol, SIGN_RTOL * scale).
SIGN_RTOL = 1e-6
SOLUTION_SET_CAP = 12


@dataclass(frozen=True)
class Skeleton:
    """Diagonal, off-diagonal magnitudes, and relating signs of a dense
    signed matrix, as recovered from minors of orders 1 and 2."""

    n: int
    diagonal: np.ndarray   # (n,)
    magnitude: np.ndarray  # (n, n) symmetric, zero diagonal
    epsilon: np.ndarray    # (n, n) symmetric entries in {-1,+1}, zero diagonal

    def mag(self, i: int, j: int) -> float:
        return float(self.magnitude[i - 1, j - 1])

    def eps(self, i: int, j: int) -> int:
        return int(self.epsilon[i - 1, j - 1])

    def diag(self, i: int) -> float:
        return float(self.diagonal[i - 1])


@dataclass(frozen=True)
class PMASolution:
    """One reconstructed kernel plus the generators of all sign choices.

    ``free_switches`` are bitmasks over ``pairs``: XORing any subset of
    them into the base sign pattern yields another matrix with the same
    principal minors.
    """

    kernel: SignedKernel
    free_switches: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]

    @property
    def null_dimension(self) -> int:
        return len(self.free_switches)

    def sign_pattern(self) -> int:
        """Bitmask of the base kernel's upper-triangle signs (1 = negative)."""
        bits = 0
        for t, (i, j) in enumerate(self.pairs):
            if self.kernel.entry(i, j) < 0:
                bits |= 1 << t
        return bits


def _pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(itertools.combinations(range(1, n + 1), 2))


# ---------------------------------------------------------------------------
# stage 1: skeleton

def recover_skeleton(minors: MinorList, density_tol: float = DENSITY_TOL) -> Skeleton:
    """Diagonal, magnitudes and relating signs from orders 1 and 2."""
    n = minors.n
    diagonal = np.array([minors.get((i,)) for i in range(1, n + 1)])
    magnitude = np.zeros((n, n))
    epsilon = np.zeros((n, n), dtype=int)
    for i, j in _pairs(n):
        gap = diagonal[i - 1] * diagonal[j - 1] - minors.get((i, j))
        if abs(gap) <= density_tol:
            raise NotDenseError(
                f"pair ({i},{j}): a_i a_j - a_ij = {gap:.3e} is below the "
                f"density tolerance {density_tol:.0e}; entry is numerically zero")
        epsilon[i - 1, j - 1] = epsilon[j - 1, i - 1] = 1 if gap > 0 else -1
        magnitude[i - 1, j - 1] = magnitude[j - 1, i - 1] = float(np.sqrt(abs(gap)))
    return Skeleton(n, diagonal, magnitude, epsilon)


def check_genericity(skel: Skeleton, rtol: float = 1e-9) -> bool:
    """Magnitude genericity over every 4-subset (unique 4-cycle patterns)."""
    return check_magnitude_genericity(skel.magnitude, rtol)


# ---------------------------------------------------------------------------
# stage 2: traveling sums from minors

def extract_pi(minors: MinorList, skel: Skeleton, s: Iterable[int]) -> float:
    """Traveling sum pi(S) for |S| in {3, 4}, extracted from minors.

    Expanding det(K_S) over permutations grouped by the supports of their
    cyclic factors, every class except the full-length cycles is a known
    function of the skeleton (and, at order 4, of the order-3 traveling
    sums); full-length cycles enter with permutation sign (-1)^{|S|-1}.
    """
    ss = normalize_subset(s, skel.n, allow_empty=False)
    if len(ss) == 3:
        return _pi3(minors, skel, ss)
    if len(ss) == 4:
        return _pi4(minors, skel, ss)
    raise DimensionError(f"traveling-sum extraction needs |S| in {{3,4}}, got {ss}")


def _pi3(minors: MinorList, skel: Skeleton, s: tuple[int, int, int]) -> float:
    i, j, k = s
    fixed = (skel.diag(i) * skel.diag(j) * skel.diag(k)
             - skel.diag(i) * skel.eps(j, k) * skel.mag(j, k) ** 2
             - skel.diag(j) * skel.eps(i, k) * skel.mag(i, k) ** 2
             - skel.diag(k) * skel.eps(i, j) * skel.mag(i, j) ** 2)
    return minors.get(s) - fixed


def _pi4(minors: MinorList, skel: Skeleton, s: tuple[int, int, int, int]) -> float:
    def pair_term(a, b):
        return skel.eps(a, b) * skel.mag(a, b) ** 2

    fixed = float(np.prod([skel.diag(v) for v in s]))
    for a, b in itertools.combinations(s, 2):
        c, d = (v for v in s if v not in (a, b))
        fixed -= pair_term(a, b) * skel.diag(c) * skel.diag(d)
    i, j, k, l = s
    fixed += (pair_term(i, j) * pair_term(k, l)
              + pair_term(i, k) * pair_term(j, l)
              + pair_term(i, l) * pair_term(j, k))
    for triple in itertools.combinations(s, 3):
        (rest,) = (v for v in s if v not in triple)
        fixed += _pi3(minors, skel, triple) * skel.diag(rest)
    return fixed - minors.get(s)


# ---------------------------------------------------------------------------
# stage 3: cycle sign decisions

def _four_cycles(s: tuple[int, int, int, int]) -> list[graph.Cycle]:
    """The three Hamiltonian cycles on a sorted 4-set, canonical order."""
    i, j, k, l = s
    cycles = [((i, j), (j, k), (k, l), (i, l)),
              ((i, j), (j, l), (k, l), (i, k)),
              ((i, k), (j, k), (j, l), (i, l))]
    return sorted(graph.as_cycle(c) for c in cycles)


def _cycle_eps(skel: Skeleton, c: graph.Cycle) -> int:
    out = 1
    for a, b in c:
        out *= skel.eps(a, b)
    return out


def _cycle_magnitude(skel: Skeleton, c: graph.Cycle) -> float:
    out = 1.0
    for a, b in c:
        out *= skel.mag(a, b)
    return out


def _canonical_orientation(c: graph.Cycle) -> graph.OrientedCycle:
    """Walk the cycle from its smallest vertex toward its smaller neighbor."""
    adj: dict[int, list[int]] = {}
    for a, b in c:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    start = min(adj)
    order = [start, min(adj[start])]
    while len(order) < len(adj):
        nxt = [v for v in adj[order[-1]] if v != order[-2]][0]
        order.append(nxt)
    return graph.oriented_from_order(order)


def disambiguate_four_cycles(skel: Skeleton, s: Iterable[int], pi4: float,
                             tol: float = SIGN_TOL) -> dict[graph.Cycle, int]:
    """The unique sign pattern on the positive 4-cycles matching pi4.

    Each positive cycle contributes twice its oriented product, whose
    magnitude is the product of the four edge magnitudes; the pattern is
    found by checking all 2^t candidates.  Genericity makes the match
    unique when tol is below the smallest candidate gap.
    """
    ss = normalize_subset(s, skel.n, allow_empty=False)
    if len(ss) != 4:
        raise DimensionError(f"expected a 4-subset, got {ss}")
    positive = [c for c in _four_cycles(ss) if _cycle_eps(skel, c) == 1]
    all_mags = [_cycle_magnitude(skel, c) for c in _four_cycles(ss)]
    eff_tol = max(tol, SIGN_RTOL * 2.0 * max(all_mags))
    if not positive:
        if abs(pi4) > eff_tol:
            raise InconsistentMinorsError(
                f"4-set {ss}: traveling sum {pi4:.3e} nonzero but every "
                "4-cycle is negative")
        return {}
    mags = [_cycle_magnitude(skel, c) for c in positive]
    best_pattern, best, second = None, np.inf, np.inf
    for bits in range(1 << len(positive)):
        total = 2.0 * sum((-1.0 if (bits >> t) & 1 else 1.0) * m
                          for t, m in enumerate(mags))
        residual = abs(total - pi4)
        if residual < best:
            best_pattern, best, second = bits, residual, best
        elif residual < second:
            second = residual
    if best > eff_tol:
        raise InconsistentMinorsError(
            f"4-set {ss}: no sign pattern matches the traveling sum "
            f"(best residual {best:.3e} > tol {eff_tol:.1e})")
    if second - best <= eff_tol:
        raise GenericityError(
            f"4-set {ss}: sign patterns are separated by {second - best:.1e} "
            f"< tol {eff_tol:.1e}; magnitude products are too close to decide")
    return {c: (-1 if (best_pattern >> t) & 1 else 1)
            for t, c in enumerate(positive)}


# ---------------------------------------------------------------------------
# stage 4: the GF(2) sign system

def build_sign_system(skel: Skeleton,
                      triangle_signs: dict[tuple[int, int, int], int],
                      four_cycle_signs: dict[graph.Cycle, int]) -> gf2.GF2System:
    """Constraints on the upper-triangle entry signs.

    Variables follow ``_pairs`` order.  A known oriented-product sign
    turns into one XOR row: each arc below the diagonal contributes its
    relating sign to the right-hand side, since sign(K_wu) for w > u is
    eps_uw * sign(K_uw).
    """
    n = skel.n
    pairs = _pairs(n)
    index = {p: t for t, p in enumerate(pairs)}
    system = gf2.GF2System(len(pairs))
    for (i, j, k), s3 in sorted(triangle_signs.items()):
        rhs = gf2.sign_to_bit(s3) ^ gf2.sign_to_bit(skel.eps(i, k))
        system.add_row([index[(i, j)], index[(j, k)], index[(i, k)]], rhs)
    for c in sorted(four_cycle_signs):
        sigma = four_cycle_signs[c]
        rhs = gf2.sign_to_bit(sigma)
        support = []
        for a, b in _canonical_orientation(c):
            if a > b:
                rhs ^= gf2.sign_to_bit(skel.eps(b, a))
            support.append(index[graph.edge(a, b)])
        system.add_row(support, rhs)
    return system


# ---------------------------------------------------------------------------
# end to end

def solve_pma(minors: MinorList, sign_tol: float = SIGN_TOL,
              density_tol: float = DENSITY_TOL) -> PMASolution:
    """Reconstruct a dense signed kernel from minors of orders up to 4.

    Sign decisions whose underlying quantity falls below ``sign_tol``
    are skipped with an AmbiguousSignWarning (they only shrink the
    constraint set); outright contradictions raise.
    """
    n = minors.n
    skel = recover_skeleton(minors, density_tol)
    if not check_genericity(skel):
        raise GenericityError(
            "magnitude structure violates the genericity condition; "
            "4-cycle signs are not identifiable")

    triangle_signs: dict[tuple[int, int, int], int] = {}
    for t in itertools.combinations(range(1, n + 1), 3):
        pi3 = extract_pi(minors, skel, t)
        i, j, k = t
        scale = 2.0 * skel.mag(i, j) * skel.mag(j, k) * skel.mag(i, k)
        eff_tol = max(sign_tol, SIGN_RTOL * scale)
        positive = skel.eps(i, j) * skel.eps(j, k) * skel.eps(i, k) == 1
        if positive:
            if abs(pi3) <= eff_tol:
                warnings.warn(
                    f"triangle {t}: traveling sum {pi3:.3e} below tol "
                    f"{eff_tol:.1e}; skipping its sign constraint",
                    AmbiguousSignWarning, stacklevel=2)
                continue
            triangle_signs[t] = 1 if pi3 > 0 else -1
        elif abs(pi3) > eff_tol:
            raise InconsistentMinorsError(
                f"triangle {t} is negative but its traveling sum is "
                f"{pi3:.3e}; the minor list is not realizable at tol {eff_tol:.1e}")

    four_cycle_signs: dict[graph.Cycle, int] = {}
    for s in itertools.combinations(range(1, n + 1), 4):
        pi4 = extract_pi(minors, skel, s)
        try:
            four_cycle_signs.update(disambiguate_four_cycles(skel, s, pi4, sign_tol))
        except GenericityError as exc:
            warnings.warn(
                f"{exc}; skipping the 4-set's sign constraints",
                AmbiguousSignWarning, stacklevel=2)

    system = build_sign_system(skel, triangle_signs, four_cycle_signs)
    solution = gf2.gf2_solve(system)
    if solution is None:
        raise InconsistentMinorsError(
            "cycle sign constraints are mutually inconsistent; "
            "the minor list is not realizable in the signed class")

    pairs = _pairs(n)
    mat = np.diag(skel.diagonal.copy())
    for t, (i, j) in enumerate(pairs):
        sign = gf2.bit_to_sign((solution.particular >> t) & 1)
        mat[i - 1, j - 1] = sign * skel.mag(i, j)
        mat[j - 1, i - 1] = skel.eps(i, j) * mat[i - 1, j - 1]
    return PMASolution(kernel=SignedKernel(mat),
                       free_switches=solution.null_basis,
                       pairs=pairs)


def describe_solution_set(sol: PMASolution) -> list[SignedKernel]:
    """Every kernel in the solution coset (2^nullity sign assignments)."""
    d = sol.null_dimension
    if d > SOLUTION_SET_CAP:
        raise CapabilityError(
            f"solution set has 2^{d} members, above the 2^{SOLUTION_SET_CAP} "
            "enumeration cap; use the free_switches generators instead")
    base_bits = sol.sign_pattern()
    mags = np.abs(sol.kernel.mat)
    eps = {}
    for i, j in sol.pairs:
        eps[(i, j)] = sol.kernel.epsilon(i, j)
    out = []
    for combo in range(1 << d):
        bits = base_bits
        for t in range(d):
            if (combo >> t) & 1:
                bits ^= sol.free_switches[t]
        mat = np.diag(np.diag(sol.kernel.mat)).copy()
        for t, (i, j) in enumerate(sol.pairs):
            sign = gf2.bit_to_sign((bits >> t) & 1)
            mat[i - 1, j - 1] = sign * mags[i - 1, j - 1]
            mat[j - 1, i - 1] = eps[(i, j)] * mat[i - 1, j - 1]
        out.append(SignedKernel(mat))
    return out


# ---------------------------------------------------------------------------
# verification

@dataclass(frozen=True)
class VerifyReport:
    """Per-subset discrepancies of a kernel against a minor list."""

    passed: bool
    checked: int
    max_abs_error: float
    worst_subset: tuple[int, ...] | None
    failures: tuple[tuple[tuple[int, ...], float, float], ...]
    warning: str | None = None

    def __str__(self) -> str:
        state = "PASS" if self.passed else "FAIL"
        note = f" ({self.warning})" if self.warning else ""
        return (f"{state}: {self.checked} minors checked, "
                f"max abs error {self.max_abs_error:.3e}, "
                f"{len(self.failures)} failures{note}")


def verify(h: SignedKernel, minors: MinorList, tol: float = 1e-9) -> VerifyReport:
    """Check det(H_J) against every listed minor.

    A subset passes on relative error when |a_J| > tol and on absolute
    error otherwise.  An empty list passes vacuously, with a warning.
    """
    from .kernel import principal_minor

    if len(minors) == 0:
        return VerifyReport(passed=True, checked=0, max_abs_error=0.0,
                            worst_subset=None, failures=(),
                            warning="empty minor list: vacuous pass")
    failures = []
    max_abs, worst = 0.0, None
    for j, want in minors.items():
        got = principal_minor(h, j)
        err = abs(got - want)
        if err > max_abs:
            max_abs, worst = err, j
        ok = err <= tol * abs(want) if abs(want) > tol else err <= tol
        if not ok:
            failures.append((j, got, want))
    return VerifyReport(passed=not failures, checked=len(minors),
                        max_abs_error=max_abs, worst_subset=worst,
                        failures=tuple(failures))


# ---------------------------------------------------------------------------
# solution-set sidecar JSON

def solution_set_json(sol: PMASolution) -> str:
    import json

    return json.dumps({
        "null_basis": [list(gf2.bits_of(vec, len(sol.pairs)))
                       for vec in sol.free_switches],
        "pairs": [f"{i},{j}" for i, j in sol.pairs],
    })
