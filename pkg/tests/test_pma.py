import itertools
import math
import warnings

import numpy as np
import pytest

from helpers import signed_matrix, strong_admissible
from signed_dpp import gf2, graph, kernel, moments, pma, sampler
from signed_dpp.errors import (
    AmbiguousSignWarning,
    CapabilityError,
    GenericityError,
    InconsistentMinorsError,
    MissingMinorError,
    NotDenseError,
)


def oriented_sign(k, cycle):
    """Sign of the entry product along either orientation of a positive cycle."""
    adj = {}
    for a, b in cycle:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    start = min(adj)
    order = [start, min(adj[start])]
    while len(order) < len(adj):
        order.append([v for v in adj[order[-1]] if v != order[-2]][0])
    prod = 1.0
    for t in range(len(order)):
        prod *= k.entry(order[t], order[(t + 1) % len(order)])
    return 1 if prod > 0 else -1


# ---------------------------------------------------------------------------
# skeleton recovery

def test_recover_skeleton_pair_example():
    # a_i = a_j = 0.5, a_ij = 0.29 inverts to eps = -1, |H_ij| = 0.2
    ml = moments.MinorList(2, {(1,): 0.5, (2,): 0.5, (1, 2): 0.29})
    skel = pma.recover_skeleton(ml)
    assert skel.eps(1, 2) == -1
    assert skel.mag(1, 2) == pytest.approx(0.2, abs=1e-12)


def test_recover_skeleton_density_error():
    ml = moments.MinorList(2, {(1,): 0.5, (2,): 0.5, (1, 2): 0.25})
    with pytest.raises(NotDenseError):
        pma.recover_skeleton(ml)


def test_recover_skeleton_round_trip():
    k = kernel.generate_admissible(6, 0.3, 17)
    skel = pma.recover_skeleton(moments.exact_minors(k, 2))
    for i in range(1, 7):
        assert skel.diag(i) == pytest.approx(k.entry(i, i), abs=1e-10)
        for j in range(i + 1, 7):
            assert skel.mag(i, j) == pytest.approx(abs(k.entry(i, j)), abs=1e-10)
            assert skel.eps(i, j) == k.epsilon(i, j)


def test_recover_skeleton_requires_pairs():
    ml = moments.MinorList(2, {(1,): 0.5, (2,): 0.5})
    with pytest.raises(MissingMinorError):
        pma.recover_skeleton(ml)


# ---------------------------------------------------------------------------
# traveling-sum extraction

def test_extract_pi_matches_direct_sums():
    k = kernel.generate_admissible(6, 0.3, 23)
    minors = moments.exact_minors(k, 4)
    skel = pma.recover_skeleton(minors)
    for m in (3, 4):
        for s in itertools.combinations(range(1, 7), m):
            want = graph.pi_of_subset(k, s)
            assert pma.extract_pi(minors, skel, s) == pytest.approx(
                want, abs=1e-12)


def test_extract_pi_negative_triangle_vanishes():
    upper = {(1, 2): 0.2, (1, 3): 0.25, (2, 3): 0.3}
    eps = {(1, 2): -1, (1, 3): 1, (2, 3): 1}
    k = signed_matrix([0.5, 0.4, 0.6], upper, eps)
    minors = moments.exact_minors(k, 3)
    skel = pma.recover_skeleton(minors)
    assert pma.extract_pi(minors, skel, (1, 2, 3)) == pytest.approx(0.0, abs=1e-12)
    assert graph.pi_of_subset(k, (1, 2, 3)) == pytest.approx(0.0, abs=1e-15)


def test_extract_pi_positive_triangle_product():
    upper = {(1, 2): 0.2, (1, 3): 0.25, (2, 3): 0.3}
    eps = {(1, 2): 1, (1, 3): 1, (2, 3): 1}
    k = signed_matrix([0.5, 0.4, 0.6], upper, eps)
    minors = moments.exact_minors(k, 3)
    skel = pma.recover_skeleton(minors)
    want = 2 * k.entry(1, 2) * k.entry(2, 3) * k.entry(3, 1)
    assert pma.extract_pi(minors, skel, (1, 2, 3)) == pytest.approx(want, rel=1e-12)


def test_extract_pi_figure_four_set():
    gen = np.random.default_rng(2)
    eps = {(1, 2): -1, (1, 3): 1, (1, 4): 1, (2, 3): 1, (2, 4): 1, (3, 4): 1}
    upper = {p: gen.uniform(0.1, 0.3) * gen.choice([-1.0, 1.0]) for p in eps}
    k = signed_matrix([0.5, 0.45, 0.55, 0.6], upper, eps)
    minors = moments.exact_minors(k, 4)
    skel = pma.recover_skeleton(minors)
    want = 2 * k.entry(1, 3) * k.entry(3, 2) * k.entry(2, 4) * k.entry(4, 1)
    assert pma.extract_pi(minors, skel, (1, 2, 3, 4)) == pytest.approx(want, rel=1e-10)


# ---------------------------------------------------------------------------
# genericity

def test_genericity_equal_magnitudes_fails():
    mags = np.full((4, 4), 0.2)
    np.fill_diagonal(mags, 0.0)
    assert not kernel.check_magnitude_genericity(mags)


def test_genericity_generated_kernels_pass():
    for seed in range(3):
        k = kernel.generate_admissible(6, 0.3, seed)
        skel = pma.recover_skeleton(moments.exact_minors(k, 2))
        assert pma.check_genericity(skel)


def test_genericity_explicit_magnitudes():
    vals = {(1, 2): 0.3, (1, 3): 0.5, (1, 4): 0.7,
            (2, 3): 0.11, (2, 4): 0.13, (3, 4): 0.17}
    mags = np.zeros((4, 4))
    for (i, j), v in vals.items():
        mags[i - 1, j - 1] = mags[j - 1, i - 1] = v
    p1 = vals[(1, 2)] * vals[(2, 3)] * vals[(3, 4)] * vals[(1, 4)]
    p2 = vals[(1, 2)] * vals[(2, 4)] * vals[(3, 4)] * vals[(1, 3)]
    p3 = vals[(1, 3)] * vals[(2, 3)] * vals[(2, 4)] * vals[(1, 4)]
    combos = [e for e in itertools.product((-1, 0, 1), repeat=3) if any(e)]
    assert len(combos) == 26
    assert all(abs(e1 * p1 + e2 * p2 + e3 * p3) > 1e-9 * max(p1, p2, p3)
               for e1, e2, e3 in combos)
    assert kernel.check_magnitude_genericity(mags)


# ---------------------------------------------------------------------------
# 4-cycle disambiguation

def test_four_clique_positive_cycle_parity():
    # each edge lies on two of the three pairings, so the number of
    # negative 4-cycles is even: T+ has 1 or 3 members, never 0
    for bits in range(1 << 6):
        eps = {}
        for t, p in enumerate(itertools.combinations(range(1, 5), 2)):
            eps[p] = -1 if (bits >> t) & 1 else 1
        mags = np.zeros((4, 4))
        em = np.zeros((4, 4), dtype=int)
        for (i, j), e in eps.items():
            mags[i - 1, j - 1] = mags[j - 1, i - 1] = 0.1
            em[i - 1, j - 1] = em[j - 1, i - 1] = e
        skel = pma.Skeleton(4, np.full(4, 0.5), mags, em)
        positive = [c for c in pma._four_cycles((1, 2, 3, 4))
                    if pma._cycle_eps(skel, c) == 1]
        assert len(positive) in (1, 3)


def test_disambiguate_single_positive_cycle():
    gen = np.random.default_rng(5)
    # eps_12 = -1 leaves exactly one positive pairing (through 1-3, 2-4)
    eps = {(1, 2): -1, (1, 3): 1, (1, 4): 1, (2, 3): 1, (2, 4): 1, (3, 4): 1}
    upper = {p: gen.uniform(0.1, 0.3) * gen.choice([-1.0, 1.0]) for p in eps}
    k = signed_matrix([0.5, 0.45, 0.55, 0.6], upper, eps)
    minors = moments.exact_minors(k, 4)
    skel = pma.recover_skeleton(minors)
    pi4 = pma.extract_pi(minors, skel, (1, 2, 3, 4))
    signs = pma.disambiguate_four_cycles(skel, (1, 2, 3, 4), pi4)
    assert len(signs) == 1
    (cycle, sigma), = signs.items()
    assert cycle == graph.as_cycle([(1, 3), (2, 3), (2, 4), (1, 4)])
    assert sigma == (1 if pi4 > 0 else -1)
    assert sigma == oriented_sign(k, cycle)


def test_disambiguate_recovers_ground_truth_signs():
    for seed in range(4):
        k = kernel.generate_admissible(5, 0.3, 40 + seed)
        minors = moments.exact_minors(k, 4)
        skel = pma.recover_skeleton(minors)
        for s in itertools.combinations(range(1, 6), 4):
            pi4 = pma.extract_pi(minors, skel, s)
            for cycle, sigma in pma.disambiguate_four_cycles(skel, s, pi4).items():
                assert sigma == oriented_sign(k, cycle)


def test_disambiguate_rejects_unmatchable_sum():
    k = kernel.generate_admissible(4, 0.3, 3)
    minors = moments.exact_minors(k, 4)
    skel = pma.recover_skeleton(minors)
    with pytest.raises(InconsistentMinorsError):
        pma.disambiguate_four_cycles(skel, (1, 2, 3, 4), 0.5)


# ---------------------------------------------------------------------------
# sign system

def test_sign_system_single_triangle_row():
    mags = np.zeros((3, 3))
    em = np.zeros((3, 3), dtype=int)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        mags[i, j] = mags[j, i] = 0.2
    for (i, j), e in {(0, 1): -1, (0, 2): -1, (1, 2): 1}.items():
        em[i, j] = em[j, i] = e
    skel = pma.Skeleton(3, np.full(3, 0.5), mags, em)
    system = pma.build_sign_system(skel, {(1, 2, 3): -1}, {})
    assert system.n_vars == 3
    (mask, rhs), = system.rows
    assert mask == 0b111  # variables x_12, x_13, x_23
    # rhs = bit(sign) xor bit(eps_13) = 1 xor 1 = 0
    assert rhs == 0


def test_sign_system_satisfied_by_ground_truth():
    for seed in range(4):
        k = kernel.generate_admissible(6, 0.3, 60 + seed)
        minors = moments.exact_minors(k, 4)
        sol = pma.solve_pma(minors)
        skel = pma.recover_skeleton(minors)
        triangles, cycles = {}, {}
        for t in itertools.combinations(range(1, 7), 3):
            i, j, kk = t
            if skel.eps(i, j) * skel.eps(j, kk) * skel.eps(i, kk) == 1:
                pi3 = pma.extract_pi(minors, skel, t)
                triangles[t] = 1 if pi3 > 0 else -1
        for s in itertools.combinations(range(1, 7), 4):
            pi4 = pma.extract_pi(minors, skel, s)
            cycles.update(pma.disambiguate_four_cycles(skel, s, pi4))
        system = pma.build_sign_system(skel, triangles, cycles)
        truth_bits = 0
        for t, (i, j) in enumerate(sol.pairs):
            if k.entry(i, j) < 0:
                truth_bits |= 1 << t
        assert system.satisfied_by(truth_bits)
        # vertex switches flip an even number of signs around any cycle
        for v in range(1, 7):
            switch = 0
            for t, (i, j) in enumerate(sol.pairs):
                if v in (i, j):
                    switch |= 1 << t
            assert system.satisfied_by(truth_bits ^ switch)


# ---------------------------------------------------------------------------
# end to end

def test_solve_pma_round_trip():
    for seed in range(6):
        n = 4 + seed % 5
        k = kernel.generate_admissible(n, 0.3, 70 + seed)
        sol = pma.solve_pma(moments.exact_minors(k, 4))
        assert graph.pma_equivalent(sol.kernel, k)


def test_solve_pma_transpose_same_solution():
    k = kernel.generate_admissible(6, 0.3, 81)
    kt = kernel.SignedKernel(k.mat.T.copy())
    sol = pma.solve_pma(moments.exact_minors(k, 4))
    sol_t = pma.solve_pma(moments.exact_minors(kt, 4))
    assert np.allclose(sol.kernel.mat, sol_t.kernel.mat, atol=1e-12)
    assert sol.free_switches == sol_t.free_switches


def test_solve_pma_hand_built_diagonally_dominant():
    upper = {(1, 2): 0.05, (1, 3): -0.07, (1, 4): 0.04,
             (2, 3): 0.06, (2, 4): -0.085, (3, 4): 0.055}
    eps = {(1, 2): -1, (1, 3): 1, (1, 4): -1,
           (2, 3): 1, (2, 4): -1, (3, 4): 1}
    k = signed_matrix([0.6, 0.5, 0.55, 0.45], upper, eps)
    assert kernel.is_admissible(k)
    minors = moments.exact_minors(k, 4)
    sol = pma.solve_pma(minors)
    report = pma.verify(sol.kernel, minors, 1e-9)
    assert report.passed


def test_solve_pma_reads_only_low_orders():
    k = kernel.generate_admissible(7, 0.3, 91)
    minors = moments.exact_minors(k, "all")
    pma.solve_pma(minors)
    orders = {len(j) for j in minors.queried}
    assert orders <= {1, 2, 3, 4}
    assert len(minors.queried) <= sum(math.comb(7, t) for t in (1, 2, 3, 4))


def test_solve_pma_missing_minor():
    k = kernel.generate_admissible(5, 0.3, 13)
    with pytest.raises(MissingMinorError):
        pma.solve_pma(moments.exact_minors(k, 3))


def test_solve_pma_not_dense():
    with pytest.raises(NotDenseError):
        pma.solve_pma(moments.exact_minors(
            kernel.SignedKernel(np.diag([0.3, 0.6, 0.4, 0.5])), "all"))


def test_solve_pma_degenerate_magnitudes():
    upper = {p: 0.1 for p in itertools.combinations(range(1, 5), 2)}
    eps = {p: 1 for p in upper}
    k = signed_matrix([0.5, 0.5, 0.5, 0.5], upper, eps)
    with pytest.raises(GenericityError):
        pma.solve_pma(moments.exact_minors(k, "all"))


def test_solve_pma_inconsistent_minors():
    k = kernel.generate_admissible(5, 0.3, 29)
    minors = moments.exact_minors(k, 4)
    spoiled = moments.MinorList(5, dict(minors.items()))
    victim = (1, 2, 3)
    spoiled.put(victim, minors.get(victim) + 0.25)
    with pytest.raises(InconsistentMinorsError):
        pma.solve_pma(spoiled)


def test_solve_pma_warns_on_subthreshold_signs():
    k = strong_admissible(0)
    batch = sampler.sample_enumerate(k, 20000, 0)
    est = moments.estimate_required_minors(batch, 4)
    with pytest.warns(AmbiguousSignWarning):
        try:
            pma.solve_pma(est, sign_tol=0.02)
        except InconsistentMinorsError:
            pass


# ---------------------------------------------------------------------------
# solution set

def test_solution_set_size_and_equivalence():
    k = kernel.generate_admissible(5, 0.3, 97)
    sol = pma.solve_pma(moments.exact_minors(k, 4))
    members = pma.describe_solution_set(sol)
    assert len(members) == 1 << sol.null_dimension
    want = moments.exact_minors(k, "all")
    for m in members:
        assert pma.verify(m, want, 1e-9).passed


def test_solution_set_contains_switches_and_transpose():
    k = kernel.generate_admissible(5, 0.3, 101)
    sol = pma.solve_pma(moments.exact_minors(k, 4))
    members = pma.describe_solution_set(sol)

    def in_set(mat):
        return any(np.max(np.abs(mat - m.mat)) <= 1e-9 for m in members)

    for bits in range(1 << 5):
        d = np.diag([-1.0 if (bits >> i) & 1 else 1.0 for i in range(5)])
        assert in_set(d @ k.mat @ d)
    assert in_set(k.mat.T)


def test_solution_set_closure_under_switching():
    # feeding DKD's minors back in yields the same set of kernels
    k = kernel.generate_admissible(4, 0.3, 51)
    d = np.diag([1.0, -1.0, 1.0, -1.0])
    kd = kernel.SignedKernel(d @ k.mat @ d)
    set_a = pma.describe_solution_set(pma.solve_pma(moments.exact_minors(k, 4)))
    set_b = pma.describe_solution_set(pma.solve_pma(moments.exact_minors(kd, 4)))

    def canon(ms):
        return sorted(tuple(np.round(m.mat, 9).ravel()) for m in ms)

    assert canon(set_a) == canon(set_b)


def test_solution_set_cap():
    k = kernel.generate_admissible(14, 0.3, 7)
    sol = pma.solve_pma(moments.exact_minors(k, 4))
    assert sol.null_dimension > pma.SOLUTION_SET_CAP
    with pytest.raises(CapabilityError):
        pma.describe_solution_set(sol)


def test_reconstruction_structure_matches_ground_truth():
    k = kernel.generate_admissible(6, 0.3, 111)
    sol = pma.solve_pma(moments.exact_minors(k, 4))
    h = sol.kernel
    assert np.max(np.abs(np.diag(h.mat) - np.diag(k.mat))) <= 1e-10
    assert np.max(np.abs(np.abs(h.mat) - np.abs(k.mat))) <= 1e-10
    for i, j in sol.pairs:
        assert h.epsilon(i, j) == k.epsilon(i, j)
    for m in (3, 4):
        for s in itertools.combinations(range(1, 7), m):
            assert graph.pi_of_subset(h, s) == pytest.approx(
                graph.pi_of_subset(k, s), abs=1e-9)


# ---------------------------------------------------------------------------
# verification

def test_verify_round_trip_passes():
    k = kernel.generate_admissible(5, 0.3, 121)
    sol = pma.solve_pma(moments.exact_minors(k, 4))
    assert pma.verify(sol.kernel, moments.exact_minors(sol.kernel, "all"), 1e-9).passed


def test_verify_flags_flipped_triangle():
    k = kernel.generate_admissible(6, 0.3, 131)
    g = graph.signed_adjacency(k)
    tri = graph.positive_triangles(g)[0]
    i, j = tri[0], tri[1]
    mat = np.array(k.mat)
    mat[i - 1, j - 1] *= -1
    mat[j - 1, i - 1] *= -1
    flipped = kernel.SignedKernel(mat)
    report = pma.verify(flipped, moments.exact_minors(k, "all"), 1e-9)
    assert not report.passed
    assert tri in [f[0] for f in report.failures]


def test_verify_empty_list_vacuous():
    k = kernel.generate_admissible(4, 0.3, 141)
    report = pma.verify(k, moments.MinorList(4), 1e-9)
    assert report.passed
    assert report.warning is not None
    assert "PASS" in str(report)


def test_solution_set_sidecar_json():
    import json

    k = kernel.generate_admissible(4, 0.3, 151)
    sol = pma.solve_pma(moments.exact_minors(k, 4))
    payload = json.loads(pma.solution_set_json(sol))
    assert payload["pairs"] == ["1,2", "1,3", "1,4", "2,3", "2,4", "3,4"]
    assert len(payload["null_basis"]) == sol.null_dimension
    assert all(len(row) == 6 and set(row) <= {0, 1}
               for row in payload["null_basis"])
