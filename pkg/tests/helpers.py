"""Shared fixture builders for the test suite."""

import itertools

import numpy as np

from signed_dpp import gf2, kernel, moments, pma, rng


def signed_matrix(diag, upper, eps):
    """Assemble a signed kernel from diagonal, upper entries and relating
    signs, both keyed by (i, j) pairs with i < j (1-based)."""
    n = len(diag)
    mat = np.diag(np.asarray(diag, dtype=float))
    for (i, j), v in upper.items():
        mat[i - 1, j - 1] = v
        mat[j - 1, i - 1] = eps[(i, j)] * v
    return kernel.SignedKernel(mat)


def random_signed(n, seed, diag=(0.3, 0.7), mags=(0.05, 0.1)):
    """Random signed-class matrix (not necessarily admissible)."""
    gen = rng.stream(seed)
    mat = np.diag(gen.uniform(*diag, n))
    for i in range(n):
        for j in range(i + 1, n):
            v = gen.uniform(*mags) * (1 if gen.random() < 0.5 else -1)
            e = 1 if gen.random() < 0.5 else -1
            mat[i, j] = v
            mat[j, i] = e * v
    return kernel.SignedKernel(mat)


def strong_admissible(seed, n=6, mag_lo=0.14, mag_hi=0.18,
                      require_triangle_rank=True, max_attempts=400):
    """Dense admissible signed kernel with large off-diagonal entries.

    Rejection-samples until the draw is admissible, magnitude-generic,
    and (optionally) its positive triangles alone pin the entry signs as
    tightly as the full cycle system, so that sub-threshold 4-cycle
    decisions can be skipped without losing sign information.
    """
    gen = rng.stream(seed)
    for _ in range(max_attempts):
        mat = np.diag(gen.uniform(0.45, 0.55, n))
        for i in range(n):
            for j in range(i + 1, n):
                v = gen.uniform(mag_lo, mag_hi) * (1 if gen.random() < 0.5 else -1)
                e = 1 if gen.random() < 0.5 else -1
                mat[i, j] = v
                mat[j, i] = e * v
        k = kernel.SignedKernel(mat)
        if not kernel.check_magnitude_genericity(np.abs(mat), 1e-4):
            continue
        if not kernel.is_admissible(k):
            continue
        if require_triangle_rank and not _triangles_pin_signs(k):
            continue
        return k
    raise RuntimeError(f"no strong admissible kernel found for seed {seed}")


def _triangles_pin_signs(k):
    minors = moments.exact_minors(k, 4)
    skel = pma.recover_skeleton(minors)
    triangles = {}
    for t in itertools.combinations(range(1, k.n + 1), 3):
        i, j, kk = t
        if skel.eps(i, j) * skel.eps(j, kk) * skel.eps(i, kk) == 1:
            triangles[t] = 1
    cycles = {}
    for s in itertools.combinations(range(1, k.n + 1), 4):
        pi4 = pma.extract_pi(minors, skel, s)
        cycles.update(pma.disambiguate_four_cycles(skel, s, pi4))

    def rank_of(triangle_signs, cycle_signs):
        system = pma.build_sign_system(skel, triangle_signs, cycle_signs)
        system.rows = [(mask, 0) for mask, _ in system.rows]
        return gf2.gf2_solve(system).rank

    return rank_of(triangles, {}) == rank_of(triangles, cycles)
