from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mldegree.cyclefiber import (build_mn, build_mn_minus, build_mn_plus, checkerboard,
                                 conjugate_by_sign, cycle_membership_minors, enumerate_fiber,
                                 fiber_count_formula, fiber_defining_polynomial,
                                 fiber_generators, gamma_minor, gamma_pair, jacobian_matrix,
                                 jacobian_regularity, generator_residual, lower_bound,
                                 membership_minor_indices, orbit_size, regular_generator_det,
                                 sign_vectors, verify_fiber_point)
from mldegree.exactpoly import pn
from mldegree.graphs import Graph, cycle_graph, model_space
from mldegree.linalg import frac_det

TABLE = {4: 5, 5: 17, 6: 49, 7: 129, 8: 321, 9: 769, 10: 1793}


def unit_direction(n, f):
    k, l = f
    e = np.zeros((n, n))
    if k == l:
        e[k, k] = 2.0
    else:
        e[k, l] = e[l, k] = 1.0
    return e


@given(st.integers(1, 9), st.builds(Fraction, st.integers(-9, 9), st.integers(1, 9)))
def test_mn_determinant_is_pn(n, x):
    assert frac_det(build_mn(n, x).tolist()) == pn(n)(x)


@given(st.integers(3, 9), st.builds(Fraction, st.integers(-9, 9), st.integers(1, 9)))
def test_cyclic_variants_determinant(n, x):
    # cyclic determinant: path part, wrap-around part, and the two corner cycles
    base = pn(n)(x) - x * x * pn(n - 2)(x)
    corner = 2 * (-1) ** (n + 1) * x ** n
    assert frac_det(build_mn_plus(n, x).tolist()) == base + corner
    assert frac_det(build_mn_minus(n, x).tolist()) == base - corner
    assert build_mn_plus(n, x)[0, n - 1] == x
    assert build_mn_minus(n, x)[0, n - 1] == -x


def test_checkerboard():
    cb = checkerboard(6)
    assert np.linalg.matrix_rank(cb) == 2
    assert cb[0, 2] == 1 and cb[0, 1] == 0
    with pytest.raises(ValueError):
        checkerboard(5)


def test_sign_action_validation():
    with pytest.raises(ValueError):
        conjugate_by_sign([1, 2], np.eye(2))
    assert len(sign_vectors(5, 1)) == 16


def test_minus_family_requires_even():
    with pytest.raises(ValueError):
        fiber_defining_polynomial(5, "minus")


@pytest.mark.parametrize("n", sorted(TABLE))
def test_fiber_counts(n):
    pts = enumerate_fiber(n)
    assert len(pts) == TABLE[n] == fiber_count_formula(n) == lower_bound(n)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_points_verified_and_distinct(n):
    pts = enumerate_fiber(n)
    mats = np.array([p.matrix for p in pts], dtype=complex)
    for p in pts:
        ok, res = verify_fiber_point(p, 1e-9)
        assert ok and res <= 1e-9
    flat = mats.reshape(len(pts), -1)
    d = np.max(np.abs(flat[:, None, :] - flat[None, :, :]), axis=2)
    np.fill_diagonal(d, np.inf)
    assert d.min() > 1e-3


@pytest.mark.parametrize("n", [4, 5, 6])
def test_orbit_bookkeeping(n):
    pts = enumerate_fiber(n)
    fams = {}
    for p in pts:
        fams[p.family] = fams.get(p.family, 0) + 1
    gens = fiber_generators(n)
    for fam in ("plus", "minus"):
        k = sum(1 for f, _, _ in gens if f == fam)
        assert fams.get(fam, 0) == k * orbit_size(fam, n)
    if n % 2 == 0:
        assert fams["checkerboard"] == orbit_size("checkerboard", n)


@given(st.integers(4, 7), st.data())
def test_conjugation_closure(n, data):
    pts = enumerate_fiber(n)
    mats = [np.asarray(p.matrix, dtype=complex) for p in pts]
    p = data.draw(st.sampled_from(mats))
    signs = data.draw(st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n))
    q = conjugate_by_sign(signs, p)
    assert min(np.max(np.abs(q - m)) for m in mats) < 1e-9


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8, 9])
def test_generator_identities(n):
    for family, x, _ in fiber_generators(n):
        assert abs(generator_residual(n, family, x)) < 1e-9
        assert abs(regular_generator_det(n, family, x) - complex(pn(n - 1)(complex(x)))) < 1e-8


def test_membership_indices_skip_adjacent():
    idx = membership_minor_indices(5)
    assert len(idx) == 5 * 4
    assert ((0, 2, 1), (0, 1, 2)) not in idx


def test_membership_rejects_generic_matrix():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(5, 5))
    a = a + a.T
    assert cycle_membership_minors(a) > 1e-3
    with pytest.raises(ValueError):
        cycle_membership_minors(np.eye(3))


def test_verify_rejects_structure_violation():
    a = np.eye(5)
    a[0, 1] = a[1, 0] = 1e-3
    assert not verify_fiber_point(a)[0]


@given(st.sampled_from([4, 5]), st.integers(0, 2 ** 32 - 1))
def test_gamma_pair_matches_finite_difference(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n))
    m = m + m.T + n * np.eye(n)
    coords = model_space(cycle_graph(n)).support + model_space(cycle_graph(n)).co_support
    h = 1e-6
    for e in coords[:: 3]:
        for f in coords[1:: 2]:
            d = unit_direction(n, f)
            fd = (gamma_minor(m + h * d, e) - gamma_minor(m - h * d, e)) / (2 * h)
            an = gamma_pair(m, e, f)
            assert abs(an - fd) <= 1e-6 * max(1.0, abs(fd))


@given(st.integers(0, 2 ** 32 - 1))
def test_gamma_pair_symmetric(seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(5, 5))
    m = m + m.T
    sup = model_space(cycle_graph(5)).support
    j = np.array([[gamma_pair(m, e, f) for f in sup] for e in sup])
    assert np.allclose(j, j.T, atol=1e-10)


@pytest.mark.parametrize("n", range(3, 9))
def test_jacobian_at_identity_closed_form(n):
    g = cycle_graph(n)
    jac, _ = jacobian_matrix(np.eye(n), g)
    want = 2 ** n * (n - 1) * (-1) ** (len(g.edges) + n - 1)
    assert np.linalg.det(jac) == pytest.approx(want, rel=1e-10)
    chk = jacobian_regularity(np.eye(n), g)
    assert chk.regular and abs(chk.det_value) > 1


@pytest.mark.parametrize("n", [4, 5, 6])
def test_jacobian_regular_on_regular_orbits(n):
    g = cycle_graph(n)
    for p in enumerate_fiber(n):
        if p.regular and p.family != "identity" and p.signs == (1,) * n:
            assert jacobian_regularity(np.asarray(p.matrix, dtype=complex), g).regular


def test_jacobian_rejects_singular_and_off_model():
    with pytest.raises(ValueError):
        jacobian_regularity(checkerboard(4), cycle_graph(4))
    rng = np.random.default_rng(1)
    a = rng.normal(size=(4, 4))
    a = a @ a.T + np.eye(4)
    with pytest.raises(ValueError):
        jacobian_regularity(a, cycle_graph(4))
    with pytest.raises(ValueError):
        jacobian_regularity(np.eye(3), cycle_graph(4))


def test_lower_bound_domain():
    with pytest.raises(ValueError):
        lower_bound(3)
