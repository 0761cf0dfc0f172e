import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mldegree.critsolve import TrackerConfig, critical_points, draw_sample_covariance
from mldegree.graphs import (Graph, add_pendant, complete_graph, cycle_graph, empty_graph,
                             model_space, path_graph, star_graph)
from mldegree.mle import (MLEConfig, NonConvergence, chordal_mle, log_likelihood,
                          numeric_mle, read_covariance_csv, stationarity_residual)

CHORDAL = [path_graph(4), star_graph(5), complete_graph(4),
           Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])]


def test_log_likelihood_examples():
    assert log_likelihood(np.eye(2), np.eye(2)) == pytest.approx(-2.0)
    assert log_likelihood([[2.0]], [[1.0]]) == pytest.approx(math.log(2) - 2)
    with pytest.raises(ValueError):
        log_likelihood(-np.eye(2), np.eye(2))


@given(st.integers(0, 2 ** 32 - 1))
def test_gradient_finite_difference(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(4, 4))
    k = a @ a.T + 4 * np.eye(4)
    s = np.array(draw_sample_covariance(4, seed % 1000), dtype=float)
    sigma = np.linalg.inv(k)
    h = 1e-6
    for i, j in [(0, 0), (0, 1), (2, 3)]:
        d = np.zeros((4, 4))
        d[i, j] = d[j, i] = 1.0
        fd = (log_likelihood(k + h * d, s) - log_likelihood(k - h * d, s)) / (2 * h)
        factor = 1 if i == j else 2
        assert fd == pytest.approx(factor * (sigma[i, j] - s[i, j]), abs=1e-6)


def test_chordal_trivial_cases():
    s = draw_sample_covariance(4, 1)
    k = chordal_mle(complete_graph(4), s)
    from mldegree.linalg import frac_inverse
    assert k.tolist() == frac_inverse(s)
    k = chordal_mle(empty_graph(4), s)
    assert all(k[i, j] == (1 / s[i][i] if i == j else 0) for i in range(4) for j in range(4))
    k = chordal_mle(path_graph(3), [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert k.tolist() == np.eye(3, dtype=int).tolist()


def test_chordal_rejects_cycle():
    with pytest.raises(ValueError):
        chordal_mle(cycle_graph(4), np.eye(4))


def test_chordal_singular_clique():
    s = [[1, 1, 0], [1, 1, 0], [0, 0, 1]]
    with pytest.raises(ValueError):
        chordal_mle(path_graph(3), s)


@pytest.mark.parametrize("g", CHORDAL)
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_chordal_exact_and_consistent(g, seed):
    s = draw_sample_covariance(g.n, seed)
    k = chordal_mle(g, s)
    assert all(isinstance(v, Fraction) for v in k.flat)
    assert all(k[i, j] == 0 for i, j in g.non_edges())
    kf = np.array(k, dtype=float)
    assert stationarity_residual(g, kf, s) <= 1e-10
    kfl = chordal_mle(g, np.array(s, dtype=float))
    assert np.allclose(kfl, kf, atol=1e-12)


@pytest.mark.parametrize("g", CHORDAL)
@pytest.mark.parametrize("seed", [4, 5])
def test_numeric_matches_chordal(g, seed):
    s = draw_sample_covariance(g.n, seed)
    r = numeric_mle(g, s)
    assert r.residual <= 1e-10
    assert np.max(np.abs(r.k - np.array(chordal_mle(g, s), dtype=float))) <= 1e-8


@pytest.mark.parametrize("g", [cycle_graph(4), cycle_graph(5), add_pendant(cycle_graph(4))])
def test_identity_is_fixed_point(g):
    r = numeric_mle(g, np.eye(g.n))
    assert np.array_equal(r.k, np.eye(g.n))


@pytest.mark.parametrize("g", [cycle_graph(5), add_pendant(cycle_graph(4))])
def test_local_optimality(g):
    s = draw_sample_covariance(g.n, 9)
    k = numeric_mle(g, s).k
    base = log_likelihood(k, s)
    rng = np.random.default_rng(0)
    sup = model_space(g).support
    for _ in range(20):
        d = np.zeros_like(k)
        for i, j in sup:
            d[i, j] = d[j, i] = rng.normal()
        assert log_likelihood(k + 1e-3 * d, s) < base


def test_c4_mle_is_a_critical_point():
    g = cycle_graph(4)
    s = draw_sample_covariance(4, 1)
    sig = np.linalg.inv(numeric_mle(g, s).k)
    run = critical_points(g, s, TrackerConfig(seed=1))
    assert min(np.max(np.abs(c - sig)) for c in run.sigmas) < 1e-6


def test_nonconvergence_carries_trace():
    s = draw_sample_covariance(5, 1)
    with pytest.raises(NonConvergence) as info:
        numeric_mle(cycle_graph(5), s, cfg=MLEConfig(max_sweeps=1, max_newton=0))
    assert len(info.value.trace) >= 1


def test_csv_reader(tmp_path):
    f = tmp_path / "s.csv"
    f.write_text("2,0.5\n0.4,1\n")
    s = read_covariance_csv(f)
    assert s[0, 1] == s[1, 0] == pytest.approx(0.45)
    bad = tmp_path / "bad.csv"
    bad.write_text("1,0\n0,x\n")
    with pytest.raises(ValueError, match="line 2"):
        read_covariance_csv(bad)
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("1,0\n0\n")
    with pytest.raises(ValueError, match="line 2"):
        read_covariance_csv(ragged)
    npd = tmp_path / "npd.csv"
    npd.write_text("1,2\n2,1\n")
    with pytest.raises(ValueError, match="positive definite"):
        read_covariance_csv(npd)
