"""Gaussian log-likelihood and the MLE of the concentration matrix on a graph."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .graphs import Graph, clique_decomposition, model_space
from .linalg import as_fractions, frac_inverse, submatrix


class NonConvergence(RuntimeError):
    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


def _is_exact(s) -> bool:
    arr = np.asarray(s, dtype=object)
    return all(isinstance(x, (int, Fraction)) and not isinstance(x, bool) for x in arr.flat)


def check_sample_cov(s) -> np.ndarray:
    """Float copy of ``s`` after checking it is square, symmetric and positive definite."""
    a = np.array(np.asarray(s, dtype=object), dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("sample covariance must be a square matrix")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ValueError("sample covariance must be symmetric")
    try:
        np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise ValueError("sample covariance is not positive definite") from None
    return a


def read_covariance_csv(path) -> np.ndarray:
    """n rows of n comma-separated decimals; symmetrized by averaging with the transpose."""
    rows = []
    with open(Path(path), newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or all(not c.strip() for c in rec):
                continue
            try:
                rows.append([float(c) for c in rec])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric entry") from None
            if len(rows[-1]) != len(rows[0]):
                raise ValueError(f"{path}: line {lineno}: expected {len(rows[0])} columns, "
                                 f"got {len(rows[-1])}")
    if not rows:
        raise ValueError(f"{path}: empty covariance file")
    a = np.array(rows)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{path}: {a.shape[0]} rows but {a.shape[1]} columns")
    a = (a + a.T) / 2
    return check_sample_cov(a)


def log_likelihood(k, s) -> float:
    """log det K - tr(S K)."""
    k = np.array(np.asarray(k, dtype=object), dtype=float)
    s = np.array(np.asarray(s, dtype=object), dtype=float)
    sign, logdet = np.linalg.slogdet(k)
    if sign <= 0 or not np.allclose(k, k.T):
        raise ValueError("concentration matrix must be symmetric positive definite")
    try:
        np.linalg.cholesky(k)
    except np.linalg.LinAlgError:
        raise ValueError("concentration matrix must be positive definite") from None
    return float(logdet - np.trace(s @ k))


def stationarity_residual(g: Graph, k, s) -> float:
    """max over diagonal and edges of |(K^{-1} - S)_ij|."""
    sigma = np.linalg.inv(np.array(np.asarray(k, dtype=object), dtype=float))
    s = np.array(np.asarray(s, dtype=object), dtype=float)
    return max(abs(sigma[i, j] - s[i, j]) for i, j in model_space(g).support)


# ---------------------------------------------------------------------------
# Closed form on chordal graphs


def chordal_mle(g: Graph, s, exact: bool | None = None) -> np.ndarray:
    """Clique-sum estimator: padded inverses of clique blocks minus those of separators.

    With rational ``s`` (ints / Fractions) the result is an object array of
    Fractions, computed without rounding.  ``exact=False`` forces floats.
    """
    tree = clique_decomposition(g)
    n = g.n
    if exact is None:
        exact = _is_exact(s)
    if exact:
        sm = as_fractions(np.asarray(s, dtype=object).tolist())
        out = [[Fraction(0)] * n for _ in range(n)]

        def add(block, sign):
            idx = sorted(block)
            if not idx:
                return
            try:
                inv = frac_inverse(submatrix(sm, idx, idx))
            except ZeroDivisionError:
                raise ValueError(f"singular submatrix on {idx}") from None
            for a, i in enumerate(idx):
                for b, j in enumerate(idx):
                    out[i][j] += sign * inv[a][b]
    else:
        sm = check_sample_cov(s)
        out = np.zeros((n, n))

        def add(block, sign):
            idx = sorted(block)
            if not idx:
                return
            sub = sm[np.ix_(idx, idx)]
            if np.linalg.cond(sub) > 1e14:
                raise ValueError(f"singular submatrix on {idx}")
            out[np.ix_(idx, idx)] += sign * np.linalg.inv(sub)

    for c in tree.cliques:
        add(c, 1)
    for sep in tree.separators:
        add(sep, -1)
    if exact:
        arr = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                arr[i, j] = out[i][j]
        return arr
    return out


# ---------------------------------------------------------------------------
# Iterative maximizer


@dataclass(frozen=True)
class MLEConfig:
    tol: float = 1e-10
    max_sweeps: int = 5000
    polish_below: float = 1e-3     # switch to Newton once the residual is this small
    max_newton: int = 50
    extra_polish: int = 2          # Newton steps kept after tol is met, while they help


@dataclass
class MLEResult:
    k: np.ndarray
    residual: float
    sweeps: int
    newton_steps: int
    trace: list[float] = field(default_factory=list, repr=False)


def _blocks(g: Graph) -> list[list[int]]:
    covered = {v for e in g.edges for v in e}
    return [list(e) for e in g.sorted_edges()] + [[v] for v in range(g.n) if v not in covered]


def _newton_step(g: Graph, k, s):
    """Newton direction for the likelihood in the support coordinates."""
    support = model_space(g).support
    sigma = np.linalg.inv(k)
    n = k.shape[0]
    units = np.zeros((len(support), n, n))
    for a, (i, j) in enumerate(support):
        units[a, i, j] = units[a, j, i] = 1.0
    se = sigma @ units                       # Sigma E_a
    grad = np.einsum("aii->a", se) - np.einsum("aij,ji->a", units, s)
    # minus the Hessian of log det: tr(Sigma E_a Sigma E_b)
    hess = np.einsum("aij,bji->ab", se, se)
    delta = np.linalg.solve(hess, grad)
    d = np.zeros_like(k)
    for t, (i, j) in zip(delta, support):
        d[i, j] = d[j, i] = t
    return d


def numeric_mle(g: Graph, s, tol: float = 1e-10, cfg: MLEConfig | None = None) -> MLEResult:
    """Maximize log det K - tr(SK) over positive definite K with the graph's zero pattern.

    Cyclic exact maximization over each edge's 2x2 block (and isolated
    vertices), started at diag(1/s_ii), then damped Newton in the support
    coordinates to reach ``tol``.
    """
    cfg = cfg or MLEConfig(tol=tol)
    s = check_sample_cov(s)
    if s.shape[0] != g.n:
        raise ValueError("sample covariance size does not match graph")
    k = np.diag(1.0 / np.diag(s))
    blocks = _blocks(g)
    trace = []
    sweeps = 0
    res = stationarity_residual(g, k, s)
    trace.append(res)
    while res > max(tol, cfg.polish_below) and sweeps < cfg.max_sweeps:
        for idx in blocks:
            sigma = np.linalg.inv(k)
            ix = np.ix_(idx, idx)
            # block optimum: the Schur complement of K on idx becomes S_idx^{-1}
            k[ix] += np.linalg.inv(s[ix]) - np.linalg.inv(sigma[ix])
            k = (k + k.T) / 2
        sweeps += 1
        res = stationarity_residual(g, k, s)
        trace.append(res)
    steps = 0
    while res > tol and steps < cfg.max_newton:
        d = _newton_step(g, k, s)
        base = log_likelihood(k, s)
        step = 1.0
        while step > 1e-12:
            cand = k + step * d
            try:
                if log_likelihood(cand, s) >= base - 1e-12 * abs(base):
                    break
            except ValueError:
                pass
            step /= 2
        k = cand
        steps += 1
        res = stationarity_residual(g, k, s)
        trace.append(res)
    for _ in range(cfg.extra_polish if res <= tol else 0):
        try:
            cand = k + _newton_step(g, k, s)
            cres = stationarity_residual(g, cand, s)
            log_likelihood(cand, s)
        except (ValueError, np.linalg.LinAlgError):
            break
        if cres >= res:
            break
        k, res = cand, cres
        steps += 1
        trace.append(res)
    if res > tol:
        raise NonConvergence(f"numeric MLE stalled at residual {res:.3e}", trace)
    return MLEResult(k, res, sweeps, steps, trace)
