"""Likelihood-equation and fiber systems, and the counting drivers built on them."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from ..graphs import Graph, cycle_graph, remove_vertex
from ..linalg import frac_inverse
from .polys import MPoly, PolySystem, mp_add, mp_const, mp_det, mp_eval, mp_scale, mp_var
from .tracker import (CONVERGED, PathResult, TrackerConfig, dedup_points, solve_total_degree,
                      status_counts)


class SeedDisagreement(RuntimeError):
    def __init__(self, message, per_seed):
        super().__init__(message)
        self.per_seed = per_seed


# ---------------------------------------------------------------------------
# Score equations


def draw_sample_covariance(n: int, seed: int) -> list[list[Fraction]]:
    """S = B B^T + n Id with integer B uniform in [-10, 10], scaled to max diagonal 1."""
    rng = np.random.default_rng(seed)
    b = rng.integers(-10, 11, size=(n, n))
    s = b @ b.T + n * np.eye(n, dtype=int)
    top = int(np.max(np.diag(s)))
    return [[Fraction(int(s[i, j]), top) for j in range(n)] for i in range(n)]


def _symbolic_matrix(n: int, fixed, unknowns: list[tuple[int, int]]):
    nv = len(unknowns)
    index = {p: k for k, p in enumerate(unknowns)}
    mat = []
    for i in range(n):
        row = []
        for j in range(n):
            key = (min(i, j), max(i, j))
            if key in index:
                row.append(mp_var(index[key], nv))
            else:
                row.append(mp_const(fixed(i, j), nv))
        mat.append(row)
    return mat


def _cofactor(mat, i: int, j: int, nv: int) -> MPoly:
    sub = [[mat[r][c] for c in range(len(mat)) if c != j] for r in range(len(mat)) if r != i]
    return mp_scale(mp_det(sub, nv), (-1) ** (i + j))


def score_polynomials(g: Graph, s) -> tuple[list[MPoly], list[tuple[int, int]]]:
    """Exact cofactor equations; unknowns are Sigma's non-edge entries."""
    s = [[Fraction(x) for x in row] for row in np.asarray(s, dtype=object).tolist()]
    n = g.n
    if len(s) != n or any(len(row) != n for row in s):
        raise ValueError("sample covariance size does not match graph")
    if any(s[i][j] != s[j][i] for i in range(n) for j in range(n)):
        raise ValueError("sample covariance must be symmetric")
    unknowns = g.non_edges()
    mat = _symbolic_matrix(n, lambda i, j: s[i][j], unknowns)
    nv = len(unknowns)
    return [_cofactor(mat, i, j, nv) for i, j in unknowns], unknowns


def score_system(g: Graph, s) -> PolySystem:
    """Sigma in S + L_G^perp whose inverse vanishes on the non-edges, as cofactor equations."""
    polys, unknowns = score_polynomials(g, s)
    return PolySystem(len(unknowns), polys, [f"sigma_{i}{j}" for i, j in unknowns])


def sigma_from_vector(g: Graph, s, z) -> np.ndarray:
    sig = np.array(np.asarray(s, dtype=object), dtype=complex)
    for k, (i, j) in enumerate(g.non_edges()):
        sig[i, j] = sig[j, i] = z[k]
    return sig


@dataclass
class CriticalRun:
    seed: int
    system: PolySystem
    paths: list[PathResult] = field(repr=False)
    points: list[np.ndarray] = field(repr=False)      # distinct non-edge vectors
    sigmas: list[np.ndarray] = field(repr=False)

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def residual_max(self) -> float:
        res = [p.residual for p in self.paths if p.status == CONVERGED]
        return max(res) if res else 0.0

    def summary(self) -> dict:
        return {"seed": self.seed, "count": self.count, "paths": len(self.paths),
                "statuses": status_counts(self.paths), "residual_max": self.residual_max}


def critical_points(g: Graph, s, cfg: TrackerConfig | None = None) -> CriticalRun:
    """Distinct finite nonsingular solutions of the score system with invertible Sigma."""
    cfg = cfg or TrackerConfig()
    system = score_system(g, s)
    if system.num_vars == 0:
        sig = np.array(np.asarray(s, dtype=object), dtype=complex)
        return CriticalRun(cfg.seed, system, [], [np.zeros(0, dtype=complex)], [sig])
    paths = solve_total_degree(system, cfg)
    good = []
    for p in paths:
        if p.status != CONVERGED:
            continue
        sig = sigma_from_vector(g, s, p.endpoint)
        if np.linalg.cond(sig) < cfg.cond_max:
            good.append(p.endpoint)
    points = dedup_points(good, cfg.dedup_radius)
    return CriticalRun(cfg.seed, system, paths, points,
                       [sigma_from_vector(g, s, z) for z in points])


@dataclass
class MLDegreeCount:
    count: int
    per_seed: list[CriticalRun]

    @property
    def paths_tracked(self) -> int:
        return sum(len(r.paths) for r in self.per_seed)

    @property
    def residual_max(self) -> float:
        return max((r.residual_max for r in self.per_seed), default=0.0)


def count_ml_degree(g: Graph, seeds=(1, 2, 3), cfg: TrackerConfig | None = None) -> MLDegreeCount:
    """ML-degree as the number of critical points for a generic rational S per seed.

    All seeds must agree; otherwise :class:`SeedDisagreement` carries the runs.
    """
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    if not g.is_connected():
        raise ValueError("graph must be connected")
    cfg = cfg or TrackerConfig()
    runs = []
    for seed in seeds:
        s = draw_sample_covariance(g.n, seed)
        runs.append(critical_points(g, s, replace(cfg, seed=seed)))
    counts = {r.count for r in runs}
    if len(counts) != 1:
        raise SeedDisagreement(
            "seed disagreement: " + ", ".join(f"seed {r.seed} -> {r.count}" for r in runs), runs)
    return MLDegreeCount(counts.pop(), runs)


@dataclass
class MonotonicityResult:
    holds: bool
    count_g: int
    count_h: int


def monotonicity_check(g: Graph, v: int, seeds=(1, 2, 3),
                       cfg: TrackerConfig | None = None) -> MonotonicityResult:
    """Compare ML-degrees of g and of g with vertex v deleted."""
    h = remove_vertex(g, v)
    cg = count_ml_degree(g, seeds, cfg).count
    ch = count_ml_degree(h, seeds, cfg).count
    return MonotonicityResult(cg >= ch, cg, ch)


# ---------------------------------------------------------------------------
# Fiber over the identity by brute force


@functools.lru_cache(maxsize=None)
def vanishing_minor_family(n: int) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    """All 3x3 minors (rows, cols), rows <= cols, vanishing on inverses of C_n-patterned matrices.

    Detected exactly: a minor is kept when it is zero at the inverses of two
    random integer matrices supported on the cycle.
    """
    g = cycle_graph(n)
    rng = np.random.default_rng(n)
    samples = []
    while len(samples) < 2:
        k = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            k[i][i] = Fraction(int(rng.integers(20, 40)))
        for i, j in g.edges:
            k[i][j] = k[j][i] = Fraction(int(rng.integers(-9, 10)))
        try:
            samples.append(frac_inverse(k))
        except ZeroDivisionError:
            continue
    triples = list(itertools.combinations(range(n), 3))
    family = []
    for a, b in itertools.combinations_with_replacement(triples, 2):
        if all(_det3(sm, a, b) == 0 for sm in samples):
            family.append((a, b))
    return tuple(family)


def _det3(m, rows, cols):
    b = [[m[i][j] for j in cols] for i in rows]
    return (b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
            - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
            + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]))


@dataclass
class FiberSystem:
    n: int
    unknowns: list[tuple[int, int]]
    full: list[MPoly]          # every vanishing minor restricted to Id + L^perp
    square: PolySystem         # random complex combinations, one per unknown


def fiber_polynomials(n: int) -> tuple[list[MPoly], list[tuple[int, int]]]:
    g = cycle_graph(n)
    unknowns = g.non_edges()
    nv = len(unknowns)
    mat = _symbolic_matrix(n, lambda i, j: Fraction(int(i == j)), unknowns)
    polys, seen = [], set()
    for rows, cols in vanishing_minor_family(n):
        sub = [[mat[i][j] for j in cols] for i in rows]
        p = mp_det(sub, nv)
        if not p:
            continue
        key = frozenset(p.items())
        neg = frozenset(mp_scale(p, -1).items())
        if key in seen or neg in seen:
            continue
        seen.add(key)
        polys.append(p)
    return polys, unknowns


def fiber_system(n: int, seed: int = 0) -> FiberSystem:
    """Overdetermined minor equations of the fiber plus a random square subsystem."""
    if n < 4:
        raise ValueError("fiber system needs n >= 4")
    full, unknowns = fiber_polynomials(n)
    nv = len(unknowns)
    rng = np.random.default_rng([seed, n, 0xF1B])
    weights = rng.normal(size=(nv, len(full))) + 1j * rng.normal(size=(nv, len(full)))
    square = []
    for row in weights:
        acc: MPoly = {}
        for w, p in zip(row, full):
            acc = mp_add(acc, {e: complex(c) * w for e, c in p.items()})
        square.append(acc)
    return FiberSystem(n, unknowns, full,
                       PolySystem(nv, square, [f"a_{i}{j}" for i, j in unknowns]))


def fiber_vector_to_matrix(n: int, z) -> np.ndarray:
    a = np.eye(n, dtype=complex)
    for k, (i, j) in enumerate(cycle_graph(n).non_edges()):
        a[i, j] = a[j, i] = z[k]
    return a


def fiber_matrix_to_vector(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    return np.array([a[i, j] for i, j in cycle_graph(n).non_edges()], dtype=complex)


def full_minor_residual(fs: FiberSystem, z) -> float:
    scale = max(1.0, float(np.max(np.abs(z)))) if len(z) else 1.0
    return max(abs(mp_eval(p, z)) for p in fs.full) / scale ** 3


def fiber_bruteforce(n: int, cfg: TrackerConfig | None = None) -> list[np.ndarray]:
    """Fiber points over the identity found by continuation, as non-edge vectors.

    Endpoints of the square subsystem are kept only when every minor of the
    full family vanishes to ``cfg.endpoint_tol``.  Singular matrices (e.g. the
    checkerboard orbit) are included since the minors do not need invertibility.
    """
    if not 4 <= n <= 6:
        raise ValueError("fiber brute force is limited to 4 <= n <= 6")
    cfg = cfg or TrackerConfig()
    fs = fiber_system(n, cfg.seed)
    paths = solve_total_degree(fs.square, cfg)
    candidates = [p.endpoint for p in paths
                  if p.status == CONVERGED and full_minor_residual(fs, p.endpoint) <= cfg.endpoint_tol]
    return dedup_points(candidates, cfg.dedup_radius)
