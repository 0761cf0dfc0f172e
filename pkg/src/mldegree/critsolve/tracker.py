"""Total-degree homotopy continuation with a batched predictor-corrector.

The homotopy runs in ``s`` from 1 (start system) to 0 (target):

    H(z, s) = s * gamma * G(z) + (1 - s) * F(z),    G_i(z) = z_i^{d_i} - r_i

Tracking in ``s`` rather than ``t = 1 - s`` keeps full relative precision near
the target, where singular and diverging paths need tiny steps.  Every path
carries its own ``s``, step size and status; numpy evaluates all active paths
of a chunk together.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .polys import CompiledSystem, PolySystem

CONVERGED = "converged"
DIVERGED = "diverged_to_infinity"
SINGULAR = "singular"
STEP_FAILURE = "step_failure"
STATUSES = (CONVERGED, DIVERGED, SINGULAR, STEP_FAILURE)

THREADS_ENV = "MLDEGREE_THREADS"


@dataclass(frozen=True)
class TrackerConfig:
    initial_step: float = 0.02
    min_step: float = 1e-14
    max_step: float = 0.1
    newton_tol: float = 1e-9
    max_newton_iters: int = 3
    max_steps: int = 20000
    endpoint_tol: float = 1e-10
    dedup_radius: float = 1e-6
    gamma: complex | None = None   # drawn from ``seed`` when None
    seed: int = 0
    divergence_bound: float = 1e8
    endgame_s: float = 1e-6        # stalls below this s are classified, not failures
    cond_max: float = 1e10
    chunk_size: int = 256

    def __post_init__(self):
        if not 0 < self.min_step <= self.initial_step < 1:
            raise ValueError("need 0 < min_step <= initial_step < 1")
        if self.initial_step > self.max_step:
            raise ValueError("initial_step exceeds max_step")
        for name in ("newton_tol", "endpoint_tol", "dedup_radius", "divergence_bound",
                     "endgame_s", "cond_max"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_newton_iters < 1 or self.max_steps < 1 or self.chunk_size < 1:
            raise ValueError("iteration limits must be >= 1")

    def resolved_gamma(self) -> complex:
        if self.gamma is not None:
            return complex(self.gamma)
        rng = np.random.default_rng([self.seed, 0x6A6D])
        # keep away from the real axis
        angle = rng.uniform(0.1, np.pi - 0.1) * rng.choice([-1, 1])
        return complex(np.cos(angle), np.sin(angle))


@dataclass
class PathResult:
    endpoint: np.ndarray
    status: str
    residual: float
    start: np.ndarray = field(repr=False, default=None)
    s_final: float = 0.0
    steps: int = 0
    cond: float = float("nan")

    @property
    def is_finite_regular(self) -> bool:
        return self.status == CONVERGED


def start_constants(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng([seed, 0x5157])
    return np.exp(2j * np.pi * rng.uniform(size=n))


def start_solutions(degrees: list[int], r: np.ndarray) -> np.ndarray:
    roots = [r[i] ** (1.0 / d) * np.exp(2j * np.pi * np.arange(d) / d)
             for i, d in enumerate(degrees)]
    return np.array(list(itertools.product(*roots)), dtype=complex).reshape(-1, len(degrees))


class _Homotopy:
    def __init__(self, comp: CompiledSystem, degrees, r, gamma):
        self.comp = comp
        self.d = np.asarray(degrees)
        self.r = np.asarray(r)
        self.gamma = gamma

    def start(self, z):
        zd1 = z ** (self.d - 1)
        return zd1 * z - self.r, zd1 * self.d

    def evaluate(self, z, s):
        f, jf = self.comp.evaluate(z)
        g, dg = self.start(z)
        sg = (s * self.gamma)[:, None]
        h = sg * g + (1 - s)[:, None] * f
        jh = (1 - s)[:, None, None] * jf
        jh[:, np.arange(self.comp.n), np.arange(self.comp.n)] += sg * dg
        return h, jh, self.gamma * g - f


def _solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(a, b[..., None])[..., 0]
    except np.linalg.LinAlgError:
        out = np.empty_like(b)
        for k in range(len(a)):
            out[k] = np.linalg.lstsq(a[k], b[k], rcond=None)[0]
        return out


def _max_abs(v: np.ndarray) -> np.ndarray:
    return np.max(np.abs(v), axis=1)


def _track_chunk(hom: _Homotopy, z0: np.ndarray, cfg: TrackerConfig) -> list[PathResult]:
    P, n = z0.shape
    z = z0.copy()
    s = np.ones(P)
    h = np.full(P, cfg.initial_step)
    streak = np.zeros(P, dtype=int)
    steps = np.zeros(P, dtype=int)
    status = np.array([""] * P, dtype=object)

    for _ in range(cfg.max_steps):
        active = np.flatnonzero(status == "")
        if active.size == 0:
            break
        zi, si = z[active], s[active]
        hi = np.minimum(h[active], si)
        _, jh, hs = hom.evaluate(zi, si)
        # Euler predictor along dz/ds = -J^{-1} dH/ds, stepping s -> s - h
        tangent = _solve(jh, hs)
        s_new = np.where(hi >= si, 0.0, si - hi)
        zc = zi + (si - s_new)[:, None] * tangent

        converged = np.zeros(len(active), dtype=bool)
        first = None
        with np.errstate(all="ignore"):
            for it in range(cfg.max_newton_iters):
                hv, jv, _ = hom.evaluate(zc, s_new)
                delta = _solve(jv, hv)
                zc = zc - delta
                rel = _max_abs(delta) / (1 + _max_abs(zc))
                if first is None:
                    first = rel
                converged |= rel < cfg.newton_tol
        ok = converged & np.all(np.isfinite(zc), axis=1) & (first < 0.25)

        acc = active[ok]
        z[acc] = zc[ok]
        s[acc] = s_new[ok]
        steps[acc] += 1
        streak[acc] += 1
        grow = acc[streak[acc] >= 3]
        h[grow] = np.minimum(2 * h[grow], cfg.max_step)
        streak[grow] = 0
        rej = active[~ok]
        h[rej] *= 0.5
        streak[rej] = 0

        norms = _max_abs(z[active])
        status[active[norms > cfg.divergence_bound]] = DIVERGED
        done = active[(s[active] == 0) & (status[active] == "")]
        status[done] = "finish"
        stalled = active[(h[active] < cfg.min_step) & (status[active] == "")]
        for k in stalled:
            status[k] = "stall" if s[k] < cfg.endgame_s else STEP_FAILURE

    status[status == ""] = STEP_FAILURE
    return _classify(hom, z0, z, s, steps, status, cfg)


def _classify(hom, z0, z, s, steps, status, cfg) -> list[PathResult]:
    comp = hom.comp
    fin = np.flatnonzero(status == "finish")
    residual = np.full(len(z), np.nan)
    cond = np.full(len(z), np.nan)
    if fin.size:
        zf = z[fin].copy()
        with np.errstate(all="ignore"):
            for _ in range(6):
                f, jf = comp.evaluate(zf)
                step = _solve(jf, f)
                cand = zf - step
                ok = np.all(np.isfinite(cand), axis=1)
                zf[ok] = cand[ok]
            # the one extra polish of the residual contract
            f, jf = comp.evaluate(zf)
            cand = zf - _solve(jf, f)
            ok = np.all(np.isfinite(cand), axis=1)
            zf[ok] = cand[ok]
            _, jf = comp.evaluate(zf)
            cond[fin] = np.linalg.cond(jf)
            residual[fin] = comp.relative_residual(zf)
        z[fin] = zf
        for k in fin:
            big = np.max(np.abs(z[k])) > cfg.divergence_bound
            if residual[k] <= cfg.endpoint_tol and cond[k] <= cfg.cond_max and not big:
                status[k] = CONVERGED
            else:
                status[k] = DIVERGED if big else SINGULAR
    for k in np.flatnonzero(status == "stall"):
        # projective rescaling: a tiny homogenizing coordinate means infinity
        status[k] = DIVERGED if 1.0 / max(1.0, np.max(np.abs(z[k]))) < 1e-4 else SINGULAR
    out = []
    for k in range(len(z)):
        if np.isnan(residual[k]) and np.all(np.isfinite(z[k])):
            residual[k] = float(comp.relative_residual(z[k:k + 1])[0])
        out.append(PathResult(z[k].copy(), str(status[k]), float(residual[k]), z0[k].copy(),
                              float(s[k]), int(steps[k]), float(cond[k])))
    return out


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def solve_total_degree(system: PolySystem, cfg: TrackerConfig | None = None) -> list[PathResult]:
    """Track all prod(d_i) paths from z_i^{d_i} = r_i to ``system``.

    Results are in start-solution order.  Chunking is fixed by
    ``cfg.chunk_size`` so output does not depend on the thread count.
    """
    cfg = cfg or TrackerConfig()
    degrees = system.degrees
    if system.num_vars == 0:
        return []
    if min(degrees) < 1:
        raise ValueError("every equation needs positive degree")
    comp = system.compile()
    r = start_constants(system.num_vars, cfg.seed)
    hom = _Homotopy(comp, degrees, r, cfg.resolved_gamma())
    z0 = start_solutions(degrees, r)
    chunks = [z0[i:i + cfg.chunk_size] for i in range(0, len(z0), cfg.chunk_size)]
    threads = thread_count()
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda c: _track_chunk(hom, c, cfg), chunks))
    else:
        parts = [_track_chunk(hom, c, cfg) for c in chunks]
    return [res for part in parts for res in part]


def status_counts(results: list[PathResult]) -> dict[str, int]:
    return {st: sum(r.status == st for r in results) for st in STATUSES}


def rescaled(z: np.ndarray) -> np.ndarray:
    """(1, z) / max(1, |z|_inf): a projective-style chart that keeps scale information."""
    return np.concatenate([[1.0], z]) / max(1.0, float(np.max(np.abs(z)))) if z.size else z


def dedup_points(points: list[np.ndarray], radius: float) -> list[np.ndarray]:
    """Keep the first of any group closer than ``radius`` (max norm, rescaled)."""
    kept: list[np.ndarray] = []
    kept_scaled: list[np.ndarray] = []
    for p in points:
        q = rescaled(p)
        if all(np.max(np.abs(q - k)) > radius for k in kept_scaled):
            kept.append(p)
            kept_scaled.append(q)
    return kept
