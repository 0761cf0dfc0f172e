"""The fiber of the cycle model over the identity, and the cofactor machinery.

For the n-cycle every point of ``L^{-1} ∩ (Id + L^perp)`` other than the
identity is, up to conjugation by a diagonal sign matrix, either the inverse of
the cyclic tridiagonal matrix ``M^+(x)`` / ``M^-(x)`` at a root ``x`` of a small
defining polynomial built from the ``P_k``, or (for even n) the rank-two
checkerboard matrix.  :func:`enumerate_fiber` builds all of them and
:func:`lower_bound` turns the root counts into the ML-degree lower bound.

Matrices are plain numpy arrays (float or complex) unless stated otherwise;
exact variants use lists of :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactpoly import QPoly, X, X2, distinct_roots, pn_table
from .graphs import Graph, cycle_graph, model_space
from .linalg import frac_inverse

Pair = tuple[int, int]


# ---------------------------------------------------------------------------
# Matrices


def _dtype_for(x):
    if isinstance(x, (int, Fraction)):
        return object
    return complex if isinstance(x, complex) or np.iscomplexobj(x) else float


def build_mn(n: int, x) -> np.ndarray:
    """Tridiagonal M_n(x): ones on the diagonal, ``x`` beside it."""
    dtype = _dtype_for(x)
    one = Fraction(1) if dtype is object else 1.0
    zero = Fraction(0) if dtype is object else 0.0
    a = np.full((n, n), zero, dtype=dtype)
    for i in range(n):
        a[i, i] = one
        if i + 1 < n:
            a[i, i + 1] = a[i + 1, i] = x
    return a


def _cyclic(n: int, x, corner_sign: int) -> np.ndarray:
    if n < 3:
        raise ValueError(f"cyclic matrices need n >= 3, got {n}")
    a = build_mn(n, x)
    a[0, n - 1] = a[n - 1, 0] = corner_sign * x
    return a


def build_mn_plus(n: int, x) -> np.ndarray:
    return _cyclic(n, x, +1)


def build_mn_minus(n: int, x) -> np.ndarray:
    return _cyclic(n, x, -1)


def checkerboard(n: int) -> np.ndarray:
    """1 where i + j is even, 0 elsewhere (rank two)."""
    if n % 2:
        raise ValueError(f"checkerboard matrix is only used for even n, got {n}")
    idx = np.arange(n)
    return ((idx[:, None] + idx[None, :]) % 2 == 0).astype(float)


def conjugate_by_sign(signs: Sequence[int], a: np.ndarray) -> np.ndarray:
    """D a D for D = diag(signs)."""
    s = np.asarray(signs)
    if s.shape != (a.shape[0],):
        raise ValueError(f"sign vector of length {len(s)} does not match {a.shape[0]}x{a.shape[0]}")
    if not np.all(np.abs(s) == 1):
        raise ValueError("sign vector entries must be +1 or -1")
    return a * np.outer(s, s)


def sign_vectors(n: int, fixed: int = 1) -> list[tuple[int, ...]]:
    """All sign vectors whose first ``fixed`` entries are +1."""
    tails = itertools.product((1, -1), repeat=n - fixed)
    return [(1,) * fixed + t for t in tails]


# ---------------------------------------------------------------------------
# Defining polynomials and the fiber


def fiber_defining_polynomial(n: int, family: str) -> QPoly:
    """Polynomial whose roots x give regular fiber points M^{family}_n(x)^{-1}.

    odd n = 2m+1, plus:  P_{m-1} + x P_{m-2}
    even n = 2m,  plus:  P_{m-1} - x^2 P_{m-3}
    even n = 2m,  minus: P_{m-2}
    The odd minus family is sign-conjugate to the plus family and is rejected.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    if family not in ("plus", "minus"):
        raise ValueError(f"family must be 'plus' or 'minus', got {family!r}")
    P = pn_table(n)
    m, odd = divmod(n, 2)
    if odd:
        if family == "minus":
            raise ValueError("for odd n the minus family reduces to the plus family")
        return P[m - 1] + X * P[m - 2]
    if family == "plus":
        return P[m - 1] - X2 * P[m - 3]
    if m < 2:
        raise ValueError("minus family needs n >= 4")
    return P[m - 2]


@dataclass(frozen=True)
class FiberPoint:
    matrix: np.ndarray
    family: str                 # identity | plus | minus | checkerboard
    x: complex                  # generator parameter (0 for identity/checkerboard)
    signs: tuple[int, ...]
    regular: bool
    residual: float = 0.0
    exact: bool = False         # generator inverse was also computed in Q

    def to_json(self) -> dict:
        return {"family": self.family, "x": [self.x.real, self.x.imag],
                "signs": list(self.signs), "residual": self.residual}


def _canonical_roots(p: QPoly, even_pairs: bool) -> list[complex]:
    if p.is_constant():
        return []
    roots = distinct_roots(p)
    if even_pairs:
        roots = [r for r in roots if r.real > 1e-12 or (abs(r.real) <= 1e-12 and r.imag > 0)]
    return sorted(roots, key=lambda c: (c.real, c.imag))


def _rational_root(p: QPoly, r: complex) -> Fraction | None:
    if abs(r.imag) > 1e-9:
        return None
    q = Fraction(r.real).limit_denominator(64)
    return q if p(q) == 0 else None


def fiber_generators(n: int) -> list[tuple[str, complex, QPoly]]:
    """(family, x, defining polynomial) for each regular orbit, canonical roots only."""
    even = n % 2 == 0
    gens = []
    for family in ("plus", "minus") if even else ("plus",):
        if even and family == "minus" and n < 4:
            continue
        poly = fiber_defining_polynomial(n, family)
        for r in _canonical_roots(poly, even):
            gens.append((family, r, poly))
    return gens


def enumerate_fiber(n: int, tol: float = 1e-9) -> list[FiberPoint]:
    """Every point of L^{-1} ∩ (Id + L^perp) for the n-cycle.

    Orbits are listed by sign vector modulo the stabilizer: {±Id} for regular
    points (first sign fixed to +1) and additionally the parity flips for the
    checkerboard (first two signs fixed).  Raises if any point fails
    :func:`verify_fiber_point` at ``tol``.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    points = [FiberPoint(np.eye(n), "identity", 0j, (1,) * n, True)]
    for family, x, poly in fiber_generators(n):
        builder = build_mn_plus if family == "plus" else build_mn_minus
        xv = x.real if abs(x.imag) <= 1e-14 else x
        base = _snap_structure(np.linalg.inv(builder(n, xv)), tol)
        exact = False
        q = _rational_root(poly, x) if n <= 8 else None
        if q is not None:
            exact_inv = np.array(frac_inverse(builder(n, q).tolist()), dtype=float)
            if np.max(np.abs(exact_inv - base)) > 1e-10:
                raise AssertionError(f"numeric and exact inverses disagree for x={q}")
            base, exact = exact_inv, True
        for s in sign_vectors(n, 1):
            a = conjugate_by_sign(s, base)
            points.append(FiberPoint(a, family, complex(x), s, True, exact=exact))
    if n % 2 == 0:
        cb = checkerboard(n)
        for s in sign_vectors(n, 2):
            points.append(FiberPoint(conjugate_by_sign(s, cb), "checkerboard", 0j, s, False))

    checked = []
    for p in points:
        ok, res = verify_fiber_point(p, tol)
        if not ok:
            raise AssertionError(f"fiber point {p.family} x={p.x} signs={p.signs} "
                                 f"fails membership (residual {res:.3e})")
        checked.append(FiberPoint(p.matrix, p.family, p.x, p.signs, p.regular, res, p.exact))
    return checked


def _snap_structure(a: np.ndarray, tol: float) -> np.ndarray:
    """Set diagonal to 1 and cycle edges to 0 after checking they are within ``tol``."""
    n = a.shape[0]
    a = (a + a.T) / 2
    drift = max(np.max(np.abs(np.diag(a) - 1)),
                max(abs(a[i, (i + 1) % n]) for i in range(n)))
    if drift > tol:
        raise AssertionError(f"inverse misses Id + L^perp structure by {drift:.3e}")
    a = a.copy()
    np.fill_diagonal(a, 1.0)
    for i in range(n):
        a[i, (i + 1) % n] = a[(i + 1) % n, i] = 0.0
    return a


def fiber_count_formula(n: int) -> int:
    return 1 + (n - 3) * 2 ** (n - 2)


# ---------------------------------------------------------------------------
# Membership tests


def membership_minor_indices(n: int) -> list[tuple[tuple[int, int, int], tuple[int, int, int]]]:
    """(rows, cols) = ((i, i+2, j), (i, i+1, i+2)) mod n for all i and j != i+1."""
    out = []
    for i in range(n):
        for j in range(n):
            if j == (i + 1) % n:
                continue
            out.append(((i, (i + 2) % n, j), (i, (i + 1) % n, (i + 2) % n)))
    return out


def cycle_membership_minors(a: np.ndarray, n: int | None = None) -> float:
    """Largest |3x3 minor| over the cycle's membership family; 0 on the fiber."""
    a = np.asarray(a)
    if n is None:
        n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"matrix shape {a.shape} does not match n={n}")
    if n < 4:
        raise ValueError("membership minors need n >= 4")
    idx = membership_minor_indices(n)
    rows = np.array([r for r, _ in idx])
    cols = np.array([c for _, c in idx])
    blocks = a[rows[:, :, None], cols[:, None, :]]
    if blocks.dtype == object:
        return float(max(abs(_det3(b)) for b in blocks))
    return float(np.max(np.abs(np.linalg.det(blocks))))


def _det3(b) -> Fraction:
    return (b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
            - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
            + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]))


def verify_fiber_point(p, tol: float = 1e-9) -> tuple[bool, float]:
    """Check a fiber point (FiberPoint or bare matrix); returns (ok, max_residual).

    Diagonal must be exactly 1 and cycle edges exactly 0; the membership minors
    must vanish to ``tol``; for regular points the inverse must vanish off the
    cycle to ``tol``.
    """
    a = np.asarray(p.matrix if isinstance(p, FiberPoint) else p)
    n = a.shape[0]
    if np.any(np.diag(a) != 1):
        return False, float(np.max(np.abs(np.diag(a) - 1)))
    edge_vals = [a[i, (i + 1) % n] for i in range(n)] + [a[(i + 1) % n, i] for i in range(n)]
    if any(v != 0 for v in edge_vals):
        return False, float(max(abs(v) for v in edge_vals))
    if not np.array_equal(a, a.T):
        return False, float(np.max(np.abs(a - a.T)))
    res = cycle_membership_minors(a, n) if n >= 4 else 0.0
    regular = p.regular if isinstance(p, FiberPoint) else abs(np.linalg.det(a)) > 1e-9
    if regular:
        k = np.linalg.inv(a)
        g = cycle_graph(n)
        off = [abs(k[i, j]) for i, j in g.non_edges()]
        if off:
            res = max(res, float(max(off)))
    return bool(res <= tol), float(res)


# ---------------------------------------------------------------------------
# Cofactors and their derivatives


def _delete(m: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
    keep_r = [i for i in range(m.shape[0]) if i not in rows]
    keep_c = [j for j in range(m.shape[1]) if j not in cols]
    return m[np.ix_(keep_r, keep_c)]


def _det(m: np.ndarray):
    return np.linalg.det(m) if m.size else 1.0


def gamma_minor(m: np.ndarray, e: Pair):
    """Signed cofactor (-1)^{i+j} det(m without row i, column j)."""
    i, j = e
    return (-1) ** (i + j) * _det(_delete(np.asarray(m), [i], [j]))


def _second_term(m, i, j, k, l):
    # d/dm_{kl} of the (i, j) cofactor, as a general (unsymmetrized) entry
    if i == k or j == l:
        return 0.0
    sign = (-1) ** (i + j + k + l + (k > i) + (l > j))
    return sign * _det(_delete(m, [i, k], [j, l]))


def gamma_pair(m: np.ndarray, e1: Pair, e2: Pair):
    """Derivative of ``gamma_minor(., e1)`` along coordinate ``e2`` of L_G.

    Off-diagonal coordinates move entries (k, l) and (l, k) together; diagonal
    coordinates enter with coefficient two.  Both cases are the sum of the two
    general-entry derivatives, each a signed (n-2)-minor; index collisions
    contribute zero.
    """
    m = np.asarray(m)
    i, j = e1
    k, l = e2
    return _second_term(m, i, j, k, l) + _second_term(m, i, j, l, k)


@dataclass(frozen=True)
class JacobianCheck:
    regular: bool
    det_value: complex
    min_singular_value: float
    coordinates: list[Pair]


def jacobian_matrix(k: np.ndarray, g: Graph) -> tuple[np.ndarray, list[Pair]]:
    coords = model_space(g).support
    jac = np.array([[gamma_pair(k, e, f) for f in coords] for e in coords])
    return jac, coords


def jacobian_regularity(point: np.ndarray, g: Graph, tol: float = 1e-8,
                        rcond: float = 1e-10) -> JacobianCheck:
    """Smoothness test at a regular fiber/critical point.

    ``point`` is the covariance-side matrix A; its inverse K must lie in L_G.
    The matrix [gamma_pair(K, e, f)] over e, f in loops ∪ edges is regular iff
    the point is a smooth isolated point of the intersection.
    """
    a = np.asarray(point)
    if a.shape != (g.n, g.n):
        raise ValueError("point size does not match graph")
    if np.linalg.cond(a) > 1e12:
        raise ValueError("point is singular; no inverse to evaluate the Jacobian at")
    k = np.linalg.inv(a)
    scale = np.max(np.abs(k))
    for i, j in g.non_edges():
        if abs(k[i, j]) > tol * scale:
            raise ValueError(f"inverse is not in L_G: entry ({i},{j}) = {k[i, j]:.3e}")
    jac, coords = jacobian_matrix(k, g)
    sv = np.linalg.svd(jac, compute_uv=False)
    det = np.linalg.det(jac)
    regular = bool(sv[-1] > rcond * sv[0])
    return JacobianCheck(regular, complex(det), float(sv[-1]), coords)


# ---------------------------------------------------------------------------
# Lower bound


def lower_bound(n: int) -> int:
    """Number of fiber points from root counts; must equal 1 + (n-3) 2^{n-2}."""
    if n < 4:
        raise ValueError("lower bound is stated for n >= 4")
    if n % 2:
        roots = len(distinct_roots(fiber_defining_polynomial(n, "plus")))
        count = 1 + 2 ** (n - 1) * roots
    else:
        counts = []
        for family in ("plus", "minus"):
            p = fiber_defining_polynomial(n, family)
            counts.append(0 if p.is_constant() else len(distinct_roots(p)))
        count = 1 + 2 ** (n - 2) * (counts[0] + counts[1] + 1)
    formula = fiber_count_formula(n)
    if count != formula:
        raise AssertionError(f"root-count bound {count} != closed form {formula} at n={n}")
    return count


def generator_residual(n: int, family: str, x: complex) -> complex:
    """x^{n-2} ± (-1)^n P_{n-2}(x): zero at every regular plus (+) / minus (-) generator."""
    p = pn_table(n)[n - 2]
    sign = 1 if family == "plus" else -1
    return x ** (n - 2) + sign * (-1) ** n * p(x)


def orbit_size(family: str, n: int) -> int:
    if family == "identity":
        return 1
    if family == "checkerboard":
        return 2 ** (n - 2)
    return 2 ** (n - 1)


def regular_generator_det(n: int, family: str, x) -> complex:
    """det M^{±}_n(x), which equals P_{n-1}(x)."""
    builder = build_mn_plus if family == "plus" else build_mn_minus
    return complex(np.linalg.det(builder(n, x)))
