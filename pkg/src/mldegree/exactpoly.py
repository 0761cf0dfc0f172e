"""Exact univariate polynomials over the rationals and the tridiagonal family P_n.

``P_n(x)`` is the determinant of the n x n tridiagonal matrix with ones on the
diagonal and ``x`` on both off-diagonals.  It obeys ``P_n = P_{n-1} - x^2 P_{n-2}``
with ``P_0 = P_1 = 1`` and, by convention, ``P_{-1} = 0``.

Coefficients are :class:`fractions.Fraction` throughout; the only floating
point output of this module is the numeric root finder.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np


class QPoly:
    """Immutable polynomial with rational coefficients, ``coeffs[k]`` multiplies ``x**k``.

    The zero polynomial has an empty coefficient tuple; otherwise the leading
    coefficient is nonzero.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("QPoly is immutable")

    @classmethod
    def constant(cls, c) -> QPoly:
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c=1) -> QPoly:
        return cls([0] * k + [c])

    # -- basic properties -------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, QPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == QPoly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"QPoly({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{'*' if mono else ''}{mono}"
            terms.append(("-" if c < 0 else "+", body))
        sign, body = terms[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    # -- ring operations --------------------------------------------------

    @staticmethod
    def _coerce(other) -> QPoly:
        if isinstance(other, QPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return QPoly([other])
        raise TypeError(f"cannot combine QPoly with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return QPoly([a[k] + b[k] if k < len(b) else a[k] for k in range(len(a))])

    __radd__ = __add__

    def __neg__(self):
        return QPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if not self.coeffs or not other.coeffs:
            return QPoly()
        # Convolve integer numerators over a common denominator; much faster
        # than multiplying Fractions pairwise.
        na, da = _integerize(self.coeffs)
        nb, db = _integerize(other.coeffs)
        out = [0] * (len(na) + len(nb) - 1)
        for i, x in enumerate(na):
            if x:
                for j, y in enumerate(nb):
                    if y:
                        out[i + j] += x * y
        den = da * db
        return QPoly([Fraction(v, den) for v in out])

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result, base = QPoly([1]), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.leading
        if len(rem) - 1 < dq:
            return QPoly(), self
        quot = [Fraction(0)] * (len(rem) - dq)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] / lead
            quot[k - dq] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k - dq + j] -= c * b
        return QPoly(quot), QPoly(rem[:dq])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    # -- transforms -------------------------------------------------------

    def monic(self) -> QPoly:
        if not self.coeffs:
            return self
        lead = self.leading
        return QPoly([c / lead for c in self.coeffs])

    def reflect(self) -> QPoly:
        """Return ``p(-x)``."""
        return QPoly([-c if k % 2 else c for k, c in enumerate(self.coeffs)])

    def shift_degree(self, k: int) -> QPoly:
        """Return ``x**k * p``."""
        if not self.coeffs:
            return self
        return QPoly([0] * k + list(self.coeffs))

    def derivative(self) -> QPoly:
        return QPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        """Horner evaluation; exact for int/Fraction input, else in the input's type."""
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        if isinstance(x, (mpmath.mpf, mpmath.mpc)):
            acc = mpmath.mpf(0)
            for c in reversed(self.coeffs):
                acc = acc * x + mpmath.mpf(c.numerator) / c.denominator
            return acc
        acc = 0.0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {"coeffs": [[str(c.numerator), str(c.denominator)] for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> QPoly:
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls([Fraction(int(num), int(den)) for num, den in obj["coeffs"]])


X = QPoly([0, 1])
X2 = QPoly([0, 0, 1])


def _integerize(coeffs: Sequence[Fraction]) -> tuple[list[int], int]:
    den = 1
    for c in coeffs:
        if c.denominator != 1:
            den = den * c.denominator // math.gcd(den, c.denominator)
    if den == 1:
        return [c.numerator for c in coeffs], 1
    return [c.numerator * (den // c.denominator) for c in coeffs], den


def poly_arith(p: QPoly, q: QPoly, op: str) -> QPoly:
    """Apply ``op`` in {"add", "sub", "mul"}."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown op {op!r}")


def poly_gcd(p: QPoly, q: QPoly) -> QPoly:
    """Monic gcd by the Euclidean algorithm, remainders kept monic."""
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    a, b = p.monic(), q.monic()
    while not b.is_zero():
        a, b = b, (a % b).monic()
    return a


# ---------------------------------------------------------------------------
# The P_n family


@dataclass(frozen=True)
class PnTable:
    """``polys[k + 1]`` holds ``P_k`` for ``-1 <= k <= max_index``."""

    max_index: int
    polys: tuple[QPoly, ...]

    @classmethod
    def build(cls, max_index: int) -> PnTable:
        if max_index < 0:
            raise ValueError("max_index must be >= 0")
        polys = [QPoly(), QPoly([1])]
        for _ in range(1, max_index + 1):
            polys.append(polys[-1] - X2 * polys[-2])
        return cls(max_index, tuple(polys))

    def __getitem__(self, n: int) -> QPoly:
        if n < -1:
            raise ValueError(f"P_n is defined for n >= -1, got {n}")
        if n > self.max_index:
            raise IndexError(f"P_{n} beyond table (max_index={self.max_index})")
        return self.polys[n + 1]


@functools.lru_cache(maxsize=8)
def _table(size: int) -> PnTable:
    return PnTable.build(size)


def pn_table(max_index: int) -> PnTable:
    # round up so repeated callers share a handful of cached tables
    size = 64
    while size < max_index:
        size *= 2
    return _table(size)


def pn(n: int, table: PnTable | None = None) -> QPoly:
    """Exact ``P_n`` from the memoized recurrence."""
    if n < -1:
        raise ValueError(f"P_n is defined for n >= -1, got {n}")
    if table is None:
        table = pn_table(n)
    return table[n]


def tridiagonal_matrix(n: int) -> list[list[QPoly]]:
    """M_n(x) with polynomial entries."""
    one = QPoly([1])
    zero = QPoly()
    return [[one if i == j else (X if abs(i - j) == 1 else zero) for j in range(n)]
            for i in range(n)]


def poly_matrix_det(mat: Sequence[Sequence[QPoly]]) -> QPoly:
    """Determinant of a square matrix over Q[x] by Laplace expansion along rows.

    Minors are memoized by their remaining column set, so the cost is
    O(2^n * n) polynomial products.
    """
    n = len(mat)
    if n == 0:
        return QPoly([1])

    @functools.lru_cache(maxsize=None)
    def minor(row: int, cols: int) -> QPoly:
        if row == n:
            return QPoly([1])
        acc = QPoly()
        sign = 1
        for j in range(n):
            if not cols >> j & 1:
                continue
            entry = mat[row][j]
            if not entry.is_zero():
                sub = minor(row + 1, cols & ~(1 << j))
                term = entry * sub
                acc = acc + term if sign > 0 else acc - term
            sign = -sign
        return acc

    return minor(0, (1 << n) - 1)


def pn_det_oracle(n: int) -> QPoly:
    """det M_n(x) computed from the matrix itself, independent of the recurrence."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > 12:
        raise ValueError(f"determinant oracle limited to n <= 12, got {n}")
    return poly_matrix_det(tridiagonal_matrix(n))


# ---------------------------------------------------------------------------
# Identities among the P_n

IDENTITIES = (
    "addition",
    "square_split",
    "odd_split",
    "casoratian",
    "odd_power_gap",
    "even_power_sum",
    "even_power_gap",
    "coprime",
)


@dataclass(frozen=True)
class IdentityResult:
    name: str
    n: int
    holds: bool
    m: int | None = None
    counterexample: QPoly | None = None  # lhs - rhs when an equality fails

    def describe(self) -> str:
        idx = f"m={self.m}, n={self.n}" if self.m is not None else f"n={self.n}"
        status = "holds" if self.holds else f"FAILS (difference {self.counterexample})"
        return f"{self.name} [{idx}]: {status}"


def _identity_sides(name: str, n: int, m: int | None, P) -> tuple[QPoly, QPoly]:
    x = X
    if name == "addition":
        return P(m + n), P(m) * P(n) - X2 * P(m - 1) * P(n - 1)
    if name == "square_split":
        return P(2 * n), (P(n) - x * P(n - 1)) * (P(n) + x * P(n - 1))
    if name == "odd_split":
        return P(2 * n - 1), P(n - 1) * (P(n) - X2 * P(n - 2))
    if name == "casoratian":
        return QPoly.monomial(2 * n - 2), P(n - 1) * P(n - 1) - P(n) * P(n - 2)
    if name == "odd_power_gap":
        return (P(2 * n - 1) - QPoly.monomial(2 * n - 1),
                (P(n) - x * P(n - 1)) * (P(n - 1) + x * P(n - 2)))
    if name == "even_power_sum":
        return P(2 * n) + QPoly.monomial(2 * n), P(n) * (P(n) - X2 * P(n - 2))
    if name == "even_power_gap":
        return P(2 * n) - QPoly.monomial(2 * n), P(n - 1) * (P(n + 1) - X2 * P(n - 1))
    raise ValueError(f"unknown identity {name!r}")


def verify_identity(name: str, n: int, m: int | None = None,
                    table: PnTable | None = None) -> IdentityResult:
    """Check one identity at index ``n`` (and ``m`` for ``addition``) exactly.

    ``table`` may be any mapping ``k -> P_k``; tests use it to inject faults.
    """
    if name not in IDENTITIES:
        raise ValueError(f"unknown identity {name!r}; expected one of {IDENTITIES}")
    if name == "addition":
        if m is None:
            raise ValueError("addition identity needs m")
        if m < 0 or n < 0:
            raise ValueError("addition identity needs m, n >= 0")
    elif n <= 1:
        raise ValueError(f"{name} requires n > 1")
    if table is None:
        table = pn_table(2 * n + 2 + (m or 0))
    P = table.__getitem__

    if name == "coprime":
        trio = (P(n), P(n - 1), P(n - 2))
        for a, b in ((0, 1), (0, 2), (1, 2)):
            g = poly_gcd(trio[a], trio[b])
            if not g.is_constant():
                return IdentityResult(name, n, False, m, g)
        return IdentityResult(name, n, True, m)

    lhs, rhs = _identity_sides(name, n, m, P)
    diff = lhs - rhs
    return IdentityResult(name, n, diff.is_zero(), m, None if diff.is_zero() else diff)


def verify_all_identities(max_n: int, table: PnTable | None = None) -> list[IdentityResult]:
    """Every identity for 2 <= n <= max_n; ``addition`` over all splits m + k = n."""
    if max_n < 2:
        raise ValueError("max_n must be >= 2")
    if table is None:
        table = pn_table(2 * max_n + 2)
    results = []
    for n in range(2, max_n + 1):
        for m in range(0, n // 2 + 1):
            results.append(verify_identity("addition", n - m, m, table))
        for name in IDENTITIES[1:]:
            results.append(verify_identity(name, n, table=table))
    return results


# ---------------------------------------------------------------------------
# Roots


def cosine_roots(n: int) -> list[float]:
    """Closed-form roots of P_n: 1 / (2 cos(k pi / (n + 1))), k != (n + 1) / 2."""
    out = []
    for k in range(1, n + 1):
        if 2 * k == n + 1:
            continue
        out.append(1.0 / (2.0 * math.cos(k * math.pi / (n + 1))))
    return sorted(out)


def sine_quotient(n: int, alpha, dps: int = 50) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Both sides of (2 cos a)^n P_n(1 / (2 cos a)) = sin((n+1) a) / sin a.

    The left side is evaluated as the reversed polynomial in ``2 cos a`` so it
    stays finite where ``cos a`` vanishes.
    """
    coeffs = pn(n).coeffs
    with mpmath.workdps(dps):
        a = mpmath.mpf(alpha)
        y = 2 * mpmath.cos(a)
        lhs = mpmath.mpf(0)
        for k, c in enumerate(coeffs):
            lhs += mpmath.mpf(c.numerator) / c.denominator * y ** (n - k)
        rhs = mpmath.sin((n + 1) * a) / mpmath.sin(a)
        return +lhs, +rhs


class RootFindingError(RuntimeError):
    pass


def poly_roots_numeric(p: QPoly, tol: float = 1e-12, max_iter: int = 500,
                       dps: int | None = None) -> list[complex]:
    """All complex roots of ``p`` (with multiplicity) by Aberth-Ehrlich iteration.

    The iteration runs in mpmath at ``dps`` digits, seeded by companion-matrix
    eigenvalues, so that badly scaled monomial coefficients do not limit the
    double-precision output.  Each returned root satisfies
    ``|p(r)| <= tol * sum_k |c_k| |r|^k``.
    """
    if p.is_zero():
        raise ValueError("zero polynomial has no finite root set")
    deg = p.degree
    if deg == 0:
        return []
    if dps is None:
        dps = 30 + deg
    with mpmath.workdps(dps):
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in p.coeffs]
        dcoeffs = [k * coeffs[k] for k in range(1, deg + 1)]
        seeds = np.roots([float(c) for c in reversed(p.coeffs)])
        if len(seeds) != deg or not np.all(np.isfinite(seeds)):
            seeds = [np.exp(2j * np.pi * (k + 0.25) / deg) for k in range(deg)]
        z = [mpmath.mpc(complex(s)) for s in seeds]
        # separate coincident seeds; Aberth needs distinct starting points
        for i in range(deg):
            for j in range(i):
                if abs(z[i] - z[j]) < mpmath.mpf(10) ** (-12):
                    z[i] += mpmath.mpc(1e-6, 1e-6) * (i + 1)
        eps = mpmath.mpf(10) ** (-(dps // 2))
        for it in range(max_iter):
            worst = mpmath.mpf(0)
            for k in range(deg):
                zk = z[k]
                pv = mpmath.polyval(coeffs[::-1], zk)
                dv = mpmath.polyval(dcoeffs[::-1], zk)
                if pv == 0:
                    continue
                ratio = pv / dv if dv != 0 else mpmath.mpc(1e-3)
                repulse = mpmath.fsum(1 / (zk - z[j]) for j in range(deg) if j != k)
                w = ratio / (1 - ratio * repulse)
                z[k] = zk - w
                worst = max(worst, abs(w) / max(1, abs(z[k])))
            if worst < eps:
                break
        else:
            raise RootFindingError(
                f"Aberth iteration did not converge in {max_iter} sweeps "
                f"(degree {deg}, last relative update {mpmath.nstr(worst, 5)})")
        roots = [complex(r) for r in z]
        for r, rz in zip(roots, z):
            scale = sum(abs(c) * abs(rz) ** k for k, c in enumerate(coeffs))
            if abs(mpmath.polyval(coeffs[::-1], rz)) > tol * scale:
                raise RootFindingError(f"root {r} fails residual check")
    return sorted(roots, key=lambda c: (c.real, c.imag))


def root_clusters(roots: Sequence[complex], radius: float = 1e-8) -> list[tuple[complex, int]]:
    """Group roots closer than ``radius * max(1, max |root|)``; return (center, multiplicity)."""
    if not roots:
        return []
    scale = max(1.0, max(abs(r) for r in roots))
    clusters: list[list[complex]] = []
    for r in roots:
        for cl in clusters:
            if abs(cl[0] - r) <= radius * scale:
                cl.append(r)
                break
        else:
            clusters.append([r])
    return [(complex(np.mean(cl)), len(cl)) for cl in clusters]


def distinct_roots(p: QPoly, radius: float = 1e-8) -> list[complex]:
    return [c for c, _ in root_clusters(poly_roots_numeric(p), radius)]
