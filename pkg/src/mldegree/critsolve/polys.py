"""Sparse multivariate polynomials and square systems of them.

A polynomial is a dict mapping exponent tuples to coefficients.  Construction
happens over Fractions (so score equations are exact for rational data);
:class:`PolySystem` stores complex coefficients for numerical work.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

MPoly = dict  # {exponent tuple: coefficient}


def mp_const(c, nvars: int) -> MPoly:
    return {(0,) * nvars: c} if c != 0 else {}


def mp_var(k: int, nvars: int) -> MPoly:
    e = [0] * nvars
    e[k] = 1
    return {tuple(e): Fraction(1)}


def mp_add(p: MPoly, q: MPoly, sign: int = 1) -> MPoly:
    out = dict(p)
    for e, c in q.items():
        v = out.get(e, 0) + sign * c
        if v == 0:
            out.pop(e, None)
        else:
            out[e] = v
    return out


def mp_mul(p: MPoly, q: MPoly) -> MPoly:
    out: MPoly = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            v = out.get(e, 0) + c1 * c2
            if v == 0:
                out.pop(e, None)
            else:
                out[e] = v
    return out


def mp_scale(p: MPoly, c) -> MPoly:
    return {e: c * v for e, v in p.items()} if c != 0 else {}


def mp_degree(p: MPoly) -> int:
    return max((sum(e) for e in p), default=-1)


def mp_eval(p: MPoly, z: Sequence) -> complex:
    total = 0
    for e, c in p.items():
        term = c
        for zk, ek in zip(z, e):
            if ek:
                term = term * zk ** ek
        total = total + term
    return total


def mp_det(mat: Sequence[Sequence[MPoly]], nvars: int) -> MPoly:
    """Determinant by row-wise Laplace expansion, memoized on the column set."""
    n = len(mat)
    if n == 0:
        return mp_const(Fraction(1), nvars)

    @functools.lru_cache(maxsize=None)
    def minor(row: int, cols: int) -> tuple:
        if row == n:
            return tuple(mp_const(Fraction(1), nvars).items())
        acc: MPoly = {}
        sign = 1
        for j in range(n):
            if not cols >> j & 1:
                continue
            entry = mat[row][j]
            if entry:
                sub = dict(minor(row + 1, cols & ~(1 << j)))
                acc = mp_add(acc, mp_mul(entry, sub), sign)
            sign = -sign
        return tuple(acc.items())

    return dict(minor(0, (1 << n) - 1))


@dataclass
class PolySystem:
    """Square system ``polys[i](z) = 0`` in ``num_vars`` unknowns."""

    num_vars: int
    polys: list[MPoly]
    var_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.polys) != self.num_vars:
            raise ValueError(f"system is not square: {len(self.polys)} equations, "
                             f"{self.num_vars} unknowns")
        self.polys = [{tuple(e): complex(c) for e, c in p.items()} for p in self.polys]
        if not self.var_names:
            self.var_names = [f"z{k}" for k in range(self.num_vars)]

    @property
    def degrees(self) -> list[int]:
        return [mp_degree(p) for p in self.polys]

    def bezout_number(self) -> int:
        return int(np.prod(self.degrees)) if self.num_vars else 1

    def __call__(self, z) -> np.ndarray:
        return np.array([mp_eval(p, z) for p in self.polys])

    def compile(self) -> CompiledSystem:
        return CompiledSystem(self)


class CompiledSystem:
    """Vectorized evaluation of a system and its Jacobian at many points at once."""

    def __init__(self, system: PolySystem, normalize: bool = True):
        n = system.num_vars
        self.n = n
        exps, coefs, owner = [], [], []
        for i, p in enumerate(system.polys):
            scale = max(abs(c) for c in p.values()) if (normalize and p) else 1.0
            for e, c in sorted(p.items()):
                exps.append(e)
                coefs.append(c / scale)
                owner.append(i)
        self.exps = np.array(exps, dtype=int).reshape(-1, n)
        self.coefs = np.array(coefs, dtype=complex)
        self.owner = np.array(owner, dtype=int)
        self.max_exp = int(self.exps.max()) if self.exps.size else 0
        self.owner_matrix = np.zeros((len(coefs), n))
        self.owner_matrix[np.arange(len(coefs)), self.owner] = 1.0
        # derivative terms, flattened over (equation, variable)
        dexp, dcoef, downer = [], [], []
        for e, c, i in zip(exps, coefs, owner):
            for k in range(n):
                if e[k]:
                    d = list(e)
                    d[k] -= 1
                    dexp.append(d)
                    dcoef.append(c * e[k])
                    downer.append(i * n + k)
        self.dexps = np.array(dexp, dtype=int).reshape(-1, n)
        self.dcoefs = np.array(dcoef, dtype=complex)
        self.downer_matrix = np.zeros((len(dcoef), n * n))
        self.downer_matrix[np.arange(len(dcoef)), downer] = 1.0
        self.abs_coefs = np.abs(self.coefs)

    def _powers(self, z: np.ndarray) -> np.ndarray:
        return z[:, :, None] ** np.arange(self.max_exp + 1)[None, None, :]

    def _monomials(self, pw: np.ndarray, exps: np.ndarray) -> np.ndarray:
        idx = np.arange(self.n)[None, :]
        return np.prod(pw[:, idx, exps], axis=2)

    def evaluate(self, z: np.ndarray, jacobian: bool = True):
        """Values (P, n) and optionally Jacobians (P, n, n) at points z (P, n)."""
        pw = self._powers(z)
        vals = (self._monomials(pw, self.exps) * self.coefs) @ self.owner_matrix
        if not jacobian:
            return vals
        jac = (self._monomials(pw, self.dexps) * self.dcoefs) @ self.downer_matrix
        return vals, jac.reshape(-1, self.n, self.n)

    def relative_residual(self, z: np.ndarray) -> np.ndarray:
        """max_i |f_i(z)| / sum_t |c_t| m^|a_t| with m = max(1, |z|_inf).

        Homogenized weights keep the ratio meaningful at points where every
        monomial is tiny (e.g. the origin of a system without constant terms).
        """
        pw = self._powers(z)
        mono = self._monomials(pw, self.exps)
        vals = np.abs((mono * self.coefs) @ self.owner_matrix)
        m = np.maximum(1.0, np.max(np.abs(z), axis=1)) if z.shape[1] else np.ones(len(z))
        weights = m[:, None] ** self.exps.sum(axis=1)[None, :]
        mags = (weights * self.abs_coefs) @ self.owner_matrix
        return np.max(vals / np.maximum(mags, 1e-300), axis=1)
