"""Univariate polynomials with exact rational coefficients."""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm

import numpy as np

from .errors import NumericalError


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # exact binary value; callers wanting decimals should pass strings
        return Fraction(x)
    return Fraction(x)


class RationalPolynomial:
    """Coefficients in ascending degree, trailing zeros stripped."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [_frac(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError("RationalPolynomial is immutable")

    @classmethod
    def constant(cls, c):
        return cls([c])

    @classmethod
    def linear(cls, c0, c1):
        return cls([c0, c1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, RationalPolynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RationalPolynomial([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return "RationalPolynomial(%s)" % ([str(c) for c in self.coeffs],)

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("X" if k == 1 else "X^%d" % k)
            mag = abs(c)
            body = mono if (mag == 1 and k) else (str(mag) + ("*" + mono if mono else ""))
            terms.append(("-" if c < 0 else "+", body))
        s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            s += " %s %s" % (sign, body)
        return s

    @staticmethod
    def _coerce(x) -> "RationalPolynomial":
        return x if isinstance(x, RationalPolynomial) else RationalPolynomial([x])

    def __add__(self, other):
        o = self._coerce(other).coeffs
        n = max(len(self.coeffs), len(o))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = o + (Fraction(0),) * (n - len(o))
        return RationalPolynomial([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other).coeffs
        if not self.coeffs or not o:
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(o) - 1)
        for i, x in enumerate(self.coeffs):
            if x == 0:
                continue
            for j, y in enumerate(o):
                out[i + j] += x * y
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = RationalPolynomial([1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def divmod(self, other: "RationalPolynomial"):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        dq = len(r) - len(other.coeffs)
        if dq < 0:
            return RationalPolynomial(), self
        q = [Fraction(0)] * (dq + 1)
        lead = other.leading
        for k in range(dq, -1, -1):
            c = r[k + other.degree] / lead
            q[k] = c
            if c:
                for j, y in enumerate(other.coeffs):
                    r[k + j] -= c * y
        return RationalPolynomial(q), RationalPolynomial(r[: other.degree])

    def exact_div(self, other) -> "RationalPolynomial":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("division is not exact")
        return q

    def __call__(self, x):
        acc = 0 * x if not isinstance(x, (int, Fraction)) else Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(x, (int, Fraction)) else float(c))
        return acc

    def derivative(self) -> "RationalPolynomial":
        return RationalPolynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "RationalPolynomial":
        return RationalPolynomial([c / self.leading for c in self.coeffs])

    def gcd(self, other: "RationalPolynomial") -> "RationalPolynomial":
        a, b = self, self._coerce(other)
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic() if not a.is_zero() else a

    def integer_coefficients(self) -> list[int]:
        """Scaled to coprime integers with positive leading coefficient."""
        if not self.coeffs:
            return []
        den = reduce(lcm, (c.denominator for c in self.coeffs), 1)
        ints = [int(c * den) for c in self.coeffs]
        g = reduce(gcd, ints, 0)
        if ints[-1] < 0:
            g = -g
        return [i // g for i in ints]

    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def squarefree_decomposition(self) -> list[tuple["RationalPolynomial", int]]:
        """Yun's algorithm: pairs (f_i, i) with self = c * prod f_i^i."""
        if self.degree < 1:
            return []
        f = self.monic()
        fp = f.derivative()
        a = f.gcd(fp)
        b = f.exact_div(a)
        c = fp.exact_div(a)
        d = c - b.derivative()
        out = []
        i = 1
        while b.degree > 0:
            a = b.gcd(d)
            b = b.exact_div(a)
            c = d.exact_div(a)
            d = c - b.derivative()
            if a.degree > 0:
                out.append((a, i))
            i += 1
        return out


def bareiss_det(matrix: list[list[RationalPolynomial]]) -> RationalPolynomial:
    """Fraction-free elimination; every division is exact in Q[X]."""
    n = len(matrix)
    if n == 0:
        return RationalPolynomial([1])
    m = [[RationalPolynomial._coerce(x) for x in row] for row in matrix]
    sign = 1
    prev = RationalPolynomial([1])
    for k in range(n - 1):
        if m[k][k].is_zero():
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return RationalPolynomial()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]).exact_div(prev)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


# --- numerical roots ---------------------------------------------------------

def _horner(c: np.ndarray, z):
    """Value and derivative of the ascending-coefficient polynomial c at z."""
    p = 0j
    dp = 0j
    for a in c[::-1]:
        dp = dp * z + p
        p = p * z + a
    return p, dp


def _companion_roots(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    deg = len(c) - 1
    if deg < 1:
        return np.array([], dtype=complex)
    c = c / np.max(np.abs(c))
    monic = c[:-1] / c[-1]
    comp = np.zeros((deg, deg), dtype=complex)
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -monic
    return np.linalg.eigvals(comp)


def _polish(c: np.ndarray, z: complex, iters: int = 8) -> complex:
    for _ in range(iters):
        p, dp = _horner(c, z)
        if dp == 0:
            break
        step = p / dp
        z2 = z - step
        if abs(_horner(c, z2)[0]) > abs(p):
            break
        z = z2
        if abs(step) <= 1e-17 * max(1.0, abs(z)):
            break
    return z


def simple_roots(c: np.ndarray) -> list[complex]:
    """Roots of a squarefree polynomial given by ascending float coefficients.

    Companion eigenvalues after scaling, then Newton polishing.  If the
    backward error is poor, the variable is rescaled by a root bound and the
    computation repeated.
    """
    c = np.asarray(c, dtype=complex)
    deg = len(c) - 1
    if deg < 1:
        return []
    roots = None
    for attempt in range(2):
        if attempt == 0:
            s = 1.0
        else:
            s = float(max(np.abs(roots))) or 1.0
        cs = c * s ** np.arange(deg + 1)
        r = _companion_roots(cs) * s
        r = np.array([_polish(c, z) for z in r])
        roots = r
        scale = np.sum(np.abs(c)[None, :] * np.abs(r)[:, None] ** np.arange(deg + 1), axis=1)
        backward = np.abs([_horner(c, z)[0] for z in r]) / scale
        if np.all(backward < 1e-10):
            return [complex(z) for z in r]
    raise NumericalError("root finder did not reach a small backward error")


def roots_with_multiplicity(poly: RationalPolynomial, dedup: float = 1e-8) -> list[tuple[complex, int]]:
    """Roots with multiplicities from the exact squarefree decomposition.

    Any two roots closer than dedup (relative) are merged as a safeguard.
    """
    out: list[tuple[complex, int]] = []
    for factor, mult in poly.squarefree_decomposition():
        for z in simple_roots(factor.float_coeffs()):
            out.append((z, mult))
    merged: list[list] = []
    for z, m in out:
        for entry in merged:
            if abs(entry[0] - z) <= dedup * max(1.0, abs(z)):
                entry[1] += m
                break
        else:
            merged.append([z, m])
    merged.sort(key=lambda e: (round(e[0].real, 12), round(e[0].imag, 12)))
    return [(complex(z), m) for z, m in merged]
