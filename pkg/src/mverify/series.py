"""Exact truncated q-expansion arithmetic.

Every modular form in this package is carried by a :class:`QSeries`: a dense
list of exact rational coefficients c_0..c_M together with its truncation
order M.  Arithmetic never reads past what the operands actually know; the
truncation order of a result is computed from the orders (and valuations) of
the inputs, so a coefficient stored in a QSeries is always correct, never a
garbage partial sum.

Multiplication of integer series is done through Kronecker substitution
(packing coefficients into one big integer) so that products at order 10^4
take fractions of a second while staying exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "QSeries",
    "series_mul",
    "eta_quotient",
    "bernoulli_number",
]


def _as_exact(x):
    """Normalize a coefficient to int (preferred) or Fraction."""
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    raise TypeError(f"coefficient must be exact (int or Fraction), got {type(x).__name__}")


# ---------------------------------------------------------------------------
# Kronecker-substitution polynomial multiplication over Z
# ---------------------------------------------------------------------------

def _encode(coeffs, nbytes):
    buf = bytearray(nbytes * len(coeffs))
    for i, c in enumerate(coeffs):
        if c:
            buf[i * nbytes:(i + 1) * nbytes] = c.to_bytes(nbytes, "little")
    return int.from_bytes(buf, "little")


def _decode(val, nbytes, n):
    raw = val.to_bytes(nbytes * n + nbytes, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") for i in range(n)]


def _intpoly_mul(a, b, out_len):
    """Product of integer coefficient lists, truncated to out_len entries."""
    if not a or not b or out_len <= 0:
        return [0] * max(out_len, 0)
    la, lb = min(len(a), out_len), min(len(b), out_len)
    a, b = a[:la], b[:lb]
    if la * lb <= 4096:  # schoolbook is faster for small products
        out = [0] * out_len
        for i, ai in enumerate(a):
            if not ai:
                continue
            jmax = min(lb, out_len - i)
            for j in range(jmax):
                out[i + j] += ai * b[j]
        return out
    amax = max(max(a), -min(a), 1)
    bmax = max(max(b), -min(b), 1)
    bound = amax * bmax * min(la, lb)
    nbytes = (bound.bit_length() + 8) // 8 + 1
    ap = _encode([c if c > 0 else 0 for c in a], nbytes)
    an = _encode([-c if c < 0 else 0 for c in a], nbytes)
    bp = _encode([c if c > 0 else 0 for c in b], nbytes)
    bn = _encode([-c if c < 0 else 0 for c in b], nbytes)
    n = min(la + lb - 1, out_len)
    pos = _decode(ap * bp + an * bn, nbytes, n)
    neg = _decode(ap * bn + an * bp, nbytes, n)
    out = [p - q for p, q in zip(pos, neg)]
    out.extend([0] * (out_len - len(out)))
    return out


def _lcm_den(coeffs):
    den = 1
    for c in coeffs:
        if isinstance(c, Fraction):
            den = den * c.denominator // math.gcd(den, c.denominator)
    return den


class QSeries:
    """Truncated power series in q with exact rational coefficients.

    ``coeffs[n]`` is the coefficient of q^n; ``order`` is the truncation
    order M, so ``len(coeffs) == order + 1``.  Instances are immutable.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order=None):
        coeffs = [_as_exact(c) for c in coeffs]
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        if len(coeffs) < order + 1:
            coeffs = coeffs + [0] * (order + 1 - len(coeffs))
        object.__setattr__(self, "coeffs", tuple(coeffs[: order + 1]))
        object.__setattr__(self, "order", order)

    def __setattr__(self, *a):
        raise AttributeError("QSeries is immutable")

    # -- constructors -------------------------------------------------------
    @staticmethod
    def one(order):
        return QSeries([1], order)

    @staticmethod
    def zero(order):
        return QSeries([0], order)

    # -- basic queries ------------------------------------------------------
    def __getitem__(self, n):
        if not 0 <= n <= self.order:
            raise IndexError(f"coefficient q^{n} beyond truncation order {self.order}")
        return self.coeffs[n]

    def valuation(self):
        """Index of first nonzero known coefficient, or None if all known are 0."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return None

    def _val_eff(self):
        v = self.valuation()
        return self.order + 1 if v is None else v

    def is_integral(self):
        return all(isinstance(c, int) for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.order))

    def agrees_with(self, other, through=None):
        """Coefficientwise equality through min(orders) or a given order."""
        m = min(self.order, other.order)
        if through is not None:
            if through > m:
                raise ValueError("requested agreement order exceeds known coefficients")
            m = through
        return self.coeffs[: m + 1] == other.coeffs[: m + 1]

    def __repr__(self):
        terms = []
        for n, c in enumerate(self.coeffs[:6]):
            if c:
                terms.append(f"{c}*q^{n}" if n else f"{c}")
        body = " + ".join(terms) if terms else "0"
        return f"QSeries({body} + O(q^{self.order + 1}))"

    # -- ring operations ----------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QSeries([other], self.order)
        m = min(self.order, other.order)
        return QSeries([a + b for a, b in zip(self.coeffs[: m + 1], other.coeffs[: m + 1])], m)

    __radd__ = __add__

    def __neg__(self):
        return QSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QSeries([other], self.order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = _as_exact(c)
        return QSeries([c * x for x in self.coeffs], self.order)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        va, vb = self._val_eff(), other._val_eff()
        order = min(self.order + vb, other.order + va)
        out_len = order + 1
        da, db = _lcm_den(self.coeffs), _lcm_den(other.coeffs)
        ai = [int(c * da) for c in self.coeffs]
        bi = [int(c * db) for c in other.coeffs]
        prod = _intpoly_mul(ai, bi, out_len)
        d = da * db
        if d == 1:
            return QSeries(prod, order)
        return QSeries([Fraction(c, d) for c in prod], order)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, e):
        if not isinstance(e, int):
            raise TypeError("exponent must be an integer")
        if e < 0:
            return self.inverse() ** (-e)
        result = QSeries.one(self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            base_needed = e >> 1
            if base_needed:
                base = base * base
            e >>= 1
        return result

    def inverse(self):
        """Multiplicative inverse; requires a unit constant term.

        Newton iteration, doubling the number of correct coefficients each
        step, so inversion costs O(log M) multiplications.
        """
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ValueError("series with zero constant term is not invertible")
        inv = QSeries([Fraction(1, 1) / c0 if not isinstance(c0, int) or abs(c0) != 1 else c0], 0)
        prec = 1
        while prec <= self.order:
            prec = min(2 * prec, self.order + 1)
            trunc = QSeries(self.coeffs[:prec], prec - 1)
            inv = QSeries(inv.coeffs, prec - 1)
            inv = inv * (QSeries([2], prec - 1) - trunc * inv)
            inv = QSeries(inv.coeffs[:prec], prec - 1)
        return QSeries(inv.coeffs, self.order)

    # -- structural helpers -------------------------------------------------
    def shift_up(self, v):
        """Multiply by q^v (coefficients below v are exactly zero)."""
        if v < 0:
            raise ValueError("only nonnegative shifts")
        return QSeries([0] * v + list(self.coeffs), self.order + v)

    def truncated(self, order):
        if order > self.order:
            raise ValueError(f"cannot extend truncation order {self.order} to {order}")
        return QSeries(self.coeffs[: order + 1], order)

    def dilated(self, d):
        """Substitute q -> q^d (the V_d operator on expansions)."""
        if d < 1:
            raise ValueError("dilation factor must be >= 1")
        out = [0] * (self.order * d + 1)
        for n, c in enumerate(self.coeffs):
            out[n * d] = c
        return QSeries(out, self.order * d)

    def floats(self):
        """Coefficients as Python floats (for the numeric evaluators)."""
        return [float(c) for c in self.coeffs]


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    """Product of two truncated series; order = min adjusted for valuations."""
    return a * b


def _eta_factor_int(d, e, out_len):
    """Integer coefficient list of prod_{n>=1}(1-q^{dn})^e, length out_len."""
    # Euler's pentagonal expansion makes the base product sparse.
    base = [0] * out_len
    base[0] = 1
    k = 1
    while True:
        g1 = d * k * (3 * k - 1) // 2
        g2 = d * k * (3 * k + 1) // 2
        if g1 >= out_len and g2 >= out_len:
            break
        s = 1 if k % 2 == 0 else -1
        if g1 < out_len:
            base[g1] += s
        if g2 < out_len:
            base[g2] += s
        k += 1
    power = [1] + [0] * (out_len - 1)
    b = base
    n = abs(e)
    while n:
        if n & 1:
            power = _intpoly_mul(power, b, out_len)
        n >>= 1
        if n:
            b = _intpoly_mul(b, b, out_len)
    if e >= 0:
        return power
    return QSeries(power, out_len - 1).inverse().coeffs


def eta_quotient(exponents, M: int) -> QSeries:
    """q-expansion of q^val * prod_d prod_{n>=1} (1-q^{dn})^{e_d} through q^M.

    ``exponents`` is a list of (d, e) pairs; val = (1/24) * sum(d*e) must be
    a nonnegative integer or the input is rejected.
    """
    total = sum(d * e for d, e in exponents)
    if total % 24 != 0 or total < 0:
        raise ValueError(f"eta quotient has fractional or negative q-valuation {Fraction(total, 24)}")
    val = total // 24
    if any(d < 1 for d, _ in exponents):
        raise ValueError("eta factors require positive dilation d")
    inner_order = M - val
    if inner_order < 0:
        return QSeries.zero(M)
    out = QSeries.one(inner_order)
    for d, e in exponents:
        if e == 0:
            continue
        fac = _eta_factor_int(d, e, inner_order + 1)
        out = out * QSeries(fac, inner_order)
    return out.shift_up(val).truncated(M)


@lru_cache(maxsize=None)
def _bernoulli_upto(n):
    b = [Fraction(1)]
    for m in range(1, n + 1):
        acc = Fraction(0)
        for j in range(m):
            acc += math.comb(m + 1, j) * b[j]
        b.append(-acc / (m + 1))
    return tuple(b)


def bernoulli_number(n: int) -> Fraction:
    """Exact Bernoulli number B_n (B_1 = -1/2 convention)."""
    if n < 0:
        raise ValueError("Bernoulli numbers are indexed by n >= 0")
    return _bernoulli_upto(n)[n]
