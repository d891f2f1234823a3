"""Exact coefficient algebra.

Polynomials in the spectral parameter ``lam`` over ``Fraction``, reduced
rational functions of ``lam`` (:class:`RatFunc`), polynomials in a central
boundary symbol ``L`` (:class:`BoundaryOp`) and truncated power series in the
boundary defining variable ``x`` (:class:`XSeries`) over any of these rings.

Everything here is immutable and exact; nothing touches floating point.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from .errors import NonInvertibleLeadingTerm, ZeroDenominator

Poly = tuple  # tuple[Fraction, ...], constant term first, no trailing zeros


# ---------------------------------------------------------------------------
# dense univariate polynomials over Q
# ---------------------------------------------------------------------------

def _poly(coeffs: Iterable) -> Poly:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _padd(p: Poly, q: Poly) -> Poly:
    if len(p) < len(q):
        p, q = q, p
    return _poly([a + (q[i] if i < len(q) else 0) for i, a in enumerate(p)])


def _pneg(p: Poly) -> Poly:
    return tuple(-a for a in p)


def _psub(p: Poly, q: Poly) -> Poly:
    return _padd(p, _pneg(q))


def _pmul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return _poly(out)


def _pscale(p: Poly, c) -> Poly:
    return _poly(a * c for a in p)


def _pdivmod(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    if not q:
        raise ZeroDenominator("polynomial division by zero")
    r = list(p)
    dq, lq = len(q) - 1, q[-1]
    quot = [Fraction(0)] * max(len(p) - dq, 0)
    for i in range(len(p) - 1 - dq, -1, -1):
        c = r[i + dq] / lq
        quot[i] = c
        if c:
            for j, b in enumerate(q):
                r[i + j] -= c * b
    return _poly(quot), _poly(r[:dq])


def _monic(p: Poly) -> Poly:
    return _pscale(p, 1 / p[-1]) if p else p


def _pgcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm."""
    while q:
        p, q = q, _pdivmod(p, q)[1]
    return _monic(p)


def _peval(p: Poly, x):
    acc = 0
    for a in reversed(p):
        acc = acc * x + a
    return acc


def _pshift(p: Poly, a) -> Poly:
    """Coefficients of p(a + mu) in mu (Taylor shift, synthetic division)."""
    c = list(p)
    n = len(c)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            c[j] += a * c[j + 1]
    return _poly(c)


# ---------------------------------------------------------------------------
# rational functions of lam
# ---------------------------------------------------------------------------

class RatFunc:
    """Reduced quotient ``num/den`` of polynomials in ``lam``; ``den`` monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: Sequence = (), den: Sequence = (1,), *, _reduced: bool = False):
        num, den = _poly(num), _poly(den)
        if not _reduced:
            num, den = _reduce(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFunc is immutable")

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls((c,), (1,), _reduced=True) if c else cls((), (1,), _reduced=True)

    @classmethod
    def lam(cls) -> "RatFunc":
        return cls((0, 1), (1,), _reduced=True)

    @staticmethod
    def coerce(other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (int, Rational)):
            return RatFunc.const(Fraction(other))
        return NotImplemented

    # --- queries -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_const(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ValueError("not a constant rational function")
        return self.num[0] if self.num else Fraction(0)

    def __call__(self, lam):
        d = _peval(self.den, lam)
        if d == 0:
            raise ZeroDivisionError(f"pole at lam={lam}")
        return _peval(self.num, lam) / d

    # --- arithmetic ----------------------------------------------------
    def __add__(self, other):
        other = RatFunc.coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RatFunc(_padd(self.num, other.num), self.den)
        return RatFunc(_padd(_pmul(self.num, other.den), _pmul(other.num, self.den)),
                       _pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(_pneg(self.num), self.den, _reduced=True)

    def __sub__(self, other):
        other = RatFunc.coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            if other == 0:
                return RatFunc()
            return RatFunc(_pscale(self.num, Fraction(other)), self.den, _reduced=True)
        if not isinstance(other, RatFunc):
            return NotImplemented
        # cross-cancel before multiplying keeps intermediate degrees small
        g1 = _pgcd(self.num, other.den) if self.num else (Fraction(1),)
        g2 = _pgcd(other.num, self.den) if other.num else (Fraction(1),)
        n1, n2 = _pdivmod(self.num, g1)[0], _pdivmod(other.num, g2)[0]
        d1, d2 = _pdivmod(self.den, g2)[0], _pdivmod(other.den, g1)[0]
        num, den = _pmul(n1, n2), _pmul(d1, d2)
        if not num:
            return RatFunc()
        lc = den[-1]
        return RatFunc(_pscale(num, 1 / lc), _pscale(den, 1 / lc), _reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num:
            raise ZeroDenominator("inverse of the zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        other = RatFunc.coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RatFunc.coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = RatFunc.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        other = RatFunc.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFunc({_pstr(self.num)} / {_pstr(self.den)})"

    def __str__(self):
        if len(self.den) == 1:
            return _pstr(self.num)
        return f"({_pstr(self.num)})/({_pstr(self.den)})"


def _pstr(p: Poly, var: str = "lam") -> str:
    if not p:
        return "0"
    terms = []
    for i, a in enumerate(p):
        if a == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            terms.append(str(a))
        elif a == 1:
            terms.append(mono)
        elif a == -1:
            terms.append("-" + mono)
        else:
            terms.append(f"{a}*{mono}")
    return " + ".join(terms).replace("+ -", "- ")


def _reduce(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if not den:
        raise ZeroDenominator("denominator is the zero polynomial")
    if not num:
        return (), (Fraction(1),)
    if len(den) > 1:
        g = _pgcd(num, den)
        if len(g) > 1:
            num, den = _pdivmod(num, g)[0], _pdivmod(den, g)[0]
    lc = den[-1]
    if lc != 1:
        num, den = _pscale(num, 1 / lc), _pscale(den, 1 / lc)
    return num, den


def normalize_ratfunc(p: Sequence, q: Sequence) -> RatFunc:
    """Canonical gcd-reduced, monic-denominator form of ``p/q``.

    ``p`` and ``q`` are coefficient sequences, constant term first.
    """
    return RatFunc(p, q)


def laurent_coeff(f: RatFunc, lam0, order: int) -> Fraction:
    """Coefficient of ``(lam - lam0)**(-order)`` in the Laurent expansion of f."""
    if order < 1:
        raise ValueError("order must be >= 1")
    lam0 = Fraction(lam0)
    if f.is_zero():
        return Fraction(0)
    num = _pshift(f.num, lam0)
    den = _pshift(f.den, lam0)
    q = 0
    while q < len(den) and den[q] == 0:
        q += 1
    if order > q:
        return Fraction(0)
    den = den[q:]
    # f * mu**q = num/den is regular at mu=0; we need its mu**(q-order) Taylor coefficient
    want = q - order
    inv = [Fraction(0)] * (want + 1)
    inv[0] = 1 / den[0]
    for i in range(1, want + 1):
        acc = Fraction(0)
        for j in range(1, min(i, len(den) - 1) + 1):
            acc += den[j] * inv[i - j]
        inv[i] = -acc / den[0]
    return sum((num[j] * inv[want - j] for j in range(min(want, len(num) - 1) + 1)), Fraction(0))


def has_pole_at(f: RatFunc, lam0) -> bool:
    return _peval(f.den, Fraction(lam0)) == 0


# ---------------------------------------------------------------------------
# polynomials in the boundary symbol L
# ---------------------------------------------------------------------------

class BoundaryOp:
    """``sum_i coeffs[i] * L**i`` with :class:`RatFunc` coefficients.

    L stands for the boundary Laplacian ``Delta_{h0}``; it commutes with all
    coefficients, so this is an ordinary commutative polynomial ring.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [c if isinstance(c, RatFunc) else RatFunc.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("BoundaryOp is immutable")

    @classmethod
    def identity(cls) -> "BoundaryOp":
        return cls([1])

    @classmethod
    def L(cls) -> "BoundaryOp":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> RatFunc:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else RatFunc()

    def is_zero(self) -> bool:
        return not self.coeffs

    def map(self, fn) -> list:
        return [fn(c) for c in self.coeffs]

    def __add__(self, other):
        if not isinstance(other, BoundaryOp):
            if isinstance(other, (int, Rational, RatFunc)):
                other = BoundaryOp([other])
            else:
                return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return BoundaryOp(self.coeff(i) + other.coeff(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return BoundaryOp(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational, RatFunc)):
            if isinstance(other, RatFunc) and other.is_zero() or other == 0:
                return BoundaryOp()
            return BoundaryOp(c * other for c in self.coeffs)
        if not isinstance(other, BoundaryOp):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return BoundaryOp()
        out = [RatFunc()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return BoundaryOp(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self * (1 / Fraction(other))
        if isinstance(other, RatFunc):
            return self * other.inverse()
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Rational, RatFunc)):
            other = BoundaryOp([other])
        if not isinstance(other, BoundaryOp):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "BoundaryOp(0)"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            mono = "" if i == 0 else ("L" if i == 1 else f"L^{i}")
            parts.append(f"[{c}]{'*' + mono if mono else ''}")
        return "BoundaryOp(" + " + ".join(parts) + ")"


# ---------------------------------------------------------------------------
# truncated power series in x
# ---------------------------------------------------------------------------

class XSeries:
    """``sum_m coeffs[m] x**m + O(x**(order+1))`` over an arbitrary ring.

    Coefficients only need ``+``, ``-``, ``*`` (and multiplication by ints);
    the zero of the ring is produced as ``c * 0``.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Sequence, order: int | None = None, zero=None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs) - 1
        if order < -1:
            raise ValueError("truncation order must be >= -1")
        if zero is None:
            zero = coeffs[0] * 0 if coeffs else Fraction(0)
        coeffs = coeffs[: order + 1] + [zero] * (order + 1 - len(coeffs))
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "order", order)

    def __setattr__(self, name, value):
        raise AttributeError("XSeries is immutable")

    @property
    def _zero(self):
        return self.coeffs[0] * 0 if self.coeffs else Fraction(0)

    def __getitem__(self, m: int):
        if m > self.order:
            raise IndexError(f"coefficient x^{m} is beyond the truncation order {self.order}")
        return self.coeffs[m]

    def __len__(self):
        return len(self.coeffs)

    def __add__(self, other):
        if not isinstance(other, XSeries):
            return NotImplemented
        M = min(self.order, other.order)
        return XSeries([self.coeffs[i] + other.coeffs[i] for i in range(M + 1)], M)

    def __neg__(self):
        return XSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, XSeries):
            M = min(self.order, other.order)
            out = []
            for m in range(M + 1):
                acc = None
                for i in range(m + 1):
                    t = self.coeffs[i] * other.coeffs[m - i]
                    acc = t if acc is None else acc + t
                out.append(acc)
            return XSeries(out, M)
        return XSeries([c * other for c in self.coeffs], self.order)

    def __rmul__(self, other):
        if isinstance(other, XSeries):
            return other.__mul__(self)
        return XSeries([other * c for c in self.coeffs], self.order)

    def derivative(self) -> "XSeries":
        return XSeries([self.coeffs[m] * m for m in range(1, self.order + 1)], self.order - 1,
                       zero=self._zero)

    def shift(self, j: int) -> "XSeries":
        """Multiply by ``x**j`` (known coefficients move up, order grows by j)."""
        z = self._zero
        return XSeries([z] * j + list(self.coeffs), self.order + j, zero=z)

    def map(self, fn) -> "XSeries":
        return XSeries([fn(c) for c in self.coeffs], self.order)

    def truncate(self, order: int) -> "XSeries":
        return XSeries(self.coeffs, min(order, self.order))

    def __eq__(self, other):
        if not isinstance(other, XSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.order))

    def __repr__(self):
        return f"XSeries({list(self.coeffs)!r}, order={self.order})"


def series_reciprocal(s: XSeries) -> XSeries:
    """``1/s`` to the same truncation order; needs an invertible constant term."""
    if s.order < 0:
        return s
    c0 = s.coeffs[0]
    try:
        if c0 == 0:
            raise NonInvertibleLeadingTerm("constant coefficient is zero")
        inv0 = 1 / c0
    except (ZeroDivisionError, ZeroDenominator, TypeError) as exc:
        raise NonInvertibleLeadingTerm(f"constant coefficient {c0!r} is not invertible") from exc
    out = [inv0]
    for m in range(1, s.order + 1):
        acc = None
        for i in range(1, m + 1):
            t = s.coeffs[i] * out[m - i]
            acc = t if acc is None else acc + t
        out.append(-(acc * inv0))
    return XSeries(out, s.order)


def parse_rational(value) -> Fraction:
    """Accept ints, Fractions and strings like ``"-1/2"``; floats are refused."""
    if isinstance(value, float):
        raise TypeError(f"float {value!r} would contaminate exact arithmetic; use a 'p/q' string")
    return Fraction(value)
