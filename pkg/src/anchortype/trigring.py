"""Canonical forms for functions of t on the anchor ring.

Every element is ``N(sin t, cos t) / g**pole`` with ``g = a + r cos t``.
The numerator keeps sin t to degree at most one (sin^2 = 1 - cos^2 is
applied eagerly) and the pole is minimal: a nonzero pole means the
numerator is not divisible by ``g``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator

from .exactnum import A, R, ParamPoly, ParamRational

Key = tuple[int, int]  # (sin_deg, cos_deg)

_ONE = ParamRational(1)


class TrigNum:
    """Polynomial in sin t (degree <= 1) and cos t over Q(a, r)."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Key, ParamRational] | None = None):
        out: dict[Key, ParamRational] = {}
        if terms:
            for (s, c), v in terms.items():
                _accumulate(out, s, c, ParamRational.coerce(v))
        self.terms = out

    @classmethod
    def _raw(cls, terms: dict[Key, ParamRational]) -> "TrigNum":
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def const(cls, c) -> "TrigNum":
        return cls({(0, 0): c})

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[Key, ParamRational]]:
        """Terms ordered by cos degree descending, then sin degree descending."""
        return sorted(self.terms.items(), key=lambda kv: (-kv[0][1], -kv[0][0]))

    def channel(self, sin_deg: int) -> dict[int, ParamRational]:
        """The cos-polynomial multiplying ``sin**sin_deg`` as {cos_deg: coeff}."""
        return {c: v for (s, c), v in self.terms.items() if s == sin_deg}

    def cos_degree(self) -> int:
        return max((c for _, c in self.terms), default=0)

    def term_count(self) -> int:
        return sum(v.term_count() for v in self.terms.values())

    def __add__(self, other: "TrigNum") -> "TrigNum":
        out = dict(self.terms)
        for (s, c), v in other.terms.items():
            _accumulate(out, s, c, v)
        return TrigNum._raw(out)

    def __neg__(self) -> "TrigNum":
        return TrigNum._raw({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "TrigNum") -> "TrigNum":
        return self + (-other)

    def __mul__(self, other: "TrigNum") -> "TrigNum":
        out: dict[Key, ParamRational] = {}
        for (s1, c1), v1 in self.terms.items():
            for (s2, c2), v2 in other.terms.items():
                _accumulate(out, s1 + s2, c1 + c2, v1 * v2)
        return TrigNum._raw(out)

    def scale(self, k) -> "TrigNum":
        k = ParamRational.coerce(k)
        if k.is_zero():
            return TrigNum()
        return TrigNum._raw({key: v * k for key, v in self.terms.items()})

    def times_gamma(self, n: int = 1) -> "TrigNum":
        out = self
        for _ in range(n):
            out = out * GAMMA_NUM
        return out

    def divide_gamma(self) -> "TrigNum | None":
        """Exact quotient by ``a + r cos t`` or ``None``.

        g has no sin t, so each sin channel is divided on its own by
        synthetic division in cos t.
        """
        out: dict[Key, ParamRational] = {}
        for s in (0, 1):
            chan = self.channel(s)
            if not chan:
                continue
            top = max(chan)
            carry = ParamRational()
            # from highest cos power down: q_{k-1} = (p_k - a*q_k) / r
            q: dict[int, ParamRational] = {}
            rem = ParamRational()
            for k in range(top, -1, -1):
                p_k = chan.get(k, ParamRational())
                val = p_k - carry
                if k == 0:
                    rem = val
                    break
                qk = val / R
                if qk:
                    q[k - 1] = qk
                carry = qk * A
            if rem:
                return None
            for c, v in q.items():
                out[(s, c)] = v
        return TrigNum._raw(out)

    def residue(self) -> tuple[ParamRational, ParamRational]:
        """Value at cos t = -a/r as ``(u, v)`` meaning ``u + v*sin t``."""
        x = ParamRational(-A, R)
        result = []
        for s in (0, 1):
            acc = ParamRational()
            for c, v in sorted(self.channel(s).items(), reverse=True):
                acc = acc + v * x**c
            result.append(acc)
        return result[0], result[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrigNum):
            return NotImplemented
        if self.terms.keys() != other.terms.keys():
            return False
        return all(v == other.terms[k] for k, v in self.terms.items())

    __hash__ = None

    def __repr__(self) -> str:
        return f"TrigNum({self.terms!r})"


def _accumulate(out: dict[Key, ParamRational], s: int, c: int, v: ParamRational) -> None:
    """Add ``v * sin^s * cos^c`` into ``out``, reducing sin^2 -> 1 - cos^2."""
    if v.is_zero():
        return
    while s >= 2:
        # sin^s cos^c = sin^(s-2) cos^c - sin^(s-2) cos^(c+2)
        _accumulate(out, s - 2, c + 2, -v)
        s -= 2
    key = (s, c)
    cur = out.get(key)
    new = v if cur is None else cur + v
    if new.is_zero():
        out.pop(key, None)
    else:
        out[key] = new


GAMMA_NUM = TrigNum._raw({(0, 0): ParamRational(A), (0, 1): ParamRational(R)})


class TrigPoly:
    """``num / (a + r cos t)**pole`` in minimal form."""

    __slots__ = ("num", "pole")

    def __init__(self, num: TrigNum | None = None, pole: int = 0):
        if pole < 0:
            num = (num or TrigNum()).times_gamma(-pole)
            pole = 0
        self.num, self.pole = _minimize(num or TrigNum(), pole)

    @classmethod
    def _raw(cls, num: TrigNum, pole: int) -> "TrigPoly":
        obj = cls.__new__(cls)
        obj.num = num
        obj.pole = pole
        return obj

    @classmethod
    def const(cls, c) -> "TrigPoly":
        return cls(TrigNum.const(c))

    @classmethod
    def coerce(cls, x) -> "TrigPoly":
        if isinstance(x, TrigPoly):
            return x
        return cls.const(x)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def constant_value(self) -> ParamRational | None:
        if self.pole == 0 and set(self.num.terms) <= {(0, 0)}:
            return self.num.terms.get((0, 0), ParamRational())
        return None

    def term_count(self) -> int:
        return self.num.term_count()

    # -- ring operations ------------------------------------------------------

    def __add__(self, other) -> "TrigPoly":
        other = TrigPoly.coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        p = max(self.pole, other.pole)
        n1 = self.num.times_gamma(p - self.pole)
        n2 = other.num.times_gamma(p - other.pole)
        return TrigPoly(n1 + n2, p)

    __radd__ = __add__

    def __neg__(self) -> "TrigPoly":
        return TrigPoly._raw(-self.num, self.pole)

    def __sub__(self, other) -> "TrigPoly":
        return self + (-TrigPoly.coerce(other))

    def __rsub__(self, other) -> "TrigPoly":
        return TrigPoly.coerce(other) + (-self)

    def __mul__(self, other) -> "TrigPoly":
        if isinstance(other, (int, Fraction, ParamPoly, ParamRational)):
            return self.scale(other)
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return TrigPoly(self.num * other.num, self.pole + other.pole)

    __rmul__ = __mul__

    def scale(self, c) -> "TrigPoly":
        c = ParamRational.coerce(c)
        if c.is_zero():
            return TrigPoly()
        return TrigPoly._raw(self.num.scale(c), self.pole)

    def __pow__(self, n: int) -> "TrigPoly":
        if n < 0:
            return self.inv() ** (-n)
        out = TrigPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def inv(self) -> "TrigPoly":
        """Inverse of ``k * g**m`` (the only units of this ring)."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        num, m = self.num, 0
        while num.cos_degree() > 0 or any(s for s, _ in num.terms):
            q = num.divide_gamma()
            if q is None:
                raise ValueError("only c*g**m is invertible in this algebra")
            num, m = q, m + 1
        k = num.terms[(0, 0)]
        return TrigPoly(TrigNum.const(k.inv()), m - self.pole)

    def __truediv__(self, other) -> "TrigPoly":
        if isinstance(other, (int, Fraction, ParamPoly, ParamRational)):
            return self.scale(ParamRational.coerce(other).inv())
        return self * TrigPoly.coerce(other).inv()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, ParamPoly, ParamRational)):
            other = TrigPoly.const(other)
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self.pole == other.pole and self.num == other.num

    __hash__ = None

    def __repr__(self) -> str:
        return f"TrigPoly({render(self)})"

    def __str__(self) -> str:
        return render(self)


def _minimize(num: TrigNum, pole: int) -> tuple[TrigNum, int]:
    if num.is_zero():
        return TrigNum(), 0
    while pole > 0:
        q = num.divide_gamma()
        if q is None:
            break
        num, pole = q, pole - 1
    return num, pole


def normalize(raw: Iterable[tuple[int, int, int, object]]) -> TrigPoly:
    """Canonical form of ``sum coeff * sin^s cos^c / g^pole`` over raw terms."""
    raw = list(raw)
    if not raw:
        return TrigPoly()
    top = max(p for _, _, p, _ in raw)
    total = TrigNum()
    for s, c, p, coeff in raw:
        term = TrigNum({(s, c): coeff}).times_gamma(top - p)
        total = total + term
    return TrigPoly(total, top)


def renormalize(f: TrigPoly) -> TrigPoly:
    return TrigPoly(f.num, f.pole)


def pole_order(f: TrigPoly) -> int:
    return f.pole


def ddt(f: TrigPoly) -> TrigPoly:
    """Exact t-derivative; uses dg/dt = -r sin t."""
    if f.is_zero():
        return TrigPoly()
    dnum = _ddt_num(f.num)
    if f.pole == 0:
        return TrigPoly(dnum, 0)
    # (N/g^p)' = (N' g + p r sin t N) / g^(p+1)
    extra = (TrigNum({(1, 0): ParamRational(R)}) * f.num).scale(f.pole)
    return TrigPoly(dnum.times_gamma(1) + extra, f.pole + 1)


def _ddt_num(num: TrigNum) -> TrigNum:
    out: dict[Key, ParamRational] = {}
    for (s, c), v in num.terms.items():
        if s == 0:
            if c:
                _accumulate(out, 1, c - 1, v * (-c))
        else:
            # (sin cos^c)' = (c+1) cos^(c+1) - c cos^(c-1)
            _accumulate(out, 0, c + 1, v * (c + 1))
            if c:
                _accumulate(out, 0, c - 1, v * (-c))
    return TrigNum._raw(out)


def residue(f: TrigPoly) -> tuple[ParamRational, ParamRational]:
    """Numerator at cos t = -a/r; nonzero exactly when the pole is minimal and positive."""
    return f.num.residue()


def residue_ratio(
    x: tuple[ParamRational, ParamRational], y: tuple[ParamRational, ParamRational]
) -> tuple[ParamRational, ParamRational]:
    """``x / y`` in Q(a, r)[s] / (s^2 - (1 - a^2/r^2))."""
    u1, v1 = x
    u2, v2 = y
    s2 = _ONE - ParamRational(A * A, R * R)
    norm = u2 * u2 - v2 * v2 * s2
    if norm.is_zero():
        raise ZeroDivisionError("residue divisor is zero")
    # (u1 + v1 s)(u2 - v2 s) = u1u2 - v1v2 s^2 + (v1u2 - u1v2) s
    return (u1 * u2 - v1 * v2 * s2) / norm, (v1 * u2 - u1 * v2) / norm


# -- common elements -------------------------------------------------------------

SIN = TrigPoly(TrigNum({(1, 0): 1}))
COS = TrigPoly(TrigNum({(0, 1): 1}))
GAMMA = TrigPoly(GAMMA_NUM)
INV_GAMMA = TrigPoly(TrigNum.const(1), 1)
ZERO = TrigPoly()
ONE = TrigPoly.const(1)


def trig(coeff, sin_deg: int = 0, cos_deg: int = 0, pole: int = 0) -> TrigPoly:
    """Single term ``coeff * sin^sin_deg * cos^cos_deg / g^pole``."""
    return normalize([(sin_deg, cos_deg, pole, coeff)])


class PhiHarmonic:
    """``f0 + fc cos(phi) + fs sin(phi)`` with TrigPoly channels."""

    __slots__ = ("f0", "fc", "fs")

    def __init__(self, f0=None, fc=None, fs=None):
        self.f0 = TrigPoly.coerce(f0) if f0 is not None else TrigPoly()
        self.fc = TrigPoly.coerce(fc) if fc is not None else TrigPoly()
        self.fs = TrigPoly.coerce(fs) if fs is not None else TrigPoly()

    def channels(self) -> tuple[TrigPoly, TrigPoly, TrigPoly]:
        return self.f0, self.fc, self.fs

    def __iter__(self) -> Iterator[TrigPoly]:
        return iter(self.channels())

    def is_zero(self) -> bool:
        return all(ch.is_zero() for ch in self.channels())

    def pole(self) -> int:
        return max(ch.pole for ch in self.channels())

    def term_count(self) -> int:
        return sum(ch.term_count() for ch in self.channels())

    def __add__(self, other: "PhiHarmonic") -> "PhiHarmonic":
        return PhiHarmonic(self.f0 + other.f0, self.fc + other.fc, self.fs + other.fs)

    def __neg__(self) -> "PhiHarmonic":
        return PhiHarmonic(-self.f0, -self.fc, -self.fs)

    def __sub__(self, other: "PhiHarmonic") -> "PhiHarmonic":
        return self + (-other)

    def __mul__(self, k) -> "PhiHarmonic":
        """Multiply by a t-only factor (TrigPoly or scalar)."""
        return PhiHarmonic(self.f0 * k, self.fc * k, self.fs * k)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PhiHarmonic):
            return NotImplemented
        return all(x == y for x, y in zip(self.channels(), other.channels()))

    __hash__ = None

    def __repr__(self) -> str:
        return f"PhiHarmonic({render_phi(self)})"


# -- rendering ------------------------------------------------------------------


def _expand_in_gamma(f: TrigPoly) -> dict[tuple[int, int, int], ParamRational] | None:
    """Rewrite with a eliminated (a = g - r cos t).

    Returns {(sin_deg, cos_deg, g_exp): coeff} with coefficients free of a,
    or ``None`` if some coefficient has ``a`` in its denominator.
    """
    out: dict[tuple[int, int, int], ParamRational] = {}
    for (s, c), coeff in f.num.terms.items():
        if coeff.den.uses_a():
            return None
        # coeff.num(a, r) with a -> g - r c: expand binomially
        for (i, j), v in coeff.num.terms.items():
            # a^i = sum_k C(i,k) g^k (-r c)^(i-k)
            binom = 1
            for k in range(i + 1):
                if k:
                    binom = binom * (i - k + 1) // k
                m = i - k
                val = ParamRational(
                    ParamPoly.monomial(0, j + m, v * binom * (-1) ** m), coeff.den
                )
                key = (s, c + m, k - f.pole)
                cur = out.get(key)
                new = val if cur is None else cur + val
                if new.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = new
    return out


def _format_coeff(q: Fraction, r_exp: int) -> tuple[str, bool]:
    """Render ``|q| * r**r_exp``; second item is the sign (True for negative)."""
    neg = q < 0
    q = abs(q)
    p, d = q.numerator, q.denominator
    top = []
    bottom = []
    if r_exp > 0:
        top.append("r" if r_exp == 1 else f"r^{r_exp}")
    elif r_exp < 0:
        bottom.append("r" if r_exp == -1 else f"r^{-r_exp}")
    if p != 1 or not top:
        top.insert(0, str(p))
    if d != 1:
        bottom.insert(0, str(d))
    text = "*".join(top)
    if bottom:
        text += "/" + (bottom[0] if len(bottom) == 1 else "(" + "*".join(bottom) + ")")
    return text, neg


def _factors(s: int, c: int, g: int) -> list[str]:
    out = []
    if s:
        out.append("s")
    if c:
        out.append("c" if c == 1 else f"c^{c}")
    if g:
        out.append("g" if g == 1 else f"g^{g}")
    return out


def _join(coeff: str, factors: list[str]) -> str:
    if coeff == "1" and factors:
        return "*".join(factors)
    return "*".join([coeff] + factors)


def render(f: TrigPoly, params: tuple[Fraction, Fraction] | None = None) -> str:
    """Text form in the ``s``/``c``/``g`` grammar.

    ``a`` is eliminated through ``a = g - r*c`` so coefficients are powers of
    ``r``; terms are ordered by g exponent (descending), then cos degree
    (descending), then sin degree (descending), then r exponent.  With
    ``params`` the r powers are evaluated (g then means ``a0 + r0*c``).
    """
    if f.is_zero():
        return "0"
    expanded = _expand_in_gamma(f)
    items: list[tuple[tuple, str, bool]] = []
    if expanded is None:
        for (s, c), coeff in f.num.sorted_terms():
            if params is not None:
                q = Fraction(coeff.evaluate_at(*params))
                if not q:
                    continue
                text, neg = _format_coeff(q, 0)
            else:
                text, neg = f"({coeff})", False
            body = _join(text, _factors(s, c, -f.pole))
            items.append(((0, -c, -s, 0), body, neg))
    else:
        grouped: dict[tuple[int, int, int, int], Fraction] = {}
        for (s, c, g), coeff in expanded.items():
            (_, dr), dcoef = coeff.den.leading()
            for (_, nr), v in coeff.num.terms.items():
                key = (s, c, g, nr - dr)
                grouped[key] = grouped.get(key, Fraction(0)) + v / dcoef
        if params is not None:
            a0, r0 = params
            collapsed: dict[tuple[int, int, int, int], Fraction] = {}
            for (s, c, g, e), v in grouped.items():
                key = (s, c, g, 0)
                collapsed[key] = collapsed.get(key, Fraction(0)) + v * Fraction(r0) ** e
            grouped = collapsed
        for (s, c, g, e), v in grouped.items():
            if not v:
                continue
            text, neg = _format_coeff(v, e)
            body = _join(text, _factors(s, c, g))
            items.append(((-g, -c, -s, e), body, neg))
    if not items:
        return "0"
    items.sort(key=lambda it: it[0])
    parts = []
    for idx, (_, body, neg) in enumerate(items):
        if idx == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def render_phi(f: PhiHarmonic, params=None) -> str:
    """Render channels as ``[f0] + [fc]*cos(phi) + [fs]*sin(phi)``, skipping zeros."""
    pieces = []
    if not f.f0.is_zero():
        pieces.append(render(f.f0, params))
    if not f.fc.is_zero():
        pieces.append(f"({render(f.fc, params)})*cos(phi)")
    if not f.fs.is_zero():
        pieces.append(f"({render(f.fs, params)})*sin(phi)")
    return " + ".join(pieces) if pieces else "0"
