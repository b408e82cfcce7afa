"""Exact scalars for the anchor-ring engine.

Rationals are :class:`fractions.Fraction`.  On top of them sit sparse
polynomials in the two torus parameters ``a`` (centre-circle radius) and
``r`` (tube radius), their fraction field, and fraction-free elimination
over that field.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence, Union

Rational = Fraction
Number = Union[int, Fraction]
Exponent = tuple[int, int]  # (deg_a, deg_r)


class ParamPoly:
    """Sparse polynomial in ``a`` and ``r`` with rational coefficients.

    Terms are kept in a dict keyed by ``(deg_a, deg_r)``; zero coefficients are
    never stored.  Instances are treated as immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Exponent, Number] | None = None):
        clean = {}
        if terms:
            for key, coeff in terms.items():
                if coeff:
                    clean[key] = Fraction(coeff)
        self.terms = clean

    @classmethod
    def _raw(cls, terms: dict[Exponent, Fraction]) -> "ParamPoly":
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def const(cls, c: Number) -> "ParamPoly":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, deg_a: int, deg_r: int, coeff: Number = 1) -> "ParamPoly":
        if deg_a < 0 or deg_r < 0:
            raise ValueError("negative exponents are not representable")
        return cls({(deg_a, deg_r): coeff})

    # -- inspection ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in descending lexicographic order on ``(deg_a, deg_r)``."""
        return sorted(self.terms.items(), reverse=True)

    def leading(self) -> tuple[Exponent, Fraction]:
        key = max(self.terms)
        return key, self.terms[key]

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def constant_value(self) -> Fraction | None:
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and (0, 0) in self.terms:
            return self.terms[(0, 0)]
        return None

    def degree_a(self) -> int:
        return max((k[0] for k in self.terms), default=0)

    def uses_a(self) -> bool:
        return any(k[0] for k in self.terms)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "ParamPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            v = out.get(key, 0) + coeff
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        return ParamPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "ParamPoly":
        return ParamPoly._raw({k: -v for k, v in self.terms.items()})

    def __sub__(self, other) -> "ParamPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "ParamPoly":
        return (-self) + other

    def __mul__(self, other) -> "ParamPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        out: dict[Exponent, Fraction] = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                key = (i1 + i2, j1 + j2)
                v = out.get(key, 0) + c1 * c2
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return ParamPoly._raw(out)

    __rmul__ = __mul__

    def scale(self, c: Number) -> "ParamPoly":
        if not c:
            return ParamPoly()
        return ParamPoly._raw({k: v * c for k, v in self.terms.items()})

    def shift(self, da: int, dr: int) -> "ParamPoly":
        """Multiply by ``a**da * r**dr``; negative shifts must stay exact."""
        out = {}
        for (i, j), v in self.terms.items():
            if i + da < 0 or j + dr < 0:
                raise ValueError("shift would create a negative exponent")
            out[(i + da, j + dr)] = v
        return ParamPoly._raw(out)

    def __pow__(self, n: int) -> "ParamPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = ParamPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def exact_divide(self, q: "ParamPoly") -> "ParamPoly | None":
        """Quotient ``self / q`` if ``q`` divides exactly, else ``None``.

        Division by the lex-leading term; for a single divisor a nonzero
        remainder shows up as a leading term that ``lt(q)`` does not divide.
        """
        if q.is_zero():
            raise ZeroDivisionError("exact_divide by zero polynomial")
        if not self.terms:
            return ParamPoly()
        (qa, qr), qc = q.leading()
        if len(q.terms) == 1:
            out = {}
            for (i, j), v in self.terms.items():
                if i < qa or j < qr:
                    return None
                out[(i - qa, j - qr)] = v / qc
            return ParamPoly._raw(out)
        rem = dict(self.terms)
        quot: dict[Exponent, Fraction] = {}
        while rem:
            (pa, pr) = max(rem)
            pc = rem[(pa, pr)]
            if pa < qa or pr < qr:
                return None
            ka, kr = pa - qa, pr - qr
            m = pc / qc
            quot[(ka, kr)] = m
            for (i, j), v in q.terms.items():
                key = (i + ka, j + kr)
                nv = rem.get(key, 0) - m * v
                if nv:
                    rem[key] = nv
                else:
                    rem.pop(key, None)
        return ParamPoly._raw(quot)

    def evaluate_at(self, a0, r0):
        """Substitute numbers for ``a`` and ``r`` (exact for rationals)."""
        total = 0
        for (i, j), v in self.sorted_terms():
            total += v * a0**i * r0**j
        return total

    def evaluate_float(self, a0: float, r0: float) -> float:
        total = 0.0
        for (i, j), v in self.sorted_terms():
            total += float(v) * a0**i * r0**j
        return total

    def substitute_a(self, value: "ParamPoly") -> "ParamPoly":
        """Replace ``a`` by a polynomial (used for partial evaluation)."""
        out = ParamPoly()
        for (i, j), v in self.terms.items():
            out = out + (value**i).shift(0, j).scale(v)
        return out

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def content(self) -> tuple[int, int]:
        """(lcm of coefficient denominators, gcd of scaled numerators)."""
        den = 1
        for v in self.terms.values():
            den = lcm(den, v.denominator)
        num = 0
        for v in self.terms.values():
            num = gcd(num, int(v * den))
        return den, num

    def __repr__(self) -> str:
        return f"ParamPoly({format_poly(self)})"

    def __str__(self) -> str:
        return format_poly(self)


def _as_poly(x) -> "ParamPoly":
    if isinstance(x, ParamPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return ParamPoly.const(x)
    return NotImplemented


def format_poly(p: ParamPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for (i, j), v in p.sorted_terms():
        factors = []
        if abs(v) != 1 or (i == 0 and j == 0):
            factors.append(str(abs(v)))
        if i:
            factors.append("a" if i == 1 else f"a^{i}")
        if j:
            factors.append("r" if j == 1 else f"r^{j}")
        body = "*".join(factors)
        if not parts:
            parts.append(("-" if v < 0 else "") + body)
        else:
            parts.append((" - " if v < 0 else " + ") + body)
    return "".join(parts)


A = ParamPoly.monomial(1, 0)
R = ParamPoly.monomial(0, 1)


class ParamRational:
    """Element ``num/den`` of the fraction field Q(a, r).

    Reduction cancels the common a/r monomial factor and fixes the scaling of
    ``den`` (integer coefficients, content 1, positive leading coefficient).
    When ``den`` is not a monomial an exact-division attempt clears it if
    possible; no general gcd is taken, so equality is cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1):
        num = _as_poly(num)
        den = _as_poly(den)
        if num is NotImplemented or den is NotImplemented:
            raise TypeError("ParamRational expects polynomial or rational parts")
        if den.is_zero():
            raise ZeroDivisionError("ParamRational with zero denominator")
        self.num, self.den = _reduce(num, den)

    @classmethod
    def _raw(cls, num: ParamPoly, den: ParamPoly) -> "ParamRational":
        obj = cls.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def coerce(cls, x) -> "ParamRational":
        if isinstance(x, ParamRational):
            return x
        return cls(x)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def constant_value(self) -> Fraction | None:
        """The plain rational this equals, or ``None`` if it depends on a, r."""
        cd = self.den.constant_value()
        cn = self.num.constant_value()
        if cd is not None and cn is not None:
            return cn / cd
        if self.num.is_zero():
            return Fraction(0)
        # num = c * den for some rational c?
        (_, nc), (_, dc) = self.num.leading(), self.den.leading()
        c = nc / dc
        if self.num == self.den.scale(c):
            return c
        return None

    def term_count(self) -> int:
        return len(self.num.terms) + len(self.den.terms)

    def has_monomial_den(self) -> bool:
        return self.den.is_monomial()

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "ParamRational":
        other = _as_rat(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return ParamRational(self.num + other.num, self.den)
        if self.den.is_monomial() and other.den.is_monomial():
            (ia, ir), ic = self.den.leading()
            (ja, jr), jc = other.den.leading()
            la, lr = max(ia, ja), max(ir, jr)
            n1 = self.num.shift(la - ia, lr - ir).scale(jc)
            n2 = other.num.shift(la - ja, lr - jr).scale(ic)
            return ParamRational(n1 + n2, ParamPoly.monomial(la, lr, ic * jc))
        return ParamRational(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self) -> "ParamRational":
        return ParamRational._raw(-self.num, self.den)

    def __sub__(self, other) -> "ParamRational":
        other = _as_rat(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "ParamRational":
        return (-self) + other

    def __mul__(self, other) -> "ParamRational":
        other = _as_rat(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero() or other.num.is_zero():
            return ParamRational()
        return ParamRational(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inv(self) -> "ParamRational":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return ParamRational(self.den, self.num)

    def __truediv__(self, other) -> "ParamRational":
        other = _as_rat(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __rtruediv__(self, other) -> "ParamRational":
        return _as_rat(other) * self.inv()

    def __pow__(self, n: int) -> "ParamRational":
        if n < 0:
            return self.inv() ** (-n)
        return ParamRational(self.num**n, self.den**n)

    def evaluate_at(self, a0, r0):
        d = self.den.evaluate_at(a0, r0)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the given parameters")
        n = self.num.evaluate_at(a0, r0)
        if isinstance(d, int) or isinstance(d, Fraction):
            return Fraction(n) / d
        return n / d

    def evaluate_float(self, a0: float, r0: float) -> float:
        return self.num.evaluate_float(a0, r0) / self.den.evaluate_float(a0, r0)

    def substitute_a(self, value: ParamPoly) -> "ParamRational":
        return ParamRational(self.num.substitute_a(value), self.den.substitute_a(value))

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        other = _as_rat(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return self.num * other.den == other.num * self.den

    __hash__ = None  # equality is by cross-multiplication

    def __repr__(self) -> str:
        return f"ParamRational({self})"

    def __str__(self) -> str:
        return format_rational(self)


def _as_rat(x) -> "ParamRational":
    if isinstance(x, ParamRational):
        return x
    if isinstance(x, (int, Fraction, ParamPoly)):
        return ParamRational(x)
    return NotImplemented


def _reduce(num: ParamPoly, den: ParamPoly) -> tuple[ParamPoly, ParamPoly]:
    if num.is_zero():
        return ParamPoly(), ParamPoly.const(1)
    # common monomial factor
    ma = min(k[0] for k in (*num.terms, *den.terms))
    mr = min(k[1] for k in (*num.terms, *den.terms))
    if ma or mr:
        num = num.shift(-ma, -mr)
        den = den.shift(-ma, -mr)
    if not den.is_monomial():
        q = num.exact_divide(den)
        if q is not None:
            return q, ParamPoly.const(1)
    dl, dg = den.content()
    factor = Fraction(dl, dg)
    if den.leading()[1] < 0:
        factor = -factor
    if factor != 1:
        num = num.scale(factor)
        den = den.scale(factor)
    return num, den


def format_rational(x: ParamRational) -> str:
    if x.den == ParamPoly.const(1):
        return format_poly(x.num)
    n = format_poly(x.num)
    d = format_poly(x.den)
    if len(x.num) > 1:
        n = f"({n})"
    if len(x.den) > 1 or "*" in d:
        d = f"({d})"
    return f"{n}/{d}"


# -- linear algebra ------------------------------------------------------------


class ParamMatrix:
    """Rectangular matrix of :class:`ParamRational` entries."""

    def __init__(self, rows: Iterable[Iterable]):
        self.rows = [[ParamRational.coerce(x) for x in row] for row in rows]
        widths = {len(row) for row in self.rows}
        if len(widths) > 1:
            raise ValueError("ragged matrix")
        self.nrows = len(self.rows)
        self.ncols = widths.pop() if widths else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def evaluate_at(self, a0: Number, r0: Number) -> "ParamMatrix":
        """Instantiate the parameters; entries become plain rationals."""
        return ParamMatrix(
            [[Fraction(x.evaluate_at(a0, r0)) for x in row] for row in self.rows]
        )

    def transpose(self) -> "ParamMatrix":
        return ParamMatrix([list(col) for col in zip(*self.rows)]) if self.rows else ParamMatrix([])


def _clear_row(row: Sequence[ParamRational]) -> list[ParamPoly]:
    """Scale a row by a common multiple of its denominators; entries become polynomials."""
    dens: list[ParamPoly] = []
    for x in row:
        if x.num.is_zero():
            continue
        if not any(x.den == d for d in dens):
            dens.append(x.den)
    mono = [d for d in dens if d.is_monomial()]
    other = [d for d in dens if not d.is_monomial()]
    la = max((d.leading()[0][0] for d in mono), default=0)
    lr = max((d.leading()[0][1] for d in mono), default=0)
    mult = ParamPoly.monomial(la, lr)
    for c in (d.leading()[1] for d in mono):
        mult = mult.scale(Fraction(c).numerator)  # den content is integral
    for d in other:
        mult = mult * d
    out = []
    for x in row:
        if x.num.is_zero():
            out.append(ParamPoly())
            continue
        q = mult.exact_divide(x.den)
        if q is None:
            raise AssertionError("row multiplier is not a multiple of an entry denominator")
        out.append(x.num * q)
    return out


def fraction_free_echelon(rows: list[list[ParamPoly]]) -> tuple[list[list[ParamPoly]], list[int]]:
    """Bareiss elimination on polynomial entries.

    Returns the echelon rows and the pivot columns.  Pivot choice is the
    first nonzero entry at or below the current row, scanning columns left
    to right.  Every division by the previous pivot is exact.
    """
    m = [list(row) for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    prev = ParamPoly.const(1)
    pivots: list[int] = []
    pr = 0
    for col in range(ncols):
        if pr == nrows:
            break
        sel = next((i for i in range(pr, nrows) if m[i][col]), None)
        if sel is None:
            continue
        if sel != pr:
            m[pr], m[sel] = m[sel], m[pr]
        piv = m[pr][col]
        for i in range(pr + 1, nrows):
            lead = m[i][col]
            row_i = m[i]
            row_p = m[pr]
            for j in range(col + 1, ncols):
                val = piv * row_i[j]
                if lead and row_p[j]:
                    val = val - lead * row_p[j]
                if val and prev != 1:
                    q = val.exact_divide(prev)
                    if q is None:
                        raise AssertionError("Bareiss division was not exact")
                    val = q
                row_i[j] = val
            row_i[col] = ParamPoly()
        prev = piv
        pivots.append(col)
        pr += 1
    return m, pivots


def bareiss_rank(M: ParamMatrix) -> int:
    """Exact rank over Q(a, r), by fraction-free elimination."""
    if M.nrows == 0 or M.ncols == 0:
        return 0
    rows = [_clear_row(row) for row in M.rows]
    _, pivots = fraction_free_echelon(rows)
    return len(pivots)


def solve_linear(M: ParamMatrix, b: Sequence) -> list[ParamRational] | None:
    """A solution of ``M x = b`` over Q(a, r), or ``None`` if inconsistent.

    Free variables are set to zero.
    """
    if len(b) != M.nrows:
        raise ValueError("right-hand side length does not match row count")
    n = M.ncols
    aug = [_clear_row(list(row) + [ParamRational.coerce(bi)]) for row, bi in zip(M.rows, b)]
    if not aug:
        return [ParamRational() for _ in range(n)]
    ech, pivots = fraction_free_echelon(aug)
    if n in pivots:
        return None
    x = [ParamRational() for _ in range(n)]
    for i in reversed(range(len(pivots))):
        pc = pivots[i]
        acc = ParamRational(ech[i][n])
        for j in range(pc + 1, n):
            if ech[i][j] and x[j]:
                acc = acc - ParamRational(ech[i][j]) * x[j]
        x[pc] = acc / ParamRational(ech[i][pc])
    return x
