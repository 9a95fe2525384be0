"""Exact Gaussian rationals and formal exponential units.

Scalar is the base field Q(i): every value is (a + b*i)/den with integer a, b,
den > 0 and gcd(a, b, den) = 1.  Arithmetic never rounds.

ExpScalar extends Scalar by formal units E[a] ("e to the a") living in the
group algebra of (Q(i), +):  E[a]*E[b] = E[a+b]  and  E[a] = 1 only for a = 0.
The units are never numerically evaluated; that keeps translation of
exponential polynomials exact.
"""

from fractions import Fraction
from math import gcd


def _mk(a, b, den):
    # internal fast constructor, normalizes
    if den < 0:
        a, b, den = -a, -b, -den
    g = gcd(gcd(a, b), den)
    if g > 1:
        a //= g
        b //= g
        den //= g
    s = object.__new__(Scalar)
    s.a = a
    s.b = b
    s.den = den
    return s


class Scalar:
    """A Gaussian rational (a + b*i)/den in lowest terms."""

    __slots__ = ("a", "b", "den")

    def __init__(self, re=0, im=0):
        if isinstance(re, Scalar):
            self.a, self.b, self.den = re.a, re.b, re.den
            return
        fre = Fraction(re)
        fim = Fraction(im)
        den = fre.denominator * fim.denominator // gcd(fre.denominator, fim.denominator)
        a = fre.numerator * (den // fre.denominator)
        b = fim.numerator * (den // fim.denominator)
        g = gcd(gcd(a, b), den)
        if g > 1:
            a //= g
            b //= g
            den //= g
        self.a, self.b, self.den = a, b, den

    @property
    def re(self):
        return Fraction(self.a, self.den)

    @property
    def im(self):
        return Fraction(self.b, self.den)

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __eq__(self, other):
        if isinstance(other, int):
            return self.b == 0 and self.den == 1 and self.a == other
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.den == other.den

    def __hash__(self):
        if self.b == 0:
            # align with hash of Fraction/int so mixed dict keys behave
            return hash(Fraction(self.a, self.den))
        return hash((self.a, self.b, self.den))

    def key(self):
        """Deterministic sort key (Q(i) has no natural order)."""
        return (Fraction(self.a, self.den), Fraction(self.b, self.den))

    def __add__(self, other):
        if isinstance(other, int):
            return _mk(self.a + other * self.den, self.b, self.den)
        if not isinstance(other, Scalar):
            return NotImplemented
        return _mk(self.a * other.den + other.a * self.den,
                   self.b * other.den + other.b * self.den,
                   self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return _mk(-self.a, -self.b, self.den)

    def __sub__(self, other):
        if isinstance(other, int):
            return _mk(self.a - other * self.den, self.b, self.den)
        if not isinstance(other, Scalar):
            return NotImplemented
        return _mk(self.a * other.den - other.a * self.den,
                   self.b * other.den - other.b * self.den,
                   self.den * other.den)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, int):
            return _mk(self.a * other, self.b * other, self.den)
        if not isinstance(other, Scalar):
            return NotImplemented
        return _mk(self.a * other.a - self.b * other.b,
                   self.a * other.b + self.b * other.a,
                   self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        n = self.a * self.a + self.b * self.b
        if n == 0:
            raise ZeroDivisionError("division by zero scalar")
        return _mk(self.den * self.a, -self.den * self.b, n)

    def __truediv__(self, other):
        if isinstance(other, int):
            return _mk(self.a, self.b, self.den * other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def conjugate(self):
        return _mk(self.a, -self.b, self.den)

    def __repr__(self):
        return "Scalar(%r)" % (str(self),)

    def __str__(self):
        """Minimal human form: 0, 5, -1/2, i, -2/3*i, 1/2+3*i ..."""
        re_s = _rat_str(self.a, self.den)
        if self.b == 0:
            return re_s
        im_s = _imag_str(self.b, self.den)
        if self.a == 0:
            return im_s
        if im_s.startswith("-"):
            return re_s + im_s
        return re_s + "+" + im_s

    def json_str(self):
        """Canonical `a/b+c/d*i` form used in file formats."""
        sign = "+" if self.b >= 0 else "-"
        return "%d/%d%s%d/%d*i" % (self.a, self.den, sign, abs(self.b), self.den)

    @classmethod
    def parse(cls, text):
        from .poly import parse_scalar  # shared tokenizer lives with the poly grammar
        return parse_scalar(text)


def _rat_str(num, den):
    if den == 1:
        return str(num)
    return "%d/%d" % (num, den)


def _imag_str(num, den):
    if num == den:
        return "i"
    if num == -den:
        return "-i"
    return _rat_str(num, den) + "*i"


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


def sc(re, im=0):
    """Shorthand constructor used all over the tests."""
    return Scalar(re, im)


class ExpScalar:
    """Finite sum of c * E[a] terms; the exact value ring for pairings and
    evaluations of exponential polynomials."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        t = {}
        if terms:
            for unit, coeff in terms.items():
                if coeff:
                    t[unit] = coeff
        self.terms = t

    @classmethod
    def from_scalar(cls, c):
        if isinstance(c, int):
            c = Scalar(c)
        if not c:
            return cls()
        return cls({ZERO: c})

    @classmethod
    def unit(cls, a, coeff=ONE):
        if not coeff:
            return cls()
        return cls({a: coeff})

    def is_scalar(self):
        return not self.terms or (len(self.terms) == 1 and ZERO in self.terms)

    def scalar(self):
        """Collapse to a plain Scalar; rejects genuine formal units."""
        if not self.terms:
            return ZERO
        if self.is_scalar():
            return self.terms[ZERO]
        raise ValueError("value carries formal exponential units: %s" % self)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Scalar)):
            other = ExpScalar.from_scalar(other if isinstance(other, Scalar) else Scalar(other))
        if not isinstance(other, ExpScalar):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if isinstance(other, (int, Scalar)):
            other = ExpScalar.from_scalar(Scalar(other) if isinstance(other, int) else other)
        if not isinstance(other, ExpScalar):
            return NotImplemented
        t = dict(self.terms)
        for unit, coeff in other.terms.items():
            s = t.get(unit)
            s = coeff if s is None else s + coeff
            if s:
                t[unit] = s
            else:
                t.pop(unit, None)
        out = object.__new__(ExpScalar)
        out.terms = t
        return out

    __radd__ = __add__

    def __neg__(self):
        out = object.__new__(ExpScalar)
        out.terms = {u: -c for u, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, (int, Scalar)):
            other = ExpScalar.from_scalar(Scalar(other) if isinstance(other, int) else other)
        if not isinstance(other, ExpScalar):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            other = Scalar(other)
        if isinstance(other, Scalar):
            if not other:
                return ExpScalar()
            out = object.__new__(ExpScalar)
            out.terms = {u: c * other for u, c in self.terms.items()}
            return out
        if not isinstance(other, ExpScalar):
            return NotImplemented
        t = {}
        for u1, c1 in self.terms.items():
            for u2, c2 in other.terms.items():
                u = u1 + u2
                c = c1 * c2
                s = t.get(u)
                s = c if s is None else s + c
                if s:
                    t[u] = s
                else:
                    t.pop(u, None)
        out = object.__new__(ExpScalar)
        out.terms = t
        return out

    __rmul__ = __mul__

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for unit in sorted(self.terms, key=Scalar.key):
            coeff = self.terms[unit]
            if unit == ZERO:
                parts.append("(%s)" % coeff)
            else:
                parts.append("(%s)*E[%s]" % (coeff, unit))
        return " + ".join(parts)

    __repr__ = __str__


EXP_ZERO = ExpScalar()
EXP_ONE = ExpScalar.from_scalar(ONE)
