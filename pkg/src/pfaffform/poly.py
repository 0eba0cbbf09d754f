"""Sparse multivariate polynomials with exact rational coefficients.

Monomials are packed into a single int, 16 bits per variable, so that
monomial multiplication is integer addition.  Variable ``i`` (1-based, the
Schwinger parameter ``a_i``) lives in bits ``16*(i-1) .. 16*i - 1``.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational

_BITS = 16
_MASK = (1 << _BITS) - 1


def pack(exponents) -> int:
    key = 0
    for i, e in enumerate(exponents):
        if e < 0 or e > _MASK:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (_BITS * i)
    return key


def unpack(key: int, nvars: int) -> tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(nvars))


def _normalize(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class MultiPoly:
    """Polynomial in ``a_1 .. a_nvars`` over the rationals.

    Instances are treated as immutable; ``terms`` maps packed monomials to
    nonzero ``int`` or ``Fraction`` coefficients.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = {} if terms is None else terms

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, nvars: int, c) -> MultiPoly:
        c = _normalize(c)
        return cls(nvars, {0: c} if c != 0 else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> MultiPoly:
        if not 1 <= i <= nvars:
            raise ValueError(f"variable a{i} outside a1..a{nvars}")
        return cls(nvars, {1 << (_BITS * (i - 1)): 1})

    @classmethod
    def monomial(cls, nvars: int, exponents, c=1) -> MultiPoly:
        if len(exponents) != nvars:
            raise ValueError("exponent vector length mismatch")
        return cls.const(nvars, 0) if c == 0 else cls(nvars, {pack(exponents): _normalize(c)})

    @classmethod
    def from_terms(cls, nvars: int, items) -> MultiPoly:
        """Build from ``(exponent_tuple, coefficient)`` pairs, summing repeats."""
        terms: dict = {}
        for exps, c in items:
            if len(exps) != nvars:
                raise ValueError("exponent vector length mismatch")
            k = pack(exps)
            terms[k] = terms.get(k, 0) + c
        return cls(nvars, {k: _normalize(v) for k, v in terms.items() if v != 0})

    # -- basic queries ------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self):
        return self.terms.get(0, 0)

    def __len__(self):
        return len(self.terms)

    def items(self):
        """``(exponent_tuple, coefficient)`` pairs in canonical order."""
        out = [(unpack(k, self.nvars), c) for k, c in self.terms.items()]
        out.sort(key=lambda t: (-sum(t[0]), tuple(-e for e in t[0])))
        return out

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(unpack(k, self.nvars)) for k in self.terms)

    def degree_in(self, i: int) -> int:
        shift = _BITS * (i - 1)
        return max(((k >> shift) & _MASK for k in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(unpack(k, self.nvars)) for k in self.terms}) <= 1

    def coefficients(self):
        return list(self.terms.values())

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Rational)):
            return MultiPoly.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        for k, c in b.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return MultiPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> MultiPoly:
        c = _normalize(c)
        if c == 0:
            return MultiPoly(self.nvars)
        if c == 1:
            return self
        return MultiPoly(self.nvars, {k: _normalize(v * c) for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, MultiPoly):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return MultiPoly(self.nvars, {k: _normalize(v) for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = MultiPoly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Rational)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- calculus and substitution -----------------------------------
    def partial(self, i: int) -> MultiPoly:
        """Partial derivative with respect to ``a_i``."""
        shift = _BITS * (i - 1)
        unit = 1 << shift
        out = {}
        for k, c in self.terms.items():
            e = (k >> shift) & _MASK
            if e:
                out[k - unit] = c * e
        return MultiPoly(self.nvars, out)

    def substitute(self, images, nvars: int | None = None) -> MultiPoly:
        """Replace ``a_i`` by ``images[i-1]``.

        ``images`` holds one entry per variable: a MultiPoly in the target
        ring (``nvars`` variables) or a rational constant.
        """
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        if nvars is None:
            nvars = next((p.nvars for p in images if isinstance(p, MultiPoly)), self.nvars)
        imgs = [p if isinstance(p, MultiPoly) else MultiPoly.const(nvars, p) for p in images]
        for p in imgs:
            if p.nvars != nvars:
                raise ValueError("images live in different rings")
        powers: list[dict] = [{} for _ in imgs]

        def power(i, e):
            cache = powers[i]
            if e not in cache:
                cache[e] = imgs[i] ** e
            return cache[e]

        result = MultiPoly(nvars)
        for k, c in self.terms.items():
            term = MultiPoly.const(nvars, c)
            for i, e in enumerate(unpack(k, self.nvars)):
                if e:
                    term = term * power(i, e)
                    if not term:
                        break
            result = result + term
        return result

    def set_zero(self, i: int) -> MultiPoly:
        """Set ``a_i = 0`` keeping the variable count."""
        shift = _BITS * (i - 1)
        return MultiPoly(self.nvars, {k: c for k, c in self.terms.items() if not (k >> shift) & _MASK})

    def drop_variable(self, i: int) -> MultiPoly:
        """Remove ``a_i`` (which must not occur) and shift higher variables down."""
        if self.degree_in(i) > 0:
            raise ValueError(f"a{i} still occurs")
        low = (1 << (_BITS * (i - 1))) - 1
        out = {}
        for k, c in self.terms.items():
            out[(k & low) | ((k >> (_BITS * i)) << (_BITS * (i - 1)))] = c
        return MultiPoly(self.nvars - 1, out)

    def insert_variable(self, i: int) -> MultiPoly:
        """Embed into a ring with a new variable at position ``i`` (absent here)."""
        low = (1 << (_BITS * (i - 1))) - 1
        out = {}
        for k, c in self.terms.items():
            out[(k & low) | ((k >> (_BITS * (i - 1))) << (_BITS * i))] = c
        return MultiPoly(self.nvars + 1, out)

    def evaluate(self, values):
        """Evaluate at a point; ``values`` may be numbers or numpy arrays."""
        total = 0
        for k, c in self.terms.items():
            term = c if isinstance(c, int) else float(c)
            for i, e in enumerate(unpack(k, self.nvars)):
                if e:
                    term = term * values[i] ** e
            total = total + term
        return total

    # -- content ------------------------------------------------------
    def content(self) -> Fraction:
        """Positive rational content (gcd of numerators / lcm of denominators)."""
        num, den = 0, 1
        for c in self.terms.values():
            c = Fraction(c)
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den) if num else Fraction(0)

    # -- text ---------------------------------------------------------
    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {self.to_text()!r})"

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.items():
            mono = "*".join(f"a{i + 1}" if e == 1 else f"a{i + 1}^{e}" for i, e in enumerate(exps) if e)
            c = Fraction(c)
            neg = c < 0
            mag = -c if neg else c
            mag_s = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
            if not mono:
                body = mag_s
            elif mag == 1:
                body = mono
            else:
                body = f"{mag_s}*{mono}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append(("- " if neg else "+ ") + body)
        return " ".join(parts)

    def to_json(self) -> list:
        return [[list(exps), [Fraction(c).numerator, Fraction(c).denominator]] for exps, c in self.items()]

    @classmethod
    def from_json(cls, nvars: int, data) -> MultiPoly:
        return cls.from_terms(nvars, [(tuple(e), Fraction(p, q)) for e, (p, q) in data])


def variables(nvars: int) -> list[MultiPoly]:
    return [MultiPoly.var(nvars, i) for i in range(1, nvars + 1)]


def parse_poly(text: str, nvars: int) -> MultiPoly:
    """Parse the canonical text form produced by :meth:`MultiPoly.to_text`."""
    s = text.replace(" ", "")
    if s in ("", "0"):
        return MultiPoly(nvars)
    terms = []
    i = 0
    chunks = []
    start = 0
    for i, ch in enumerate(s):
        if ch in "+-" and i > 0 and s[i - 1] != "^":
            chunks.append(s[start:i])
            start = i
    chunks.append(s[start:])
    for chunk in chunks:
        sign = 1
        if chunk[0] in "+-":
            sign = -1 if chunk[0] == "-" else 1
            chunk = chunk[1:]
        coeff = Fraction(1)
        exps = [0] * nvars
        for factor in chunk.split("*"):
            if factor.startswith("a"):
                name, _, e = factor.partition("^")
                idx = int(name[1:])
                if not 1 <= idx <= nvars:
                    raise ValueError(f"variable {name} outside a1..a{nvars}")
                exps[idx - 1] += int(e) if e else 1
            else:
                coeff *= Fraction(factor)
        terms.append((tuple(exps), sign * coeff))
    return MultiPoly.from_terms(nvars, terms)
