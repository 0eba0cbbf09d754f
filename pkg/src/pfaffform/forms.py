"""Differential forms in Schwinger parameters.

:class:`PolyForm` is a form with polynomial coefficients, ``sum_S P_S da_S``,
where ``S`` is an edge subset stored as a bitmask (bit ``e-1`` for edge ``e``)
and ``da_S`` is the wedge of the ``da_e`` in increasing label order.

:class:`FormExpression` is ``scalar * pi^p * N / psi^(k/2)`` with ``N`` a
PolyForm and ``psi`` a fixed reference polynomial (the Symanzik polynomial
of the ambient graph).  Half-integer powers of ``psi`` are tracked by the
integer ``psi_half = k``; ``pi`` is a formal symbol with integer exponent.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from .poly import MultiPoly


def _popcount(x: int) -> int:
    return bin(x).count("1")


def edges_of(mask: int) -> tuple[int, ...]:
    out = []
    e = 1
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return tuple(out)


def mask_of(edges) -> int:
    mask = 0
    for e in edges:
        if e < 1:
            raise ValueError(f"invalid edge label {e}")
        bit = 1 << (e - 1)
        if mask & bit:
            raise ValueError(f"repeated edge {e}")
        mask |= bit
    return mask


def wedge_sign(s: int, t: int) -> int:
    """Sign of reordering ``da_S ^ da_T`` into increasing order (S, T disjoint)."""
    swaps = 0
    while t:
        low = t & -t
        swaps += _popcount(s & ~((low << 1) - 1))
        t ^= low
    return -1 if swaps & 1 else 1


def permutation_sign_to_sorted(edges) -> int:
    """Sign of the permutation sorting ``edges``; 0 if an edge repeats."""
    edges = list(edges)
    if len(set(edges)) != len(edges):
        return 0
    inv = sum(1 for i in range(len(edges)) for j in range(i + 1, len(edges)) if edges[i] > edges[j])
    return -1 if inv % 2 else 1


class PolyForm:
    """Differential form with polynomial coefficients (immutable)."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = {} if terms is None else terms

    @classmethod
    def scalar(cls, nvars: int, p) -> PolyForm:
        if not isinstance(p, MultiPoly):
            p = MultiPoly.const(nvars, p)
        return cls(nvars, {0: p} if p else {})

    @classmethod
    def da(cls, nvars: int, *edges) -> PolyForm:
        """The monomial form ``da_{e1} ^ da_{e2} ^ ...`` (any order)."""
        sign = permutation_sign_to_sorted(edges)
        if sign == 0:
            return cls(nvars)
        return cls(nvars, {mask_of(edges): MultiPoly.const(nvars, sign)})

    @classmethod
    def term(cls, edges, p: MultiPoly) -> PolyForm:
        sign = permutation_sign_to_sorted(edges)
        if sign == 0 or not p:
            return cls(p.nvars)
        return cls(p.nvars, {mask_of(edges): p if sign == 1 else -p})

    @classmethod
    def differential(cls, p: MultiPoly) -> PolyForm:
        """``dp = sum_e (d p / d a_e) da_e``."""
        out = {}
        for e in range(1, p.nvars + 1):
            q = p.partial(e)
            if q:
                out[1 << (e - 1)] = q
        return cls(p.nvars, out)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degrees(self) -> set[int]:
        return {_popcount(s) for s in self.terms}

    def degree(self) -> int:
        """Form degree; -1 for zero; ValueError if inhomogeneous."""
        d = self.degrees()
        if not d:
            return -1
        if len(d) > 1:
            raise ValueError("inhomogeneous form")
        return d.pop()

    def items(self):
        """``(edge_tuple, MultiPoly)`` pairs in lexicographic order of edge tuples."""
        return sorted(((edges_of(s), p) for s, p in self.terms.items()), key=lambda t: (len(t[0]), t[0]))

    def coefficient(self, edges) -> MultiPoly:
        sign = permutation_sign_to_sorted(edges)
        p = self.terms.get(mask_of(sorted(edges)), MultiPoly(self.nvars)) if sign else MultiPoly(self.nvars)
        return p if sign >= 0 else -p

    def _check(self, other: PolyForm):
        if other.nvars != self.nvars:
            raise ValueError("forms over different variable sets")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if isinstance(other, MultiPoly):
            other = PolyForm.scalar(self.nvars, other)
        if not isinstance(other, PolyForm):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for s, p in other.terms.items():
            q = out[s] + p if s in out else p
            if q:
                out[s] = q
            else:
                out.pop(s, None)
        return PolyForm(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return PolyForm(self.nvars, {s: -p for s, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Wedge product (scalars and polynomials act by multiplication)."""
        if isinstance(other, (int, Rational)) and not isinstance(other, MultiPoly):
            if other == 0:
                return PolyForm(self.nvars)
            return PolyForm(self.nvars, {s: p.scale(other) for s, p in self.terms.items()})
        if isinstance(other, MultiPoly):
            out = {}
            for s, p in self.terms.items():
                q = p * other
                if q:
                    out[s] = q
            return PolyForm(self.nvars, out)
        if not isinstance(other, PolyForm):
            return NotImplemented
        self._check(other)
        out: dict = {}
        for s, p in self.terms.items():
            for t, q in other.terms.items():
                if s & t:
                    continue
                pq = p * q
                if wedge_sign(s, t) < 0:
                    pq = -pq
                k = s | t
                out[k] = out[k] + pq if k in out else pq
        return PolyForm(self.nvars, {k: v for k, v in out.items() if v})

    def __rmul__(self, other):
        # scalars and 0-forms commute with everything
        return self.__mul__(other)

    wedge = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, PolyForm):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def d(self) -> PolyForm:
        """Exterior derivative."""
        out: dict = {}
        for s, p in self.terms.items():
            for e in range(1, self.nvars + 1):
                bit = 1 << (e - 1)
                if s & bit:
                    continue
                q = p.partial(e)
                if not q:
                    continue
                if wedge_sign(bit, s) < 0:
                    q = -q
                k = s | bit
                out[k] = out[k] + q if k in out else q
        return PolyForm(self.nvars, {k: v for k, v in out.items() if v})

    def map_coefficients(self, f) -> PolyForm:
        out = {}
        for s, p in self.terms.items():
            q = f(p)
            if q:
                out[s] = q
        return PolyForm(self.nvars, out)

    def pullback(self, images) -> PolyForm:
        """Pull back along ``a_i -> images[i-1]`` (MultiPolys in a new ring)."""
        nv = images[0].nvars if images else self.nvars
        diffs = [PolyForm.differential(q) for q in images]
        out = PolyForm(nv)
        for s, p in self.terms.items():
            form = PolyForm.scalar(nv, p.substitute(images, nv))
            for e in edges_of(s):
                form = form * diffs[e - 1]
                if not form:
                    break
            out = out + form
        return out

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for edges, p in self.items():
            label = "da{" + ",".join(map(str, edges)) + "}" if edges else "1"
            parts.append(f"({p.to_text()}) {label}")
        return " + ".join(parts)

    def __repr__(self):
        return f"PolyForm({self.to_text()})"


def _content_and_sign(num: PolyForm) -> Fraction:
    """Positive content of all coefficients, signed so the leading term is positive."""
    from math import gcd

    g_num, g_den = 0, 1
    for p in num.terms.values():
        c = p.content()
        g_num = gcd(g_num, c.numerator)
        g_den = g_den * c.denominator // gcd(g_den, c.denominator)
    if not g_num:
        return Fraction(0)
    lead_edges, lead_poly = num.items()[0]
    lead = Fraction(lead_poly.items()[0][1])
    sign = -1 if lead < 0 else 1
    return sign * Fraction(g_num, g_den)


class AmbientMismatch(ValueError):
    pass


class FormExpression:
    """``scalar * pi^pi_power * numerator / psi^(psi_half/2)`` in canonical form."""

    __slots__ = ("scalar", "pi_power", "psi_half", "psi", "numerator")

    def __init__(self, scalar, pi_power: int, psi_half: int, psi: MultiPoly, numerator: PolyForm,
                 canonical: bool = True):
        if psi_half < 0:
            raise ValueError("psi_half must be non-negative")
        if numerator.nvars != psi.nvars:
            raise AmbientMismatch("numerator and psi live in different rings")
        scalar = Fraction(scalar)
        if scalar == 0 or numerator.is_zero():
            scalar, pi_power, psi_half, numerator = Fraction(0), 0, 0, PolyForm(psi.nvars)
        elif canonical:
            c = _content_and_sign(numerator)
            if c != 1:
                inv = 1 / c
                numerator = numerator.map_coefficients(lambda p: p.scale(inv))
                scalar *= c
        self.scalar = scalar
        self.pi_power = pi_power
        self.psi_half = psi_half
        self.psi = psi
        self.numerator = numerator

    @classmethod
    def zero(cls, psi: MultiPoly) -> FormExpression:
        return cls(0, 0, 0, psi, PolyForm(psi.nvars))

    @classmethod
    def constant(cls, psi: MultiPoly, c) -> FormExpression:
        return cls(c, 0, 0, psi, PolyForm.scalar(psi.nvars, 1))

    @property
    def nvars(self) -> int:
        return self.psi.nvars

    def is_zero(self) -> bool:
        return self.scalar == 0

    def degree(self) -> int:
        return self.numerator.degree()

    def _check(self, other: FormExpression):
        if self.psi != other.psi:
            raise AmbientMismatch("forms have different reference polynomials")

    def scale(self, c, pi_power: int = 0) -> FormExpression:
        return FormExpression(self.scalar * Fraction(c), self.pi_power + pi_power, self.psi_half,
                              self.psi, self.numerator)

    def __neg__(self):
        return self.scale(-1)

    def wedge(self, other: FormExpression) -> FormExpression:
        self._check(other)
        return FormExpression(self.scalar * other.scalar, self.pi_power + other.pi_power,
                              self.psi_half + other.psi_half, self.psi, self.numerator * other.numerator)

    __xor__ = wedge

    def d(self) -> FormExpression:
        """Exterior derivative.

        d(N / psi^(k/2)) = (2 psi dN - k dpsi ^ N) / (2 psi^((k+2)/2)).
        """
        if self.is_zero():
            return self
        k = self.psi_half
        dn = self.numerator.d()
        if k == 0:
            return FormExpression(self.scalar, self.pi_power, 0, self.psi, dn)
        dpsi = PolyForm.differential(self.psi)
        num = dn * (2 * self.psi) - (dpsi * self.numerator) * k
        return FormExpression(self.scalar / 2, self.pi_power, k + 2, self.psi, num)

    def _aligned(self, other: FormExpression):
        """Numerators of self and other over a common psi power, or None if
        the parities of the psi powers cannot be reconciled."""
        a, b = self.numerator, other.numerator
        ka, kb = self.psi_half, other.psi_half
        if (ka - kb) % 2:
            if self.psi.is_constant():
                c = self.psi.constant_value()
                if c != 1:
                    return None
                return a, b
            return None
        if ka > kb:
            b = b * (self.psi ** ((ka - kb) // 2))
        elif kb > ka:
            a = a * (self.psi ** ((kb - ka) // 2))
        return a, b

    def scale_ratio(self, other: FormExpression):
        """The constant ``(c, p)`` with ``self == c * pi^p * other``, or None.

        Returns ``(Fraction(0), 0)`` when ``self`` is zero and ``other`` is not
        (any zero multiple); returns None if ``other`` is zero but ``self`` is not.
        """
        self._check(other)
        if other.is_zero():
            return (Fraction(1), 0) if self.is_zero() else None
        if self.is_zero():
            return (Fraction(0), 0)
        aligned = self._aligned(other)
        if aligned is None:
            return None
        a, b = aligned
        if set(a.terms) != set(b.terms):
            return None
        # a == r * b for a single rational r
        r = None
        for s, pb in b.terms.items():
            pa = a.terms[s]
            if set(pa.terms) != set(pb.terms):
                return None
            for k, cb in pb.terms.items():
                q = Fraction(pa.terms[k]) / Fraction(cb)
                if r is None:
                    r = q
                elif q != r:
                    return None
        return (r * self.scalar / other.scalar, self.pi_power - other.pi_power)

    def equals(self, other: FormExpression) -> bool:
        self._check(other)
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        ratio = self.scale_ratio(other)
        return ratio is not None and ratio == (Fraction(1), 0)

    def __eq__(self, other):
        if not isinstance(other, FormExpression):
            return NotImplemented
        return self.psi == other.psi and self.equals(other)

    __hash__ = None

    def pullback(self, images, new_psi: MultiPoly | None = None) -> FormExpression:
        """Pull back along ``a_i -> images[i-1]``; the reference polynomial is
        pulled back too (or replaced by ``new_psi`` after checking equality)."""
        psi = self.psi.substitute(images)
        if new_psi is not None:
            if new_psi != psi:
                raise AmbientMismatch("pulled-back psi differs from the target psi")
            psi = new_psi
        if self.is_zero():
            return FormExpression.zero(psi)
        return FormExpression(self.scalar, self.pi_power, self.psi_half, psi,
                              self.numerator.pullback(images))

    def grading(self) -> int:
        """Scaling weight under ``a -> lambda * a``: zero for projective forms.

        Each term ``P da_S`` has weight ``deg P + |S|``; psi^(k/2) contributes
        ``-k/2 * deg psi``.  Returned doubled to stay integral.
        """
        if self.is_zero():
            return 0
        weights = set()
        for edges, p in self.numerator.items():
            if not p.is_homogeneous():
                raise ValueError("numerator coefficient is not homogeneous")
            weights.add(2 * (p.degree() + len(edges)))
        if len(weights) != 1:
            raise ValueError("numerator is not homogeneous")
        return weights.pop() - self.psi_half * max(self.psi.degree(), 0)

    # -- serialisation ---------------------------------------------------
    def to_text(self) -> str:
        if self.is_zero():
            return "0"
        s = self.scalar
        return (f"({s.numerator}/{s.denominator}) * pi^({self.pi_power}) * "
                f"[ {self.numerator.to_text()} ] / psi^({self.psi_half}/2)")

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"FormExpression({self.to_text()})"

    def to_json(self) -> dict:
        return {
            "scalar": [self.scalar.numerator, self.scalar.denominator],
            "pi_power": self.pi_power,
            "psi_half": self.psi_half,
            "nvars": self.nvars,
            "psi": self.psi.to_json(),
            "terms": [{"edges": list(edges), "poly": p.to_json()} for edges, p in self.numerator.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> FormExpression:
        n = data["nvars"]
        psi = MultiPoly.from_json(n, data["psi"])
        num = PolyForm(n)
        for t in data["terms"]:
            num = num + PolyForm.term(tuple(t["edges"]), MultiPoly.from_json(n, t["poly"]))
        p, q = data["scalar"]
        return cls(Fraction(p, q), data["pi_power"], data["psi_half"], psi, num)


def forms_equal(f: FormExpression, g: FormExpression) -> bool:
    return f.equals(g)


def scale_ratio(f: FormExpression, g: FormExpression):
    return f.scale_ratio(g)
