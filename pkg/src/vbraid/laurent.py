"""Exact Laurent polynomials in a single variable.

Coefficients are Python ints (or Fractions when a model needs rationals); all
arithmetic is exact. Printing is canonical: ascending exponents, joined by
``" + "``, e.g. ``A^-2 + -1*A^2``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Mapping

_TERM_SPLIT = re.compile(r"(?<![\^*+-])(?=[+-])")


class LaurentPoly:
    __slots__ = ("_terms", "var", "_hash")

    def __init__(self, terms: Mapping[int, Rational] | None = None, var: str = "A"):
        clean = {}
        for e, c in (terms or {}).items():
            if c:
                if isinstance(c, Fraction) and c.denominator == 1:
                    c = c.numerator
                clean[int(e)] = c
        self._terms = dict(sorted(clean.items()))
        self.var = var
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, c, var: str = "A") -> LaurentPoly:
        return cls({0: c}, var)

    @classmethod
    def monomial(cls, exp: int, coeff=1, var: str = "A") -> LaurentPoly:
        return cls({exp: coeff}, var)

    @classmethod
    def parse(cls, text: str, var: str | None = None) -> LaurentPoly:
        """Parse the canonical printed form (and looser variants like ``A^2-3``)."""
        s = re.sub(r"\s+", "", str(text))
        if not s:
            raise ValueError("empty polynomial text")
        terms: dict[int, Rational] = {}
        found_var = var
        for chunk in _TERM_SPLIT.split(s):
            if not chunk:
                continue
            sign = 1
            body = chunk
            while body[:1] in ("+", "-"):
                if body[0] == "-":
                    sign = -sign
                body = body[1:]
            m = re.fullmatch(r"(?:(\d+(?:/\d+)?)\*?)?(?:([A-Za-z]\w*)(?:\^(-?\d+))?)?", body)
            if m is None or body == "":
                raise ValueError(f"bad term {chunk!r}")
            coef_s, v, exp_s = m.groups()
            if coef_s is None and v is None:
                raise ValueError(f"bad term {chunk!r}")
            coef = Fraction(coef_s) if coef_s else Fraction(1)
            if v is None:
                exp = 0
            else:
                if found_var is None:
                    found_var = v
                elif v != found_var:
                    raise ValueError(f"mixed variables {found_var!r} and {v!r}")
                exp = int(exp_s) if exp_s is not None else 1
            terms[exp] = terms.get(exp, 0) + sign * coef
        return cls(terms, found_var or "A")

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> dict[int, Rational]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def min_exp(self) -> int:
        return next(iter(self._terms))

    def max_exp(self) -> int:
        return next(reversed(self._terms))

    def coeff(self, exp: int):
        return self._terms.get(exp, 0)

    def is_unit(self) -> bool:
        """True for ``±A^k``, the units of Z[A, A^-1]."""
        return self.is_monomial() and abs(next(iter(self._terms.values()))) == 1

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> LaurentPoly:
        if isinstance(other, LaurentPoly):
            if other.var != self.var and other._terms and self._terms:
                if not (other.is_constant() or self.is_constant()):
                    raise ValueError(f"variable mismatch {self.var!r} vs {other.var!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly({0: other}, self.var)
        return NotImplemented

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def _var_with(self, other: LaurentPoly) -> str:
        if self.is_constant() and not other.is_constant():
            return other.var
        return self.var

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        t = dict(self._terms)
        for e, c in o._terms.items():
            t[e] = t.get(e, 0) + c
        return LaurentPoly(t, self._var_with(o))

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self._terms.items()}, self.var)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        t: dict[int, Rational] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                t[e1 + e2] = t.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(t, self._var_with(o))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise ValueError("negative power of a non-monomial")
            (e, c), = self._terms.items()
            inv = c if abs(c) == 1 else Fraction(1) / c
            return LaurentPoly({e * k: inv ** (-k)}, self.var)
        result = LaurentPoly({0: 1}, self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divide_exact(self, other) -> LaurentPoly | None:
        """Return ``self / other`` if the quotient is a Laurent polynomial, else None."""
        o = self._coerce(other)
        if o is NotImplemented or o.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return LaurentPoly({}, self.var)
        rem = dict(self._terms)
        lead_e, lead_c = o.max_exp(), o._terms[o.max_exp()]
        low = o.min_exp()
        quot: dict[int, Rational] = {}
        integral = all(isinstance(c, int) for c in o._terms.values())
        floor = min(self._terms) - low
        while rem:
            top = max(rem)
            shift = top - lead_e
            if shift < floor:
                return None
            c = rem[top]
            if integral and isinstance(c, int):
                if c % lead_c:
                    return None
                q = c // lead_c
            else:
                q = Fraction(c) / lead_c
            quot[shift] = q
            for e, oc in o._terms.items():
                k = e + shift
                v = rem.get(k, 0) - q * oc
                if v:
                    rem[k] = v
                else:
                    rem.pop(k, None)
        return LaurentPoly(quot, self._var_with(o))

    def substitute_inverse(self) -> LaurentPoly:
        """The mirror map ``A -> A^-1``."""
        return LaurentPoly({-e: c for e, c in self._terms.items()}, self.var)

    def evaluate(self, x):
        return sum(c * x**e for e, c in self._terms.items())

    # -- comparison / hashing -------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly({0: other}, self.var)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if self._terms != other._terms:
            return False
        return self.is_constant() or self.var == other.var

    def __hash__(self):
        if self._hash is None:
            key = tuple(self._terms.items())
            self._hash = hash((key, None if self.is_constant() else self.var))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self._terms.items():
            if e == 0:
                parts.append(str(c))
                continue
            mono = self.var if e == 1 else f"{self.var}^{e}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


def as_laurent(x, var: str = "A") -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    return LaurentPoly.const(x, var)
