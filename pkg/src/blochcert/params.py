"""Exact polynomial coefficients in named parameters.

A coefficient of a Laurent term is a polynomial over the rationals in named
symbols (edge labels such as ``alpha``, potential values such as ``V_u``).
Representation:

  Monomial = tuple[tuple[str, int], ...]   sorted by symbol, exponents > 0
  terms    = dict[Monomial, Fraction]      no zero coefficients stored

The empty monomial ``()`` is the constant term.  The zero polynomial has an
empty term dict.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

Monomial = tuple[tuple[str, int], ...]

_ONE_MONO: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    merged: dict[str, int] = dict(a)
    for sym, e in b:
        merged[sym] = merged.get(sym, 0) + e
    return tuple(sorted(merged.items()))


def _mono_divides(a: Monomial, b: Monomial) -> bool:
    """True when monomial a divides monomial b."""
    db = dict(b)
    return all(db.get(sym, 0) >= e for sym, e in a)


def _mono_div(b: Monomial, a: Monomial) -> Monomial:
    quo = dict(b)
    for sym, e in a:
        quo[sym] -= e
    return tuple(sorted((s, e) for s, e in quo.items() if e != 0))


_LEX_LAST = ("￿", 0)


def _mono_lex_key(m: Monomial) -> tuple[tuple[str, int], ...]:
    """min over this key is the lex-leading monomial; multiplicative, unlike raw tuple order."""
    return tuple((s, -e) for s, e in m) + (_LEX_LAST,)


class ParamPoly:
    """Immutable-by-convention sparse polynomial in named rational parameters."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self.terms: dict[Monomial, Fraction] = {
            m: c for m, c in (terms or {}).items() if c != 0
        }
        self._hash: int | None = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> ParamPoly:
        return ParamPoly()

    @staticmethod
    def const(value: int | Fraction) -> ParamPoly:
        c = Fraction(value)
        return ParamPoly({_ONE_MONO: c}) if c else ParamPoly()

    @staticmethod
    def symbol(name: str, exp: int = 1) -> ParamPoly:
        if exp < 0:
            raise ValueError("parameter exponents must be nonnegative")
        if exp == 0:
            return ParamPoly.const(1)
        return ParamPoly({((name, exp),): Fraction(1)})

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ONE_MONO in self.terms)

    def rational_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError("coefficient is not parameter-free")
        return self.terms[_ONE_MONO]

    def symbols(self) -> set[str]:
        return {sym for mono in self.terms for sym, _ in mono}

    def mentions_any(self, names: Iterable[str]) -> bool:
        wanted = set(names)
        return any(sym in wanted for mono in self.terms for sym, _ in mono)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: ParamPoly) -> ParamPoly:
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return ParamPoly(out)

    def __neg__(self) -> ParamPoly:
        return ParamPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: ParamPoly) -> ParamPoly:
        return self + (-other)

    def __mul__(self, other: ParamPoly) -> ParamPoly:
        if not self.terms or not other.terms:
            return ParamPoly()
        # Fast path: rational times anything.
        if self.is_rational():
            c = self.terms[_ONE_MONO]
            return ParamPoly({m: c * v for m, v in other.terms.items()})
        if other.is_rational():
            c = other.terms[_ONE_MONO]
            return ParamPoly({m: c * v for m, v in self.terms.items()})
        out: dict[Monomial, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                s = out.get(m)
                if s is None:
                    out[m] = ca * cb
                else:
                    s = s + ca * cb
                    if s:
                        out[m] = s
                    else:
                        del out[m]
        return ParamPoly(out)

    def scale(self, c: int | Fraction) -> ParamPoly:
        c = Fraction(c)
        if c == 0:
            return ParamPoly()
        return ParamPoly({m: c * v for m, v in self.terms.items()})

    def __pow__(self, n: int) -> ParamPoly:
        if n < 0:
            raise ValueError("negative parameter power")
        out = ParamPoly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- exact division ----------------------------------------------------

    def exact_div(self, other: ParamPoly) -> ParamPoly | None:
        """Quotient self/other when the division is exact, else None."""
        if other.is_zero():
            return None
        if self.is_zero():
            return ParamPoly()
        if other.is_rational():
            inv = 1 / other.terms[_ONE_MONO]
            return ParamPoly({m: c * inv for m, c in self.terms.items()})
        rem = self
        quo = ParamPoly()
        lm_o = min(other.terms, key=_mono_lex_key)
        lc_o = other.terms[lm_o]
        while not rem.is_zero():
            lm_r = min(rem.terms, key=_mono_lex_key)
            lc_r = rem.terms[lm_r]
            if not _mono_divides(lm_o, lm_r):
                return None
            piece = ParamPoly({_mono_div(lm_r, lm_o): lc_r / lc_o})
            quo = quo + piece
            rem = rem - piece * other
        return quo

    # -- evaluation --------------------------------------------------------

    def evaluate(self, env: Mapping[str, Fraction]) -> Fraction:
        """Exact value with every symbol bound to a rational."""
        total = Fraction(0)
        for mono, coeff in self.terms.items():
            val = coeff
            for sym, e in mono:
                val *= Fraction(env[sym]) ** e
            total += val
        return total

    def evaluate_numeric(self, env: Mapping[str, complex]) -> complex:
        total = 0j
        for mono, coeff in self.terms.items():
            val = complex(coeff)
            for sym, e in mono:
                val *= complex(env[sym]) ** e
            total += val
        return total

    def substitute(self, env: Mapping[str, "ParamPoly"]) -> ParamPoly:
        """Replace named symbols by parameter polynomials."""
        out = ParamPoly()
        for mono, coeff in self.terms.items():
            piece = ParamPoly.const(coeff)
            for sym, e in mono:
                rep = env.get(sym)
                piece = piece * (rep ** e if rep is not None else ParamPoly.symbol(sym, e))
            out = out + piece
        return out

    # -- comparisons, hashing, rendering ------------------------------------

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ParamPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"ParamPoly({self.to_text()})"

    def to_text(self) -> str:
        """Canonical text, e.g. ``V_u - 2`` or ``3/2*alpha^2*gamma_1``."""
        if not self.terms:
            return "0"
        parts: list[str] = []
        for mono in sorted(self.terms, key=_mono_sort_key):
            coeff = self.terms[mono]
            body = "*".join(
                sym if e == 1 else f"{sym}^{e}" for sym, e in mono
            )
            if not body:
                text = str(coeff)
            elif coeff == 1:
                text = body
            elif coeff == -1:
                text = f"-{body}"
            else:
                text = f"{coeff}*{body}"
            if parts and not text.startswith("-"):
                parts.append(f"+ {text}")
            elif parts:
                parts.append(f"- {text[1:]}")
            else:
                parts.append(text)
        return " ".join(parts)


def _mono_sort_key(mono: Monomial) -> tuple:
    # Constant first, then by total degree and name for a stable rendering.
    return (sum(e for _, e in mono), mono)


def mono_to_key(mono: Monomial) -> str:
    """JSON key for a parameter monomial: ``V_u^2*alpha`` with ``1`` for the constant."""
    if not mono:
        return "1"
    return "*".join(sym if e == 1 else f"{sym}^{e}" for sym, e in mono)


def mono_from_key(key: str) -> Monomial:
    if key == "1":
        return ()
    factors: list[tuple[str, int]] = []
    for part in key.split("*"):
        if "^" in part:
            sym, e = part.rsplit("^", 1)
            factors.append((sym, int(e)))
        else:
            factors.append((part, 1))
    return tuple(sorted(factors))
