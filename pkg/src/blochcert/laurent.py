"""Laurent polynomials in z_1..z_d and an ordinary variable l (the spectral one).

Exponent vectors are integer tuples of length d+1; the last entry is the
exponent of l and must stay nonnegative, the first d entries are z-exponents
of either sign.  Term coefficients are ParamPoly values.  The canonical term
order is lexicographic on (l-exponent, z-exponents).

  LaurentPoly.terms : dict[tuple[int, ...], ParamPoly]   no zero coefficients
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .params import ParamPoly

Exp = tuple[int, ...]


class CapExceeded(Exception):
    """Raised when a determinant (or expansion needing one) exceeds the size cap."""


def exp_sort_key(e: Exp) -> tuple:
    """Canonical order key: l-exponent first, then z-exponents lexicographically."""
    return (e[-1], e[:-1])


def _exp_add(a: Exp, b: Exp) -> Exp:
    return tuple(x + y for x, y in zip(a, b))


def _exp_sub(a: Exp, b: Exp) -> Exp:
    return tuple(x - y for x, y in zip(a, b))


class LaurentPoly:
    """Sparse Laurent polynomial with parameter-polynomial coefficients."""

    __slots__ = ("nz", "terms")

    def __init__(self, nz: int, terms: Mapping[Exp, ParamPoly] | None = None):
        self.nz = nz
        self.terms: dict[Exp, ParamPoly] = {}
        for e, c in (terms or {}).items():
            if len(e) != nz + 1:
                raise ValueError(f"exponent {e} has wrong length for {nz} z-variables")
            if e[-1] < 0:
                raise ValueError(f"negative l-exponent in {e}")
            if not c.is_zero():
                self.terms[tuple(e)] = c

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(nz: int) -> LaurentPoly:
        return LaurentPoly(nz)

    @staticmethod
    def const(nz: int, value: int | Fraction | ParamPoly) -> LaurentPoly:
        c = value if isinstance(value, ParamPoly) else ParamPoly.const(value)
        return LaurentPoly(nz, {(0,) * (nz + 1): c})

    @staticmethod
    def term(nz: int, exp: Sequence[int], coeff: int | Fraction | ParamPoly) -> LaurentPoly:
        c = coeff if isinstance(coeff, ParamPoly) else ParamPoly.const(coeff)
        return LaurentPoly(nz, {tuple(exp): c})

    @staticmethod
    def z_var(nz: int, i: int, power: int = 1) -> LaurentPoly:
        exp = [0] * (nz + 1)
        exp[i] = power
        return LaurentPoly.term(nz, exp, 1)

    @staticmethod
    def lam(nz: int, power: int = 1) -> LaurentPoly:
        exp = [0] * (nz + 1)
        exp[-1] = power
        return LaurentPoly.term(nz, exp, 1)

    # -- basic structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> list[Exp]:
        """Exponent vectors with nonzero coefficient, in canonical order."""
        return sorted(self.terms, key=exp_sort_key)

    def z_support(self) -> list[tuple[int, ...]]:
        """Distinct z-parts of the support (l-coordinate dropped)."""
        return sorted({e[:-1] for e in self.terms})

    def coeff(self, exp: Sequence[int]) -> ParamPoly:
        return self.terms.get(tuple(exp), ParamPoly.zero())

    def lambda_degree(self) -> int:
        return max((e[-1] for e in self.terms), default=0)

    def lambda_coefficient(self, k: int) -> LaurentPoly:
        """Coefficient of l^k as a Laurent polynomial with l-exponent zero."""
        picked = {
            e[:-1] + (0,): c for e, c in self.terms.items() if e[-1] == k
        }
        return LaurentPoly(self.nz, picked)

    def parameter_symbols(self) -> set[str]:
        out: set[str] = set()
        for c in self.terms.values():
            out |= c.symbols()
        return out

    def mentions_any(self, names: Iterable[str]) -> bool:
        wanted = set(names)
        return any(c.mentions_any(wanted) for c in self.terms.values())

    def is_rational_coeffs(self) -> bool:
        return all(c.is_rational() for c in self.terms.values())

    # -- ring operations ---------------------------------------------------

    def _check_compat(self, other: LaurentPoly) -> None:
        if self.nz != other.nz:
            raise ValueError("mixed numbers of z-variables")

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        self._check_compat(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s.is_zero():
                    del out[e]
                else:
                    out[e] = s
        res = LaurentPoly(self.nz)
        res.terms = out
        return res

    def __neg__(self) -> LaurentPoly:
        res = LaurentPoly(self.nz)
        res.terms = {e: -c for e, c in self.terms.items()}
        return res

    def __sub__(self, other: LaurentPoly) -> LaurentPoly:
        return self + (-other)

    def __mul__(self, other: LaurentPoly) -> LaurentPoly:
        self._check_compat(other)
        if not self.terms or not other.terms:
            return LaurentPoly(self.nz)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict[Exp, ParamPoly] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = _exp_add(ea, eb)
                c = ca * cb
                s = out.get(e)
                if s is None:
                    if not c.is_zero():
                        out[e] = c
                else:
                    s = s + c
                    if s.is_zero():
                        del out[e]
                    else:
                        out[e] = s
        res = LaurentPoly(self.nz)
        res.terms = out
        return res

    def scale(self, c: int | Fraction | ParamPoly) -> LaurentPoly:
        cp = c if isinstance(c, ParamPoly) else ParamPoly.const(c)
        res = LaurentPoly(self.nz)
        if cp.is_zero():
            return res
        res.terms = {e: v * cp for e, v in self.terms.items()}
        res.terms = {e: v for e, v in res.terms.items() if not v.is_zero()}
        return res

    def __pow__(self, n: int) -> LaurentPoly:
        if n < 0:
            raise ValueError("negative polynomial power")
        out = LaurentPoly.const(self.nz, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def mul_monomial(self, exp: Sequence[int], coeff: ParamPoly | Fraction | int = 1) -> LaurentPoly:
        """Multiply by a single term; the l-exponent of the result must stay >= 0."""
        cp = coeff if isinstance(coeff, ParamPoly) else ParamPoly.const(coeff)
        shift = tuple(exp)
        return LaurentPoly(
            self.nz, {_exp_add(e, shift): c * cp for e, c in self.terms.items()}
        )

    # -- face restriction and reshaping -------------------------------------

    def facial_polynomial(self, w: Sequence[int]) -> LaurentPoly:
        """Terms whose exponent minimizes the weight w (length d+1, l last)."""
        if len(w) != self.nz + 1:
            raise ValueError("weight vector has wrong length")
        if not self.terms:
            return LaurentPoly(self.nz)
        weights = {e: sum(x * y for x, y in zip(e, w)) for e in self.terms}
        h = min(weights.values())
        return LaurentPoly(
            self.nz, {e: c for e, c in self.terms.items() if weights[e] == h}
        )

    def substitute_power(self, q: Sequence[int]) -> LaurentPoly:
        """z_i -> z_i^{q_i}; the l variable is untouched."""
        if len(q) != self.nz:
            raise ValueError("power vector has wrong length")
        if any(qi <= 0 for qi in q):
            raise ValueError("powers must be positive")
        out: dict[Exp, ParamPoly] = {}
        for e, c in self.terms.items():
            out[tuple(x * qi for x, qi in zip(e, q)) + (e[-1],)] = c
        return LaurentPoly(self.nz, out)

    def specialize_lambda(self, value: Fraction | int) -> LaurentPoly:
        """Substitute l = value; result has l-exponent zero everywhere."""
        v = Fraction(value)
        out: dict[Exp, ParamPoly] = {}
        for e, c in self.terms.items():
            key = e[:-1] + (0,)
            add = c.scale(v ** e[-1])
            s = out.get(key)
            s = add if s is None else s + add
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        return LaurentPoly(self.nz, out)

    def specialize_params(self, env: Mapping[str, Fraction]) -> LaurentPoly:
        """Bind a subset of parameter symbols to rationals."""
        reps = {k: ParamPoly.const(v) for k, v in env.items()}
        out: dict[Exp, ParamPoly] = {}
        for e, c in self.terms.items():
            s = c.substitute(reps)
            if not s.is_zero():
                out[e] = s
        return LaurentPoly(self.nz, out)

    # -- division ------------------------------------------------------------

    def exact_divide(self, divisor: LaurentPoly) -> LaurentPoly | None:
        """Quotient self/divisor when exact, else None.  Never raises on failure."""
        self._check_compat(divisor)
        if divisor.is_zero():
            return None
        if self.is_zero():
            return LaurentPoly(self.nz)
        lead_d = max(divisor.terms, key=exp_sort_key)
        cd = divisor.terms[lead_d]
        rem = self
        quo_terms: dict[Exp, ParamPoly] = {}
        steps = 0
        max_steps = len(self.terms) * max(len(divisor.terms), 1) + len(self.terms) + 1
        while rem.terms:
            steps += 1
            if steps > max_steps:
                return None
            lead_r = max(rem.terms, key=exp_sort_key)
            cq = rem.terms[lead_r].exact_div(cd)
            if cq is None:
                return None
            eq = _exp_sub(lead_r, lead_d)
            if eq[-1] < 0:
                return None
            quo_terms[eq] = cq
            rem = rem - divisor.mul_monomial(eq, cq)
        return LaurentPoly(self.nz, quo_terms)

    # -- monomials -----------------------------------------------------------

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def normalize_monomial_unit(self) -> LaurentPoly:
        """Divide by the canonically smallest support monomial (a z-l unit shift)."""
        if not self.terms:
            return self
        base = min(self.terms, key=exp_sort_key)
        return LaurentPoly(
            self.nz, {_exp_sub(e, base): c for e, c in self.terms.items()}
        )

    # -- numeric evaluation ---------------------------------------------------

    def eval_numeric(
        self,
        z: Sequence[complex],
        lam: complex,
        params: Mapping[str, complex] | None = None,
    ) -> complex:
        if len(z) != self.nz:
            raise ValueError("wrong number of z-values")
        env = dict(params or {})
        total = 0j
        for e, c in self.terms.items():
            val = c.evaluate_numeric(env)
            for zi, ei in zip(z, e[:-1]):
                if ei:
                    val *= zi ** ei
            if e[-1]:
                val *= lam ** e[-1]
            total += val
        return total

    # -- equality and rendering ------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, LaurentPoly)
            and self.nz == other.nz
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.nz, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"LaurentPoly({self.to_text()})"

    def to_text(self) -> str:
        """Canonical rendering, highest terms first, e.g. ``3*z1^2*z2^-1*l + (V_u - 2)*z1``."""
        if not self.terms:
            return "0"
        pieces: list[tuple[str, bool]] = []  # (body text without sign, negative?)
        for e in sorted(self.terms, key=exp_sort_key, reverse=True):
            c = self.terms[e]
            factors = []
            for i, ei in enumerate(e[:-1]):
                if ei == 1:
                    factors.append(f"z{i + 1}")
                elif ei:
                    factors.append(f"z{i + 1}^{ei}")
            if e[-1] == 1:
                factors.append("l")
            elif e[-1]:
                factors.append(f"l^{e[-1]}")
            mono = "*".join(factors)
            coeff_text, negative = _coeff_text(c)
            if mono and coeff_text == "1":
                body = mono
            elif mono:
                body = f"{coeff_text}*{mono}"
            else:
                body = coeff_text
            pieces.append((body, negative))
        out = []
        for idx, (body, negative) in enumerate(pieces):
            if idx == 0:
                out.append(f"-{body}" if negative else body)
            else:
                out.append(f"- {body}" if negative else f"+ {body}")
        return " ".join(out)


def _coeff_text(c: ParamPoly) -> tuple[str, bool]:
    """Render a coefficient for use inside a product; returns (text, sign-was-factored)."""
    if c.is_rational():
        v = c.rational_value()
        return (str(-v), True) if v < 0 else (str(v), False)
    if len(c.terms) == 1:
        ((mono, v),) = c.terms.items()
        body = "*".join(s if e == 1 else f"{s}^{e}" for s, e in mono)
        prefix = "" if abs(v) == 1 else f"{abs(v)}*"
        return f"{prefix}{body}", v < 0
    return f"({c.to_text()})", False


class LaurentMatrix:
    """Square matrix of Laurent polynomials with row/column labels."""

    __slots__ = ("nz", "labels", "entries")

    def __init__(
        self,
        nz: int,
        labels: Sequence[str],
        entries: Mapping[tuple[int, int], LaurentPoly] | None = None,
    ):
        self.nz = nz
        self.labels = tuple(labels)
        self.entries: dict[tuple[int, int], LaurentPoly] = {}
        n = len(self.labels)
        for (i, j), p in (entries or {}).items():
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError("entry index out of range")
            if p.nz != nz:
                raise ValueError("entry has wrong number of z-variables")
            if not p.is_zero():
                self.entries[(i, j)] = p

    @property
    def size(self) -> int:
        return len(self.labels)

    def entry(self, i: int, j: int) -> LaurentPoly:
        return self.entries.get((i, j), LaurentPoly.zero(self.nz))

    def add_to_entry(self, i: int, j: int, p: LaurentPoly) -> None:
        s = self.entry(i, j) + p
        if s.is_zero():
            self.entries.pop((i, j), None)
        else:
            self.entries[(i, j)] = s

    def eval_numeric(
        self,
        z: Sequence[complex],
        lam: complex,
        params: Mapping[str, complex] | None = None,
    ) -> list[list[complex]]:
        n = self.size
        out = [[0j] * n for _ in range(n)]
        for (i, j), p in self.entries.items():
            out[i][j] = p.eval_numeric(z, lam, params)
        return out

    def determinant(self, cap: int = 16) -> LaurentPoly:
        """Exact determinant via cofactor expansion memoized over column subsets."""
        n = self.size
        if n > cap:
            raise CapExceeded(f"matrix size {n} exceeds determinant cap {cap}")
        if n == 0:
            return LaurentPoly.const(self.nz, 1)
        row_maps: list[dict[int, LaurentPoly]] = [{} for _ in range(n)]
        for (i, j), p in self.entries.items():
            row_maps[i][j] = p
        # Expanding sparse rows first keeps the memo small; track the row
        # permutation's sign.
        order = sorted(range(n), key=lambda i: len(row_maps[i]))
        sign0 = _permutation_sign(order)
        memo: dict[int, LaurentPoly] = {}
        zero = LaurentPoly.zero(self.nz)
        one = LaurentPoly.const(self.nz, 1)

        def rec(k: int, mask: int) -> LaurentPoly:
            if k == n:
                return one
            cached = memo.get(mask)
            if cached is not None:
                return cached
            total = zero
            position = 0
            row_entries = row_maps[order[k]]
            m = mask
            while m:
                j = (m & -m).bit_length() - 1
                p = row_entries.get(j)
                if p is not None:
                    sub = rec(k + 1, mask & ~(1 << j))
                    if not sub.is_zero():
                        term = p * sub
                        total = total + term if position % 2 == 0 else total - term
                m &= m - 1
                position += 1
            memo[mask] = total
            return total

        det = rec(0, (1 << n) - 1)
        return det if sign0 > 0 else -det


def _permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign
