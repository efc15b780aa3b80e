"""Exact calculus in the complex algebra generated by p, q with qp - pq = i.

Elements are kept in normal form (every p to the left of every q) with
Gaussian-rational coefficients, so all identities here are certificates, not
floating-point estimates.  Reordering uses exhaustive worklist rewriting of
the relation qp -> pq + i, memoized per (q-power, p-power) pair.

The growth diagnostics compare dim(a V_n + V_n) against dim V_n for the
total-degree filtration V_n = span{p^k q^l : k + l <= n}; dimensions are
exact ranks over the Gaussian rationals.  A Hermite-basis representation
bridges to the numerical side of the package.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import ops
from .errors import DegreeExceedsWindow, FoelnerError, InvalidSpec

Monomial = tuple[int, int]   # (k, l) <-> p^k q^l


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex number a + b i with rational a, b."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(Fraction(value), Fraction(0))

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    def __truediv__(self, other: "GaussianRational") -> "GaussianRational":
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational((self.re * other.re + self.im * other.im) / d,
                                (self.im * other.re - self.re * other.im) / d)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        istr = "i" if mag == 1 else f"{mag}i"
        return f"({self.re}{sign}{istr})"


_ZERO = GaussianRational()
_ONE = GaussianRational(Fraction(1))
_I = GaussianRational(Fraction(0), Fraction(1))


def _rewrite_word(word: tuple[str, ...]) -> dict[Monomial, GaussianRational]:
    """Normal form of a word over {p, q} via exhaustive qp -> pq + i rewriting."""
    pending: dict[tuple[str, ...], GaussianRational] = {word: _ONE}
    done: dict[Monomial, GaussianRational] = {}
    while pending:
        w, c = pending.popitem()
        pos = next((t for t in range(len(w) - 1) if w[t] == "q" and w[t + 1] == "p"), None)
        if pos is None:
            key = (w.count("p"), w.count("q"))
            tot = done.get(key, _ZERO) + c
            if tot:
                done[key] = tot
            else:
                done.pop(key, None)
            continue
        swapped = w[:pos] + ("p", "q") + w[pos + 2:]
        cur = pending.get(swapped, _ZERO) + c
        if cur:
            pending[swapped] = cur
        else:
            pending.pop(swapped, None)
        dropped = w[:pos] + w[pos + 2:]
        cur = pending.get(dropped, _ZERO) + c * _I
        if cur:
            pending[dropped] = cur
        else:
            pending.pop(dropped, None)
    return done


_REORDER_CACHE: dict[tuple[int, int], dict[Monomial, GaussianRational]] = {}


def _reorder(l: int, k: int) -> dict[Monomial, GaussianRational]:
    """Normal form of q^l p^k as {(k', l'): coefficient}."""
    key = (l, k)
    out = _REORDER_CACHE.get(key)
    if out is None:
        out = _rewrite_word(("q",) * l + ("p",) * k)
        _REORDER_CACHE[key] = out
    return out


class WeylElement:
    """Normal-form element sum c_{kl} p^k q^l with exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, GaussianRational] | None = None):
        clean: dict[Monomial, GaussianRational] = {}
        for (k, l), c in (terms or {}).items():
            if k < 0 or l < 0:
                raise ValueError("monomial exponents must be >= 0")
            c = GaussianRational.of(c)
            if c:
                clean[(int(k), int(l))] = c
        self.terms = clean

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls) -> "WeylElement":
        return cls()

    @classmethod
    def one(cls) -> "WeylElement":
        return cls({(0, 0): _ONE})

    @classmethod
    def p(cls) -> "WeylElement":
        return cls({(1, 0): _ONE})

    @classmethod
    def q(cls) -> "WeylElement":
        return cls({(0, 1): _ONE})

    @classmethod
    def imaginary_unit(cls) -> "WeylElement":
        return cls({(0, 0): _I})

    # -- structure -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int | None:
        """Total degree; None for the zero element."""
        if not self.terms:
            return None
        return max(k + l for k, l in self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, WeylElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: "WeylElement") -> "WeylElement":
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, _ZERO) + c
        return WeylElement(acc)

    def __sub__(self, other: "WeylElement") -> "WeylElement":
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, _ZERO) - c
        return WeylElement(acc)

    def __neg__(self) -> "WeylElement":
        return WeylElement({m: -c for m, c in self.terms.items()})

    def scaled(self, factor) -> "WeylElement":
        f = GaussianRational.of(factor)
        return WeylElement({m: c * f for m, c in self.terms.items()})

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return multiply(self, other)

    def __repr__(self) -> str:
        return f"WeylElement({to_text(self)!r})"


def multiply(x: WeylElement, y: WeylElement) -> WeylElement:
    """Product in normal form; the only work is reordering q^l1 p^k2 blocks."""
    acc: dict[Monomial, GaussianRational] = {}
    for (k1, l1), c1 in x.terms.items():
        for (k2, l2), c2 in y.terms.items():
            c = c1 * c2
            if l1 == 0 or k2 == 0:
                m = (k1 + k2, l1 + l2)
                acc[m] = acc.get(m, _ZERO) + c
                continue
            for (a, b), g in _reorder(l1, k2).items():
                m = (k1 + a, b + l2)
                acc[m] = acc.get(m, _ZERO) + c * g
    return WeylElement(acc)


# ---------------------------------------------------------------------------
# text syntax
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(\d+/\d+|\d+|[pqi*^+-])")


def parse_element(text: str) -> WeylElement:
    """Parse "2*p^2*q - i*q^3" style expressions into normal form.

    Grammar: signed terms joined by +/-; a term is '*'-separated factors;
    a factor is an integer, a rational a/b, the imaginary unit i, or p/q
    with an optional ^power.  Factors multiply left to right, so "q*p"
    normal-orders to p*q + i.
    """
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise InvalidSpec(f"bad element syntax near {text[pos:pos + 10]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    if not tokens:
        raise InvalidSpec("empty element expression")

    t = 0

    def peek() -> str | None:
        return tokens[t] if t < len(tokens) else None

    def take() -> str:
        nonlocal t
        tok = tokens[t]
        t += 1
        return tok

    def parse_factor() -> WeylElement:
        nonlocal t
        tok = peek()
        if tok is None:
            raise InvalidSpec("dangling operator in element expression")
        take()
        if tok == "i":
            return WeylElement.imaginary_unit()
        if tok in ("p", "q"):
            power = 1
            if peek() == "^":
                take()
                exp = peek()
                if exp is None or not exp.isdigit():
                    raise InvalidSpec("^ must be followed by a nonnegative integer")
                take()
                power = int(exp)
            base = (1, 0) if tok == "p" else (0, 1)
            return WeylElement({(base[0] * power, base[1] * power): _ONE})
        if "/" in tok:
            try:
                return WeylElement({(0, 0): GaussianRational(Fraction(tok))})
            except ZeroDivisionError:
                raise InvalidSpec(f"zero denominator in coefficient {tok!r}") from None
        if tok.isdigit():
            return WeylElement({(0, 0): GaussianRational(Fraction(int(tok)))})
        raise InvalidSpec(f"unexpected token {tok!r} in element expression")

    def parse_term() -> WeylElement:
        out = parse_factor()
        while peek() == "*":
            take()
            out = multiply(out, parse_factor())
        return out

    sign = 1
    if peek() in ("+", "-"):
        sign = -1 if take() == "-" else 1
    result = parse_term().scaled(sign)
    while peek() in ("+", "-"):
        sgn = -1 if take() == "-" else 1
        result = result + parse_term().scaled(sgn)
    if t != len(tokens):
        raise InvalidSpec(f"trailing tokens {tokens[t:]!r} in element expression")
    return result


def to_text(x: WeylElement) -> str:
    """Canonical text form, highest total degree first."""
    if x.is_zero():
        return "0"
    parts = []
    for (k, l) in sorted(x.terms, key=lambda m: (-(m[0] + m[1]), -m[0])):
        c = x.terms[(k, l)]
        mono = "*".join(
            ([f"p^{k}" if k > 1 else "p"] if k else [])
            + ([f"q^{l}" if l > 1 else "q"] if l else []))
        cs = str(c)
        if mono:
            if cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append(f"-{mono}")
            else:
                parts.append(f"{cs}*{mono}")
        else:
            parts.append(cs)
    out = parts[0]
    for piece in parts[1:]:
        out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return out


# ---------------------------------------------------------------------------
# filtration growth
# ---------------------------------------------------------------------------

def degree_monomials(n: int) -> list[Monomial]:
    """All (k, l) with k + l <= n, in a fixed order."""
    return [(k, l) for d in range(n + 1) for k in range(d, -1, -1) for l in (d - k,)]


@dataclass(frozen=True)
class MonomialSubspace:
    """Span of a monomial set, optionally extended by arbitrary elements.

    The dimension is |monomials| plus the exact rank of the extension
    elements after projecting away the monomial coordinates.
    """

    monomials: frozenset[Monomial]
    extras: tuple[WeylElement, ...] = ()

    @classmethod
    def total_degree(cls, n: int) -> "MonomialSubspace":
        if n < 0:
            raise ValueError("n must be >= 0")
        return cls(monomials=frozenset(degree_monomials(n)))

    def extended(self, elements: Iterable[WeylElement]) -> "MonomialSubspace":
        return MonomialSubspace(self.monomials, self.extras + tuple(elements))

    def dimension(self) -> int:
        base = len(self.monomials)
        rows = []
        for x in self.extras:
            row = {m: c for m, c in x.terms.items() if m not in self.monomials}
            if row:
                rows.append(row)
        return base + _exact_rank(rows)


def _exact_rank(rows: list[dict[Monomial, GaussianRational]]) -> int:
    """Rank over the Gaussian rationals by elimination on sparse rows."""
    pivots: dict[Monomial, dict[Monomial, GaussianRational]] = {}
    for row in rows:
        row = dict(row)
        while row:
            lead = min(row, key=lambda m: (m[0] + m[1], m[0], m[1]))
            piv = pivots.get(lead)
            if piv is None:
                inv = row[lead]
                pivots[lead] = {m: c / inv for m, c in row.items()}
                break
            f = row[lead]
            for m, c in piv.items():
                cur = row.get(m, _ZERO) - f * c
                if cur:
                    row[m] = cur
                else:
                    row.pop(m, None)
    return len(pivots)


def foelner_ratio(a: WeylElement, n: int) -> Fraction:
    """dim(a V_n + V_n) / dim V_n as an exact rational."""
    if n < 0:
        raise ValueError("n must be >= 0")
    dim_vn = (n + 1) * (n + 2) // 2
    deg_a = a.degree()
    if deg_a is None or deg_a == 0:
        return Fraction(1)
    # products with monomials of degree <= n - deg_a stay inside V_n
    high = [m for m in degree_monomials(n) if m[0] + m[1] > n - deg_a]
    products = [multiply(a, WeylElement({m: _ONE})) for m in high]
    dim = MonomialSubspace.total_degree(n).extended(products).dimension()
    return Fraction(dim, dim_vn)


@dataclass(frozen=True)
class AmenabilityWitness:
    """Certificate that every listed element has small growth at level n."""

    n: int
    cap: int                      # a-priori level from the degree bound
    epsilon: Fraction
    ratios: tuple[Fraction, ...]  # foelner_ratio of each element at level n


def amenability_witness(F: Sequence[WeylElement], epsilon) -> AmenabilityWitness:
    """Smallest n (searched upward from 0) with all ratios <= 1 + epsilon.

    The search is capped at ceil((delta + 2) / (sqrt(1 + eps) - 1)), where
    delta is the largest total degree in F; that level always works because
    dim V_{n+delta} / dim V_n falls below 1 + eps there.
    """
    if not F:
        raise ValueError("need at least one element")
    eps = epsilon if isinstance(epsilon, Fraction) else Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    delta = max((a.degree() or 0) for a in F)
    cap = math.ceil((delta + 2) / (math.sqrt(1 + float(eps)) - 1))
    target = 1 + eps
    for n in range(cap + 1):
        rats = tuple(foelner_ratio(a, n) for a in F)
        if all(r <= target for r in rats):
            return AmenabilityWitness(n=n, cap=cap, epsilon=eps, ratios=rats)
    raise FoelnerError("no witness level up to the degree-bound cap; "
                       "this contradicts the growth estimate")


# ---------------------------------------------------------------------------
# Hermite-basis representation
# ---------------------------------------------------------------------------

def represent(x: WeylElement, N: int) -> ops.Window:
    """Image of x under p, q -> Hermite-basis momentum/position windows.

    Monomials map to matrix products of the p- and q-windows computed in an
    enlarged window of size N + deg(x), then cut back to N; entries of the
    result are exact for the full N x N block because a degree-d monomial
    only couples basis vectors at distance <= d.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    d = x.degree() or 0
    if d >= N:
        raise DegreeExceedsWindow(f"degree {d} needs a window larger than {N}")
    big = N + d
    P = ops.compress(ops.OperatorSpec.hermite_p(), big).entries
    Q = ops.compress(ops.OperatorSpec.hermite_q(), big).entries
    p_pows = [np.eye(big, dtype=complex)]
    q_pows = [np.eye(big, dtype=complex)]
    for _ in range(d):
        p_pows.append(p_pows[-1] @ P)
        q_pows.append(q_pows[-1] @ Q)
    acc = np.zeros((big, big), dtype=complex)
    for (k, l) in sorted(x.terms):
        acc += x.terms[(k, l)].to_complex() * (p_pows[k] @ q_pows[l])
    return ops.Window(N, acc[:N, :N])
