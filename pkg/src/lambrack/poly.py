"""Exact sparse multivariate polynomials over the rationals.

Every symbolic computation in this package runs on the polynomial ring
Q[d, l, m, n, p1, ..., pk] where

* ``d`` is the translation generator (it acts on module elements),
* ``l``, ``m``, ``n`` are the three spectral variables available to
  bracket expansions (outer, inner, and scratch slot respectively),
* any further identifiers are *parameters*: opaque exact scalars that ride
  along through arithmetic and are only ever replaced by rationals.

A polynomial is a dict mapping monomials to nonzero ``Fraction``
coefficients; a monomial is a tuple of (variable, exponent) pairs sorted by
variable name.  The zero polynomial is the empty dict.  All operations are
exact; there is no floating point anywhere.

Substitution is deliberately narrow: only the reserved variables d/l/m/n may
be replaced, and only by affine-linear forms (``LinearForm``).  That is the
exact amount of generality the bracket calculus needs, and keeping it narrow
makes the substitution semantics easy to audit.  Parameters are replaced by
rationals through the separate ``specialize`` operation.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

TRANSLATION = "d"
SPECTRAL = ("l", "m", "n")
RESERVED = (TRANSLATION,) + SPECTRAL

Rational = Union[int, Fraction]

# A monomial: ((var, exp), ...) sorted by var, every exp > 0.  () is the
# constant monomial.
Monomial = tuple


class ParseError(ValueError):
    """Raised on malformed polynomial / module element text.

    Carries the offset of the offending token so callers can point at it.
    """

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for var, exp in b:
        merged[var] = merged.get(var, 0) + exp
    return tuple(sorted(merged.items()))


def _mono_degree(mono: Monomial) -> int:
    return sum(exp for _, exp in mono)


class Poly:
    """Immutable exact polynomial.  Construct via the class helpers."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction]):
        # Canonical form: no zero coefficients, Fraction values, plain dict.
        self.terms = {m: c for m, c in terms.items() if c != 0}

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "Poly":
        return Poly({})

    @staticmethod
    def const(value: Rational) -> "Poly":
        c = Fraction(value)
        return Poly({(): c}) if c else Poly({})

    @staticmethod
    def var(name: str) -> "Poly":
        return Poly({((name, 1),): Fraction(1)})

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant_value(self) -> Fraction:
        """The value of a constant polynomial (error otherwise)."""
        if not self.is_constant():
            raise ValueError(f"not a constant polynomial: {self}")
        return self.terms.get((), Fraction(0))

    def variables(self) -> set:
        return {var for mono in self.terms for var, _ in mono}

    def degree(self, name: str | None = None) -> int:
        """Total degree, or the degree in one variable.  Zero poly has -1."""
        if not self.terms:
            return -1
        if name is None:
            return max(_mono_degree(m) for m in self.terms)
        best = 0
        for mono in self.terms:
            for var, exp in mono:
                if var == name and exp > best:
                    best = exp
        return best

    def coefficient(self, mono: Monomial) -> Fraction:
        return self.terms.get(mono, Fraction(0))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Poly | Rational") -> "Poly":
        other = _coerce(other)
        if not other.terms:
            return self
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            out[mono] = out.get(mono, Fraction(0)) + coeff
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly | Rational") -> "Poly":
        return self + (-_coerce(other))

    def __rsub__(self, other: "Poly | Rational") -> "Poly":
        return _coerce(other) + (-self)

    def __mul__(self, other: "Poly | Rational") -> "Poly":
        other = _coerce(other)
        if not self.terms or not other.terms:
            return Poly({})
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                mono = _mono_mul(ma, mb)
                out[mono] = out.get(mono, Fraction(0)) + ca * cb
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"polynomial exponent must be a nonnegative int, got {exponent!r}")
        result = Poly.const(1)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- substitution ------------------------------------------------------

    def substitute(self, mapping: Mapping[str, "LinearForm"]) -> "Poly":
        """Simultaneously replace reserved variables by affine-linear forms.

        Only d/l/m/n may appear as keys; binding a parameter is an error.
        All replacements happen in one pass, so ``{l: m, m: l}`` swaps the
        two spectral variables instead of chaining.
        """
        for name in mapping:
            if name not in RESERVED:
                raise ValueError(
                    f"substitution target {name!r} is not one of the reserved variables {RESERVED}"
                )
        forms = {name: form.to_poly() for name, form in mapping.items()}
        out = Poly({})
        for mono, coeff in self.terms.items():
            term = Poly({(): coeff})
            for var, exp in mono:
                if var in forms:
                    term = term * forms[var] ** exp
                else:
                    term = term * Poly({((var, exp),): Fraction(1)})
            out = out + term
        return out

    def specialize(self, values: Mapping[str, Rational]) -> "Poly":
        """Replace parameter variables by exact rationals.

        Reserved variables are not allowed here; use ``substitute`` for them.
        """
        for name in values:
            if name in RESERVED:
                raise ValueError(f"{name!r} is a reserved variable, not a parameter")
        out: dict = {}
        for mono, coeff in self.terms.items():
            kept = []
            for var, exp in mono:
                if var in values:
                    coeff = coeff * Fraction(values[var]) ** exp
                else:
                    kept.append((var, exp))
            if coeff:
                key = tuple(kept)
                out[key] = out.get(key, Fraction(0)) + coeff
        return Poly(out)

    # -- formatting --------------------------------------------------------

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"


def _coerce(value: "Poly | Rational") -> Poly:
    if isinstance(value, Poly):
        return value
    if isinstance(value, (int, Fraction)):
        return Poly.const(value)
    raise TypeError(f"cannot treat {value!r} as a polynomial")


class LinearForm:
    """An affine-linear combination of variables, e.g. ``l + m`` or ``-l - d``.

    These are the only admissible substitution values for reserved
    variables.  They form a tiny vector space with + and - and rational
    scaling, which is all the bracket calculus needs for slot shifting.
    """

    __slots__ = ("coeffs", "constant")

    def __init__(self, coeffs: Mapping[str, Rational] | None = None, constant: Rational = 0):
        self.coeffs = {v: Fraction(c) for v, c in (coeffs or {}).items() if c != 0}
        self.constant = Fraction(constant)

    @staticmethod
    def var(name: str) -> "LinearForm":
        return LinearForm({name: 1})

    @staticmethod
    def const(value: Rational) -> "LinearForm":
        return LinearForm({}, value)

    def __add__(self, other: "LinearForm | Rational") -> "LinearForm":
        other = other if isinstance(other, LinearForm) else LinearForm.const(other)
        coeffs = dict(self.coeffs)
        for var, c in other.coeffs.items():
            coeffs[var] = coeffs.get(var, Fraction(0)) + c
        return LinearForm(coeffs, self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self) -> "LinearForm":
        return LinearForm({v: -c for v, c in self.coeffs.items()}, -self.constant)

    def __sub__(self, other: "LinearForm | Rational") -> "LinearForm":
        other = other if isinstance(other, LinearForm) else LinearForm.const(other)
        return self + (-other)

    def __rsub__(self, other: "LinearForm | Rational") -> "LinearForm":
        return (-self) + other

    def __mul__(self, scalar: Rational) -> "LinearForm":
        return LinearForm(
            {v: c * Fraction(scalar) for v, c in self.coeffs.items()},
            self.constant * Fraction(scalar),
        )

    __rmul__ = __mul__

    def to_poly(self) -> Poly:
        p = Poly.const(self.constant)
        for var, c in self.coeffs.items():
            p = p + Poly({((var, 1),): c})
        return p

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearForm):
            return NotImplemented
        return self.coeffs == other.coeffs and self.constant == other.constant

    def __hash__(self):
        return hash((frozenset(self.coeffs.items()), self.constant))

    def __str__(self) -> str:
        return format_poly(self.to_poly())

    def __repr__(self) -> str:
        return f"LinearForm({self})"


# Shorthands used throughout the package.
D = LinearForm.var(TRANSLATION)
LAM = LinearForm.var("l")
MU = LinearForm.var("m")
NU = LinearForm.var("n")


# ---------------------------------------------------------------------------
# Canonical formatting
# ---------------------------------------------------------------------------

def _var_sort_key(name: str):
    # Reserved variables first (d, l, m, n in that order), then parameters
    # alphabetically.  This fixes the graded-lex order used everywhere.
    if name in RESERVED:
        return (0, RESERVED.index(name))
    return (1, name)


def _mono_sort_key(mono: Monomial, var_order: dict):
    exps = [0] * len(var_order)
    for var, exp in mono:
        exps[var_order[var]] = exp
    # graded-lex, largest first: compare by total degree then exponent vector
    return (_mono_degree(mono), tuple(exps))


def _format_coeff(c: Fraction) -> str:
    return str(c)  # Fraction renders as "a/b" or "a"


def format_poly(p: Poly) -> str:
    """Canonical text: graded-lex monomial order, explicit ``*``, ``^`` powers.

    ``format_poly`` and ``parse_poly`` are mutually inverse on canonical
    text; parsing any output reproduces the polynomial exactly.
    """
    if not p.terms:
        return "0"
    names = sorted(p.variables(), key=_var_sort_key)
    var_order = {v: i for i, v in enumerate(names)}
    monos = sorted(p.terms, key=lambda m: _mono_sort_key(m, var_order), reverse=True)
    pieces = []
    for mono in monos:
        coeff = p.terms[mono]
        factors = []
        for var, exp in sorted(mono, key=lambda ve: _var_sort_key(ve[0])):
            factors.append(var if exp == 1 else f"{var}^{exp}")
        mag = abs(coeff)
        if not factors:
            body = _format_coeff(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coeff(mag)] + factors)
        if not pieces:
            pieces.append(body if coeff > 0 else f"-{body}")
        else:
            pieces.append(f"+ {body}" if coeff > 0 else f"- {body}")
    return " ".join(pieces)


# ---------------------------------------------------------------------------
# Parsing: recursive descent over a hand-rolled token stream
#
#   expr   := term (('+' | '-') term)*
#   term   := factor ('*' factor)*
#   factor := atom ('^' uint)?
#   atom   := ident | int | int '/' uint | '(' expr ')' | '-' atom
# ---------------------------------------------------------------------------

_TOKEN_CHARS = set("+-*/^()")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, str, int]] = []  # (kind, value, pos)
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch in _TOKEN_CHARS:
                self.items.append(("op", ch, i))
                i += 1
            elif ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                self.items.append(("int", text[i:j], i))
                i = j
            elif ch.isalpha() or ch == "_":
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.items.append(("ident", text[i:j], i))
                i = j
            else:
                raise ParseError(f"unexpected character {ch!r}", text, i)
        self.index = 0

    def peek(self) -> tuple[str, str, int]:
        if self.index < len(self.items):
            return self.items[self.index]
        return ("end", "", len(self.text))

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        self.index += 1
        return tok

    def expect(self, value: str) -> None:
        kind, got, pos = self.next()
        if kind == "end" or got != value:
            raise ParseError(f"expected {value!r}", self.text, pos)


class _PolyParser:
    """Parses expressions over a fixed set of allowed identifiers.

    ``atom_hook`` turns an identifier into a value; the generic arithmetic
    layer on top is shared between plain polynomials and module elements.
    """

    def __init__(self, text: str, atom_hook):
        self.toks = _Tokens(text)
        self.atom_hook = atom_hook

    def parse(self):
        value = self.expr()
        kind, got, pos = self.toks.peek()
        if kind != "end":
            raise ParseError(f"trailing input {got!r}", self.toks.text, pos)
        return value

    def expr(self):
        value = self.term()
        while True:
            kind, got, _ = self.toks.peek()
            if kind == "op" and got in "+-":
                self.toks.next()
                rhs = self.term()
                value = value + rhs if got == "+" else value - rhs
            else:
                return value

    def term(self):
        value = self.factor()
        while True:
            kind, got, _ = self.toks.peek()
            if kind == "op" and got == "*":
                self.toks.next()
                value = value * self.factor()
            else:
                return value

    def factor(self):
        value = self.atom()
        kind, got, pos = self.toks.peek()
        if kind == "op" and got == "^":
            self.toks.next()
            kind, exp, pos = self.toks.next()
            if kind != "int":
                raise ParseError("exponent must be a nonnegative integer", self.toks.text, pos)
            value = value ** int(exp)
        return value

    def atom(self):
        kind, got, pos = self.toks.next()
        if kind == "op" and got == "-":
            # Negation binds looser than '^' so that canonical output like
            # "-b^2" reads back as -(b^2).
            return -self.factor()
        if kind == "op" and got == "(":
            value = self.expr()
            self.toks.expect(")")
            return value
        if kind == "int":
            numerator = int(got)
            kind2, got2, _ = self.toks.peek()
            if kind2 == "op" and got2 == "/":
                self.toks.next()
                kind3, got3, pos3 = self.toks.next()
                if kind3 != "int":
                    raise ParseError("denominator must be a positive integer", self.toks.text, pos3)
                if int(got3) == 0:
                    raise ParseError("zero denominator", self.toks.text, pos3)
                return self.atom_value(Fraction(numerator, int(got3)))
            return self.atom_value(Fraction(numerator))
        if kind == "ident":
            return self.atom_hook(got, pos, self.toks.text)
        raise ParseError("expected a value", self.toks.text, pos)

    def atom_value(self, q: Fraction):
        # Overridden by the module-element evaluator; for plain polynomials
        # a rational is just a constant.
        return Poly.const(q)


def parse_poly(text: str, params: Iterable[str] = ()) -> Poly:
    """Parse polynomial text over d/l/m/n and the declared parameter names.

    Any other identifier (including basis names) is rejected with a
    position-carrying ``ParseError``.
    """
    allowed = set(RESERVED) | set(params)

    def atom_hook(name: str, pos: int, source: str):
        if name not in allowed:
            raise ParseError(f"unknown identifier {name!r}", source, pos)
        return Poly.var(name)

    return _PolyParser(text, atom_hook).parse()


_RATIONAL_RE = re.compile(r"[+-]?[0-9]+(/[0-9]+)?\Z")


def parse_rational(text: str) -> Fraction:
    """Parse an exact rational like ``3`` or ``-5/2`` (floats are rejected)."""
    cleaned = text.strip()
    if not _RATIONAL_RE.fullmatch(cleaned):
        raise ParseError("not an exact rational (want int or int/uint)", text, 0)
    try:
        return Fraction(cleaned)
    except ZeroDivisionError:
        raise ParseError("zero denominator", text, 0) from None


def iter_monomials(p: Poly) -> Iterator[tuple[Monomial, Fraction]]:
    """Deterministic iteration over terms, graded-lex descending."""
    names = sorted(p.variables(), key=_var_sort_key)
    var_order = {v: i for i, v in enumerate(names)}
    for mono in sorted(p.terms, key=lambda mn: _mono_sort_key(mn, var_order), reverse=True):
        yield mono, p.terms[mono]
