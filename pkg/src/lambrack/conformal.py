"""Conformal algebras over ℂ[∂] presented by structure tables.

An algebra is a free module over the polynomial ring in the translation
generator ``d``, with an ordered basis and a bracket table giving
``[e_i l e_j]`` as a module element whose coefficients live in (l, d) plus
declared parameters.  Everything else (brackets of arbitrary elements, Jacobi
and skew residuals, conformal linear maps and their derivation laws) is
computed on demand from the table through the two sesquilinearity rules:

    [d a  s  b] = -s [a s b]          [a  s  d b] = (s + d)[a s b]

Conformal linear maps come in two chiralities.  A left map obeys
``M_x(d u) = -x M_x(u)`` and a right map ``M_x(d u) = (d + x) M_x(u)``; both
are stored tablewise on basis elements with slot variable ``l`` and evaluated
by ``apply_cmap``, which also handles the nested slot shifts that composed
expressions need.

Checks return a ``Report``: one item per (condition, argument tuple) carrying
the exact residual.  A report passes iff every residual is exactly zero.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .poly import (
    D,
    LAM,
    MU,
    LinearForm,
    ParseError,
    Poly,
    RESERVED,
    SPECTRAL,
    _PolyParser,
    format_poly,
)

Slot = Union[str, LinearForm]


def _slot_form(s: Slot) -> LinearForm:
    if isinstance(s, LinearForm):
        return s
    if s in SPECTRAL:
        return LinearForm.var(s)
    raise ValueError(f"{s!r} is not a spectral variable (want one of {SPECTRAL})")


@dataclass(frozen=True)
class Basis:
    """Ordered basis names plus the parameter identifiers in scope."""

    names: tuple
    params: tuple = ()

    def __init__(self, names: Iterable[str], params: Iterable[str] = ()):
        object.__setattr__(self, "names", tuple(names))
        object.__setattr__(self, "params", tuple(params))
        seen = set()
        for name in self.names + self.params:
            if not name or not name.isidentifier():
                raise ValueError(f"invalid name {name!r}")
            if name in RESERVED:
                raise ValueError(f"{name!r} is a reserved variable name")
            if name in seen:
                raise ValueError(f"duplicate name {name!r}")
            seen.add(name)

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def index(self, name: str) -> int:
        return self.names.index(name)


class ModElem:
    """Finite sum of basis elements with polynomial coefficients.

    Absent components are zero; the representation drops zero polynomials so
    equality is plain dict equality.
    """

    __slots__ = ("components",)

    def __init__(self, components: Mapping[str, Poly]):
        self.components = {n: p for n, p in components.items() if not p.is_zero()}

    @staticmethod
    def zero() -> "ModElem":
        return ModElem({})

    @staticmethod
    def unit(name: str) -> "ModElem":
        return ModElem({name: Poly.const(1)})

    def is_zero(self) -> bool:
        return not self.components

    def component(self, name: str) -> Poly:
        return self.components.get(name, Poly.zero())

    def support(self) -> set:
        return set(self.components)

    def variables(self) -> set:
        out = set()
        for p in self.components.values():
            out |= p.variables()
        return out

    def project(self, names) -> "ModElem":
        """The part supported on the given names."""
        keep = set(names)
        return ModElem({n: p for n, p in self.components.items() if n in keep})

    def __add__(self, other: "ModElem") -> "ModElem":
        out = dict(self.components)
        for name, p in other.components.items():
            out[name] = out.get(name, Poly.zero()) + p
        return ModElem(out)

    def __neg__(self) -> "ModElem":
        return ModElem({n: -p for n, p in self.components.items()})

    def __sub__(self, other: "ModElem") -> "ModElem":
        return self + (-other)

    def scale(self, factor: "Poly | int | Fraction") -> "ModElem":
        return ModElem({n: p * factor for n, p in self.components.items()})

    def substitute(self, mapping: Mapping[str, LinearForm]) -> "ModElem":
        return ModElem({n: p.substitute(mapping) for n, p in self.components.items()})

    def specialize(self, values) -> "ModElem":
        return ModElem({n: p.specialize(values) for n, p in self.components.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModElem):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(frozenset(self.components.items()))

    def __str__(self) -> str:
        return format_modelem(self)

    def __repr__(self) -> str:
        return f"ModElem({format_modelem(self)!r})"


class ConformalAlgebra:
    """A basis together with the bracket table on basis pairs.

    Table entries are module elements in (l, d) and declared parameters;
    missing pairs are zero brackets.
    """

    def __init__(self, basis: Basis, table: Mapping[tuple, ModElem]):
        self.basis = basis
        allowed = {"l", "d"} | set(basis.params)
        clean = {}
        for (i, j), elem in table.items():
            if i not in basis.names or j not in basis.names:
                raise ValueError(f"table key ({i!r}, {j!r}) is not a basis pair")
            extra = elem.variables() - allowed
            if extra:
                raise ValueError(
                    f"bracket [{i} l {j}] uses disallowed variables {sorted(extra)}"
                )
            if elem.support() - set(basis.names):
                raise ValueError(
                    f"bracket [{i} l {j}] leaves the basis: {sorted(elem.support() - set(basis.names))}"
                )
            if not elem.is_zero():
                clean[(i, j)] = elem
        self.table = clean

    def bracket(self, i: str, j: str) -> ModElem:
        return self.table.get((i, j), ModElem.zero())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConformalAlgebra):
            return NotImplemented
        return self.basis == other.basis and self.table == other.table

    def __repr__(self):
        return f"ConformalAlgebra(names={self.basis.names!r}, entries={len(self.table)})"


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def _natural_key(condition: str):
    return tuple(int(part) if part.isdigit() else part for part in re.split(r"(\d+)", condition))


@dataclass(frozen=True)
class ReportItem:
    condition: str
    args: tuple
    residual: object  # ModElem or Poly

    @property
    def passed(self) -> bool:
        return self.residual.is_zero()

    def residual_text(self) -> str:
        if isinstance(self.residual, ModElem):
            return format_modelem(self.residual)
        return format_poly(self.residual)


class Report:
    """Outcome of a structure check: all residuals, deterministically ordered."""

    def __init__(self, items: Iterable[ReportItem]):
        self.items = sorted(items, key=lambda it: (_natural_key(it.condition), it.args))

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def failures(self) -> list:
        return [item for item in self.items if not item.passed]

    def first_failure(self) -> "ReportItem | None":
        for item in self.items:
            if not item.passed:
                return item
        return None

    def item(self, condition: str, args: tuple) -> ReportItem:
        for it in self.items:
            if it.condition == condition and it.args == tuple(args):
                return it
        raise KeyError(f"no report item ({condition!r}, {args!r})")

    @staticmethod
    def combine(*reports: "Report") -> "Report":
        items = []
        for rep in reports:
            items.extend(rep.items)
        return Report(items)

    def __repr__(self):
        return f"Report({self.verdict}, {len(self.items)} items)"


# ---------------------------------------------------------------------------
# Bracket extension and axiom checkers
# ---------------------------------------------------------------------------

def extend_bracket(A: ConformalAlgebra, a: ModElem, b: ModElem, s: Slot) -> ModElem:
    """[a s b]: the sesquilinear extension of the table to whole elements.

    Left coefficients are evaluated at d -> -s, right coefficients at
    d -> s + d, and table entries have their slot l relabeled to s.  The slot
    may be a spectral variable name or any affine-linear form of reserved
    variables (as nested Jacobi terms require).
    """
    form = _slot_form(s)
    unknown = (a.support() | b.support()) - set(A.basis.names)
    if unknown:
        raise ValueError(f"unknown basis names {sorted(unknown)}")
    out = ModElem.zero()
    for i, f in a.components.items():
        left = f.substitute({"d": -form})
        for j, g in b.components.items():
            entry = A.table.get((i, j))
            if entry is None:
                continue
            scale = left * g.substitute({"d": form + D})
            out = out + entry.substitute({"l": form}).scale(scale)
    return out


def jacobiator(A: ConformalAlgebra, a: ModElem, b: ModElem, c: ModElem) -> ModElem:
    """[a l [b m c]] - [[a l b] (l+m) c] - [b m [a l c]] in variables (l, m, d).

    The middle term writes [a l b] as sum P_k(l, d) e_k and evaluates each
    coefficient at d -> -l-m before bracketing e_k against c at slot l+m.
    """
    lhs = extend_bracket(A, a, extend_bracket(A, b, c, MU), LAM)
    ab = extend_bracket(A, a, b, LAM)
    mid = ModElem.zero()
    for k, coeff in ab.components.items():
        head = coeff.substitute({"d": -LAM - MU})
        mid = mid + extend_bracket(A, ModElem.unit(k), c, LAM + MU).scale(head)
    rhs = extend_bracket(A, b, extend_bracket(A, a, c, LAM), MU)
    return lhs - mid - rhs


def check_leibniz(A: ConformalAlgebra) -> Report:
    """Jacobi identity residuals over all basis triples."""
    items = []
    for i in A.basis.names:
        for j in A.basis.names:
            for k in A.basis.names:
                res = jacobiator(A, ModElem.unit(i), ModElem.unit(j), ModElem.unit(k))
                items.append(ReportItem("jacobi", (i, j, k), res))
    return Report(items)


def check_skew(A: ConformalAlgebra) -> Report:
    """Residuals of [e_i l e_j] + ([e_j m e_i] with m -> -l-d) over all pairs."""
    items = []
    for i in A.basis.names:
        for j in A.basis.names:
            res = A.bracket(i, j) + A.bracket(j, i).substitute({"l": -LAM - D})
            items.append(ReportItem("skew", (i, j), res))
    return Report(items)


def check_lie(A: ConformalAlgebra) -> Report:
    """Leibniz plus skew symmetry."""
    return Report.combine(check_leibniz(A), check_skew(A))


# ---------------------------------------------------------------------------
# Conformal linear maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CMap:
    """Tablewise conformal linear map into a module with basis ``codomain``.

    The table gives the image of each domain basis element as a module
    element in the slot variable ``l`` and the codomain translation ``d``.
    """

    chirality: str  # "left" | "right"
    domain: Basis
    codomain: Basis
    table: Mapping[str, ModElem] = field(default_factory=dict)

    def __post_init__(self):
        if self.chirality not in ("left", "right"):
            raise ValueError(f"chirality must be 'left' or 'right', got {self.chirality!r}")
        clean = {}
        for name, elem in self.table.items():
            if name not in self.domain.names:
                raise ValueError(f"table key {name!r} is not a domain basis name")
            if elem.support() - set(self.codomain.names):
                raise ValueError(f"image of {name!r} leaves the codomain basis")
            if not elem.is_zero():
                clean[name] = elem
        object.__setattr__(self, "table", clean)

    def image(self, name: str) -> ModElem:
        return self.table.get(name, ModElem.zero())

    def __eq__(self, other):
        if not isinstance(other, CMap):
            return NotImplemented
        return (
            self.chirality == other.chirality
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self.table == other.table
        )


@dataclass(frozen=True)
class ScalarCMap:
    """Conformal linear map with scalar codomain ℂ[slot, d]."""

    chirality: str
    domain: Basis
    table: Mapping[str, Poly] = field(default_factory=dict)

    def __post_init__(self):
        if self.chirality not in ("left", "right"):
            raise ValueError(f"chirality must be 'left' or 'right', got {self.chirality!r}")
        clean = {}
        for name, p in self.table.items():
            if name not in self.domain.names:
                raise ValueError(f"table key {name!r} is not a domain basis name")
            if not p.is_zero():
                clean[name] = p
        object.__setattr__(self, "table", clean)

    def image(self, name: str) -> Poly:
        return self.table.get(name, Poly.zero())

    def is_zero(self) -> bool:
        return not self.table


def apply_cmap(M, e: ModElem, s: Slot, dslot: LinearForm = D):
    """Evaluate a conformal linear map at slot ``s``.

    Coefficients of ``e`` follow the chirality rule (left: d -> -s, right:
    d -> s + dslot); table entries are then relabeled slot -> s and second
    slot d -> dslot simultaneously.  Passing a non-default ``dslot`` realizes
    composite slot shifts such as evaluating the second argument at l + d.
    Returns a ModElem for a CMap and a Poly for a ScalarCMap.
    """
    form = _slot_form(s)
    unknown = e.support() - set(M.domain.names)
    if unknown:
        raise ValueError(f"unknown basis names {sorted(unknown)}")
    scalar = isinstance(M, ScalarCMap)
    out = Poly.zero() if scalar else ModElem.zero()
    for name, f in e.components.items():
        if M.chirality == "left":
            factor = f.substitute({"d": -form})
        else:
            factor = f.substitute({"d": form + dslot})
        entry = M.image(name)
        if scalar:
            out = out + entry.substitute({"l": form, "d": dslot}) * factor
        else:
            out = out + entry.substitute({"l": form, "d": dslot}).scale(factor)
    return out


def check_derivation(A: ConformalAlgebra, M: CMap) -> Report:
    """Residuals of the conformal derivation law for a right map.

    For each basis pair: M_l([a m b]) - [(M_l a) (l+m) b] - [a m (M_l b)].
    """
    items = []
    for i in A.basis.names:
        for j in A.basis.names:
            a, b = ModElem.unit(i), ModElem.unit(j)
            lhs = apply_cmap(M, extend_bracket(A, a, b, MU), LAM)
            mid = extend_bracket(A, apply_cmap(M, a, LAM), b, LAM + MU)
            rhs = extend_bracket(A, a, apply_cmap(M, b, LAM), MU)
            items.append(ReportItem("derivation", (i, j), lhs - mid - rhs))
    return Report(items)


def check_anti_derivation(A: ConformalAlgebra, M: CMap) -> Report:
    """Residuals of the conformal anti-derivation law for a left map.

    For each basis pair: M_(l+m)([a l b]) - [a l (M_m b)] + [b m (M_l a)].
    """
    items = []
    for i in A.basis.names:
        for j in A.basis.names:
            a, b = ModElem.unit(i), ModElem.unit(j)
            lhs = apply_cmap(M, extend_bracket(A, a, b, LAM), LAM + MU)
            first = extend_bracket(A, a, apply_cmap(M, b, MU), LAM)
            second = extend_bracket(A, b, apply_cmap(M, a, LAM), MU)
            items.append(ReportItem("anti-derivation", (i, j), lhs - first + second))
    return Report(items)


def _require_translation_only(a: ModElem) -> None:
    spectral = a.variables() & set(SPECTRAL)
    if spectral:
        raise ValueError(f"element must be free of spectral variables, found {sorted(spectral)}")


def inner_derivation(A: ConformalAlgebra, a: ModElem) -> CMap:
    """The right conformal map b -> [a l b]."""
    _require_translation_only(a)
    table = {j: extend_bracket(A, a, ModElem.unit(j), LAM) for j in A.basis.names}
    return CMap("right", A.basis, A.basis, table)


def inner_anti_derivation(A: ConformalAlgebra, a: ModElem) -> CMap:
    """The left conformal map b -> [b l a]."""
    _require_translation_only(a)
    table = {j: extend_bracket(A, ModElem.unit(j), a, LAM) for j in A.basis.names}
    return CMap("left", A.basis, A.basis, table)


# ---------------------------------------------------------------------------
# Module element parsing and formatting
# ---------------------------------------------------------------------------

class _Mixed:
    """Scalar-plus-element value used while parsing module element text.

    Multiplication treats basis elements as square-zero: a product of two
    element parts is rejected, everything else distributes.
    """

    __slots__ = ("poly", "elem")

    def __init__(self, poly: Poly, elem: ModElem):
        self.poly = poly
        self.elem = elem

    def __add__(self, other: "_Mixed") -> "_Mixed":
        return _Mixed(self.poly + other.poly, self.elem + other.elem)

    def __sub__(self, other: "_Mixed") -> "_Mixed":
        return self + (-other)

    def __neg__(self) -> "_Mixed":
        return _Mixed(-self.poly, -self.elem)

    def __mul__(self, other: "_Mixed") -> "_Mixed":
        if not self.elem.is_zero() and not other.elem.is_zero():
            raise ValueError("cannot multiply two basis elements")
        elem = other.elem.scale(self.poly) + self.elem.scale(other.poly)
        return _Mixed(self.poly * other.poly, elem)

    def __pow__(self, exponent: int) -> "_Mixed":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"exponent must be a nonnegative int, got {exponent!r}")
        result = _Mixed(Poly.const(1), ModElem.zero())
        for _ in range(exponent):
            result = result * self
        return result


class _ElemParser(_PolyParser):
    def atom_value(self, q: Fraction) -> _Mixed:
        return _Mixed(Poly.const(q), ModElem.zero())


def parse_modelem(text: str, basis: Basis) -> ModElem:
    """Parse module element text like ``(d+2*l)*L + 3*W`` over a basis.

    Identifiers may be reserved variables, declared parameters, or basis
    names; each additive term must carry exactly one basis factor.
    """
    scalars = set(RESERVED) | set(basis.params)

    def atom_hook(name: str, pos: int, source: str) -> _Mixed:
        if name in basis.names:
            return _Mixed(Poly.zero(), ModElem.unit(name))
        if name in scalars:
            return _Mixed(Poly.var(name), ModElem.zero())
        raise ParseError(f"unknown identifier {name!r}", source, pos)

    try:
        value = _ElemParser(text, atom_hook).parse()
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc), text, 0) from None
    if not value.poly.is_zero():
        raise ParseError("scalar term without a basis factor", text, 0)
    return value.elem


def format_modelem(e: ModElem, order: Iterable[str] = ()) -> str:
    """Canonical text for a module element; inverse of parse_modelem.

    Components follow the given basis order (names outside it come last,
    alphabetically).  Single-monomial coefficients are written inline, others
    in parentheses with any overall minus pulled out front.
    """
    listed = [n for n in order if n in e.components]
    listed += sorted(set(e.components) - set(listed))
    if not listed:
        return "0"
    pieces = []
    for name in listed:
        p = e.components[name]
        negative, body = _coefficient_body(p, name)
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(pieces)


def _coefficient_body(p: Poly, name: str) -> tuple:
    """Render coefficient*name with the sign split off, as (negative, text)."""
    if len(p.terms) == 1:
        text = format_poly(p)
        if text == "1":
            return False, name
        if text == "-1":
            return True, name
        if text.startswith("-"):
            return True, f"{text[1:]}*{name}"
        return False, f"{text}*{name}"
    text = format_poly(p)
    if text.startswith("-"):
        return True, f"({format_poly(-p)})*{name}"
    return False, f"({text})*{name}"
