"""Extending datums and the unified product on R ⊕ Q.

An extending datum packs six conformal bilinear maps between a base algebra R
and a module Q: the two cross actions of R on Q (``rharpoon``: R×Q→Q,
``ltri``: Q×R→Q), the two cross actions of Q on R (``lharpoon``: R×Q→R,
``rtri``: Q×R→R), a pairing ``f``: Q×Q→R, and a bracket ``qbr``: Q×Q→Q.
``build_unified`` assembles the bracket on the concatenated basis from these
tables; the datum is a valid extending structure exactly when that algebra
satisfies the Jacobi identity, which ``check_extending_structure`` tests
through the equivalent flat list of conditions L1 through L14.  The
equivalence of the two routes is itself a tested law, so a transcription slip
in the condition list cannot hide.

Every bilinear table extends to whole elements by the same sesquilinearity
rules as the algebra bracket; all composite slot shifts (evaluating a
coefficient at -l-m, bracketing at slot l+m, and so on) go through
``BilinearMap.apply`` and ``extend_bracket``.

``transport`` rewrites a datum along a pair (u, v) where u: Q→R and v is an
invertible translation-compatible map of Q; the unified products of a datum
and its transport are isomorphic via (a, x) ↦ (a + u(x), v(x)), which
``check_morphism`` verifies directly.

``check_twisted``, ``check_crossed``, and ``check_bicrossed`` are the
restricted condition systems for datums where some tables vanish; each agrees
with the full checker on datums of its shape.  The bicrossed list includes
L7, which the compatibility conditions of the other maps do not imply: an
action of R on Q that feeds values into a nonzero Q bracket can break the
Jacobi identity even when both module structures and the remaining mixed
conditions hold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .conformal import (
    Basis,
    ConformalAlgebra,
    ModElem,
    Report,
    ReportItem,
    check_leibniz,
    extend_bracket,
    jacobiator,
)
from .poly import LAM, MU, LinearForm, Poly, SPECTRAL

Slot = "str | LinearForm"


def _slot_form(s) -> LinearForm:
    if isinstance(s, LinearForm):
        return s
    if s in SPECTRAL:
        return LinearForm.var(s)
    raise ValueError(f"{s!r} is not a spectral variable")


@dataclass(frozen=True, eq=True)
class BilinearMap:
    """A conformal bilinear table between bases, extended on demand.

    The stored entries give the value on basis pairs as module elements over
    the codomain in (l, d).  ``apply`` extends to whole elements with the
    rules: first-argument coefficients are evaluated at d -> -s, second
    argument at d -> s + d, and entries have their slot relabeled l -> s.
    """

    left: Basis
    right: Basis
    codomain: Basis
    table: Mapping[tuple, ModElem] = field(default_factory=dict)

    def __post_init__(self):
        allowed = {"l", "d"} | set(self.codomain.params)
        clean = {}
        for (i, j), elem in self.table.items():
            if i not in self.left.names or j not in self.right.names:
                raise ValueError(f"table key ({i!r}, {j!r}) is not a basis pair")
            if elem.support() - set(self.codomain.names):
                raise ValueError(f"entry at ({i!r}, {j!r}) leaves the codomain basis")
            extra = elem.variables() - allowed
            if extra:
                raise ValueError(
                    f"entry at ({i!r}, {j!r}) uses disallowed variables {sorted(extra)}"
                )
            if not elem.is_zero():
                clean[(i, j)] = elem
        object.__setattr__(self, "table", clean)

    def is_zero(self) -> bool:
        return not self.table

    def entry(self, i: str, j: str) -> ModElem:
        return self.table.get((i, j), ModElem.zero())

    def apply(self, u: ModElem, v: ModElem, s) -> ModElem:
        form = _slot_form(s)
        if u.support() - set(self.left.names):
            raise ValueError(f"unknown first-argument names {sorted(u.support() - set(self.left.names))}")
        if v.support() - set(self.right.names):
            raise ValueError(f"unknown second-argument names {sorted(v.support() - set(self.right.names))}")
        out = ModElem.zero()
        for i, fcoeff in u.components.items():
            head = fcoeff.substitute({"d": -form})
            for j, gcoeff in v.components.items():
                entry = self.table.get((i, j))
                if entry is None:
                    continue
                scale = head * gcoeff.substitute({"d": form + LinearForm.var("d")})
                out = out + entry.substitute({"l": form}).scale(scale)
        return out


def _as_table(raw, left: Basis, right: Basis, codomain: Basis) -> BilinearMap:
    if isinstance(raw, BilinearMap):
        return raw
    return BilinearMap(left, right, codomain, dict(raw or {}))


@dataclass(frozen=True, eq=True)
class ExtendingDatum:
    """The six cross tables between a base algebra R and a module basis Q."""

    R: ConformalAlgebra
    Q: Basis
    lharpoon: BilinearMap  # R x Q -> R
    rharpoon: BilinearMap  # R x Q -> Q
    ltri: BilinearMap      # Q x R -> Q
    rtri: BilinearMap      # Q x R -> R
    f: BilinearMap         # Q x Q -> R
    qbr: BilinearMap       # Q x Q -> Q

    def __init__(self, R, Q, lharpoon=None, rharpoon=None, ltri=None, rtri=None,
                 f=None, qbr=None):
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "Q", Q)
        rb = R.basis
        object.__setattr__(self, "lharpoon", _as_table(lharpoon, rb, Q, rb))
        object.__setattr__(self, "rharpoon", _as_table(rharpoon, rb, Q, Q))
        object.__setattr__(self, "ltri", _as_table(ltri, Q, rb, Q))
        object.__setattr__(self, "rtri", _as_table(rtri, Q, rb, rb))
        object.__setattr__(self, "f", _as_table(f, Q, Q, rb))
        object.__setattr__(self, "qbr", _as_table(qbr, Q, Q, Q))

    def q_algebra(self) -> ConformalAlgebra:
        """Q with the qbr table as its own bracket."""
        return ConformalAlgebra(self.Q, dict(self.qbr.table))


# ---------------------------------------------------------------------------
# The flat condition list
# ---------------------------------------------------------------------------

class _Ctx:
    """Bound accessors for the datum's tables, for condition transcription."""

    def __init__(self, om: ExtendingDatum):
        self.om = om

    def br(self, u, v, s):
        return extend_bracket(self.om.R, u, v, s)

    def lh(self, u, v, s):
        return self.om.lharpoon.apply(u, v, s)

    def rh(self, u, v, s):
        return self.om.rharpoon.apply(u, v, s)

    def lt(self, u, v, s):
        return self.om.ltri.apply(u, v, s)

    def rt(self, u, v, s):
        return self.om.rtri.apply(u, v, s)

    def ff(self, u, v, s):
        return self.om.f.apply(u, v, s)

    def qb(self, u, v, s):
        return self.om.qbr.apply(u, v, s)


def _L1(c, a, b, x):
    return (c.rh(c.br(a, b, LAM), x, LAM + MU)
            - c.rh(a, c.rh(b, x, MU), LAM)
            + c.rh(b, c.rh(a, x, LAM), MU))


def _L2(c, a, b, x):
    return (c.lh(c.br(a, b, LAM), x, LAM + MU)
            - c.br(a, c.lh(b, x, MU), LAM)
            - c.lh(a, c.rh(b, x, MU), LAM)
            + c.br(b, c.lh(a, x, LAM), MU)
            + c.lh(b, c.rh(a, x, LAM), MU))


def _L3(c, a, b, x):
    return (c.lt(x, c.br(a, b, LAM), MU)
            - c.rh(a, c.lt(x, b, MU), LAM)
            + c.lt(c.rh(a, x, LAM), b, LAM + MU))


def _L4(c, a, b, x):
    return (c.rt(x, c.br(a, b, LAM), MU)
            - c.br(a, c.rt(x, b, MU), LAM)
            - c.lh(a, c.lt(x, b, MU), LAM)
            + c.br(c.lh(a, x, LAM), b, LAM + MU)
            + c.rt(c.rh(a, x, LAM), b, LAM + MU))


def _L5(c, a, b, x):
    return (c.br(c.rt(x, a, MU), b, LAM + MU)
            + c.rt(c.lt(x, a, MU), b, LAM + MU)
            + c.br(c.lh(a, x, LAM), b, LAM + MU)
            + c.rt(c.rh(a, x, LAM), b, LAM + MU))


def _L6(c, a, b, x):
    return (c.lt(c.lt(x, a, MU), b, LAM + MU)
            + c.lt(c.rh(a, x, LAM), b, LAM + MU))


def _L7(c, a, x, y):
    return (c.rh(a, c.qb(x, y, MU), LAM)
            - c.qb(c.rh(a, x, LAM), y, LAM + MU)
            - c.lt(x, c.lh(a, y, LAM), MU)
            - c.qb(x, c.rh(a, y, LAM), MU)
            - c.rh(c.lh(a, x, LAM), y, LAM + MU))


def _L8(c, a, x, y):
    return (c.lh(a, c.qb(x, y, MU), LAM)
            - c.lh(c.lh(a, x, LAM), y, LAM + MU)
            - c.ff(c.rh(a, x, LAM), y, LAM + MU)
            - c.rt(x, c.lh(a, y, LAM), MU)
            - c.ff(x, c.rh(a, y, LAM), MU)
            + c.br(a, c.ff(x, y, MU), LAM))


def _L9(c, a, x, y):
    return (c.lh(c.rt(x, a, MU), y, LAM + MU)
            + c.ff(c.lt(x, a, MU), y, LAM + MU)
            + c.lh(c.lh(a, x, LAM), y, LAM + MU)
            + c.ff(c.rh(a, x, LAM), y, LAM + MU))


def _L10(c, a, x, y):
    return (c.qb(c.rh(a, x, LAM), y, LAM + MU)
            + c.rh(c.lh(a, x, LAM), y, LAM + MU)
            + c.rh(c.rt(x, a, MU), y, LAM + MU)
            + c.qb(c.lt(x, a, MU), y, LAM + MU))


def _L11(c, x, y, a):
    return (c.rt(c.qb(x, y, LAM), a, LAM + MU)
            - c.rt(x, c.rt(y, a, MU), LAM)
            - c.ff(x, c.lt(y, a, MU), LAM)
            + c.br(c.ff(x, y, LAM), a, LAM + MU)
            + c.rt(y, c.rt(x, a, LAM), MU)
            + c.ff(y, c.lt(x, a, LAM), MU))


def _L12(c, x, y, a):
    return (c.lt(c.qb(x, y, LAM), a, LAM + MU)
            - c.lt(x, c.rt(y, a, MU), LAM)
            - c.qb(x, c.lt(y, a, MU), LAM)
            + c.lt(y, c.rt(x, a, LAM), MU)
            + c.qb(y, c.lt(x, a, LAM), MU))


def _L13(c, x, y, z):
    return (c.rt(x, c.ff(y, z, MU), LAM)
            - c.lh(c.ff(x, y, LAM), z, LAM + MU)
            - c.ff(c.qb(x, y, LAM), z, LAM + MU)
            - c.rt(y, c.ff(x, z, LAM), MU)
            - c.ff(y, c.qb(x, z, LAM), MU)
            + c.ff(x, c.qb(y, z, MU), LAM))


def _L14(c, x, y, z):
    return (c.lt(x, c.ff(y, z, MU), LAM)
            - c.rh(c.ff(x, y, LAM), z, LAM + MU)
            - c.lt(y, c.ff(x, z, LAM), MU)
            - c.qb(c.qb(x, y, LAM), z, LAM + MU)
            - c.qb(y, c.qb(x, z, LAM), MU)
            + c.qb(x, c.qb(y, z, MU), LAM))


# condition id -> (argument domains as R/Q letters, residual function)
_CONDITIONS = {
    "L1": ("RRQ", _L1),
    "L2": ("RRQ", _L2),
    "L3": ("RRQ", _L3),
    "L4": ("RRQ", _L4),
    "L5": ("RRQ", _L5),
    "L6": ("RRQ", _L6),
    "L7": ("RQQ", _L7),
    "L8": ("RQQ", _L8),
    "L9": ("RQQ", _L9),
    "L10": ("RQQ", _L10),
    "L11": ("QQR", _L11),
    "L12": ("QQR", _L12),
    "L13": ("QQQ", _L13),
    "L14": ("QQQ", _L14),
}


def _condition_items(om: ExtendingDatum, names: Iterable[str]) -> list:
    ctx = _Ctx(om)
    pools = {"R": om.R.basis.names, "Q": om.Q.names}
    items = []
    for cond in names:
        domains, func = _CONDITIONS[cond]
        for i in pools[domains[0]]:
            for j in pools[domains[1]]:
                for k in pools[domains[2]]:
                    res = func(ctx, ModElem.unit(i), ModElem.unit(j), ModElem.unit(k))
                    items.append(ReportItem(cond, (i, j, k), res))
    return items


def check_extending_structure(om: ExtendingDatum) -> Report:
    """All fourteen compatibility conditions over all basis tuples.

    Assumes R itself satisfies the Jacobi identity; the conditions only test
    the cross tables.  Passing is equivalent to build_unified(om) passing
    check_leibniz.
    """
    return Report(_condition_items(om, _CONDITIONS))


def build_unified(om: ExtendingDatum) -> ConformalAlgebra:
    """The algebra on basis(R) + basis(Q) assembled from the datum tables.

    Construction never validates the datum; an invalid datum just produces an
    algebra that fails check_leibniz.
    """
    collision = set(om.R.basis.names) & set(om.Q.names)
    if collision:
        raise ValueError(f"basis name collision between R and Q: {sorted(collision)}")
    names = om.R.basis.names + om.Q.names
    params = tuple(dict.fromkeys(om.R.basis.params + om.Q.params))
    basis = Basis(names, params)
    table = {}

    def put(i, j, elem):
        if not elem.is_zero():
            table[(i, j)] = elem

    for (i, j), elem in om.R.table.items():
        put(i, j, elem)
    for a in om.R.basis.names:
        for x in om.Q.names:
            put(a, x, om.lharpoon.entry(a, x) + om.rharpoon.entry(a, x))
            put(x, a, om.rtri.entry(x, a) + om.ltri.entry(x, a))
    for x in om.Q.names:
        for y in om.Q.names:
            put(x, y, om.f.entry(x, y) + om.qbr.entry(x, y))
    return ConformalAlgebra(basis, table)


def split_extending_datum(E: ConformalAlgebra, R_names: Iterable[str]) -> ExtendingDatum:
    """Read the six tables off an algebra along a basis partition.

    The sub-table on R_names must close there (R is a subalgebra); the Q part
    is everything else, in the algebra's basis order.  Inverse of
    build_unified on both sides.
    """
    r_names = tuple(R_names)
    unknown = set(r_names) - set(E.basis.names)
    if unknown:
        raise ValueError(f"unknown basis names {sorted(unknown)}")
    r_set = set(r_names)
    q_names = tuple(n for n in E.basis.names if n not in r_set)
    for i in r_names:
        for j in r_names:
            outside = E.bracket(i, j).support() - r_set
            if outside:
                raise ValueError(
                    f"R names are not a subalgebra: [{i} l {j}] meets {sorted(outside)}"
                )
    params = E.basis.params
    R = ConformalAlgebra(
        Basis(r_names, params),
        {(i, j): E.bracket(i, j) for i in r_names for j in r_names},
    )
    Q = Basis(q_names, params)
    lharpoon, rharpoon, ltri, rtri, f, qbr = {}, {}, {}, {}, {}, {}
    for a in r_names:
        for x in q_names:
            lharpoon[(a, x)] = E.bracket(a, x).project(r_names)
            rharpoon[(a, x)] = E.bracket(a, x).project(q_names)
            rtri[(x, a)] = E.bracket(x, a).project(r_names)
            ltri[(x, a)] = E.bracket(x, a).project(q_names)
    for x in q_names:
        for y in q_names:
            f[(x, y)] = E.bracket(x, y).project(r_names)
            qbr[(x, y)] = E.bracket(x, y).project(q_names)
    return ExtendingDatum(R, Q, lharpoon, rharpoon, ltri, rtri, f, qbr)


# ---------------------------------------------------------------------------
# Module axioms
# ---------------------------------------------------------------------------

def _module_axiom_items(alg: ConformalAlgebra, left: BilinearMap,
                        right: BilinearMap, prefix: str = "mod") -> list:
    """Residuals of the three module axioms for actions of ``alg``.

    ``left`` is the action alg x M -> M, ``right`` the action M x alg -> M.
    """
    items = []
    unit = ModElem.unit
    module_names = left.right.names
    for a in alg.basis.names:
        for b in alg.basis.names:
            for x in module_names:
                res1 = (left.apply(unit(a), left.apply(unit(b), unit(x), MU), LAM)
                        - left.apply(extend_bracket(alg, unit(a), unit(b), LAM), unit(x), LAM + MU)
                        - left.apply(unit(b), left.apply(unit(a), unit(x), LAM), MU))
                items.append(ReportItem(f"{prefix}1", (a, b, x), res1))
                res2 = (left.apply(unit(a), right.apply(unit(x), unit(b), MU), LAM)
                        - right.apply(left.apply(unit(a), unit(x), LAM), unit(b), LAM + MU)
                        - right.apply(unit(x), extend_bracket(alg, unit(a), unit(b), LAM), MU))
                items.append(ReportItem(f"{prefix}2", (a, x, b), res2))
                res3 = (right.apply(unit(x), extend_bracket(alg, unit(a), unit(b), MU), LAM)
                        - right.apply(right.apply(unit(x), unit(a), LAM), unit(b), LAM + MU)
                        - left.apply(unit(a), right.apply(unit(x), unit(b), LAM), MU))
                items.append(ReportItem(f"{prefix}3", (x, a, b), res3))
    return items


def check_module_axioms(R: ConformalAlgebra, Q: Basis, rharpoon, ltri) -> Report:
    """The three axioms making (Q, rharpoon, ltri) a module over R."""
    left = _as_table(rharpoon, R.basis, Q, Q)
    right = _as_table(ltri, Q, R.basis, Q)
    return Report(_module_axiom_items(R, left, right))


# ---------------------------------------------------------------------------
# Morphisms and transport
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Morphism:
    """A pair (u, v): u maps Q into R, v is an invertible map of Q.

    Both commute with the translation generator, so their tables hold module
    elements with coefficients in d (and parameters) only.  v must be
    invertible over the coefficient ring, which for polynomial matrices means
    its determinant is a nonzero rational constant.
    """

    R: Basis
    Q: Basis
    u: Mapping[str, ModElem] = field(default_factory=dict)
    v: Mapping[str, ModElem] = field(default_factory=dict)

    def __post_init__(self):
        u_clean, v_clean = {}, {}
        for name, elem in self.u.items():
            self._validate(name, elem, self.R, "u")
            if not elem.is_zero():
                u_clean[name] = elem
        for name, elem in self.v.items():
            self._validate(name, elem, self.Q, "v")
            if not elem.is_zero():
                v_clean[name] = elem
        object.__setattr__(self, "u", u_clean)
        object.__setattr__(self, "v", v_clean)

    def _validate(self, name, elem, codomain, label):
        if name not in self.Q.names:
            raise ValueError(f"{label} key {name!r} is not a Q basis name")
        if elem.support() - set(codomain.names):
            raise ValueError(f"{label}({name}) leaves its codomain basis")
        spectral = elem.variables() & set(SPECTRAL)
        if spectral:
            raise ValueError(f"{label}({name}) must not contain spectral variables")

    @staticmethod
    def identity(R: Basis, Q: Basis) -> "Morphism":
        return Morphism(R, Q, {}, {x: ModElem.unit(x) for x in Q.names})

    def apply_u(self, e: ModElem) -> ModElem:
        return _apply_linear(self.u, e)

    def apply_v(self, e: ModElem) -> ModElem:
        return _apply_linear(self.v, e)

    def v_matrix(self) -> list:
        """v as a square matrix of polynomials, columns indexed by Q names."""
        names = self.Q.names
        return [
            [self.v.get(col, ModElem.zero()).component(row) for col in names]
            for row in names
        ]

    def inverse_v_table(self) -> dict:
        """The table of v^{-1}, or a ValueError if v is not invertible."""
        names = self.Q.names
        mat = self.v_matrix()
        det = _det(mat)
        if not det.is_constant() or det.constant_value() == 0:
            raise ValueError(f"v is not invertible: determinant is {det}")
        scale = Fraction(1) / det.constant_value()
        adj = _adjugate(mat)
        table = {}
        for j, col in enumerate(names):
            comps = {}
            for i, row in enumerate(names):
                p = adj[i][j] * scale
                if not p.is_zero():
                    comps[row] = p
            table[col] = ModElem(comps)
        return table

    def inverse(self) -> "Morphism":
        """The inverse pair (-u ∘ v^{-1}, v^{-1})."""
        v_inv = self.inverse_v_table()
        u_inv = {
            x: -_apply_linear(self.u, v_inv[x]) for x in self.Q.names
        }
        return Morphism(self.R, self.Q, u_inv, v_inv)


def _apply_linear(table: Mapping[str, ModElem], e: ModElem) -> ModElem:
    """Extend a basis table translation-linearly: coefficients ride along."""
    out = ModElem.zero()
    for name, coeff in e.components.items():
        out = out + table.get(name, ModElem.zero()).scale(coeff)
    return out


def _det(mat: list) -> Poly:
    n = len(mat)
    if n == 0:
        return Poly.const(1)
    if n == 1:
        return mat[0][0]
    total = Poly.zero()
    for j in range(n):
        if mat[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * _det(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


def _adjugate(mat: list) -> list:
    n = len(mat)
    if n == 1:
        return [[Poly.const(1)]]
    adj = [[Poly.zero()] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [mat[r][c] for c in range(n) if c != j]
                for r in range(n) if r != i
            ]
            cof = _det(minor)
            adj[j][i] = cof if (i + j) % 2 == 0 else -cof
    return adj


def transport(om: ExtendingDatum, phi: Morphism) -> ExtendingDatum:
    """Rewrite a datum along (u, v); unified products stay isomorphic.

    The new tables are built from the old ones by conjugating the Q slots
    with v and absorbing u into the R parts.  Transporting by phi and then by
    phi.inverse() returns the original datum.
    """
    R, Q = om.R, om.Q
    v_inv = Morphism(phi.R, phi.Q, {}, phi.inverse_v_table())
    unit = ModElem.unit
    u_of = {x: phi.u.get(x, ModElem.zero()) for x in Q.names}
    v_of = {x: phi.v.get(x, ModElem.zero()) for x in Q.names}

    rharpoon, lharpoon, ltri, rtri, f, qbr = {}, {}, {}, {}, {}, {}
    for a in R.basis.names:
        for x in Q.names:
            new_rh = v_inv.apply_v(om.rharpoon.apply(unit(a), v_of[x], LAM))
            rharpoon[(a, x)] = new_rh
            lharpoon[(a, x)] = (
                extend_bracket(R, unit(a), u_of[x], LAM)
                + om.lharpoon.apply(unit(a), v_of[x], LAM)
                - phi.apply_u(new_rh)
            )
            new_lt = v_inv.apply_v(om.ltri.apply(v_of[x], unit(a), LAM))
            ltri[(x, a)] = new_lt
            rtri[(x, a)] = (
                extend_bracket(R, u_of[x], unit(a), LAM)
                + om.rtri.apply(v_of[x], unit(a), LAM)
                - phi.apply_u(new_lt)
            )
    for x in Q.names:
        for y in Q.names:
            new_qb = v_inv.apply_v(
                om.rharpoon.apply(u_of[x], v_of[y], LAM)
                + om.ltri.apply(v_of[x], u_of[y], LAM)
                + om.qbr.apply(v_of[x], v_of[y], LAM)
            )
            qbr[(x, y)] = new_qb
            f[(x, y)] = (
                extend_bracket(R, u_of[x], u_of[y], LAM)
                + om.lharpoon.apply(u_of[x], v_of[y], LAM)
                + om.rtri.apply(v_of[x], u_of[y], LAM)
                + om.f.apply(v_of[x], v_of[y], LAM)
                - phi.apply_u(new_qb)
            )
    return ExtendingDatum(R, Q, lharpoon, rharpoon, ltri, rtri, f, qbr)


def check_morphism(E: ConformalAlgebra, E_target: ConformalAlgebra,
                   phi: Morphism) -> Report:
    """Is (a, x) -> (a + u(x), v(x)) a homomorphism E -> E_target?

    Both algebras must carry the same names split into phi's R and Q parts.
    The residual at each basis pair compares the image of the source bracket
    with the target bracket of the images.
    """
    names = E.basis.names
    if set(names) != set(phi.R.names) | set(phi.Q.names):
        raise ValueError("morphism bases do not partition the algebra basis")
    if set(E_target.basis.names) != set(names):
        raise ValueError("source and target bases differ")
    total = {a: ModElem.unit(a) for a in phi.R.names}
    for x in phi.Q.names:
        total[x] = phi.u.get(x, ModElem.zero()) + phi.v.get(x, ModElem.zero())
    items = []
    for p in names:
        for q in names:
            lhs = _apply_linear(total, E.bracket(p, q))
            rhs = extend_bracket(E_target, total[p], total[q], LAM)
            items.append(ReportItem("morphism", (p, q), lhs - rhs))
    return Report(items)


# ---------------------------------------------------------------------------
# Restricted shapes
# ---------------------------------------------------------------------------

def _q_jacobi_items(Q_alg: ConformalAlgebra) -> list:
    unit = ModElem.unit
    return [
        ReportItem("q-jacobi", (x, y, z), jacobiator(Q_alg, unit(x), unit(y), unit(z)))
        for x in Q_alg.basis.names
        for y in Q_alg.basis.names
        for z in Q_alg.basis.names
    ]


def check_twisted(R: ConformalAlgebra, Q_alg: ConformalAlgebra, f) -> Report:
    """Conditions for a datum with only the pairing f and the Q bracket.

    Requires the Q bracket to satisfy Jacobi, the image of f to be two-sided
    central in R (ts1a / ts1b), and the cocycle identity tying f to the Q
    bracket (ts2).
    """
    fmap = _as_table(f, Q_alg.basis, Q_alg.basis, R.basis)
    unit = ModElem.unit
    items = _q_jacobi_items(Q_alg)
    qb = lambda x, y, s: extend_bracket(Q_alg, x, y, s)
    for x in Q_alg.basis.names:
        for y in Q_alg.basis.names:
            for a in R.basis.names:
                items.append(ReportItem(
                    "ts1a", (a, x, y),
                    extend_bracket(R, unit(a), fmap.apply(unit(x), unit(y), MU), LAM),
                ))
                items.append(ReportItem(
                    "ts1b", (x, y, a),
                    extend_bracket(R, fmap.apply(unit(x), unit(y), LAM), unit(a), LAM + MU),
                ))
            for z in Q_alg.basis.names:
                res = (fmap.apply(qb(unit(x), unit(y), LAM), unit(z), LAM + MU)
                       + fmap.apply(unit(y), qb(unit(x), unit(z), LAM), MU)
                       - fmap.apply(unit(x), qb(unit(y), unit(z), MU), LAM))
                items.append(ReportItem("ts2", (x, y, z), res))
    return Report(items)


_C_FROM_L = {
    "C1": "L2",
    "C2": "L4",
    "C3": "L5",
    "C4": "L8",
    "C5": "L9",
    "C6": "L11",
    "C7": "L13",
}


def check_crossed(om: ExtendingDatum) -> Report:
    """Conditions C1..C7 plus the Q Jacobi identity, for datums with no
    action of R on Q (rharpoon and ltri both zero)."""
    if not om.rharpoon.is_zero() or not om.ltri.is_zero():
        raise ValueError("crossed shape requires rharpoon and ltri to vanish")
    items = _q_jacobi_items(om.q_algebra())
    for cname, lname in _C_FROM_L.items():
        for item in _condition_items(om, [lname]):
            items.append(ReportItem(cname, item.args, item.residual))
    return Report(items)


_BICROSSED_MIXED = ("L2", "L4", "L5", "L7", "L10", "L12")


def check_bicrossed(om: ExtendingDatum) -> Report:
    """Conditions for datums with zero pairing f.

    Requires the Q bracket to satisfy Jacobi, (Q, rharpoon, ltri) to be a
    module over R, (R, lharpoon, rtri) to be a module over the Q algebra, and
    the mixed conditions L2, L4, L5, L7, L10, L12.  L7 is needed even though
    the module axioms cover the other one-sided conditions: with a nonzero Q
    bracket, the action of R can feed central elements into it in a way no
    other condition sees.
    """
    if not om.f.is_zero():
        raise ValueError("bicrossed shape requires f to vanish")
    q_alg = om.q_algebra()
    items = _q_jacobi_items(q_alg)
    items += _module_axiom_items(om.R, om.rharpoon, om.ltri, prefix="qmod")
    items += _module_axiom_items(q_alg, om.rtri, om.lharpoon, prefix="rmod")
    items += _condition_items(om, _BICROSSED_MIXED)
    return Report(items)
