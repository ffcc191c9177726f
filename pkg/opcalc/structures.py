#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Homology-level structures extracted from a homotopy Cartan calculus.

A calculus acts on a chain space V with chain degrees n.  For a duality
class ζ of chain degree d the cochain complex is regraded to
M^k := V(d - 1 - k), so that a cochain class f of arity p lands in
M-degree p - 1 through p_ζ(f) = [i_f ζ].  On top of that duality this
module computes the transferred cup and bracket, the BV operator, the
bracket on cyclic cohomology (formula and semidirect-product routes),
the bracket on negative cyclic cohomology and the e3 bracket.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from tqdm import tqdm

from opcalc.calculus import Calculus, ChainSpace, OpFamily, UOp, cyclic_module_operators, run_battery
from opcalc.complexes import CYCLIC, NEGATIVE, UWindowComplex, homology, sbi_maps, truncate
from opcalc.exact_linalg import columns, induced_map, inverse, mat, rank, sign, solve
from opcalc.exceptions import (
    ArityOverflow,
    BNotExact,
    BracketNonzero,
    InconsistentSystem,
    InputError,
    LiftNotFound,
    NoFrobeniusForm,
    NotACocycle,
    NotAChainMap,
    NotQuasiIso,
    UntrustedDegree,
    WindowOverflow,
)
from opcalc.op_modules import operad_as_module
from opcalc.operads import normalized as normalized_operad
from opcalc.verdicts import BracketTable, IdentityReport, ValidationReport, first_nonzero

logger = logging.getLogger("opcalc.structures")

SKIPPABLE = (ArityOverflow, WindowOverflow, UntrustedDegree)


# tensor helpers

def _sq(entry):
    return getattr(entry, "subquotient", entry)


def _contract(tensor, matrix, axis):
    """Replace axis ``axis`` of ``tensor`` (length r) by the columns of an (r, s) matrix."""
    moved = np.moveaxis(np.asarray(tensor, dtype=object), axis, -1)
    return np.moveaxis(mat(moved, matrix), -1, axis)


def _left(matrix, tensor):
    """matrix applied to axis 0 of ``tensor``."""
    tensor = np.asarray(tensor, dtype=object)
    rest = tensor.shape[1:]
    flat = tensor.reshape(tensor.shape[0], int(np.prod(rest, dtype=int)))
    return mat(matrix, flat).reshape((np.asarray(matrix).shape[0],) + rest)


def _chain(x, y):
    """Contract the last axis of x with the first axis of y."""
    y = np.asarray(y, dtype=object)
    flat = y.reshape(y.shape[0], int(np.prod(y.shape[1:], dtype=int)))
    return mat(x, flat).reshape(x.shape[:-1] + y.shape[1:])


def induced_bilinear(tensor, left, right, target, field_spec):
    """Structure constants on homology of a bilinear chain map.

    ``tensor`` has shape (dim target, dim left, dim right) in chain
    coordinates; the result is indexed by homology bases.
    """
    left, right, target = _sq(left), _sq(right), _sq(target)
    cycles = _contract(_contract(tensor, left.section, 1), right.section, 2)
    rows = cycles.shape[0]
    flat = cycles.reshape(rows, cycles.shape[1] * cycles.shape[2])
    if not target.is_cycle(flat):
        raise NotAChainMap("product of cycles is not a cycle")
    for bounds, other, axis in ((left.boundaries.basis, right.cycles.basis, 1),
                                (right.boundaries.basis, left.cycles.basis, 2)):
        edge = _contract(tensor, bounds, axis)
        edge = _contract(edge, other, 3 - axis)
        if not target.is_boundary(edge.reshape(rows, edge.shape[1] * edge.shape[2])):
            raise NotAChainMap("product with a boundary is not a boundary")
    return field_spec.reduce(_left(target.projection, cycles))


def lie_checks(table, field_spec, jacobi=True):
    """Graded antisymmetry and Jacobi on basis classes.

    The Lie degree of a class of table degree n is n + table.shift.
    """
    s = table.shift
    for (a, b), tensor in sorted(table.entries.items()):
        if (b, a) not in table.entries or a > b:
            continue
        other = table.entries[(b, a)].transpose(0, 2, 1)
        passed = field_spec.equal(tensor, -sign((a + s) * (b + s)) * other)
        table.checks.add("antisymmetry", passed, degrees=[a, b])
    if not jacobi:
        return table.checks
    degrees = sorted(table.dims)
    for a in degrees:
        for b in degrees:
            for c in degrees:
                needed = [(b, c), (a, b + c + s), (a, b), (a + b + s, c), (a, c), (b, a + c + s)]
                if not all(k in table.entries for k in needed):
                    continue
                e = table.entries
                j1 = _chain(e[(a, b + c + s)], e[(b, c)])
                j2 = _chain(e[(a + b + s, c)].transpose(0, 2, 1), e[(a, b)]).transpose(0, 2, 3, 1)
                j3 = _chain(e[(b, a + c + s)], e[(a, c)]).transpose(0, 2, 1, 3)
                passed = field_spec.equal(j1, j2 + sign((a + s) * (b + s)) * j3)
                table.checks.add("jacobi", passed, degrees=[a, b, c])
    return table.checks


# operad-side calculus

class OperadCartanCalculus(Calculus):
    """The calculus of a cyclic operad acting on itself, V(n) = Ō(-n).

    The cyclic-module operators of O are restricted to Ō and signed by
    their transposition degree; b, B and T carry one extra sign.  The
    cochain operations become δ, cup'(f, g) = (-1)^{pq} g⌣f and
    bracket'(f, g) = -{f, g}.
    """

    def __init__(self, operad, nbar=None):
        if not operad.is_cyclic:
            raise NoFrobeniusForm(f"{operad.name} has no cyclic structure")
        self.operad = operad
        self.field = operad.field
        self.nbar = nbar or normalized_operad(operad)
        self.ops = cyclic_module_operators(operad_as_module(operad))
        top = operad.arity_max
        self.space = ChainSpace(self.field, -top, 0, lambda n: self.nbar.dim(-n),
                                f"Ō {operad.name}", open_end="lo")
        self._families = {}

    def arities(self):
        return range(0, self.operad.arity_max + 1)

    def inputs(self, p):
        if p < 0 or p > self.operad.arity_max:
            return np.zeros((0, max(self.operad.dim(p), 0)), dtype=object)
        return self.nbar.basis(p)

    def coords(self, rows, p):
        rows = np.asarray(rows, dtype=object)
        if p < 0:
            return np.zeros(rows.shape[:-1] + (0,), dtype=object)
        flat = rows.reshape(-1, self.operad.dim(p))
        self.nbar.require_normalized(flat, p)
        return self.nbar.coords(flat, p).reshape(rows.shape[:-1] + (self.nbar.dim(p),))

    def delta_coords(self, p):
        return self.nbar.delta_matrix(p).T

    def cup_coords(self, p, q):
        swapped = self.operad.cup(self.inputs(q), q, self.inputs(p), p).transpose(1, 0, 2)
        return self.field.reduce(sign(p * q) * self.coords(swapped, p + q))

    def bracket_coords(self, p, q):
        if p + q - 1 < 0:
            return np.zeros((len(self.inputs(p)), len(self.inputs(q)), 0), dtype=object)
        bracket = self.operad.gerstenhaber(self.inputs(p), p, self.inputs(q), q)
        return self.field.reduce(-self.coords(bracket, p + q - 1))

    def _family(self, key, shift, batch, build, name):
        if key not in self._families:
            nbar = self.nbar

            def at(n):
                q = -n
                return nbar.restrict(build(q), q, q - shift)
            self._families[key] = OpFamily(self.space, shift, batch, at, name)
        return self._families[key]

    def b(self):
        return self._family("b", -1, (), lambda q: sign(q) * self.ops.b(q), "b")

    def B(self):
        return self._family("B", 1, (), lambda q: sign(q) * self.ops.B(q), "B")

    def cap(self, p):
        if p < 0:
            return OpFamily.zero(self.space, -p, (0,))
        a = self.inputs(p)
        return self._family(("i", p), -p, (len(a),),
                            lambda q: sign(p * q + p) * self.ops.iota(a, p, q), f"i[{p}]")

    def lie(self, p):
        if p < 0:
            return OpFamily.zero(self.space, 1 - p, (0,))
        a = self.inputs(p)
        return self._family(("L", p), 1 - p, (len(a),),
                            lambda q: sign(p * q + q + p + 1) * self.ops.lie(a, p, q), f"L[{p}]")

    def homotopy_s(self, p):
        if p < 0:
            return OpFamily.zero(self.space, 2 - p, (0,))
        a = self.inputs(p)
        return self._family(("S", p), 2 - p, (len(a),),
                            lambda q: sign(p * q + p) * self.ops.homotopy_s(a, p, q), f"S[{p}]")

    def homotopy_t(self, p, r):
        a, c = self.inputs(p), self.inputs(r)
        if p < 0 or r < 0:
            return OpFamily.zero(self.space, 2 - p - r, (len(a), len(c)))
        return self._family(("T", p, r), 2 - p - r, (len(a), len(c)),
                            lambda q: -sign((p + r) * (q + p + r)) * self.ops.homotopy_t(a, p, c, r, q),
                            f"T[{p},{r}]")

    def preservation_checks(self):
        """Every generator maps Ō into Ō inside the window."""
        report = ValidationReport(f"Ō preserved {self.operad.name}")
        ops, nbar, top = self.ops, self.nbar, self.operad.arity_max
        for q in range(0, top):
            report.add("b", nbar.preserves(ops.b(q), q, q + 1), q=q)
        for q in range(1, top + 1):
            report.add("B", nbar.preserves(ops.B(q), q, q - 1), q=q)
        for p in range(0, top + 1):
            a = self.inputs(p)
            for q in range(0, top + 1):
                try:
                    if p + q <= top:
                        for k, block in enumerate(ops.iota(a, p, q)):
                            report.add("iota", nbar.preserves(block, q, q + p), p=p, q=q, k=k)
                    if 0 <= p + q - 1 <= top:
                        for k, block in enumerate(ops.lie(a, p, q)):
                            report.add("L", nbar.preserves(block, q, q + p - 1), p=p, q=q, k=k)
                except SKIPPABLE:
                    continue
        return report


def operad_cartan_data(operad, nbar=None, names=None, progress=False):
    """The operad-side calculus and its identity battery."""
    calc = OperadCartanCalculus(operad, nbar)
    reports = run_battery(calc, names, progress)
    for report in reports:
        report.name = f"operad {report.name}"
    return calc, reports


def unit_cycle(calc):
    """The canonical degree-0 class: 1 ⊗ () on chains, e on the operad side."""
    operad = calc.operad
    if isinstance(calc, OperadCartanCalculus):
        return calc.field.reduce(calc.nbar.coords(operad.unit, 0).T)
    unit = operad.unit.reshape(-1, 1)
    if calc.normalized:
        return calc.chains.quotient(0).classes(unit)
    return unit


# cochain side

class CochainAlgebra:
    """(𝔤, δ, cup, bracket) of a calculus in arity grading, with its cohomology."""

    def __init__(self, calc):
        self.calc = calc
        self.field = calc.field
        self.arity_max = max(calc.arities())
        self._cohomology = {}
        self._products = {}

    def dim(self, p):
        if p < 0 or p > self.arity_max:
            return 0
        return len(self.calc.inputs(p))

    def differential(self, p):
        """δ: 𝔤(p) -> 𝔤(p+1) in input coordinates."""
        if p < 0:
            return np.zeros((self.dim(p + 1), 0), dtype=object)
        if p + 1 > self.arity_max:
            raise ArityOverflow(f"δ leaves the arity window at {p}", degree=p)
        return self.calc.delta_coords(p).T

    def cohomology(self, p):
        """H^p(𝔤) or None when δ out of arity p is not materialized."""
        if p < 0 or p + 1 > self.arity_max:
            return None
        if p not in self._cohomology:
            self._cohomology[p] = homology(self.dim(p), self.differential(p - 1),
                                           self.differential(p), p, self.field)
        return self._cohomology[p]

    def cup(self, p, q):
        return self.calc.cup_coords(p, q).transpose(2, 0, 1)

    def bracket(self, p, q):
        return self.calc.bracket_coords(p, q).transpose(2, 0, 1)

    def _class_product(self, kind, p, q, target):
        key = (kind, p, q)
        if key not in self._products:
            src_p, src_q, dst = self.cohomology(p), self.cohomology(q), self.cohomology(target)
            if src_p is None or src_q is None or dst is None:
                self._products[key] = None
            else:
                tensor = self.cup(p, q) if kind == "cup" else self.bracket(p, q)
                self._products[key] = induced_bilinear(tensor, src_p, src_q, dst, self.field)
        return self._products[key]

    def class_cup(self, p, q):
        return self._class_product("cup", p, q, p + q)

    def class_bracket(self, p, q):
        if p + q - 1 < 0:
            return None
        return self._class_product("bracket", p, q, p + q - 1)


@dataclass
class ProductStructure:
    """A cup product and a bracket on the same graded homology."""

    cup: BracketTable
    bracket: BracketTable
    checks: ValidationReport

    @property
    def passed(self):
        return self.checks.passed and self.cup.passed and self.bracket.passed

    def to_dict(self, include_entries=True):
        return {
            "cup": self.cup.to_dict(include_entries),
            "bracket": self.bracket.to_dict(include_entries),
            "checks": self.checks.to_dict(),
        }


def gerstenhaber_algebra(operad, nbar=None):
    """Cup and Gerstenhaber bracket on H(Ō) of an operad with multiplication.

    Checked on basis classes: graded commutativity and associativity of the
    cup with unit e, antisymmetry and Jacobi of the bracket (Lie degree
    p - 1) and the Poisson rule {f, g⌣h} = g⌣{f,h} + (-1)^{(p-1)r} {f,g}⌣h.
    """
    nbar = nbar or normalized_operad(operad)
    alg = CochainAlgebra(_NormalizedCochains(operad, nbar))
    f = operad.field
    checks = ValidationReport(f"Gerstenhaber {operad.name}")
    arities = [p for p in range(0, alg.arity_max) if alg.cohomology(p) is not None]
    cup = BracketTable(f"cup on H({operad.name})", "f⌣g = (μ∘2 f)∘1 g", 0, "arity")
    bracket = BracketTable(f"bracket on H({operad.name})", "{f,g} = f{g} - (-1)^((p-1)(q-1)) g{f}", -1, "arity")
    for p in arities:
        cup.dims[p] = bracket.dims[p] = alg.cohomology(p).dim
    for p in tqdm(arities, desc=f"Gerstenhaber {operad.name}", disable=True):
        for q in arities:
            try:
                if p + q in cup.dims:
                    cup.set(p, q, alg.class_cup(p, q))
                if p + q - 1 in bracket.dims:
                    bracket.set(p, q, alg.class_bracket(p, q))
            except SKIPPABLE as e:
                logger.debug(f"product ({p},{q}) skipped: {e}")

    for (p, q), tensor in sorted(cup.entries.items()):
        if (q, p) in cup.entries:
            swapped = cup.entries[(q, p)].transpose(0, 2, 1)
            cup.checks.add("graded commutativity", f.equal(tensor, sign(p * q) * swapped), degrees=[p, q])
    _associativity(cup, f, lambda p, q: p + q)
    if 0 in cup.dims:
        unit = alg.cohomology(0).subquotient.classes(nbar.coords(operad.unit, 0).T)
        for q in cup.dims:
            if cup.has(0, q):
                left = _contract(cup.entries[(0, q)], unit, 1)[:, 0, :]
                cup.checks.add("unit", f.equal(left, np.eye(cup.dims[q], dtype=object)), q=q)
    lie_checks(bracket, f)
    _poisson(cup, bracket, f, checks, lambda p, q, r: sign((p - 1) * r), order="right_first")
    return ProductStructure(cup, bracket, checks)


class _NormalizedCochains:
    """Cochain operations of an operad on its normalized basis, for CochainAlgebra."""

    def __init__(self, operad, nbar):
        self.operad = operad
        self.field = operad.field
        self.nbar = nbar

    def arities(self):
        return range(0, self.operad.arity_max + 1)

    def inputs(self, p):
        if p < 0 or p > self.operad.arity_max:
            return np.zeros((0, max(self.operad.dim(p), 0)), dtype=object)
        return self.nbar.basis(p)

    def coords(self, rows, p):
        rows = np.asarray(rows, dtype=object)
        flat = rows.reshape(-1, self.operad.dim(p))
        return self.nbar.coords(flat, p).reshape(rows.shape[:-1] + (self.nbar.dim(p),))

    def delta_coords(self, p):
        return self.nbar.delta_matrix(p).T

    def cup_coords(self, p, q):
        return self.coords(self.operad.cup(self.inputs(p), p, self.inputs(q), q), p + q)

    def bracket_coords(self, p, q):
        return self.coords(self.operad.gerstenhaber(self.inputs(p), p, self.inputs(q), q), p + q - 1)


def _associativity(cup, f, target):
    degrees = sorted(cup.dims)
    e = cup.entries
    for a in degrees:
        for b in degrees:
            for c in degrees:
                ab, bc = target(a, b), target(b, c)
                if not all(k in e for k in [(a, b), (ab, c), (b, c), (a, bc)]):
                    continue
                left = _chain(e[(ab, c)].transpose(0, 2, 1), e[(a, b)]).transpose(0, 2, 3, 1)
                right = _chain(e[(a, bc)], e[(b, c)])
                cup.checks.add("associativity", f.equal(left, right), degrees=[a, b, c])


def _poisson(cup, bracket, f, checks, coeff, order):
    """Poisson rule for {x, y⌣z} on basis classes.

    ``order="right_first"``: {x, y⌣z} = y⌣{x,z} + coeff {x,y}⌣z;
    ``order="left_first"``: {x, y⌣z} = {x,y}⌣z + coeff y⌣{x,z}.
    Degrees are table degrees; ``coeff(p, q, r)`` receives them.
    """
    c_shift, b_shift = cup.shift, bracket.shift
    degrees = sorted(cup.dims)
    e, br = cup.entries, bracket.entries
    for a in degrees:
        for b in degrees:
            for c in degrees:
                yz = b + c + c_shift
                xy, xz = a + b + b_shift, a + c + b_shift
                needed_b = [(a, yz), (a, b), (a, c)]
                needed_c = [(b, c), (xy, c), (b, xz)]
                if not all(k in br for k in needed_b) or not all(k in e for k in needed_c):
                    continue
                left = _chain(br[(a, yz)], e[(b, c)])
                first = _chain(e[(xy, c)].transpose(0, 2, 1), br[(a, b)]).transpose(0, 2, 3, 1)
                second = _chain(e[(b, xz)], br[(a, c)]).transpose(0, 2, 1, 3)
                k = coeff(a, b, c)
                if order == "right_first":
                    right = second + k * first
                else:
                    right = first + k * second
                checks.add("poisson", f.equal(left, right), degrees=[a, b, c])


# regrading and duality

def mixed_complex_of(calc, d, name=""):
    """(M, b, B) with M^k = V(d - 1 - k) on the materialized window of ``calc``."""
    space = calc.space
    if space.open_end == "hi":
        c_lo, c_hi, ahead = space.lo, space.hi - 1, space.hi
    else:
        c_lo, c_hi, ahead = space.lo + 1, space.hi, space.lo
    b, B = calc.b(), calc.B()
    raw_dims, raw_b, raw_B = {}, {}, {}
    for c in list(range(c_lo, c_hi + 1)) + [ahead]:
        k = d - 1 - c
        raw_dims[k] = space.dim(c)
        for table, family in ((raw_b, b), (raw_B, B)):
            matrix = family.at(c)
            if matrix is not None:
                table[k] = matrix
    return truncate(calc.field, raw_dims, raw_b, raw_B, d - 1 - c_hi, d - 1 - c_lo,
                    open_low=space.open_end == "hi", open_high=space.open_end == "lo",
                    orientation="chain", name=name or f"M({space.name}; d={d})")


@dataclass(eq=False)
class Regrading:
    """M^k := V(d - 1 - k) for a calculus and a duality degree d."""

    calc: object
    d: int
    mixed: object
    algebra: CochainAlgebra
    margin: int = 2
    battery: list = field(default_factory=list)
    _complexes: Dict[str, object] = field(default_factory=dict, repr=False)
    _sbi: Dict[str, object] = field(default_factory=dict, repr=False)

    @property
    def field(self):
        return self.calc.field

    @property
    def name(self):
        return self.mixed.name

    def chain_degree(self, k):
        return self.d - 1 - k

    def in_window(self, k):
        return self.mixed.lo <= k <= self.mixed.hi

    def homology(self, k):
        """H^k(M), None off the window; zero beyond a closed end."""
        if self.in_window(k):
            return self.mixed.homology(k)
        return None

    def operator(self, family, k):
        """Window matrix (batch first) of a calculus family on M^k, None off the window."""
        target = k - family.shift
        if not (self.in_window(k) and self.in_window(target)):
            return None
        raw = family.at(self.chain_degree(k))
        if raw is None:
            return None
        mc = self.mixed
        if mc.dim(k) == 0 or mc.dim(target) == 0:
            return np.zeros(family.batch + (mc.dim(target), mc.dim(k)), dtype=object)
        return self.field.reduce(mat(mc.into(target), mat(raw, mc.out_of(k))))

    def complex(self, variant):
        if variant not in self._complexes:
            self._complexes[variant] = UWindowComplex(self.mixed, variant, self.margin)
        return self._complexes[variant]

    def sbi(self, variant):
        if variant not in self._sbi:
            self._sbi[variant] = sbi_maps(self.complex(variant))
        return self._sbi[variant]


def regrade_for_theoremA(calc, d, margin=2, run_suites=False, progress=False):
    """Regrade a calculus around a duality degree d; optionally rerun the battery."""
    mixed = mixed_complex_of(calc, d)
    reg = Regrading(calc, d, mixed, CochainAlgebra(calc), margin)
    if run_suites:
        reg.battery = run_battery(calc, None, progress)
    logger.info(f"regraded {calc.name} at d={d}: M window [{mixed.lo}, {mixed.hi}], ends {mixed.ends}")
    return reg


@dataclass
class PalladioCertificate:
    """Evidence that ζ is a Palladio cocycle: b ζ = 0, B ζ exact, p_ζ a quasi-isomorphism."""

    d: int
    zeta: np.ndarray
    eta: Optional[np.ndarray]
    waived: bool
    p_maps: Dict[int, np.ndarray] = field(default_factory=dict)
    ranks: Dict[int, Tuple[int, int, int]] = field(default_factory=dict)
    checks: Optional[ValidationReport] = None
    _inverses: Dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def arities(self):
        return sorted(self.p_maps)

    def p(self, arity):
        if arity not in self.p_maps:
            raise UntrustedDegree(f"p_ζ is not certified in arity {arity}", degree=arity)
        return self.p_maps[arity]

    def p_inv(self, arity, field_spec):
        if arity not in self._inverses:
            self._inverses[arity] = inverse(self.p(arity), field_spec)
        return self._inverses[arity]

    def to_dict(self):
        return {
            "d": self.d,
            "eta_waived": self.waived,
            "B_zeta_exact": self.eta is not None or self.waived,
            "ranks": {str(p): {"H_g": r[0], "H_M": r[1], "rank": r[2]} for p, r in sorted(self.ranks.items())},
            "checks": self.checks.to_dict() if self.checks else None,
        }


def verify_palladio(reg, zeta):
    """Certify ζ ∈ V(d) as a Palladio cocycle or raise the first failing condition."""
    calc, f, d, mc = reg.calc, reg.field, reg.d, reg.mixed
    space = calc.space
    zeta = np.asarray(zeta, dtype=object).reshape(-1, 1)
    if zeta.shape[0] != space.dim(d):
        raise InputError(f"ζ has {zeta.shape[0]} coordinates, V({d}) has dimension {space.dim(d)}")
    checks = ValidationReport(f"Palladio {calc.name} d={d}")

    b_at, B_at = calc.b().at(d), calc.B().at(d)
    if b_at is None or B_at is None:
        raise UntrustedDegree(f"b or B is not materialized at chain degree {d}", degree=d)
    if not f.is_zero(mat(b_at, zeta)):
        raise NotACocycle(f"bζ != 0 in degree {d - 1}", degree=d)
    checks.add("b zeta = 0", True, degree=d)

    b_zeta = f.reduce(mat(B_at, zeta))
    eta, waived = None, False
    if f.is_zero(b_zeta):
        eta = np.zeros((space.dim(d + 2), 1), dtype=object)
    else:
        b_next = calc.b().at(d + 2)
        if b_next is None:
            # the obstruction class lives in H_{d+1}(V), the image of 𝔤 in arity -1
            waived = reg.algebra.dim(-1) == 0
            checks.add("B zeta exact (arity -1 vanishes)", waived, degree=d + 1)
            if not waived:
                raise BNotExact(f"cannot solve b η = B ζ beyond the window", degree=d + 1)
            logger.warning(f"{calc.name}: b η = B ζ not solvable in the window; waived since 𝔤(-1) = 0")
        else:
            try:
                eta = solve(b_next, b_zeta, f)
            except InconsistentSystem:
                raise BNotExact(f"B ζ is not a boundary in degree {d + 1}", degree=d + 1)
    checks.add("B zeta exact", True, degree=d + 1)

    cert = PalladioCertificate(d, zeta, eta, waived, checks=checks)
    alg = reg.algebra
    for p in range(0, alg.arity_max):
        k = p - 1
        h_g = alg.cohomology(p)
        if h_g is None:
            break
        h_m = reg.homology(k)
        if h_m is None:
            if mc.known_zero(k):
                if h_g.dim:
                    raise NotQuasiIso(f"H^{p}(𝔤) has dimension {h_g.dim} but M vanishes in degree {k}",
                                      degree=p)
                cert.ranks[p] = (0, 0, 0)
            else:
                logger.debug(f"arity {p} beyond the M window")
            continue
        cap_at = calc.cap(p).at(d)
        if cap_at is None:
            logger.debug(f"i at arity {p} not materialized, degree {k} untrusted")
            continue
        raw = mat(cap_at, zeta)[..., 0].T
        window = mat(mc.into(k), raw) if mc.dim(k) else np.zeros((0, raw.shape[1]), dtype=object)
        try:
            induced = induced_map(window, h_g, h_m, f)
        except NotAChainMap as e:
            raise NotQuasiIso(f"p_ζ is not a chain map in arity {p}: {e}", degree=p)
        r = rank(induced, f)
        cert.ranks[p] = (h_g.dim, h_m.dim, r)
        if not (h_g.dim == h_m.dim == r):
            raise NotQuasiIso(f"p_ζ: H^{p}(𝔤) ({h_g.dim}) -> H^{k}(M) ({h_m.dim}) has rank {r}", degree=p)
        cert.p_maps[p] = induced
        checks.add("p_zeta iso", True, arity=p)
    for k in range(mc.lo, min(mc.hi, -2) + 1):
        h_m = reg.homology(k)
        if h_m.dim:
            raise NotQuasiIso(f"H^{k}(M) = H_{d - 1 - k}(V) has dimension {h_m.dim} above the duality degree",
                              degree=k)
        checks.add("vanishing above d", True, degree=k)
    logger.info(f"Palladio cocycle certified on {calc.name}: arities {cert.arities()}")
    return cert


def transfer_structure(reg, cert):
    """Cup and bracket of H(𝔤) moved to H(M) along p_ζ, in M-degrees."""
    alg, f = reg.algebra, reg.field
    arities = cert.arities()
    cup = BracketTable(f"transferred cup on H({reg.name})", "a⌣b = p(p⁻¹a ⌣ p⁻¹b)", 1, "M-degree")
    bracket = BracketTable(f"transferred bracket on H({reg.name})", "{a,b} = p{p⁻¹a, p⁻¹b}", 0, "M-degree")
    checks = ValidationReport(f"transfer {reg.name}")
    for p in arities:
        cup.dims[p - 1] = bracket.dims[p - 1] = cert.p(p).shape[0]

    def moved(tensor, p, q, t):
        t1 = _contract(_contract(tensor, cert.p_inv(p, f), 1), cert.p_inv(q, f), 2)
        return f.reduce(_left(cert.p(t), t1))

    for p in arities:
        for q in arities:
            try:
                if p + q in cert.p_maps:
                    c = alg.class_cup(p, q)
                    if c is not None:
                        cup.set(p - 1, q - 1, moved(c, p, q, p + q))
                if p + q - 1 in cert.p_maps:
                    c = alg.class_bracket(p, q)
                    if c is not None:
                        bracket.set(p - 1, q - 1, moved(c, p, q, p + q - 1))
            except SKIPPABLE as e:
                logger.debug(f"transfer ({p},{q}) skipped: {e}")

    mc = reg.mixed
    if reg.in_window(-1) and 0 in cert.p_maps:
        unit = reg.homology(-1).subquotient.classes(mat(mc.into(-1), cert.zeta))
        e_class = mat(cert.p(0), alg.cohomology(0).subquotient.classes(_unit_coords(reg.calc)))
        checks.add("unit = ±[zeta]", f.equal(unit, e_class) or f.equal(unit, -e_class))
        for k in cup.dims:
            if cup.has(-1, k):
                left = _contract(cup.entries[(-1, k)], e_class, 1)[:, 0, :]
                cup.checks.add("unit", f.equal(left, np.eye(cup.dims[k], dtype=object)), degree=k)
    for (a, b), tensor in sorted(cup.entries.items()):
        if (b, a) in cup.entries:
            swapped = cup.entries[(b, a)].transpose(0, 2, 1)
            cup.checks.add("graded commutativity",
                           f.equal(tensor, sign((a + 1) * (b + 1)) * swapped), degrees=[a, b])
    _associativity(cup, f, lambda a, b: a + b + 1)
    lie_checks(bracket, f)
    _poisson(cup, bracket, f, checks, lambda a, b, c: sign(a * (b + 1)), order="left_first")
    return ProductStructure(cup, bracket, checks)


def _unit_coords(calc):
    return calc.field.reduce(calc.coords(calc.operad.unit, 0).T)


# lift to the cyclic complex

@dataclass
class PalladioLift:
    """ζ̂ = Σ_j ζ_j u^j with d_u ζ̂ = 0; ``components[j]`` lies in V(d + 2j)."""

    components: Dict[int, np.ndarray]
    constant: bool

    def to_dict(self):
        return {"constant": self.constant, "u_powers": sorted(self.components)}


def lift_palladio(reg, cert):
    """Lift ζ to a d_u-cocycle ζ̂ inside the window, or raise LiftNotFound."""
    calc, f, d = reg.calc, reg.field, reg.d
    space = calc.space
    b, B = calc.b(), calc.B()
    zeta = cert.zeta
    if f.is_zero(mat(B.at(d), zeta)):
        return PalladioLift({0: zeta}, True)
    top = 0
    while space.inside(d + 2 * (top + 1)) and b.at(d + 2 * (top + 1)) is not None \
            and B.at(d + 2 * top) is not None:
        top += 1
    if top == 0:
        raise LiftNotFound(f"B ζ != 0 and the window has no room for ζ_1", degree=d)
    # unknowns: θ in V(d+1) (ζ_0 = ζ + bθ), then ζ_1 .. ζ_top
    widths = [space.dim(d + 1)] + [space.dim(d + 2 * j) for j in range(1, top + 1)]
    starts = np.cumsum([0] + widths).tolist()
    heights = [space.dim(d + 2 * j - 1) for j in range(1, top + 1)]
    rows = np.cumsum([0] + heights).tolist()
    system = np.zeros((rows[-1], starts[-1]), dtype=object)
    rhs = np.zeros((rows[-1], 1), dtype=object)
    theta_to_first = mat(B.at(d), b.at(d + 1))
    system[rows[0]:rows[1], starts[0]:starts[1]] = theta_to_first
    rhs[rows[0]:rows[1]] = -mat(B.at(d), zeta)
    for j in range(1, top + 1):
        r0, r1 = rows[j - 1], rows[j]
        system[r0:r1, starts[j]:starts[j + 1]] = b.at(d + 2 * j)
        if j >= 2:
            system[r0:r1, starts[j - 1]:starts[j]] = B.at(d + 2 * j - 2)
    try:
        x = solve(f.reduce(system), f.reduce(rhs), f)
    except InconsistentSystem:
        raise LiftNotFound(f"no ζ_1..ζ_{top} solve d_u ζ̂ = 0 in the window", degree=d)
    components = {0: f.reduce(zeta + mat(b.at(d + 1), x[starts[0]:starts[1]]))}
    for j in range(1, top + 1):
        components[j] = x[starts[j]:starts[j + 1]]
    logger.info(f"lifted ζ on {calc.name} with {top} u-corrections")
    return PalladioLift(components, False)


def lift_vector(reg, cc, lift):
    """ζ̂ as a vector of CC^{-1}."""
    mc = reg.mixed
    _, offsets, size = cc.layout(-1)
    out = np.zeros((size, 1), dtype=object)
    for j, raw in lift.components.items():
        key = (-1 - 2 * j, j)
        if key in offsets and mc.dim(key[0]):
            start = offsets[key]
            out[start:start + mc.dim(key[0])] = mat(mc.into(key[0]), raw)
    return reg.field.reduce(out)


def cc_operator(reg, cc, op, n):
    """Matrix (batch first) of a u-polynomial calculus operator on CC^n.

    Blocks whose target falls outside the layout are dropped; a block whose
    operator is not materialized raises UntrustedDegree.
    """
    op = UOp.of(op)
    mc, d = reg.mixed, reg.d
    target = n - op.degree
    pairs, offsets, size = cc.layout(n)
    _, t_offsets, t_size = cc.layout(target)
    out = np.zeros(op.batch + (t_size, size), dtype=object)
    for (i, j) in pairs:
        w = mc.dim(i)
        if w == 0:
            continue
        for k, family in op.terms.items():
            key = (i - family.shift, j + k)
            if key not in t_offsets or mc.dim(key[0]) == 0:
                continue
            raw = family.at(d - 1 - i)
            if raw is None:
                raise UntrustedDegree(f"{family.name} is not materialized at chain degree {d - 1 - i}",
                                      degree=n)
            h = mc.dim(key[0])
            block = mat(mc.into(key[0]), mat(raw, mc.out_of(i)))
            out[..., t_offsets[key]:t_offsets[key] + h, offsets[(i, j)]:offsets[(i, j)] + w] += block
    return reg.field.reduce(out)


def clean_degree(cc, n):
    """No cut component of positive dimension enters CC^(n-1..n+1)."""
    mc = cc.mixed
    for m in (n - 1, n, n + 1):
        for i, _ in cc.layout(m)[0]:
            if i in mc.transports and mc.dim(i) > 0:
                return False
    return True


class TwistedSemidirect:
    """SD^n = 𝔤(n+1) ⊕ CC^(n-2) with ∂(f, x) = (δf, d_u x + L_f ζ̂) and Ψ(f, x) = I_f ζ̂ + u x."""

    def __init__(self, reg, cc, zeta_hat):
        self.reg = reg
        self.cc = cc
        self.alg = reg.algebra
        self.field = reg.field
        self.zeta_hat = zeta_hat
        self._l_zeta, self._i_zeta, self._d, self._homology = {}, {}, {}, {}

    def split(self, n):
        return self.alg.dim(n + 1), self.cc.dim(n - 2)

    def dim(self, n):
        return sum(self.split(n))

    def _applied(self, op, p):
        matrix = cc_operator(self.reg, self.cc, op, -1)
        return self.field.reduce(mat(matrix, self.zeta_hat)[..., 0].T)

    def l_zeta(self, p):
        """Columns L_f ζ̂ in CC^(p-2) for the basis f of 𝔤(p)."""
        if p not in self._l_zeta:
            self._l_zeta[p] = self._applied(self.reg.calc.lie(p), p)
        return self._l_zeta[p]

    def i_zeta(self, p):
        """Columns I_f ζ̂ in CC^(p-1)."""
        if p not in self._i_zeta:
            self._i_zeta[p] = self._applied(self.reg.calc.big_i(p), p)
        return self._i_zeta[p]

    def differential(self, n):
        if n not in self._d:
            a, x = self.split(n)
            a1, x1 = self.split(n + 1)
            out = np.zeros((a1 + x1, a + x), dtype=object)
            if a:
                if n + 2 > self.alg.arity_max:
                    raise ArityOverflow(f"δ on 𝔤({n + 1}) leaves the arity window", degree=n)
                out[:a1, :a] = self.alg.differential(n + 1)
                out[a1:, :a] = self.l_zeta(n + 1)
            out[a1:, a:] = self.cc.differential(n - 2)
            self._d[n] = self.field.reduce(out)
        return self._d[n]

    def psi(self, n):
        a, _ = self.split(n)
        out = np.zeros((self.cc.dim(n), self.dim(n)), dtype=object)
        if a:
            out[:, :a] = self.i_zeta(n + 1)
        out[:, a:] = self.cc.u_shift(n - 2)
        return self.field.reduce(out)

    def homology(self, n):
        if n not in self._homology:
            self._homology[n] = homology(self.dim(n), self.differential(n - 1), self.differential(n),
                                         n, self.field)
        return self._homology[n]


def twisted_semidirect(reg, cc, lift):
    return TwistedSemidirect(reg, cc, lift_vector(reg, cc, lift))


def _cyclic_degrees(cc, clean=False):
    return [n for n in range(cc.n_lo, cc.n_hi + 1)
            if cc.trusted(n) and (not clean or clean_degree(cc, n))]


def theoremA_bracket(reg, cert, lift=None, transfer=None, progress=False):
    """Degree-0 Lie bracket on HC(M): [z, w] = -(-1)^{pq+p} β(πw ⌣ πz), p = |z| + 1, q = |w| + 1.

    The formula is cross-checked against the bracket of the twisted
    semidirect product pushed through Ψ wherever both are available.
    """
    f = reg.field
    cc = reg.complex(CYCLIC)
    sbi = reg.sbi(CYCLIC)
    transfer = transfer or transfer_structure(reg, cert)
    cup = transfer.cup
    table = BracketTable(f"cyclic bracket on HC({reg.name})", "[z,w] = -(-1)^(pq+p) β(πw ⌣ πz)", 0,
                         "cyclic M-degree")
    table.checks.extend(sbi.checks)
    degrees = _cyclic_degrees(cc)
    for n in degrees:
        table.dims[n] = cc.homology(n).dim
    for a in degrees:
        for b in degrees:
            t = a + b
            if t not in table.dims or a not in sbi.pi or b not in sbi.pi or (t + 1) not in sbi.beta:
                continue
            if not cup.has(b, a):
                continue
            x = _contract(_contract(cup.entries[(b, a)], sbi.pi[b], 1), sbi.pi[a], 2)
            y = _left(sbi.beta[t + 1], x)
            p, q = a + 1, b + 1
            table.set(a, b, f.reduce(-sign(p * q + p) * y.transpose(0, 2, 1)))
    lie_checks(table, f)

    try:
        lift = lift or lift_palladio(reg, cert)
    except LiftNotFound as e:
        logger.warning(f"semidirect route unavailable: {e}")
        table.checks.add("semidirect route available", False, witness={"reason": str(e)})
        return table
    semi = twisted_semidirect(reg, cc, lift)
    table.checks.add("d_u zeta_hat = 0", f.is_zero(mat(cc.differential(-1), semi.zeta_hat)))
    table.cross_checked = _semidirect_route(reg, cert, cc, sbi, semi, table, progress)
    if table.entries and not table.cross_checked:
        logger.warning(f"{table.name}: no entry could be compared with the semidirect route")
    else:
        logger.info(f"{table.name}: {table.cross_checked} of {len(table.entries)} entries cross-checked")
    return table


def _semidirect_route(reg, cert, cc, sbi, semi, table, progress):
    f, calc, alg = reg.field, reg.calc, reg.algebra
    quasi = {}
    for n in tqdm(_cyclic_degrees(cc, clean=True), desc="semidirect", disable=not progress):
        try:
            h = semi.homology(n)
            psi, psi_next = semi.psi(n), semi.psi(n + 1)
            chain = f.equal(mat(psi_next, semi.differential(n)), mat(cc.differential(n), psi))
            table.checks.add("Psi chain map", chain, degree=n)
            induced = induced_map(psi, h, cc.homology(n), f)
        except SKIPPABLE + (NotAChainMap,) as e:
            logger.debug(f"semidirect degree {n} skipped: {e}")
            continue
        iso = induced.shape[0] == induced.shape[1] and rank(induced, f) == induced.shape[0]
        table.checks.add("Psi quasi-iso", iso, degree=n)
        if iso:
            quasi[n] = (h, induced)

    for p in cert.arities():
        k = p - 1
        if k - 1 not in table.dims or k not in sbi.beta or not clean_degree(cc, k - 1):
            continue
        try:
            images = mat(semi.l_zeta(p), alg.cohomology(p).subquotient.section)
        except SKIPPABLE as e:
            logger.debug(f"L ζ̂ at arity {p} skipped: {e}")
            continue
        classes = cc.homology(k - 1).subquotient.classes(images)
        table.checks.add("L_f zeta_hat = beta p(f)", f.equal(classes, mat(sbi.beta[k], cert.p(p))), arity=p)

    compared = 0
    for (a, b) in sorted(table.entries):
        t = a + b
        if a not in quasi or b not in quasi or t not in quasi:
            continue
        try:
            value = _semidirect_bracket(reg, cc, semi, quasi, a, b)
        except SKIPPABLE as e:
            logger.debug(f"semidirect bracket ({a},{b}) skipped: {e}")
            continue
        closed = f.is_zero(mat(semi.differential(t), columns(value, value.shape[0])))
        table.checks.add("bracket is a cocycle", closed, degrees=[a, b])
        image = mat(semi.psi(t), columns(value, value.shape[0]))
        classes = cc.homology(t).subquotient.classes(image).reshape((table.dims[t],) + value.shape[1:])
        same = f.equal(classes, table.entries[(a, b)])
        table.checks.add("formula = semidirect route", same, degrees=[a, b])
        compared += 1
    return compared


def _semidirect_bracket(reg, cc, semi, quasi, a, b):
    """Semidirect brackets of the basis classes of HC^a and HC^b, shape (dim SD^(a+b), ha, hb)."""
    f, calc = reg.field, reg.calc
    p, q = a + 1, b + 1

    def reps(n):
        h, induced = quasi[n]
        vectors = h.subquotient.representatives(inverse(induced, f))
        split = semi.alg.dim(n + 1)
        return vectors[:split], vectors[split:]

    f_a, x_a = reps(a)
    g_b, y_b = reps(b)
    width = semi.alg.dim(p + q - 1)
    if width and (f_a.shape[0] and g_b.shape[0]):
        brackets = _contract(_contract(calc.bracket_coords(p, q), f_a, 0), g_b, 1)
    else:
        brackets = np.zeros((f_a.shape[1], g_b.shape[1], width), dtype=object)
    t = a + b
    cc_t = cc.dim(t - 2)
    lfy = np.zeros((f_a.shape[1], cc_t, y_b.shape[1]), dtype=object)
    lgx = np.zeros((g_b.shape[1], cc_t, x_a.shape[1]), dtype=object)
    if f_a.shape[0]:
        lfy = _contract(mat(cc_operator(reg, cc, calc.lie(p), b - 2), y_b), f_a, 0)
    if g_b.shape[0]:
        lgx = _contract(mat(cc_operator(reg, cc, calc.lie(q), a - 2), x_a), g_b, 0)
    tail = -sign(p) * lfy.transpose(0, 2, 1) - sign(p * q + p) * lgx.transpose(2, 0, 1)
    value = np.concatenate([brackets, tail], axis=2).transpose(2, 0, 1)
    return f.reduce(value)


# BV structure on the operad side

@dataclass
class BVStructure:
    """Δ on H(Ō) with the transferred Gerstenhaber data and its checks."""

    delta: Dict[int, np.ndarray]
    products: ProductStructure
    certificate: PalladioCertificate
    checks: ValidationReport
    chain_level: IdentityReport
    battery: list = field(default_factory=list)

    @property
    def passed(self):
        return (self.checks.passed and self.chain_level.passed and self.products.passed
                and all(r.passed for r in self.battery))

    def to_dict(self, include_entries=True):
        return {
            "delta": {str(k): [[str(v) for v in row] for row in m] for k, m in sorted(self.delta.items())},
            "products": self.products.to_dict(include_entries),
            "certificate": self.certificate.to_dict(),
            "checks": self.checks.to_dict(),
            "chain_level": self.chain_level.to_dict(),
            "battery": [r.to_dict() for r in self.battery],
        }


def bv_structure(operad, nbar=None, margin=2, run_suites=False, progress=False):
    """BV algebra on H(Ō) of a cyclic operad: ζ = e, d = 0, Δ = induced B."""
    calc = OperadCartanCalculus(operad, nbar)
    reg = regrade_for_theoremA(calc, 0, margin, run_suites, progress)
    cert = verify_palladio(reg, unit_cycle(calc))
    products = transfer_structure(reg, cert)
    return _bv_from(reg, cert, products)


def _bv_from(reg, cert, products):
    f, mc = reg.field, reg.mixed
    checks = ValidationReport(f"BV {reg.name}")
    degrees = sorted(products.cup.dims)
    delta = {}
    for k in degrees:
        if k - 1 in products.cup.dims:
            delta[k] = mc.induced_B(k)
    for k in degrees:
        if k in delta and k - 1 in delta:
            checks.add("delta^2 = 0", f.is_zero(mat(delta[k - 1], delta[k])), degree=k)
    if -1 in degrees:
        unit = reg.homology(-1).subquotient.classes(mat(mc.into(-1), cert.zeta))
        checks.add("delta(unit) = 0", f.is_zero(mat(mc.induced_B(-1), unit)))
    cup, br = products.cup.entries, products.bracket.entries
    for a in degrees:
        for b in degrees:
            needed = [(a, b - 1), (b, a), (b, a - 1)]
            if (a, b) not in br or not all(k in cup for k in needed):
                continue
            if b not in delta or a not in delta or a + b + 1 not in delta:
                continue
            p, q = a + 1, b + 1
            t1 = _contract(cup[(a, b - 1)], delta[b], 2)
            t2 = _left(delta[a + b + 1], cup[(b, a)]).transpose(0, 2, 1)
            t3 = _contract(cup[(b, a - 1)], delta[a], 2).transpose(0, 2, 1)
            right = t1 - sign(p * (q - 1)) * t2 + sign(p * (q - 1) + q) * t3
            checks.add("BV identity", f.equal(br[(a, b)], right), degrees=[a, b])
    _seven_terms(products.cup, delta, f, checks)
    operad = reg.calc.operad
    mumu = operad.gerstenhaber(operad.mu, 2, operad.mu, 2)
    checks.add("{mu,mu} = 0", f.is_zero(mumu))
    chain_level = chain_level_bv(reg.calc)
    return BVStructure(delta, products, cert, checks, chain_level, list(reg.battery))


def _seven_terms(cup, delta, f, checks):
    """Δ is of second order for the cup, arity grading |x| = k + 1."""
    e = cup.entries
    degrees = sorted(cup.dims)
    for a in degrees:
        for b in degrees:
            for c in degrees:
                ab, bc, ac = a + b + 1, b + c + 1, a + c + 1
                abc = ab + c + 1
                needed = [(a, b), (ab, c), (b, c), (a, c), (a, bc), (b, ac),
                          (ab - 1, c), (a, bc - 1), (b, ac - 1),
                          (a - 1, b), (a + b, c), (a, b - 1), (a, b + c), (a, c - 1)]
                if not all(k in e for k in needed):
                    continue
                if not all(k in delta for k in (a, b, c, ab, bc, ac, abc)):
                    continue
                pa, pb = a + 1, b + 1
                xyz = _chain(e[(ab, c)].transpose(0, 2, 1), e[(a, b)]).transpose(0, 2, 3, 1)
                lhs = _left(delta[abc], xyz)
                t1 = _chain(e[(ab - 1, c)].transpose(0, 2, 1), _left(delta[ab], e[(a, b)])).transpose(0, 2, 3, 1)
                t2 = _chain(e[(a, bc - 1)], _left(delta[bc], e[(b, c)]))
                yxz = _chain(e[(b, ac - 1)], _left(delta[ac], e[(a, c)]))
                t3 = yxz.transpose(0, 2, 1, 3)
                dx = _contract(e[(a - 1, b)], delta[a], 1)
                t4 = _chain(e[(a + b, c)].transpose(0, 2, 1), dx).transpose(0, 2, 3, 1)
                dy = _contract(e[(a, b - 1)], delta[b], 2)
                t5 = _chain(e[(a + b, c)].transpose(0, 2, 1), dy).transpose(0, 2, 3, 1)
                dz = _contract(e[(b, c - 1)], delta[c], 2) if (b, c - 1) in e else None
                if dz is None:
                    continue
                t6 = _chain(e[(a, b + c)], dz)
                right = (t1 + sign(pa) * t2 + sign((pa + 1) * pb) * t3
                         - t4 - sign(pa) * t5 - sign(pa + pb) * t6)
                checks.add("seven-term identity", f.equal(lhs, right), degrees=[a, b, c])


def chain_level_bv(calc):
    """(-1)^{p+q}{g,f} = (-1)^p i_g B f - (-1)^{pq} L_f g + (-1)^p b S_g f + (-1)^p S_g δf + S_{δg} f.

    Exact identity on normalized cochains of the operad side, f of arity p and g of arity q.
    """
    report = IdentityReport("chain_level_bv", "(-1)^(p+q){g,f} = (-1)^p i_g Bf - (-1)^(pq) L_f g + S-terms")
    f, operad = calc.field, calc.operad
    b, B = calc.b(), calc.B()
    for p in calc.arities():
        for q in calc.arities():
            t = p + q - 1
            if t < 0 or t > operad.arity_max:
                continue
            try:
                bracket = calc.coords(operad.gerstenhaber(calc.inputs(q), q, calc.inputs(p), p), t)
                parts = [
                    calc.cap(q).at(1 - p), B.at(-p), calc.lie(p).at(-q), calc.homotopy_s(q).at(-p),
                    b.at(2 - p - q), calc.homotopy_s(q).at(-p - 1),
                    calc.homotopy_s(q + 1).reindex(calc.delta_coords(q)).at(-p),
                ]
                if any(x is None for x in parts):
                    report.skip()
                    continue
                i_g, b_up, l_f, s_g, b_at, s_g_next, s_dg = parts
                dc = calc.delta_coords(p)
            except SKIPPABLE:
                report.skip()
                continue
            term_i = mat(i_g, b_up).transpose(0, 2, 1)
            term_l = l_f.transpose(2, 0, 1)
            term_b = mat(b_at, s_g).transpose(0, 2, 1)
            term_sd = mat(s_g_next, dc.T).transpose(0, 2, 1)
            term_ds = s_dg.transpose(0, 2, 1)
            right = (sign(p) * term_i - sign(p * q) * term_l + sign(p) * term_b
                     + sign(p) * term_sd + term_ds)
            diff = f.reduce(sign(p + q) * bracket - right)
            hit = first_nonzero(diff)
            report.record(hit is None, p=p, q=q, **({"entry": list(hit)} if hit is not None else {}))
    return report


# brackets on negative cyclic cohomology

def csm_bracket(reg, cert, transfer=None):
    """Degree -1 bracket on HC_-(M): [x, y] = -(-1)^{|x|} j(βx ⌣ βy), with β[x,y] = {βx, βy}."""
    f = reg.field
    cc = reg.complex(NEGATIVE)
    sbi = reg.sbi(NEGATIVE)
    transfer = transfer or transfer_structure(reg, cert)
    cup, br = transfer.cup, transfer.bracket
    table = BracketTable(f"negative cyclic bracket on HC_-({reg.name})", "[x,y] = -(-1)^x j(βx ⌣ βy)", -1,
                         "negative cyclic M-degree")
    table.checks.extend(sbi.checks)
    degrees = _cyclic_degrees(cc)
    for n in degrees:
        table.dims[n] = cc.homology(n).dim
    for a in degrees:
        for b in degrees:
            t = a + b - 1
            if t not in sbi.j or a not in sbi.beta or b not in sbi.beta or not cup.has(a - 1, b - 1):
                continue
            x = _contract(_contract(cup.entries[(a - 1, b - 1)], sbi.beta[a], 1), sbi.beta[b], 2)
            table.set(a, b, f.reduce(-sign(a) * _left(sbi.j[t], x)))
    lie_checks(table, f)
    for (a, b), tensor in sorted(table.entries.items()):
        t = a + b - 1
        if t in sbi.beta and br.has(a - 1, b - 1):
            left = _left(sbi.beta[t], tensor)
            right = _contract(_contract(br.entries[(a - 1, b - 1)], sbi.beta[a], 1), sbi.beta[b], 2)
            table.checks.add("beta[x,y] = {beta x, beta y}", f.equal(left, right), degrees=[a, b])
    return table


def e3_bracket(reg, cert, transfer=None, csm=None):
    """{{x, y}} = -(-1)^{|x|} Δx ⌣ Δy on H(M), defined when the transferred bracket vanishes."""
    f, mc = reg.field, reg.mixed
    transfer = transfer or transfer_structure(reg, cert)
    if not transfer.bracket.is_zero(f):
        witness = transfer.bracket.nonzero_witness(f)
        raise BracketNonzero(f"transferred bracket on H({reg.name}) is nonzero", witness=witness)
    cup = transfer.cup
    table = BracketTable(f"e3 bracket on H({reg.name})", "{{x,y}} = -(-1)^x Δx ⌣ Δy", -1, "M-degree")
    degrees = sorted(cup.dims)
    delta = {k: mc.induced_B(k) for k in degrees if k - 1 in cup.dims}
    for k in degrees:
        table.dims[k] = cup.dims[k]
    for a in degrees:
        for b in degrees:
            t = a + b - 1
            if t not in table.dims or a not in delta or b not in delta or not cup.has(a - 1, b - 1):
                continue
            x = _contract(_contract(cup.entries[(a - 1, b - 1)], delta[a], 1), delta[b], 2)
            table.set(a, b, f.reduce(-sign(a) * x))
    lie_checks(table, f)
    e, c = table.entries, cup.entries
    for (a, b), tensor in sorted(e.items()):
        t = a + b - 1
        if t in delta:
            table.checks.add("delta{{x,y}} = 0", f.is_zero(_left(delta[t], tensor)), degrees=[a, b])
    for (b, c_deg), product in sorted(c.items()):
        t = b + c_deg + 1
        if b in delta and c_deg in delta and t in delta and (b - 1, c_deg) in c and (b, c_deg - 1) in c:
            left = _left(delta[t], product)
            right = (_contract(c[(b - 1, c_deg)], delta[b], 1)
                     + sign(b + 1) * _contract(c[(b, c_deg - 1)], delta[c_deg], 2))
            table.checks.add("delta is a derivation", f.equal(left, right), degrees=[b, c_deg])
    for a in degrees:
        for b in degrees:
            for cz in degrees:
                yz = b + cz + 1
                xy, xz = a + b - 1, a + cz - 1
                if not all(k in e for k in [(a, yz), (a, b), (a, cz)]):
                    continue
                if not all(k in c for k in [(b, cz), (xy, cz), (b, xz)]):
                    continue
                left = _chain(e[(a, yz)], c[(b, cz)])
                first = _chain(c[(xy, cz)].transpose(0, 2, 1), e[(a, b)]).transpose(0, 2, 3, 1)
                second = _chain(c[(b, xz)], e[(a, cz)]).transpose(0, 2, 1, 3)
                right = first + sign((a + 1) * (b + 1)) * second
                table.checks.add("Leibniz", f.equal(left, right), degrees=[a, b, cz])
    if csm is not None:
        sbi = reg.sbi(NEGATIVE)
        for (a, b), tensor in sorted(e.items()):
            t = a + b - 1
            if not csm.has(a, b) or t not in sbi.j or a not in sbi.j or b not in sbi.j:
                continue
            left = _left(sbi.j[t], tensor)
            right = _contract(_contract(csm.entries[(a, b)], sbi.j[a], 1), sbi.j[b], 2)
            table.checks.add("j{{x,y}} = [jx, jy]", f.equal(left, right), degrees=[a, b])
    return table


def negative_cyclic_homology_bracket(reg, cert, table=None, transfer=None):
    """The cyclic bracket of M read on the chain side: HC^n(M) = HC^-_{d-1-n}(V), degree 1 - d."""
    f, d = reg.field, reg.d
    table = table or theoremA_bracket(reg, cert, transfer=transfer)
    relabeled = BracketTable(f"negative cyclic homology bracket of {reg.calc.name}",
                             "[z,w] on HC^-_(d-1-n)", 1 - d, "chain degree")
    for n, dim in table.dims.items():
        relabeled.dims[d - 1 - n] = dim
    for (a, b), tensor in table.entries.items():
        relabeled.set(d - 1 - a, d - 1 - b, tensor)
    lie_checks(relabeled, f)
    return relabeled


# corollaries on H(M)

def corollary_checks(reg, cert):
    """L_{f⌣g} = (-1)^{pq} L_{g⌣f} on H(M); the Poisson form of L is recorded only."""
    f, calc, alg = reg.field, reg.calc, reg.algebra
    commutes = ValidationReport(f"L of cup commutes {reg.name}")
    poisson = IdentityReport("L_poisson", "L_{f,g⌣h} = L_{{f,g}⌣h} + (-1)^((f-1)g) L_{g⌣{f,h}}",
                             recorded_only=True)
    arities = [p for p in cert.arities() if alg.cohomology(p) is not None]
    sections = {p: alg.cohomology(p).subquotient.section for p in arities}

    def vanishes(arity, chains):
        """chains (..., dim 𝔤(arity)) induce zero on H(M) through L."""
        try:
            family = calc.lie(arity)
        except SKIPPABLE:
            return None
        verdict = True
        for k in range(reg.mixed.lo, reg.mixed.hi + 1):
            op = reg.operator(family, k)
            target = k + arity - 1
            if op is None or reg.homology(target) is None:
                continue
            flat = chains.reshape(int(np.prod(chains.shape[:-1], dtype=int)), chains.shape[-1])
            combined = np.zeros((flat.shape[0],) + op.shape[1:], dtype=object)
            if flat.size and op.size:
                combined = f.reduce(np.tensordot(flat, op, axes=([1], [0])))
            for matrix in combined:
                try:
                    induced = induced_map(matrix, reg.homology(k), reg.homology(target), f)
                except NotAChainMap:
                    return False
                verdict = verdict and f.is_zero(induced)
        return verdict

    for p in arities:
        for q in arities:
            if p + q > alg.arity_max:
                continue
            try:
                fg = _contract(_contract(calc.cup_coords(p, q), sections[p], 0), sections[q], 1)
                gf = _contract(_contract(calc.cup_coords(q, p), sections[q], 0), sections[p], 1)
            except SKIPPABLE:
                continue
            verdict = vanishes(p + q, f.reduce(fg - sign(p * q) * gf.transpose(1, 0, 2)))
            if verdict is not None:
                commutes.add("L_{f⌣g} = (-1)^{pq} L_{g⌣f}", verdict, p=p, q=q)
            for r in arities:
                arity = p + q + r - 1
                if arity > alg.arity_max or p + r - 1 < 0 or p + q - 1 < 0:
                    continue
                try:
                    gh = calc.cup_coords(q, r)
                    left = _chain(gh, calc.bracket_coords(p, q + r).transpose(1, 0, 2)).transpose(2, 0, 1, 3)
                    first = _chain(calc.bracket_coords(p, q), calc.cup_coords(p + q - 1, r))
                    fh = calc.bracket_coords(p, r)
                    second = _chain(fh, calc.cup_coords(q, p + r - 1).transpose(1, 0, 2)).transpose(0, 2, 1, 3)
                except SKIPPABLE:
                    poisson.skip()
                    continue
                total = left - first - sign((p - 1) * q) * second
                total = _contract(_contract(_contract(total, sections[p], 0), sections[q], 1), sections[r], 2)
                verdict = vanishes(arity, f.reduce(total))
                if verdict is None:
                    poisson.skip()
                else:
                    poisson.record(verdict, p=p, q=q, r=r)
    return commutes, poisson
