#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Cartan calculus operators on opposite modules and cyclic modules, and the
identity battery checked on them.

Operators are materialized per source degree as matrices on (normalized)
chains. A family indexed by operad elements carries leading batch axes, one
per operad argument, so ``family.at(n)`` has shape
``batch + (dim N(n + shift), dim N(n))``. Formal power series in u are kept
as dictionaries ``{power: family}``; u is even of chain degree -2.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from tqdm import tqdm

from opcalc.exact_linalg import mat, sign
from opcalc.exceptions import ArityOverflow, WindowOverflow
from opcalc.op_modules import SimplicialChains, dualize, operad_as_module
from opcalc.operads import normalized as normalized_operad
from opcalc.verdicts import IdentityReport, first_nonzero

logger = logging.getLogger("opcalc.calculus")


@dataclass(eq=False)
class ChainSpace:
    """Graded space V(lo..hi) through a dimension callback.

    Past the ``open_end`` side V is unknown (not materialized); past the
    other side it vanishes.
    """

    field: object
    lo: int
    hi: int
    dims: Callable[[int], int]
    name: str = ""
    open_end: str = "hi"

    def dim(self, n):
        if n < self.lo or n > self.hi:
            return 0
        return self.dims(n)

    def inside(self, n):
        return self.lo <= n <= self.hi

    def known(self, n):
        if n > self.hi:
            return self.open_end != "hi"
        if n < self.lo:
            return self.open_end != "lo"
        return True

    def degrees(self):
        return range(self.lo, self.hi + 1)


def _size(shape):
    return int(np.prod(shape, dtype=int))


class OpFamily:
    """Degree-``shift`` operator family on a ChainSpace, memoized per source degree.

    ``at(n)`` is None when the operator or one of its ingredients leaves the
    materialized window; identities at such degrees are skipped.
    """

    def __init__(self, space, shift, batch=(), builder=None, name=""):
        self.space = space
        self.shift = shift
        self.batch = tuple(batch)
        self.builder = builder
        self.name = name
        self._cache = {}

    @classmethod
    def zero(cls, space, shift, batch=()):
        batch = tuple(batch)

        def build(n):
            return np.zeros(batch + (space.dim(n + shift), space.dim(n)), dtype=object)
        return cls(space, shift, batch, build, "0")

    @property
    def parity(self):
        return self.shift % 2

    @property
    def field(self):
        return self.space.field

    def at(self, n):
        if n not in self._cache:
            self._cache[n] = self._evaluate(n)
        return self._cache[n]

    def _evaluate(self, n):
        space, target = self.space, n + self.shift
        if not (space.known(n) and space.known(target)):
            return None
        if not (space.inside(n) and space.inside(target)):
            return np.zeros(self.batch + (space.dim(target), space.dim(n)), dtype=object)
        try:
            return self.builder(n)
        except (ArityOverflow, WindowOverflow) as e:
            logger.debug(f"{self.name} skipped at degree {n}: {e}")
            return None

    def _derived(self, shift, batch, build, name):
        return OpFamily(self.space, shift, batch, build, name)

    def __add__(self, other):
        if other.shift != self.shift or other.batch != self.batch:
            raise ValueError(f"cannot add {self.name} {self.shift}{self.batch} and {other.name} {other.shift}{other.batch}")

        def build(n):
            a, b = self.at(n), other.at(n)
            if a is None or b is None:
                return None
            return self.field.reduce(a + b)
        return self._derived(self.shift, self.batch, build, f"({self.name}+{other.name})")

    def scaled(self, c):
        if c == 1:
            return self

        def build(n):
            a = self.at(n)
            return None if a is None else self.field.reduce(c * a)
        return self._derived(self.shift, self.batch, build, f"{c}{self.name}")

    def __neg__(self):
        return self.scaled(-1)

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other):
        """Composition self ∘ other with batch axes self.batch + other.batch."""
        def build(n):
            right = other.at(n)
            left = self.at(n + other.shift)
            if left is None or right is None:
                return None
            o, m = left.shape[-2:]
            i = right.shape[-1]
            product = mat(left.reshape((_size(self.batch), 1, o, m)), right.reshape((1, _size(other.batch), m, i)))
            return self.field.reduce(product.reshape(self.batch + other.batch + (o, i)))
        return self._derived(self.shift + other.shift, self.batch + other.batch, build,
                             f"{self.name}{other.name}")

    def reindex(self, coeffs, axis=0):
        """Replace batch axis ``axis`` (a basis) by the combinations given in ``coeffs[..., k]``."""
        coeffs = np.asarray(coeffs, dtype=object)
        new = coeffs.shape[:-1]
        batch = self.batch[:axis] + new + self.batch[axis + 1:]

        def build(n):
            a = self.at(n)
            if a is None:
                return None
            if coeffs.size == 0 or a.size == 0:
                return np.zeros(batch + a.shape[-2:], dtype=object)
            t = np.tensordot(coeffs, a, axes=([coeffs.ndim - 1], [axis]))
            if axis:
                t = np.moveaxis(t, list(range(len(new))), list(range(axis, axis + len(new))))
            return self.field.reduce(t)
        return self._derived(self.shift, batch, build, f"{self.name}'")

    def transpose_batch(self, perm):
        perm = list(perm)
        if perm == list(range(len(self.batch))):
            return self
        batch = tuple(self.batch[k] for k in perm)

        def build(n):
            a = self.at(n)
            return None if a is None else a.transpose(perm + [len(perm), len(perm) + 1])
        return self._derived(self.shift, batch, build, self.name)


class UOp:
    """Operator-valued polynomial in u: ``terms[k]`` is the coefficient of u^k."""

    def __init__(self, terms):
        self.terms = dict(terms)
        first = next(iter(self.terms.values()))
        self.space, self.batch = first.space, first.batch
        self.degree = first.shift - 2 * next(iter(self.terms))

    @classmethod
    def of(cls, op):
        return op if isinstance(op, UOp) else cls({0: op})

    @property
    def parity(self):
        return self.degree % 2

    def _combine(self, other, factor):
        other = UOp.of(other)
        terms = dict(self.terms)
        for k, f in other.terms.items():
            f = f.scaled(factor)
            terms[k] = terms[k] + f if k in terms else f
        return UOp(terms)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scaled(-1)

    def scaled(self, c):
        return UOp({k: f.scaled(c) for k, f in self.terms.items()})

    def __matmul__(self, other):
        other = UOp.of(other)
        terms = {}
        for i, f in self.terms.items():
            for j, g in other.terms.items():
                term = f @ g
                terms[i + j] = terms[i + j] + term if i + j in terms else term
        return UOp(terms)

    def reindex(self, coeffs, axis=0):
        return UOp({k: f.reindex(coeffs, axis) for k, f in self.terms.items()})

    def transpose_batch(self, perm):
        return UOp({k: f.transpose_batch(perm) for k, f in self.terms.items()})

    def shifted(self, power):
        """Multiplication by u^power."""
        return UOp({k + power: f for k, f in self.terms.items()})


def commutator(x, y):
    """Graded commutator [x, y] = xy - (-1)^{|x||y|} yx with batch axes x.batch + y.batch."""
    if isinstance(x, UOp) or isinstance(y, UOp):
        x, y = UOp.of(x), UOp.of(y)
    back = y @ x
    perm = list(range(len(y.batch), len(y.batch) + len(x.batch))) + list(range(len(y.batch)))
    return x @ y - back.transpose_batch(perm).scaled(sign(x.parity * y.parity))


def _act_single(module, i, a, p, n, y):
    """Apply one operad element to every block of y[..., dim N(n), k]."""
    lead, (dim_n, k) = y.shape[:-2], y.shape[-2:]
    count = _size(lead)
    flat = np.moveaxis(y.reshape((count, dim_n, k)), 1, 0).reshape(dim_n, count * k)
    out = module.act(i, a, p, n, flat)[0]
    rows = out.shape[0]
    return np.moveaxis(out.reshape(rows, count, k), 0, 1).reshape(lead + (rows, k))


class Calculus:
    """Shared surface of a homotopy Cartan calculus on a ChainSpace.

    Subclasses provide b, B, cap, lie, homotopy_s, homotopy_t and the cochain
    side (inputs, coords, delta_coords, cup_coords, bracket_coords).
    """

    space = None

    @property
    def name(self):
        return self.space.name

    def d_u(self):
        return UOp({0: self.b(), 1: self.B()})

    def big_i(self, p):
        """I = i + uS."""
        return UOp({0: self.cap(p), 1: self.homotopy_s(p)})


class ModuleCalculus(Calculus):
    """i, L, S, T, b and B on the (normalized) chains of an opposite module."""

    def __init__(self, module, nbar=None, chains=None, normalized=True):
        self.module = module
        self.operad = module.operad
        self.field = module.field
        self.chains = chains or SimplicialChains(module)
        self.nbar = nbar or normalized_operad(self.operad)
        self.normalized = normalized
        dims = self.chains.normalized_dim if normalized else self.chains.dim
        label = "normalized" if normalized else "full"
        self.space = ChainSpace(self.field, 0, module.top, dims, f"{label} {module.name}")
        self._families = {}

    def arities(self):
        return range(0, self.operad.arity_max + 1)

    def inputs(self, p):
        if p < 0 or p > self.operad.arity_max:
            return np.zeros((0, max(self.operad.dim(p), 0)), dtype=object)
        return self.nbar.basis(p) if self.normalized else self.operad.basis(p)

    def coords(self, rows, p):
        """Coordinates of operad elements along ``inputs(p)``."""
        rows = np.asarray(rows, dtype=object)
        if p < 0:
            return np.zeros(rows.shape[:-1] + (0,), dtype=object)
        if not self.normalized:
            return rows
        flat = rows.reshape(-1, self.operad.dim(p))
        self.nbar.require_normalized(flat, p)
        return self.nbar.coords(flat, p).reshape(rows.shape[:-1] + (self.nbar.dim(p),))

    def delta_coords(self, p):
        """C with δ(input_a) = Σ_c C[a, c] input_c in arity p + 1."""
        if self.normalized:
            return self.nbar.delta_matrix(p).T
        return self.operad.delta_matrix(p).T

    def cup_coords(self, p, q):
        return self.coords(self.operad.cup(self.inputs(p), p, self.inputs(q), q), p + q)

    def bracket_coords(self, p, q):
        if p + q - 1 < 0:
            return np.zeros((len(self.inputs(p)), len(self.inputs(q)), 0), dtype=object)
        return self.coords(self.operad.gerstenhaber(self.inputs(p), p, self.inputs(q), q), p + q - 1)

    # raw operators on N, acting on column blocks x of N(n)

    def _zeros(self, batch, target, k):
        return np.zeros(tuple(batch) + (self.module.dim(target), k), dtype=object)

    def raw_cap(self, a, p, n, x):
        if p > n:
            return self._zeros((len(a),), n - p, x.shape[1])
        lifted = self.operad.compose_flat(2, self.operad.mu, 2, a, p)
        return self.module.act(0, lifted, p + 1, n, x)

    def raw_lie(self, a, p, n, x):
        if p > n + 1:
            return self._zeros((len(a),), n - p + 1, x.shape[1])
        module = self.module
        total = self._zeros((len(a),), n - p + 1, x.shape[1])
        for i in range(1, n - p + 2):
            total = total + sign((p - 1) * (i - 1)) * module.act(i, a, p, n, x)
        rotated = x
        for i in range(1, p + 1):
            total = total + sign(n * (i - 1) + p - 1) * module.act(0, a, p, n, rotated)
            rotated = module.cyc(n, rotated)
        return self.field.reduce(total)

    def raw_s(self, a, p, n, x):
        total = self._zeros((len(a),), n - p + 2, x.shape[1])
        if p > n:
            return total
        module, unit = self.module, self.operad.unit
        rotated = x
        for j in range(1, n - p + 2):
            for i in range(j, n - p + 2):
                coeff = sign(n * (j - 1) + (p - 1) * (i - 1))
                inner = module.act(i, a, p, n, rotated)
                total = total + coeff * _act_single(module, 0, unit, 0, n - p + 1, inner)
            rotated = module.cyc(n, rotated)
        return self.field.reduce(total)

    def raw_t(self, a, p, c, q, n, x):
        rows, cols = len(a), len(c)
        total = self._zeros((rows, cols), n - p - q + 2, x.shape[1])
        if p <= 1 or n - p - q + 2 < 0:
            return total
        rotated = x
        for j in range(1, p):
            for i in range(j, p):
                coeff = sign(n * (j - 1) + (q - 1) * (i - j) + p)
                composed = self.operad.compose_flat(p - i + j, a, p, c, q)
                block = self.module.act(0, composed, p + q - 1, n, rotated)
                total = total + coeff * block.reshape(total.shape)
            rotated = self.module.cyc(n, rotated)
        return self.field.reduce(total)

    # families

    def _family(self, key, shift, batch, raw, name):
        if key in self._families:
            return self._families[key]
        chains = self.chains

        if self.normalized:
            def build(n):
                return chains.descend(lambda x: raw(n, x), n, n + shift, name)
        else:
            def build(n):
                return raw(n, np.eye(chains.dim(n), dtype=object))
        family = OpFamily(self.space, shift, batch, build, name)
        self._families[key] = family
        return family

    def b(self):
        if "b" not in self._families:
            get = self.chains.b_bar if self.normalized else self.chains.b
            self._families["b"] = OpFamily(self.space, -1, (), get, "b")
        return self._families["b"]

    def B(self):
        if "B" not in self._families:
            get = self.chains.B_bar if self.normalized else self.chains.B
            self._families["B"] = OpFamily(self.space, 1, (), get, "B")
        return self._families["B"]

    def cap(self, p):
        a = self.inputs(p)
        if p < 0:
            return OpFamily.zero(self.space, -p, (0,))
        return self._family(("i", p), -p, (len(a),), lambda n, x: self.raw_cap(a, p, n, x), f"i[{p}]")

    def lie(self, p):
        a = self.inputs(p)
        if p < 0:
            return OpFamily.zero(self.space, -p + 1, (0,))
        return self._family(("L", p), -p + 1, (len(a),), lambda n, x: self.raw_lie(a, p, n, x), f"L[{p}]")

    def homotopy_s(self, p):
        if p < 0:
            return OpFamily.zero(self.space, -p + 2, (0,))
        a = self.inputs(p)
        return self._family(("S", p), -p + 2, (len(a),), lambda n, x: self.raw_s(a, p, n, x), f"S[{p}]")

    def homotopy_t(self, p, q):
        a, c = self.inputs(p), self.inputs(q)
        if p < 0 or q < 0:
            return OpFamily.zero(self.space, -p - q + 2, (len(a), len(c)))
        return self._family(("T", p, q), -p - q + 2, (len(a), len(c)),
                            lambda n, x: self.raw_t(a, p, c, q, n, x), f"T[{p},{q}]")


# identity battery

def _verify(report, calc, lhs, rhs, **where):
    """Record lhs == rhs coefficientwise in u at every source degree of the window."""
    lhs, rhs = UOp.of(lhs), UOp.of(rhs)
    f = calc.field
    for n in calc.space.degrees():
        failure, skipped = None, False
        for k in sorted(set(lhs.terms) | set(rhs.terms)):
            a = lhs.terms[k].at(n) if k in lhs.terms else 0
            b = rhs.terms[k].at(n) if k in rhs.terms else 0
            if a is None or b is None:
                skipped = True
                break
            hit = first_nonzero(f.reduce(np.asarray(a - b, dtype=object)))
            if hit is not None and failure is None:
                failure = {"u": k, "entry": list(hit)}
        if skipped:
            report.skip()
        elif failure is None:
            report.record(True)
        else:
            report.record(False, n=n, **where, **failure)


def _guarded(report, check, *args):
    """Run one check; a window overflow while building its operators counts as a skip."""
    try:
        check(*args)
    except (ArityOverflow, WindowOverflow) as e:
        logger.debug(f"{report.name} skipped at {args}: {e}")
        report.skip()


def _pairs(calc):
    for p in calc.arities():
        for q in calc.arities():
            yield p, q


def cartan_rinehart(calc):
    report = IdentityReport("cartan_rinehart", "(a) L = [B,i] + [b,S] - S_δ; [b,i] = i_δ; [B,S] = 0")
    b, B = calc.b(), calc.B()

    def check(p):
        dc = calc.delta_coords(p)
        i, L, S = calc.cap(p), calc.lie(p), calc.homotopy_s(p)
        s_delta = calc.homotopy_s(p + 1).reindex(dc)
        _verify(report, calc, L, commutator(B, i) + commutator(b, S) - s_delta, relation="L", p=p)
        _verify(report, calc, commutator(b, i), calc.cap(p + 1).reindex(dc), relation="[b,i]", p=p)
        _verify(report, calc, commutator(B, S), OpFamily.zero(calc.space, -p + 3, S.batch), relation="[B,S]", p=p)

    for p in calc.arities():
        _guarded(report, check, p)
    return report


def cap_mult(calc, name="cap_mult"):
    report = IdentityReport(name, "(b) i_φ i_ψ = i_{φ⌣ψ}")

    def check(p, q):
        _verify(report, calc, calc.cap(p) @ calc.cap(q), calc.cap(p + q).reindex(calc.cup_coords(p, q)), p=p, q=q)

    for p, q in _pairs(calc):
        _guarded(report, check, p, q)
    return report


def _gdt_right(calc, p, q, d_part):
    """(-1)^(q+1) [d_part, T(φ,ψ)] + T(δφ,ψ) + (-1)^q T(φ,δψ), batch (ψ, φ).

    With an unsigned cyclic operator the homotopy enters with the sign of ψ;
    the δ-corrections are fixed by [b, -] of both sides.
    """
    dp, dq = calc.delta_coords(p), calc.delta_coords(q)
    t = UOp.of(calc.homotopy_t(p, q))
    t_dp = calc.homotopy_t(p + 1, q).reindex(dp, axis=0)
    t_dq = calc.homotopy_t(p, q + 1).reindex(dq, axis=1)
    right = commutator(d_part, t).scaled(sign(q + 1)) + UOp.of(t_dp) + UOp.of(t_dq).scaled(sign(q))
    return right.transpose_batch([1, 0])


def gdt_b(calc):
    report = IdentityReport("gdt_b", "(c) [i_ψ, L_φ] - i_{ψ,φ} = (-1)^(ψ+1) [b, T(φ,ψ)] + T(δφ,ψ) + (-1)^ψ T(φ,δψ)")

    def check(p, q):
        right = _gdt_right(calc, p, q, UOp.of(calc.b()))
        left = commutator(calc.cap(q), calc.lie(p)) - calc.cap(p + q - 1).reindex(calc.bracket_coords(q, p))
        _verify(report, calc, left, right, p=p, q=q)

    for p, q in _pairs(calc):
        _guarded(report, check, p, q)
    return report


def gdt_B(calc):
    report = IdentityReport("gdt_B", "(d) [S_ψ, L_φ] - S_{ψ,φ} = (-1)^(ψ+1) [B, T(φ,ψ)]")

    def check(p, q):
        left = commutator(calc.homotopy_s(q), calc.lie(p)) - calc.homotopy_s(p + q - 1).reindex(calc.bracket_coords(q, p))
        right = commutator(calc.B(), calc.homotopy_t(p, q)).scaled(sign(q + 1)).transpose_batch([1, 0])
        _verify(report, calc, left, right, p=p, q=q)

    for p, q in _pairs(calc):
        _guarded(report, check, p, q)
    return report


def gdt_combined(calc):
    report = IdentityReport("gdt_combined", "(e) uL = [d_u, I] - I_δ and the u-linear homotopy formula with I = i + uS")
    d_u = calc.d_u()

    def check_lie(p):
        right = commutator(d_u, calc.big_i(p)) - calc.big_i(p + 1).reindex(calc.delta_coords(p))
        _verify(report, calc, UOp.of(calc.lie(p)).shifted(1), right, relation="uL", p=p)

    def check_homotopy(p, q):
        right = _gdt_right(calc, p, q, d_u)
        left = commutator(calc.big_i(q), calc.lie(p)) - calc.big_i(p + q - 1).reindex(calc.bracket_coords(q, p))
        _verify(report, calc, left, right, relation="homotopy", p=p, q=q)

    for p in calc.arities():
        _guarded(report, check_lie, p)
    for p, q in _pairs(calc):
        _guarded(report, check_homotopy, p, q)
    return report


def l_chain_map(calc):
    report = IdentityReport("L_chain_map", "(f) [d_u, L_φ] + L_δφ = 0 blockwise: [b, L] = -L_δ, [B, L] = 0")

    def check(p):
        L = calc.lie(p)
        _verify(report, calc, commutator(calc.b(), L), -calc.lie(p + 1).reindex(calc.delta_coords(p)),
                relation="b", p=p)
        _verify(report, calc, commutator(calc.B(), L), OpFamily.zero(calc.space, -p + 2, L.batch), relation="B", p=p)

    for p in calc.arities():
        _guarded(report, check, p)
    return report


def l_lie_morphism(calc):
    report = IdentityReport("L_lie_morphism", "(g) [L_φ, L_ψ] = L_{φ,ψ}", recorded_only=True)

    def check(p, q):
        left = commutator(calc.lie(p), calc.lie(q))
        _verify(report, calc, left, calc.lie(p + q - 1).reindex(calc.bracket_coords(p, q)), p=p, q=q)

    for p, q in _pairs(calc):
        _guarded(report, check, p, q)
    return report


def _phi(calc, p, q, with_u=True):
    """Φ_{f,g} = S_{f⌣g} - S_f i_g - i_f S_g - u S_f S_g on batch (f, g)."""
    s_p, s_q = calc.homotopy_s(p), calc.homotopy_s(q)
    head = (calc.homotopy_s(p + q).reindex(calc.cup_coords(p, q))
            - s_p @ calc.cap(q) - calc.cap(p) @ s_q)
    if not with_u:
        return UOp.of(head)
    return UOp({0: head, 1: -(s_p @ s_q)})


def _cup_homotopy(calc, report, p, q, with_u):
    dp, dq = calc.delta_coords(p), calc.delta_coords(q)
    phi = _phi(calc, p, q, with_u)
    phi_dp, phi_dq = _phi(calc, p + 1, q, with_u), _phi(calc, p, q + 1, with_u)
    parity_sign = sign(p)
    if with_u:
        d, i_p, i_q = calc.d_u(), calc.big_i(p), calc.big_i(q)
    else:
        d, i_p, i_q = UOp.of(calc.b()), UOp.of(calc.cap(p)), UOp.of(calc.cap(q))
    left = UOp.of(calc.lie(p + q).reindex(calc.cup_coords(p, q)))
    right = (UOp.of(calc.lie(p)) @ i_q + (i_p @ calc.lie(q)).scaled(parity_sign)
             + commutator(d, phi) - phi_dp.reindex(dp, axis=0) - phi_dq.reindex(dq, axis=1).scaled(parity_sign))
    if not with_u:
        left, right = UOp({0: left.terms[0]}), UOp({0: right.terms[0]})
    _verify(report, calc, left, right, p=p, q=q)


def phi_homotopy(calc):
    report = IdentityReport("phi_homotopy", "(h) L_{f⌣g} = L_f I_g + (-1)^f I_f L_g + [d_u, Φ] - Φ_{δf,g} - (-1)^f Φ_{f,δg}")
    for p, q in _pairs(calc):
        _guarded(report, _cup_homotopy, calc, report, p, q, True)
    return report


def cor_u0(calc):
    report = IdentityReport("cor_u0", "(i) L_{f⌣g} = L_f i_g + (-1)^f i_f L_g + [b, Φ0] - Φ0_{δf,g} - (-1)^f Φ0_{f,δg}")
    for p, q in _pairs(calc):
        _guarded(report, _cup_homotopy, calc, report, p, q, False)
    return report


SUITES = {
    "cartan_rinehart": cartan_rinehart,
    "cap_mult": cap_mult,
    "gdt_b": gdt_b,
    "gdt_B": gdt_B,
    "gdt_combined": gdt_combined,
    "L_chain_map": l_chain_map,
    "L_lie_morphism": l_lie_morphism,
    "phi_homotopy": phi_homotopy,
    "cor_u0": cor_u0,
}


def identity_suite(name, calc):
    if name not in SUITES:
        raise KeyError(f"unknown identity suite {name!r}; choose from {', '.join(SUITES)}")
    report = SUITES[name](calc)
    level = logging.INFO if report.passed else logging.ERROR
    logger.log(level, f"{name} on {calc.name}: {report.checked} checked, {report.skipped} skipped, "
                      f"{len(report.failures)} failed")
    return report


def face_assembly(calc):
    """The i >= 1 part of L_μ is the alternating sum of the inner faces."""
    report = IdentityReport("face_assembly", "Σ_{i>=1} (-1)^(i-1) μ•_i = Σ (-1)^(i-1) d_i")
    chains, module, mu = calc.chains, calc.module, calc.operad.mu
    for n in range(2, module.top + 1):
        eye = np.eye(chains.dim(n), dtype=object)
        part = sum(sign(i - 1) * module.act(i, mu, 2, n, eye)[0] for i in range(1, n))
        faces = sum(sign(i - 1) * chains.face(i, n) for i in range(1, n))
        report.record(calc.field.equal(part, faces), n=n)
    return report


def extra_checks(calc):
    """Face assembly of L_μ and the cap product on unnormalized chains."""
    full = ModuleCalculus(calc.module, calc.nbar, calc.chains, normalized=False)
    return [face_assembly(calc), cap_mult(full, name="cap_mult_full")]


def run_battery(calc, names=None, progress=False):
    names = list(names or SUITES)
    return [identity_suite(name, calc) for name in tqdm(names, desc=f"battery {calc.name}", disable=not progress)]


# cyclic-module side

class CyclicOperators:
    """b, B, ι, L, S, T acting on a cyclic module M(q) over a cyclic operad.

    Every method returns ``batch + (dim target, dim M(q))``.
    """

    def __init__(self, module):
        self.module = module
        self.operad = module.operad
        self.field = module.field

    def _basis(self, q):
        return self.module.basis(q)

    def _matrix(self, images):
        """Images of the basis (basis axis first) as a matrix."""
        return self.field.reduce(np.moveaxis(images, 0, -1))

    def b(self, q):
        op, m = self.operad, self._basis(q)
        images = op.compose(2, op.mu, 2, m, q)[0] + sign(q + 1) * op.compose(1, op.mu, 2, m, q)[0]
        for i in range(1, q + 1):
            images = images + sign(i) * op.compose(i, m, q, op.mu, 2)[:, 0, :]
        return self._matrix(images)

    def B(self, q):
        op, mod = self.operad, self.module
        if q == 0:
            return np.zeros((0, mod.dim(0)), dtype=object)
        lowered = op.compose(q, mod.tau(self._basis(q), q), q, op.unit, 0)[:, 0, :]
        images = np.zeros_like(lowered)
        for i in range(q):
            images = images + sign((q - 1) * i) * mod.tau(lowered, q - 1, i)
        return self._matrix(images)

    def iota(self, a, p, q):
        return self.field.reduce(self.operad.cup(self._basis(q), q, a, p).transpose(1, 2, 0))

    def lie(self, a, p, q):
        op, mod, m = self.operad, self.module, self._basis(q)
        total = np.zeros((len(a), len(m), max(op.dim(p + q - 1), 0)), dtype=object)
        for i in range(1, q + 1):
            total = total + sign((p - 1) * (i - 1)) * mod.right(i, m, q, a, p).transpose(1, 0, 2)
        for i in range(1, p + 1):
            total = total + sign((p - 1) * i + q * (i - 1)) * mod.left(p - i + 1, op.apply_tau(a, p, i), p, m, q)
        return self.field.reduce(total.transpose(0, 2, 1))

    def homotopy_s(self, a, p, q):
        op, mod, m = self.operad, self.module, self._basis(q)
        total = np.zeros((len(a), len(m), max(op.dim(q + p - 2), 0)), dtype=object)
        for i in range(1, q):
            for j in range(1, i + 1):
                coeff = sign(p * (i - j) + q * (j - 1) + i - 1)
                lowered = op.compose(q - j + 1, mod.tau(m, q, j), q, op.unit, 0)[:, 0, :]
                total = total + coeff * op.compose(i - j + 1, lowered, q - 1, a, p).transpose(1, 0, 2)
        return self.field.reduce(total.transpose(0, 2, 1))

    def homotopy_t(self, a, p, c, r, q):
        op, m = self.operad, self._basis(q)
        target = op.dim(p + q + r - 2)
        total = np.zeros((len(a), len(c), max(target, 0), len(m)), dtype=object)
        for j in range(1, p):
            for i in range(j, p):
                coeff = sign(q * (j - 1) + r * (i - 1) + (p - 1) * j + i)
                first = op.compose_flat(p - j + 1, op.apply_tau(a, p, j), p, m, q)
                second = op.compose(p - i, first, p + q - 1, c, r)
                second = second.reshape(len(a), len(m), len(c), target).transpose(0, 2, 3, 1)
                total = total + coeff * second
        return self.field.reduce(total)


def cyclic_module_operators(module):
    return CyclicOperators(module)


def _eye(n):
    return np.eye(n, dtype=object)


def transposition_checks(ops, dual_calc):
    """Each cyclic-module operator is the transpose of its counterpart on the dual."""
    report = IdentityReport("transposition", "(j) <op(x), m> = <x, op'(m)>")
    full = ModuleCalculus(dual_calc.module, dual_calc.nbar, dual_calc.chains, normalized=False)
    chains, top, f = full.chains, full.module.top, ops.field
    dim = full.module.dim

    def check(name, left, right, **where):
        try:
            passed = f.equal(left(), np.swapaxes(right(), -1, -2))
        except (ArityOverflow, WindowOverflow) as e:
            logger.debug(f"transposition of {name} skipped at {where}: {e}")
            report.skip()
            return
        report.record(passed, operator=name, **where)

    for q in range(0, top):
        check("b", lambda: ops.b(q), lambda: chains.b(q + 1), q=q)
    for q in range(1, top + 1):
        check("B", lambda: ops.B(q), lambda: chains.B(q - 1), q=q)
    for p in range(0, ops.operad.arity_max + 1):
        a = ops.operad.basis(p)
        for q in range(0, top + 1):
            n = q + p
            if n <= top:
                check("iota", lambda: ops.iota(a, p, q), lambda: full.raw_cap(a, p, n, _eye(dim(n))), p=p, q=q)
            n = q + p - 1
            if 0 <= n <= top:
                check("L", lambda: ops.lie(a, p, q), lambda: full.raw_lie(a, p, n, _eye(dim(n))), p=p, q=q)
            n = q + p - 2
            if 0 <= n <= top:
                check("S", lambda: ops.homotopy_s(a, p, q), lambda: full.raw_s(a, p, n, _eye(dim(n))), p=p, q=q)
            for r in range(0, ops.operad.arity_max + 1):
                n = q + p + r - 2
                if not 0 <= n <= top:
                    continue
                c = ops.operad.basis(r)
                check("T", lambda: ops.homotopy_t(a, p, c, r, q),
                      lambda: full.raw_t(a, p, c, r, n, _eye(dim(n))), p=p, q=q, r=r)
    return report


def operad_module_examples(ops, nbar):
    """Evaluations at the unit e and the square of B on normalized cochains."""
    report = IdentityReport("operad_as_module",
                            "ι_φ e = φ, L_φ e = ±Bφ, T(φ,ψ)e = ±S_ψ φ, be = S_φ e = 0, ι_φ ψ = ψ⌣φ, B² = 0 on Ō")
    op, f = ops.operad, ops.field
    e = op.unit.T
    top = op.arity_max

    def check(relation, build, **where):
        try:
            passed = build()
        except (ArityOverflow, WindowOverflow):
            report.skip()
            return
        report.record(passed, relation=relation, **where)

    check("b e", lambda: f.is_zero(mat(ops.b(0), e)))
    for p in range(0, top + 1):
        a = op.basis(p)
        check("iota e", lambda: f.equal(mat(ops.iota(a, p, 0), e)[..., 0], a), p=p)
        if p >= 1:
            check("L e", lambda: f.equal(mat(ops.lie(a, p, 0), e)[..., 0], sign(p - 1) * mat(ops.B(p), a.T).T), p=p)
            check("S e", lambda: f.is_zero(mat(ops.homotopy_s(a, p, 0), e)), p=p)
        for r in range(0, top + 1):
            c = op.basis(r)
            if 0 <= p + r - 2 <= top:
                def t_at_unit():
                    t_e = mat(ops.homotopy_t(a, p, c, r, 0), e)[..., 0]
                    s_phi = mat(ops.homotopy_s(c, r, p), a.T).transpose(2, 0, 1)
                    return f.equal(t_e, sign(p * r) * s_phi)
                check("T e", t_at_unit, p=p, r=r)
            if r + 1 <= top and p + r <= top:
                check("iota psi", lambda: f.equal(mat(ops.iota(a, p, r), c.T).transpose(0, 2, 1),
                                                  op.cup_by_composition(c, r, a, p).transpose(1, 0, 2)), p=p, r=r)
    for q in range(2, top + 1):
        check("B^2 on normalized", lambda: f.is_zero(mat(ops.B(q - 1), mat(ops.B(q), nbar.inclusion[q]))), q=q)
    return report


def cyclic_side(operad, nbar=None, names=None, progress=False):
    """The battery on the dual of O as a module over itself, plus transposition and unit evaluations."""
    nbar = nbar or normalized_operad(operad)
    module = operad_as_module(operad)
    calc = ModuleCalculus(dualize(module), nbar)
    reports = run_battery(calc, names, progress)
    for report in reports:
        report.name = f"dual {report.name}"
        report.tag = f"(j) {report.tag}"
    ops = cyclic_module_operators(module)
    reports.append(transposition_checks(ops, calc))
    reports.append(operad_module_examples(ops, nbar))
    return reports
