#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Opposite modules and cyclic modules over End(A).

An opposite module N carries compositions O(p) ⊗ N(n) -> N(n-p+1) for
0 <= i <= n-p+1 (slot 0 is the extra composition) and a cyclic operator
t. Elements of N(n) are columns; ``act`` returns one matrix block per
operad row: shape (rows(a), dim N(n-p+1), cols(x)).
"""

import logging

import numpy as np

from opcalc.complexes import from_chains, homology, validate_mixed
from opcalc.exact_linalg import Subspace, columns, hstack, image_basis, mat, sign, subquotient
from opcalc.exceptions import (
    CyclicAxiomViolation,
    DegeneracyNotPreserved,
    NotAComplex,
    WindowOverflow,
)
from opcalc.operads import check_associativity, end_operad
from opcalc.verdicts import ValidationReport, first_nonzero

logger = logging.getLogger("opcalc.op_modules")


class OppositeModule:
    """Degree window [0, top] of an opposite module over ``operad``."""

    def __init__(self, operad, top, name):
        self.operad = operad
        self.field = operad.field
        self.top = top
        self.name = name
        self._cache = {}

    def dim(self, n):
        if n < 0 or n > self.top:
            return 0
        return self._dim(n)

    def check_degree(self, n):
        if n < 0 or n > self.top:
            raise WindowOverflow(f"{self.name}: degree {n} outside [0, {self.top}]", degree=n)

    def act(self, i, a, p, n, x):
        """phi •_i x for every row phi of ``a`` and column x of ``x``."""
        self.operad.check_arity(p)
        self.check_degree(n)
        self.check_degree(n - p + 1)
        if not 0 <= i <= n - p + 1:
            raise ValueError(f"slot {i} out of range for arity {p} on degree {n}")
        x = columns(x, self.dim(n))
        a = np.asarray(a, dtype=object).reshape(-1, self.operad.dim(p))
        return self.field.reduce(self._act(i, a, p, n, x))

    def cyc(self, n, x, power=1):
        self.check_degree(n)
        x = columns(x, self.dim(n))
        for _ in range(power):
            x = self.field.reduce(self._cyc(n, x))
        return x

    def act_matrix(self, i, a, p, n):
        return self.act(i, a, p, n, np.eye(self.dim(n), dtype=object))

    def t_matrix(self, n):
        key = ("t", n)
        if key not in self._cache:
            self._cache[key] = self.cyc(n, np.eye(self.dim(n), dtype=object))
        return self._cache[key]

    def _dim(self, n):
        raise NotImplementedError

    def _act(self, i, a, p, n, x):
        raise NotImplementedError

    def _cyc(self, n, x):
        raise NotImplementedError


class ChainsModule(OppositeModule):
    """N(n) = A^{⊗ n+1}; phi acts on the p consecutive factors starting at slot i."""

    def __init__(self, operad, top=None):
        top = operad.arity_max if top is None else top
        super().__init__(operad, top, f"C({operad.alg.name})")
        self.d = operad.d

    def _dim(self, n):
        return self.d ** (n + 1)

    def _act(self, i, a, p, n, x):
        d, m, k = self.d, a.shape[0], x.shape[1]
        chains = x.T.reshape((k,) + (d,) * (n + 1))
        phi = a.reshape((m,) + (d,) * (p + 1))
        t = np.tensordot(phi, chains, axes=(list(range(1, p + 1)), list(range(1 + i, 1 + i + p))))
        perm = [0, 2] + list(range(3, 3 + i)) + [1] + list(range(3 + i, t.ndim))
        return t.transpose(perm).reshape(m, k, self.dim(n - p + 1)).transpose(0, 2, 1)

    def _cyc(self, n, x):
        k = x.shape[1]
        chains = x.T.reshape((k,) + (self.d,) * (n + 1))
        return np.moveaxis(chains, -1, 1).reshape(k, self.dim(n)).T


def chains_module(alg, n_max, operad=None):
    operad = operad or end_operad(alg, n_max)
    module = ChainsModule(operad)
    logger.info(f"built {module.name} on degrees 0..{module.top}")
    return module


class OperadAsModule:
    """O regarded as a cyclic module over itself."""

    def __init__(self, operad):
        self.operad = operad
        self.field = operad.field
        self.top = operad.arity_max
        self.name = f"{operad.name} as module"

    def dim(self, q):
        return self.operad.dim(q)

    def basis(self, q):
        return self.operad.basis(q)

    def left(self, i, a, p, m, q):
        return self.operad.compose(i, a, p, m, q)

    def right(self, i, m, q, a, p):
        return self.operad.compose(i, m, q, a, p)

    def tau(self, m, q, power=1):
        return self.operad.apply_tau(m, q, power)


def operad_as_module(operad):
    if not operad.is_cyclic:
        raise CyclicAxiomViolation(f"{operad.name} carries no cyclic structure")
    return OperadAsModule(operad)


def validate_cyclic_module(module, arity_limit=None):
    """Associativity on O⊗O⊗M, O⊗M⊗O, M⊗O⊗O and the tau relations."""
    operad, f = module.operad, module.field
    limit = min(arity_limit or module.top, module.top)
    report = ValidationReport(f"cyclic module {module.name}")

    def compose(i, a, ka, p, b, kb, q):
        if ka == "M":
            return module.right(i, a, p, b, q)
        if kb == "M":
            return module.left(i, a, p, b, q)
        return operad.compose(i, a, p, b, q)

    def basis(kind, p):
        return module.basis(p) if kind == "M" else operad.basis(p)

    for kinds in (("O", "O", "M"), ("O", "M", "O"), ("M", "O", "O")):
        check_associativity(report, f, compose, basis, limit, kinds)
    for q in range(0, limit + 1):
        m = module.basis(q)
        back = module.tau(m, q, q + 1) if q else m
        report.add("tau^(q+1)=id", f.equal(back, m), q=q)
    for p in range(1, limit + 1):
        for q in range(0, limit + 2 - p):
            P, Q = operad.basis(p), module.basis(q)
            rows, cols, out = len(P), len(Q), module.dim(p + q - 1)
            tau_p = operad.apply_tau(P, p)
            for i in range(2, p + 1):
                lhs = module.tau(module.left(i, P, p, Q, q).reshape(-1, out), p + q - 1)
                rhs = module.left(i - 1, tau_p, p, Q, q)
                report.add("tau(phi o_i m)", f.equal(lhs.reshape(rows, cols, out), rhs), p=p, q=q, i=i)
            if q >= 1:
                lhs = module.tau(module.left(1, P, p, Q, q).reshape(-1, out), p + q - 1)
                rhs = module.right(q, module.tau(Q, q), q, tau_p, p).transpose(1, 0, 2)
                report.add("tau(phi o_1 m)", f.equal(lhs.reshape(rows, cols, out), rhs), p=p, q=q)
    return report


class DualModule(OppositeModule):
    """M* with <phi •_i x, m> = <x, m ∘_i phi> and <t x, m> = <x, tau m>.

    The extra composition is <phi •_0 x, m> = <x, tau(phi) ∘_p m> for p >= 1
    and <x, tau(m) ∘_q phi> with q = n + 1 for p = 0.
    """

    def __init__(self, module):
        super().__init__(module.operad, module.top, f"({module.name})*")
        self.module = module

    def _dim(self, n):
        return self.module.dim(n)

    def _act(self, i, a, p, n, x):
        q = n - p + 1
        basis = self.module.basis(q)
        if i >= 1:
            comp = self.module.right(i, basis, q, a, p).transpose(1, 0, 2)
        elif p >= 1:
            comp = self.module.left(p, self.operad.apply_tau(a, p), p, basis, q)
        else:
            comp = self.module.right(q, self.module.tau(basis, q), q, a, 0).transpose(1, 0, 2)
        return mat(comp, x)

    def _cyc(self, n, x):
        tau = self.module.tau(self.module.basis(n), n)
        return mat(tau, x)


def dualize(module):
    if not module.operad.is_cyclic:
        raise CyclicAxiomViolation(f"{module.operad.name} carries no cyclic structure")
    dual = DualModule(module)
    logger.info(f"built {dual.name} on degrees 0..{dual.top}")
    return dual


def _nested(module, outer, inner, n):
    """outer(inner(x)) on the basis of N(n): shape (rows(outer), out, rows(inner), dim N(n))."""
    (oi, oa, op), (ii, ia, ip) = outer, inner
    first = module.act_matrix(ii, ia, ip, n)
    rows, mid, dim_n = first.shape
    stacked = first.transpose(1, 0, 2).reshape(mid, rows * dim_n)
    second = module.act(oi, oa, op, n - ip + 1, stacked)
    return second.reshape(second.shape[0], second.shape[1], rows, dim_n)


def validate_opposite(module, degree_limit=None):
    """Composition cases, unitality and the cyclic relations on in-window basis elements."""
    operad, f = module.operad, module.field
    top = min(degree_limit if degree_limit is not None else module.top, module.top)
    report = ValidationReport(f"opposite module {module.name}")
    for n in range(0, top + 1):
        for q in range(0, min(operad.arity_max, n + 1) + 1):
            n_mid = n - q + 1
            if n_mid > module.top:
                continue
            Q = operad.basis(q)
            for p in range(0, min(operad.arity_max, n_mid + 1) + 1):
                n_out = n_mid - p + 1
                if n_out > module.top:
                    continue
                P = operad.basis(p)
                for j in range(0, n_mid + 1):
                    for i in range(0, n_out + 1):
                        lhs = _nested(module, (i, P, p), (j, Q, q), n)
                        if j < i:
                            if n - p + 1 > module.top:
                                continue
                            swapped = _nested(module, (j, Q, q), (i + q - 1, P, p), n)
                            rhs = swapped.transpose(2, 1, 0, 3)
                        elif j - p < i:
                            if p + q - 1 > operad.arity_max:
                                continue
                            comp = operad.compose_flat(j - i + 1, P, p, Q, q)
                            block = module.act_matrix(i, comp, p + q - 1, n)
                            rhs = block.reshape(len(P), len(Q), block.shape[1], -1).transpose(0, 2, 1, 3)
                        else:
                            if n - p + 1 > module.top:
                                continue
                            swapped = _nested(module, (j - p + 1, Q, q), (i, P, p), n)
                            rhs = swapped.transpose(2, 1, 0, 3)
                        diff = f.reduce(lhs - rhs)
                        hit = first_nonzero(diff)
                        report.add("composition", hit is None,
                                   None if hit is None else {"entry": list(hit)},
                                   n=n, p=p, q=q, i=i, j=j)
    for n in range(0, top + 1):
        eye = np.eye(module.dim(n), dtype=object)
        for i in range(0, n + 1):
            report.add("unit", f.equal(module.act(i, operad.identity, 1, n, eye)[0], eye), n=n, i=i)
        t = module.t_matrix(n)
        report.add("t^(n+1)=id", f.equal(module.cyc(n, eye, n + 1), eye), n=n)
        for p in range(0, min(operad.arity_max, n + 1) + 1):
            n_out = n - p + 1
            if n_out > module.top:
                continue
            P = operad.basis(p)
            t_out = module.t_matrix(n_out)
            for i in range(0, n - p + 1):
                lhs = mat(t_out, module.act_matrix(i, P, p, n))
                rhs = mat(module.act_matrix(i + 1, P, p, n), t)
                report.add("t(phi o_i x)", f.equal(lhs, rhs), n=n, p=p, i=i)
    logger.info(f"{report.subject}: {report.checked} checks, {len(report.failures)} failures")
    return report


class SimplicialChains:
    """Cyclic k-module structure on an opposite module over (O, mu, e) and its normalized quotient."""

    def __init__(self, module):
        self.module = module
        self.operad = module.operad
        self.field = module.field
        self.top = module.top
        self._cache = {}

    def dim(self, n):
        return self.module.dim(n)

    def _memo(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def face(self, i, n):
        def build():
            if i < n:
                return self.module.act_matrix(i, self.operad.mu, 2, n)[0]
            return mat(self.module.act_matrix(0, self.operad.mu, 2, n)[0], self.module.t_matrix(n))
        return self._memo(("d", i, n), build)

    def degeneracy(self, j, n):
        """s_j: N(n) -> N(n+1) for -1 <= j <= n; s_{-1} is e •_0."""
        return self._memo(("s", j, n), lambda: self.module.act_matrix(j + 1, self.operad.unit, 0, n)[0])

    def t(self, n):
        return self.module.t_matrix(n)

    def b(self, n):
        def build():
            if n <= 0:
                return np.zeros((0, self.dim(max(n, 0))), dtype=object)
            total = np.zeros((self.dim(n - 1), self.dim(n)), dtype=object)
            for i in range(n + 1):
                total = total + sign(i) * self.face(i, n)
            return self.field.reduce(total)
        return self._memo(("b", n), build)

    def B(self, n):
        def build():
            total = np.zeros((self.dim(n + 1), self.dim(n)), dtype=object)
            power = np.eye(self.dim(n), dtype=object)
            extra = self.degeneracy(-1, n)
            for i in range(n + 1):
                total = total + sign(i * n) * mat(extra, power)
                power = mat(self.t(n), power)
            return self.field.reduce(total)
        return self._memo(("B", n), build)

    def validate(self):
        """Simplicial and cyclic identities, t^{n+1} = id and b^2 = 0."""
        f = self.field
        report = ValidationReport(f"simplicial {self.module.name}")
        d, s, t = self.face, self.degeneracy, self.t
        for n in range(2, self.top + 1):
            for j in range(n + 1):
                for i in range(j):
                    report.add("d_i d_j", f.equal(mat(d(i, n - 1), d(j, n)), mat(d(j - 1, n - 1), d(i, n))),
                               n=n, i=i, j=j)
        for n in range(0, self.top):
            for j in range(n + 1):
                for i in range(n + 2):
                    lhs = mat(d(i, n + 1), s(j, n))
                    if i < j:
                        rhs = mat(s(j - 1, n - 1), d(i, n))
                    elif i in (j, j + 1):
                        rhs = np.eye(self.dim(n), dtype=object)
                    else:
                        rhs = mat(s(j, n - 1), d(i - 1, n))
                    report.add("d_i s_j", f.equal(lhs, rhs), n=n, i=i, j=j)
            if n + 2 <= self.top:
                for j in range(n + 1):
                    for i in range(j + 1):
                        report.add("s_i s_j", f.equal(mat(s(i, n + 1), s(j, n)), mat(s(j + 1, n + 1), s(i, n))),
                                   n=n, i=i, j=j)
        for n in range(1, self.top + 1):
            report.add("d_0 t = d_n", f.equal(mat(d(0, n), t(n)), d(n, n)), n=n)
            for i in range(1, n + 1):
                report.add("d_i t = t d_{i-1}", f.equal(mat(d(i, n), t(n)), mat(t(n - 1), d(i - 1, n))), n=n, i=i)
        for n in range(0, self.top):
            for i in range(1, n + 1):
                report.add("s_i t = t s_{i-1}", f.equal(mat(s(i, n), t(n)), mat(t(n + 1), s(i - 1, n))), n=n, i=i)
            report.add("s_0 t = t^2 s_n", f.equal(mat(s(0, n), t(n)), mat(mat(t(n + 1), t(n + 1)), s(n, n))), n=n)
            report.add("s_-1 = t s_n", f.equal(s(-1, n), mat(t(n + 1), s(n, n))), n=n)
        for n in range(2, self.top + 1):
            report.add("b^2", f.is_zero(mat(self.b(n - 1), self.b(n))), n=n)
        return report

    # normalized quotient

    def degenerate(self, n):
        """D(n): span of s_j(N(n-1)) for 0 <= j < n."""
        def build():
            if n <= 0:
                return Subspace.zero(self.dim(max(n, 0)))
            images = hstack([self.degeneracy(j, n - 1) for j in range(n)], self.dim(n))
            return image_basis(images, self.field)
        return self._memo(("D", n), build)

    def quotient(self, n):
        return self._memo(("Q", n), lambda: subquotient(Subspace.full(self.dim(n)), self.degenerate(n), self.field))

    def normalized_dim(self, n):
        if n < 0 or n > self.top:
            return 0
        return self.quotient(n).dim

    def descend(self, apply, n_src, n_dst, name="operator"):
        """Matrix on N̄ of a map N(n_src) -> N(n_dst) that must preserve degenerate chains.

        ``apply`` takes a (dim N(n_src), k) matrix and returns (..., dim N(n_dst), k).
        """
        src, dst = self.quotient(n_src), self.quotient(n_dst)
        degenerate = self.degenerate(n_src).basis
        width = src.section.shape[1]
        images = apply(hstack([src.section, degenerate], self.dim(n_src)))
        images = np.asarray(images, dtype=object)
        projected = self.field.reduce(mat(dst.projection, images))
        if not self.field.is_zero(projected[..., width:]):
            raise DegeneracyNotPreserved(
                f"{name} maps degenerate chains of degree {n_src} outside D({n_dst})", degree=n_src)
        return projected[..., :width]

    def b_bar(self, n):
        if n <= 0:
            return np.zeros((0, self.normalized_dim(max(n, 0))), dtype=object)
        return self._memo(("bbar", n), lambda: self.descend(lambda x: mat(self.b(n), x), n, n - 1, "b"))

    def B_bar(self, n):
        return self._memo(("Bbar", n), lambda: self.descend(lambda x: mat(self.B(n), x), n, n + 1, "B"))

    def validate_normalized(self):
        f = self.field
        report = ValidationReport(f"normalized {self.module.name}")
        for n in range(0, self.top - 1):
            report.add("B^2", f.is_zero(mat(self.B_bar(n + 1), self.B_bar(n))), n=n)
        for n in range(1, self.top):
            commutator = mat(self.B_bar(n - 1), self.b_bar(n)) + mat(self.b_bar(n + 1), self.B_bar(n))
            report.add("[B,b]", f.is_zero(commutator), n=n)
        for n in range(2, self.top + 1):
            report.add("b^2", f.is_zero(mat(self.b_bar(n - 1), self.b_bar(n))), n=n)
        return report

    def hochschild_homology(self, n, normalized=True):
        """HH_n from the chain complex (N, b) or its normalized quotient, for n < top."""
        if normalized:
            return homology(self.normalized_dim(n), self.b_bar(n + 1), self.b_bar(n), n, self.field)
        return homology(self.dim(n), self.b(n + 1), self.b(n), n, self.field)

    def mixed_complex(self, offset=0, name=None):
        """(N̄, b̄, B̄) regraded to cochain degrees k = offset - n over n in [0, top - 1]."""
        top = self.top - 1
        dims = {n: self.normalized_dim(n) for n in range(0, top + 2)}
        b = {n: self.b_bar(n) for n in range(1, top + 2)}
        B = {n: self.B_bar(n) for n in range(0, top + 1)}
        mixed = from_chains(self.field, top, dims, b, B, offset, name or f"normalized {self.module.name}")
        report = validate_mixed(mixed)
        if not report.passed:
            failure = report.failures[0]
            raise NotAComplex(f"{mixed.name}: {failure.relation} fails", degree=failure.indices.get("degree"))
        return mixed


def simplicial(module):
    return SimplicialChains(module)
