#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Endomorphism operads of finite-dimensional algebras.

An element of O(p) = Hom(A^p, A) is stored as the flattened tensor
Phi[a1, ..., ap, c] (C order, so the basis is lexicographic in the input
multi-index followed by the output index). Batches of elements are 2-D
arrays with one element per row.
"""

import json
import logging
import os

import numpy as np

from opcalc.exact_linalg import FieldSpec, inverse, kernel_basis, left_inverse, mat, rank, sign
from opcalc.exceptions import (
    ArityOverflow,
    CyclicAxiomViolation,
    InputError,
    InvalidAlgebra,
    NoFrobeniusForm,
    NotNormalized,
)
from opcalc.complexes import homology
from opcalc.verdicts import ValidationReport, first_nonzero

logger = logging.getLogger("opcalc.operads")


class AlgebraSpec:
    """Structure constants of a unital associative algebra, optionally with a form.

    ``mul[i, j, k]`` is the coefficient of x_k in x_i * x_j.
    """

    def __init__(self, field, basis, unit, mul, frobenius_form=None, name=""):
        self.field = field
        self.basis = list(basis)
        self.unit = unit
        self.mul = mul
        self.frobenius_form = frobenius_form
        self.name = name or "algebra"

    @property
    def dim(self):
        return len(self.basis)

    @classmethod
    def from_json(cls, data, field=None, name="", default_field="Q"):
        if not isinstance(data, dict):
            raise InputError("algebra document must be a JSON object")
        missing = [k for k in ("basis", "unit", "mul") if k not in data]
        if missing:
            raise InputError(f"algebra document is missing {', '.join(missing)}")
        field = FieldSpec.parse(field if field is not None else data.get("field", default_field))
        basis = data["basis"]
        if not isinstance(basis, list) or not basis or not all(isinstance(b, str) for b in basis):
            raise InputError("field 'basis' must be a non-empty list of names")
        if len(set(basis)) != len(basis):
            raise InputError("field 'basis' has repeated names")
        d = len(basis)
        unit = _shaped(field, data["unit"], (d,), "unit")
        mul = _shaped(field, data["mul"], (d, d, d), "mul")
        form = data.get("frobenius_form")
        if form is not None:
            form = _shaped(field, form, (d, d), "frobenius_form")
        alg = cls(field, basis, unit, mul, form, name)
        alg.validate()
        return alg

    @classmethod
    def load(cls, path, field=None, default_field="Q"):
        if not os.path.exists(path):
            raise InputError(f"algebra file not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise InputError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}")
        name = os.path.splitext(os.path.basename(path))[0]
        return cls.from_json(data, field=field, name=name, default_field=default_field)

    def with_field(self, field):
        """Same structure constants read in another field."""
        return AlgebraSpec(
            field, self.basis,
            field.array(_as_text(self.unit)), field.array(_as_text(self.mul)),
            None if self.frobenius_form is None else field.array(_as_text(self.frobenius_form)),
            self.name,
        )

    def validate(self):
        f, m, u = self.field, self.mul, self.unit
        d = self.dim
        left = np.tensordot(m, m, axes=([2], [0]))
        right = np.tensordot(m, m, axes=([1], [2])).transpose(0, 2, 3, 1)
        if not f.equal(left, right):
            raise InvalidAlgebra(f"{self.name}: multiplication is not associative")
        eye = np.eye(d, dtype=object)
        if not f.equal(np.tensordot(u, m, axes=([0], [0])), eye):
            raise InvalidAlgebra(f"{self.name}: unit is not a left unit")
        if not f.equal(np.tensordot(m, u, axes=([1], [0])), eye):
            raise InvalidAlgebra(f"{self.name}: unit is not a right unit")
        g = self.frobenius_form
        if g is not None:
            if not f.equal(g, g.T):
                raise InvalidAlgebra(f"{self.name}: form is not symmetric")
            if rank(g, f) != d:
                raise InvalidAlgebra(f"{self.name}: form is degenerate")
            if not f.equal(np.tensordot(m, g, axes=([2], [0])), np.tensordot(g, m, axes=([1], [2]))):
                raise InvalidAlgebra(f"{self.name}: form is not invariant")

    def to_json(self):
        data = {
            "field": self.field.to_json(),
            "basis": self.basis,
            "unit": _as_text(self.unit).tolist(),
            "mul": _as_text(self.mul).tolist(),
        }
        if self.frobenius_form is not None:
            data["frobenius_form"] = _as_text(self.frobenius_form).tolist()
        return data


def _as_text(array):
    return np.vectorize(str, otypes=[object])(array)


def _shaped(field, value, shape, key):
    try:
        arr = field.array(value)
    except InputError as e:
        raise InputError(f"field '{key}': {e}")
    if arr.shape != shape:
        raise InputError(f"field '{key}' has shape {arr.shape}, expected {shape}")
    return arr


class EndOperad:
    """End(A) on the arity window [0, n_max + 1] with mu, unit and optional tau."""

    def __init__(self, alg, n_max):
        if n_max < 1:
            raise InputError(f"n_max must be at least 1, got {n_max}")
        self.alg = alg
        self.field = alg.field
        self.d = alg.dim
        self.n_max = n_max
        self.arity_max = n_max + 1
        d = self.d
        self.identity = np.eye(d, dtype=object).reshape(1, d * d)
        self.mu = alg.mul.reshape(1, d ** 3).copy()
        self.unit = alg.unit.reshape(1, d).copy()
        self.form = None
        self.form_inv = None
        self._cache = {}

    @property
    def name(self):
        return f"End({self.alg.name})"

    @property
    def is_cyclic(self):
        return self.form is not None

    def dim(self, p):
        if p < 0:
            return 0
        return self.d ** (p + 1)

    def check_arity(self, p):
        if p > self.arity_max:
            raise ArityOverflow(f"arity {p} exceeds window {self.arity_max}", degree=p)

    def basis(self, p):
        self.check_arity(p)
        return np.eye(self.dim(p), dtype=object)

    def label(self, p, index):
        digits = []
        for _ in range(p + 1):
            index, r = divmod(index, self.d)
            digits.append(r)
        digits.reverse()
        names = self.alg.basis
        return ",".join(names[a] for a in digits[:-1]) + "->" + names[digits[-1]]

    def compose(self, i, a, p, b, q):
        """Partial compositions a ∘_i b for all row pairs: shape (rows(a), rows(b), dim(p+q-1))."""
        if not 1 <= i <= p:
            raise ValueError(f"slot {i} out of range for arity {p}")
        self.check_arity(p + q - 1)
        d, m, r = self.d, a.shape[0], b.shape[0]
        out_dim = self.dim(p + q - 1)
        if m == 0 or r == 0:
            return np.zeros((m, r, out_dim), dtype=object)
        phi = np.asarray(a, dtype=object).reshape((m,) + (d,) * (p + 1))
        psi = np.asarray(b, dtype=object).reshape((r,) + (d,) * (q + 1))
        t = np.tensordot(phi, psi, axes=([i], [q + 1]))
        perm = ([0, p + 1] + list(range(1, i)) + list(range(p + 2, p + 2 + q))
                + list(range(i, p)) + [p])
        return self.field.reduce(t.transpose(perm).reshape(m, r, out_dim))

    def compose_flat(self, i, a, p, b, q):
        return self.compose(i, a, p, b, q).reshape(-1, self.dim(p + q - 1))

    # cosimplicial structure

    def face(self, i, p):
        key = ("face", i, p)
        if key not in self._cache:
            basis = self.basis(p)
            if i == 0:
                images = self.compose(1, self.mu, 2, basis, p)[0]
            elif i == p + 1:
                images = self.compose(2, self.mu, 2, basis, p)[0]
            else:
                images = self.compose(p - i + 1, basis, p, self.mu, 2)[:, 0, :]
            self._cache[key] = images.T.copy()
        return self._cache[key]

    def degeneracy(self, j, p):
        key = ("degeneracy", j, p)
        if key not in self._cache:
            images = self.compose(p - j, self.basis(p), p, self.unit, 0)[:, 0, :]
            self._cache[key] = images.T.copy()
        return self._cache[key]

    def delta_matrix(self, p):
        key = ("delta", p)
        if key not in self._cache:
            self.check_arity(p + 1)
            total = np.zeros((self.dim(p + 1), self.dim(p)), dtype=object)
            for i in range(p + 2):
                total = total + sign(i) * self.face(i, p)
            self._cache[key] = self.field.reduce(total)
        return self._cache[key]

    def delta(self, a, p):
        return self.field.reduce(mat(a, self.delta_matrix(p).T))

    # operations

    def cup(self, a, p, b, q):
        """a ⌣ b = (mu ∘_2 a) ∘_1 b for all row pairs, i.e. (y, x) ↦ b(y)·a(x)."""
        self.check_arity(p + q)
        d, m, r = self.d, a.shape[0], b.shape[0]
        if m == 0 or r == 0:
            return np.zeros((m, r, self.dim(p + q)), dtype=object)
        left = np.asarray(a, dtype=object).reshape(m, d ** p, d)
        right = np.asarray(b, dtype=object).reshape(r, d ** q, d)
        t = np.tensordot(right, self.alg.mul, axes=([2], [0]))
        t = np.tensordot(left, t, axes=([2], [2]))
        return self.field.reduce(t.transpose(0, 2, 3, 1, 4).reshape(m, r, self.dim(p + q)))

    def cup_by_composition(self, a, p, b, q):
        left = self.compose_flat(2, self.mu, 2, a, p)
        return self.compose(1, left, p + 1, b, q)

    def brace(self, a, p, b, q):
        rows, cols = a.shape[0], b.shape[0]
        total = np.zeros((rows, cols, max(self.dim(p + q - 1), 0)), dtype=object)
        for i in range(1, p + 1):
            total = total + sign((q - 1) * (i - 1)) * self.compose(i, a, p, b, q)
        return self.field.reduce(total)

    def gerstenhaber(self, a, p, b, q):
        forward = self.brace(a, p, b, q)
        backward = self.brace(b, q, a, p).transpose(1, 0, 2)
        return self.field.reduce(forward - sign((p - 1) * (q - 1)) * backward)

    # cyclic structure

    def apply_tau(self, a, p, power=1):
        if self.form is None:
            raise NoFrobeniusForm(f"{self.name} has no cyclic structure")
        a = np.asarray(a, dtype=object)
        if p == 0:
            return a.copy()
        d, m = self.d, a.shape[0]
        for _ in range(power):
            phi = a.reshape((m,) + (d,) * (p + 1))
            paired = np.tensordot(phi, self.form, axes=([p + 1], [0]))
            rotated = np.moveaxis(paired, 1, -1)
            a = self.field.reduce(np.tensordot(rotated, self.form_inv, axes=([p + 1], [0])).reshape(m, self.dim(p)))
        return a

    def tau_matrix(self, p):
        key = ("tau", p)
        if key not in self._cache:
            self._cache[key] = self.apply_tau(self.basis(p), p).T.copy()
        return self._cache[key]


def end_operad(alg, n_max):
    alg.validate()
    operad = EndOperad(alg, n_max)
    logger.info(f"built {operad.name} on arities 0..{operad.arity_max}")
    return operad


def _witness(operad, diff, arities, names=("phi", "psi", "chi")):
    hit = first_nonzero(diff)
    if hit is None:
        return None
    witness = {"entry": list(hit)}
    for name, p, index in zip(names, arities, hit[:-1]):
        witness[name] = operad.label(p, index)
    return witness


def _arity_triples(limit):
    for p in range(1, limit + 1):
        for q in range(0, limit + 1):
            if p + q - 1 > limit:
                continue
            for r in range(0, limit + 1):
                if p + q + r - 2 <= limit:
                    yield p, q, r


def check_associativity(report, field, compose, basis, limit, kinds=("O", "O", "O"), label=None):
    """Sequential and parallel composition cases on all basis triples of the given kinds.

    ``compose(i, a, ka, p, b, kb, q)`` returns (rows(a), rows(b), dim) and
    ``basis(kind, p)`` the basis rows of a component.
    """
    ka, kb, kc = kinds
    kab = "M" if "M" in (ka, kb) else "O"
    kac = "M" if "M" in (ka, kc) else "O"
    kbc = "M" if "M" in (kb, kc) else "O"
    relation = "associativity" if kinds == ("O", "O", "O") else f"associativity {''.join(kinds)}"
    for p, q, r in _arity_triples(limit):
        P, Q, R = basis(ka, p), basis(kb, q), basis(kc, r)
        m, rq, rr = len(P), len(Q), len(R)
        for i in range(1, p + 1):
            inner = compose(i, P, ka, p, Q, kb, q)
            inner = inner.reshape(m * rq, -1)
            for j in range(1, p + q):
                parallel = j < i or j >= q + i
                if parallel and p + r - 1 > limit:
                    # phi ∘_j chi leaves the window; only reachable for q = 0
                    continue
                lhs = compose(j, inner, kab, p + q - 1, R, kc, r)
                out = lhs.shape[-1]
                lhs = lhs.reshape(m, rq, rr, out)
                if j < i:
                    first = compose(j, P, ka, p, R, kc, r).reshape(m * rr, -1)
                    rhs = compose(i + r - 1, first, kac, p + r - 1, Q, kb, q)
                    rhs = rhs.reshape(m, rr, rq, out).transpose(0, 2, 1, 3)
                elif j < q + i:
                    inner_psi = compose(j - i + 1, Q, kb, q, R, kc, r).reshape(rq * rr, -1)
                    rhs = compose(i, P, ka, p, inner_psi, kbc, q + r - 1).reshape(m, rq, rr, out)
                else:
                    first = compose(j - q + 1, P, ka, p, R, kc, r).reshape(m * rr, -1)
                    rhs = compose(i, first, kac, p + r - 1, Q, kb, q)
                    rhs = rhs.reshape(m, rr, rq, out).transpose(0, 2, 1, 3)
                diff = field.reduce(lhs - rhs)
                witness = label(diff, (p, q, r)) if label else None
                report.add(relation, field.is_zero(diff), witness, p=p, q=q, r=r, i=i, j=j)
    return report


def validate_operad(operad, arity_limit=None):
    """Associativity cases, unitality and the multiplication axioms on basis triples."""
    limit = min(arity_limit or operad.arity_max, operad.arity_max)
    f, c = operad.field, operad.compose
    report = ValidationReport(f"operad {operad.name}")
    check_associativity(
        report, f,
        lambda i, a, ka, p, b, kb, q: c(i, a, p, b, q),
        lambda kind, p: operad.basis(p),
        limit,
        label=lambda diff, arities: _witness(operad, diff, arities),
    )
    for p in range(0, limit + 1):
        basis = operad.basis(p)
        left = c(1, operad.identity, 1, basis, p)[0]
        report.add("unit left", f.equal(left, basis), p=p)
        for i in range(1, p + 1):
            right = c(i, basis, p, operad.identity, 1)[:, 0, :]
            report.add("unit right", f.equal(right, basis), p=p, i=i)
    if limit >= 3:
        report.add("mu associative", f.equal(c(1, operad.mu, 2, operad.mu, 2), c(2, operad.mu, 2, operad.mu, 2)))
    report.add("mu o1 e", f.equal(c(1, operad.mu, 2, operad.unit, 0)[0], operad.identity))
    report.add("mu o2 e", f.equal(c(2, operad.mu, 2, operad.unit, 0)[0], operad.identity))
    logger.info(f"{report.subject}: {report.checked} checks, {len(report.failures)} failures")
    return report


class CosimplicialData:
    """Faces and codegeneracies of End(A) as matrices per arity."""

    def __init__(self, operad):
        self.operad = operad
        top = operad.arity_max
        self.faces = {p: [operad.face(i, p) for i in range(p + 2)] for p in range(0, top)}
        self.degeneracies = {p: [operad.degeneracy(j, p) for j in range(p)] for p in range(1, top + 1)}

    def validate(self):
        f = self.operad.field
        report = ValidationReport(f"cosimplicial {self.operad.name}")
        faces, degs = self.faces, self.degeneracies
        for p in faces:
            if p + 1 in faces:
                for j in range(p + 3):
                    for i in range(j):
                        ok = f.equal(mat(faces[p + 1][j], faces[p][i]), mat(faces[p + 1][i], faces[p][j - 1]))
                        report.add("face-face", ok, p=p, i=i, j=j)
            for j in range(p + 1):
                for i in range(p + 2):
                    lhs = mat(degs[p + 1][j], faces[p][i])
                    if i < j:
                        rhs = mat(faces[p - 1][i], degs[p][j - 1])
                    elif i in (j, j + 1):
                        rhs = np.eye(self.operad.dim(p), dtype=object)
                    else:
                        rhs = mat(faces[p - 1][i - 1], degs[p][j])
                    report.add("degeneracy-face", f.equal(lhs, rhs), p=p, i=i, j=j)
        for p in degs:
            if p - 1 in degs:
                for j in range(p - 1):
                    for i in range(j + 1):
                        lhs = mat(degs[p - 1][j], degs[p][i])
                        rhs = mat(degs[p - 1][i], degs[p][j + 1])
                        report.add("degeneracy-degeneracy", f.equal(lhs, rhs), p=p, i=i, j=j)
        return report


def cosimplicial(operad):
    return CosimplicialData(operad)


def delta(operad, a, p):
    return operad.delta(a, p)


def cup(operad, a, p, b, q):
    return operad.cup(a, p, b, q)


def brace(operad, a, p, b, q):
    return operad.brace(a, p, b, q)


def gerstenhaber(operad, a, p, b, q):
    return operad.gerstenhaber(a, p, b, q)


def validate_operations(operad, arity_limit=None):
    """delta two ways, delta^2, {mu,mu}, cup unit/associativity, Leibniz, bracket antisymmetry."""
    f = operad.field
    limit = min(arity_limit or operad.arity_max, operad.arity_max)
    report = ValidationReport(f"operations {operad.name}")
    mu = operad.mu
    if limit >= 3:
        report.add("{mu,mu}=0", f.is_zero(operad.gerstenhaber(mu, 2, mu, 2)))
    for p in range(0, limit):
        basis = operad.basis(p)
        report.add("delta={mu,-}", f.equal(operad.delta(basis, p), operad.gerstenhaber(mu, 2, basis, p)[0]), p=p)
        if p + 2 <= limit:
            report.add("delta^2", f.is_zero(mat(operad.delta_matrix(p + 1), operad.delta_matrix(p))), p=p)
    for p in range(0, limit + 1):
        basis = operad.basis(p)
        report.add("e cup", f.equal(operad.cup(operad.unit, 0, basis, p)[0], basis), p=p)
        report.add("cup e", f.equal(operad.cup(basis, p, operad.unit, 0)[:, 0, :], basis), p=p)
    for p in range(0, limit + 1):
        for q in range(0, limit + 1 - p):
            P, Q = operad.basis(p), operad.basis(q)
            if p < limit:
                report.add("cup two ways", f.equal(operad.cup(P, p, Q, q), operad.cup_by_composition(P, p, Q, q)),
                           p=p, q=q)
            for r in range(0, limit + 1 - p - q):
                R = operad.basis(r)
                left = operad.cup(operad.cup(P, p, Q, q).reshape(-1, operad.dim(p + q)), p + q, R, r)
                right = operad.cup(P, p, operad.cup(Q, q, R, r).reshape(-1, operad.dim(q + r)), q + r)
                report.add("cup associative", f.equal(left.reshape(right.shape), right), p=p, q=q, r=r)
            if p + q + 1 <= limit:
                lhs = operad.delta(operad.cup(P, p, Q, q).reshape(-1, operad.dim(p + q)), p + q)
                rhs = (operad.cup(operad.delta(P, p), p + 1, Q, q)
                       + sign(p) * operad.cup(P, p, operad.delta(Q, q), q + 1))
                report.add("Leibniz", f.equal(lhs.reshape(rhs.shape), rhs), p=p, q=q)
            if p + q - 1 <= limit and p + q >= 1:
                forward = operad.gerstenhaber(P, p, Q, q)
                backward = operad.gerstenhaber(Q, q, P, p).transpose(1, 0, 2)
                report.add("bracket antisymmetry",
                           f.equal(forward, -sign((p - 1) * (q - 1)) * backward), p=p, q=q)
    return report


def validate_cyclic(operad, arity_limit=None):
    """tau^{p+1} = id, tau mu = mu and both compatibility relations with ∘_i."""
    f = operad.field
    limit = min(arity_limit or operad.arity_max, operad.arity_max)
    report = ValidationReport(f"cyclic {operad.name}")
    for p in range(0, limit + 1):
        basis = operad.basis(p)
        report.add("tau^(p+1)=id", f.equal(operad.apply_tau(basis, p, p + 1) if p else basis, basis), p=p)
    report.add("tau mu = mu", f.equal(operad.apply_tau(operad.mu, 2), operad.mu))
    for p in range(1, limit + 1):
        for q in range(0, limit + 2 - p):
            if p + q - 1 > limit:
                continue
            P, Q = operad.basis(p), operad.basis(q)
            m, r, out = len(P), len(Q), operad.dim(p + q - 1)
            tau_p = operad.apply_tau(P, p)
            for i in range(2, p + 1):
                lhs = operad.apply_tau(operad.compose_flat(i, P, p, Q, q), p + q - 1).reshape(m, r, out)
                rhs = operad.compose(i - 1, tau_p, p, Q, q)
                diff = f.reduce(lhs - rhs)
                report.add("tau(phi o_i psi)", f.is_zero(diff), _witness(operad, diff, (p, q)), p=p, q=q, i=i)
            if q >= 1:
                lhs = operad.apply_tau(operad.compose_flat(1, P, p, Q, q), p + q - 1).reshape(m, r, out)
                rhs = operad.compose(q, operad.apply_tau(Q, q), q, tau_p, p).transpose(1, 0, 2)
                diff = f.reduce(lhs - rhs)
                report.add("tau(phi o_1 psi)", f.is_zero(diff), _witness(operad, diff, (p, q)), p=p, q=q)
    return report


def cyclic_structure_from_frobenius(alg, operad):
    """Install tau from <(tau phi)(y1..yp), y_{p+1}> = <phi(y_{p+1}, y1..y_{p-1}), y_p>."""
    # phi reads y_{i-1} in slot i: the inverse of the rotation with y_{i+1} in slot i, generating the same Z/(p+1) action
    if alg.frobenius_form is None:
        raise NoFrobeniusForm(f"{alg.name} carries no Frobenius form")
    operad.form = alg.frobenius_form
    operad.form_inv = inverse(alg.frobenius_form, operad.field)
    report = validate_cyclic(operad)
    if not report.passed:
        first = report.failures[0]
        operad.form = operad.form_inv = None
        raise CyclicAxiomViolation(f"{first.relation} fails at {first.indices}: {first.witness}")
    logger.info(f"{operad.name}: cyclic structure accepted ({report.checked} checks)")
    return {p: operad.tau_matrix(p) for p in range(operad.arity_max + 1)}


class NormalizedOperad:
    """Ō(p) = ∩_j ker σ_j with inclusion K_p and a retraction L_p (L_p K_p = id)."""

    def __init__(self, operad):
        self.operad = operad
        self.field = operad.field
        self.arity_max = operad.arity_max
        self.inclusion, self.retraction = {}, {}
        for p in range(0, operad.arity_max + 1):
            if p == 0:
                k = np.eye(operad.dim(0), dtype=object)
            else:
                stacked = np.concatenate([operad.degeneracy(j, p) for j in range(p)], axis=0)
                k = kernel_basis(stacked, self.field).basis
            self.inclusion[p] = k
            self.retraction[p] = left_inverse(k, self.field)
        self._delta = {}

    def dim(self, p):
        if p < 0 or p > self.arity_max:
            return 0
        return self.inclusion[p].shape[1]

    def basis(self, p):
        """Normalized basis elements as rows in O(p)."""
        return self.inclusion[p].T.copy()

    def is_normalized(self, a, p):
        a = np.asarray(a, dtype=object).reshape(-1, self.operad.dim(p))
        return all(self.field.is_zero(mat(self.operad.degeneracy(j, p), a.T)) for j in range(p))

    def require_normalized(self, a, p):
        if not self.is_normalized(a, p):
            raise NotNormalized(f"element of arity {p} is not killed by all codegeneracies", degree=p)

    def coords(self, a, p):
        return self.field.reduce(mat(np.asarray(a, dtype=object), self.retraction[p].T))

    def restrict(self, matrix, p_src, p_dst):
        """L_dst · X · K_src for an operator O(p_src) -> O(p_dst) preserving Ō."""
        return self.field.reduce(mat(self.retraction[p_dst], mat(matrix, self.inclusion[p_src])))

    def preserves(self, matrix, p_src, p_dst):
        image = mat(matrix, self.inclusion[p_src])
        back = mat(self.inclusion[p_dst], mat(self.retraction[p_dst], image))
        return self.field.equal(back, image)

    def delta_matrix(self, p):
        if p not in self._delta:
            self._delta[p] = self.restrict(self.operad.delta_matrix(p), p, p + 1)
        return self._delta[p]

    def cohomology(self, p, normalized=True):
        """H^p of (Ō, δ) or of (O, δ); defined for p < arity_max."""
        if normalized:
            d_in = self.delta_matrix(p - 1) if p >= 1 else np.zeros((self.dim(p), 0), dtype=object)
            return homology(self.dim(p), d_in, self.delta_matrix(p), p, self.field)
        op = self.operad
        d_in = op.delta_matrix(p - 1) if p >= 1 else np.zeros((op.dim(p), 0), dtype=object)
        return homology(op.dim(p), d_in, op.delta_matrix(p), p, self.field)

    def validate(self):
        report = ValidationReport(f"normalized {self.operad.name}")
        for p in range(0, self.arity_max):
            report.add("delta restricts", self.preserves(self.operad.delta_matrix(p), p, p + 1), p=p)
        for p in range(0, self.arity_max):
            a, b = self.cohomology(p).dim, self.cohomology(p, normalized=False).dim
            report.add("quasi-isomorphism", a == b, p=p, dims=[a, b])
        return report


def normalized(operad):
    return NormalizedOperad(operad)
