import json

import numpy as np
import pytest

from opcalc.exact_linalg import FieldSpec
from opcalc.exceptions import ArityOverflow, InputError, InvalidAlgebra, NoFrobeniusForm
from opcalc.operads import (
    AlgebraSpec,
    cosimplicial,
    cyclic_structure_from_frobenius,
    end_operad,
    normalized,
    validate_cyclic,
    validate_operad,
    validate_operations,
)

from conftest import corpus_path

DUAL = {
    "basis": ["1", "x"],
    "unit": [1, 0],
    "mul": [[[1, 0], [0, 1]], [[0, 1], [0, 0]]],
}


def write(tmp_path, text):
    path = tmp_path / "algebra.json"
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.mark.parametrize("name,dim", [("q", 1), ("dualnumbers", 2), ("qxq", 2), ("truncpoly3", 3)])
def test_corpus_loads(name, dim):
    alg = AlgebraSpec.load(corpus_path(name))
    assert alg.dim == dim
    assert alg.name == name
    assert alg.frobenius_form is not None
    operad = end_operad(alg, 2)
    assert operad.arity_max == 3
    assert [operad.dim(p) for p in range(4)] == [dim ** (p + 1) for p in range(4)]


def test_malformed_json_names_the_line(tmp_path):
    path = write(tmp_path, '{\n  "basis": ["1"],\n  "unit": [1\n')
    with pytest.raises(InputError, match="line"):
        AlgebraSpec.load(path)


def test_missing_file_and_keys(tmp_path):
    with pytest.raises(InputError):
        AlgebraSpec.load(str(tmp_path / "absent.json"))
    with pytest.raises(InputError, match="mul"):
        AlgebraSpec.load(write(tmp_path, json.dumps({"basis": ["1"], "unit": [1]})))
    with pytest.raises(InputError, match="shape"):
        AlgebraSpec.from_json(dict(DUAL, unit=[1, 0, 0]))


def test_structure_constants_are_checked():
    with pytest.raises(InvalidAlgebra, match="unit"):
        AlgebraSpec.from_json(dict(DUAL, unit=[0, 1]))
    with pytest.raises(InvalidAlgebra, match="degenerate"):
        AlgebraSpec.from_json(dict(DUAL, frobenius_form=[[1, 0], [0, 0]]))
    with pytest.raises(InvalidAlgebra, match="symmetric"):
        AlgebraSpec.from_json(dict(DUAL, frobenius_form=[[0, 1], [2, 0]]))


def test_field_selection():
    alg = AlgebraSpec.from_json(DUAL)
    assert alg.field == FieldSpec.parse("Q")
    assert AlgebraSpec.from_json(DUAL, default_field="F101").field == FieldSpec("Fp", 101)
    assert AlgebraSpec.from_json(dict(DUAL, field="F101"), field="Q").field == FieldSpec.parse("Q")
    assert AlgebraSpec.load(corpus_path("dualnumbers"), field="F101").field.label == "F101"


@pytest.mark.parametrize("name", ["q", "dualnumbers", "qxq", "truncpoly3"])
def test_operad_axioms(name):
    alg = AlgebraSpec.load(corpus_path(name))
    operad = end_operad(alg, 2)
    assert validate_operad(operad).passed
    assert cosimplicial(operad).validate().passed
    assert validate_operations(operad).passed
    cyclic_structure_from_frobenius(alg, operad)
    assert operad.is_cyclic
    assert validate_cyclic(operad).passed
    assert normalized(operad).validate().passed


def test_associativity_with_constant_middle_argument():
    alg = AlgebraSpec.load(corpus_path("dualnumbers"))
    operad = end_operad(alg, 2)
    report = validate_operad(operad)
    constant = [r for r in report.records if r.relation == "associativity" and r.indices["q"] == 0]
    assert constant
    assert all(r.passed for r in constant)
    # (φ ∘_j χ) would need arity p + r - 1 = 4 > 3
    assert not [r for r in constant if r.indices["p"] + r.indices["r"] - 1 > operad.arity_max]
    assert (3, 0, 1) in {(r.indices["p"], r.indices["q"], r.indices["r"]) for r in constant}


def test_tau_has_order_arity_plus_one():
    alg = AlgebraSpec.load(corpus_path("dualnumbers"))
    operad = end_operad(alg, 2)
    cyclic_structure_from_frobenius(alg, operad)
    for p in range(1, 4):
        basis = operad.basis(p)
        assert operad.field.equal(operad.apply_tau(basis, p, p + 1), basis)
    assert operad.field.equal(operad.apply_tau(operad.mu, 2), operad.mu)


def test_tau_on_unary_operations_is_the_adjoint():
    alg = AlgebraSpec.load(corpus_path("dualnumbers"))
    operad = end_operad(alg, 2)
    cyclic_structure_from_frobenius(alg, operad)
    g, d = alg.frobenius_form, alg.dim
    rotated = operad.apply_tau(operad.basis(1), 1)
    for phi, tau_phi in zip(operad.basis(1), rotated):
        # <(τφ)(y1), y2> = <φ(y2), y1>
        left = np.dot(tau_phi.reshape(d, d), g)
        right = np.dot(phi.reshape(d, d), g).T
        assert operad.field.equal(left, right)


def test_no_form_means_no_cyclic_structure():
    alg = AlgebraSpec.from_json(DUAL)
    operad = end_operad(alg, 2)
    assert not operad.is_cyclic
    with pytest.raises(NoFrobeniusForm):
        operad.apply_tau(operad.basis(1), 1)
    with pytest.raises(NoFrobeniusForm):
        cyclic_structure_from_frobenius(alg, operad)


def test_arity_window():
    operad = end_operad(AlgebraSpec.from_json(DUAL), 2)
    with pytest.raises(ArityOverflow):
        operad.basis(4)
    with pytest.raises(ArityOverflow):
        operad.compose(1, operad.basis(3), 3, operad.mu, 2)
    with pytest.raises(InputError):
        end_operad(AlgebraSpec.from_json(DUAL), 0)


def test_labels_and_unit_composition():
    operad = end_operad(AlgebraSpec.from_json(DUAL), 2)
    assert operad.label(1, 1) == "1->x"
    assert operad.label(2, 7) == "x,x->x"
    # mu o_1 e = id: multiplying by 1 from the left
    assert operad.field.equal(operad.compose(1, operad.mu, 2, operad.unit, 0)[0], operad.identity)


def test_hochschild_cohomology_of_dual_numbers():
    nbar = normalized(end_operad(AlgebraSpec.from_json(DUAL), 3))
    assert [nbar.cohomology(p).dim for p in range(3)] == [2, 1, 1]
    assert [nbar.dim(p) for p in range(1, 4)] == [2, 2, 2]
    assert nbar.is_normalized(nbar.basis(2), 2)
    assert not nbar.is_normalized(np.eye(8, dtype=object)[:1], 2)
