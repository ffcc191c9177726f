import numpy as np
import pytest

from opcalc import op_modules
from opcalc.exceptions import CyclicAxiomViolation, NotAComplex, WindowOverflow
from opcalc.op_modules import (
    dualize,
    operad_as_module,
    validate_cyclic_module,
    validate_opposite,
)
from opcalc.operads import AlgebraSpec, end_operad
from opcalc.verdicts import ValidationReport

from conftest import bar_hochschild_dims, load_instance


def test_chains_are_an_opposite_module(dual2):
    assert validate_opposite(dual2.module).passed
    assert dual2.chains.validate().passed
    assert dual2.chains.validate_normalized().passed


def test_cyclic_operator_on_chains(dual2):
    module = dual2.module
    eye = np.eye(module.dim(2), dtype=object)
    assert module.field.equal(module.cyc(2, eye, 3), eye)
    # t(a0 ⊗ a1 ⊗ a2) = a2 ⊗ a0 ⊗ a1: (1, x, 1) -> (1, 1, x)
    t = module.t_matrix(2)
    assert t[1, 2] == 1
    assert sum(t[:, 2]) == 1


def test_multiplication_acts_on_neighbouring_factors(dual2):
    module = dual2.module
    # mu •_1 (1 ⊗ x ⊗ x) = 1 ⊗ x^2 = 0, mu •_0 (x ⊗ 1 ⊗ x) = x ⊗ x
    x = np.zeros((module.dim(2), 1), dtype=object)
    x[3, 0] = 1
    assert module.field.is_zero(module.act(1, dual2.operad.mu, 2, 2, x))
    y = np.zeros((module.dim(2), 1), dtype=object)
    y[5, 0] = 1
    out = module.act(0, dual2.operad.mu, 2, 2, y)[0]
    assert list(out[:, 0]) == [0, 0, 0, 1]


def test_window_overflow(dual2):
    module = dual2.module
    with pytest.raises(WindowOverflow):
        module.act(0, dual2.operad.unit, 0, module.top, np.eye(module.dim(module.top), dtype=object))
    with pytest.raises(WindowOverflow):
        module.cyc(module.top + 1, np.zeros((0, 1), dtype=object))


def test_operad_as_cyclic_module(dual2):
    module = operad_as_module(dual2.operad)
    assert validate_cyclic_module(module).passed
    assert validate_opposite(dualize(module)).passed


def test_cyclic_module_needs_a_form(tmp_path):
    alg = AlgebraSpec.from_json({"basis": ["1", "x"], "unit": [1, 0],
                                 "mul": [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]})
    operad = end_operad(alg, 2)
    with pytest.raises(CyclicAxiomViolation):
        operad_as_module(operad)


@pytest.mark.parametrize("name,n_max,expected", [
    ("dualnumbers", 3, [2, 1, 1, 1]),
    ("qxq", 3, [2, 0, 0, 0]),
    ("q", 3, [1, 0, 0, 0]),
    ("truncpoly3", 2, [3, 2, 2]),
])
def test_hochschild_homology_matches_bar_complex(name, n_max, expected):
    inst = load_instance(name, n_max)
    chains = inst.chains
    top = chains.top
    assert bar_hochschild_dims(inst.alg, top) == expected
    assert [chains.hochschild_homology(n).dim for n in range(top)] == expected
    assert [chains.hochschild_homology(n, normalized=False).dim for n in range(top)] == expected


def test_mixed_complex_refuses_failing_relations(monkeypatch):
    chains = load_instance("dualnumbers", 2).chains
    assert chains.mixed_complex(0).dim(0) == 2

    def broken(mixed):
        report = ValidationReport(f"mixed complex {mixed.name}")
        report.add("[B,b]", False, degree=-1)
        return report

    monkeypatch.setattr(op_modules, "validate_mixed", broken)
    with pytest.raises(NotAComplex, match=r"\[B,b\]") as err:
        chains.mixed_complex(0)
    assert err.value.degree == -1
