import pytest

from opcalc import structures
from opcalc.exceptions import BracketNonzero, LiftNotFound, NoFrobeniusForm, NotQuasiIso
from opcalc.operads import AlgebraSpec, end_operad
from opcalc.runner import Instance
from opcalc.structures import (
    OperadCartanCalculus,
    bv_structure,
    corollary_checks,
    csm_bracket,
    e3_bracket,
    gerstenhaber_algebra,
    negative_cyclic_homology_bracket,
    regrade_for_theoremA,
    theoremA_bracket,
    unit_cycle,
    verify_palladio,
)

from conftest import load_instance


def records(report, relation):
    return [r for r in report.records if r.relation == relation]


def test_gerstenhaber_algebra_of_dual_numbers(dual2):
    structure = gerstenhaber_algebra(dual2.operad, dual2.nbar)
    assert structure.passed
    assert structure.cup.dims == {0: 2, 1: 1, 2: 1}
    assert structure.bracket.shift == -1
    data = structure.to_dict(include_entries=False)
    assert "entries" not in data["cup"]


def test_bv_operator_on_the_operad_side(dual2):
    bv = bv_structure(dual2.operad, dual2.nbar)
    for relation in ("delta^2 = 0", "delta(unit) = 0", "{mu,mu} = 0"):
        found = records(bv.checks, relation)
        assert found
        assert all(r.passed for r in found)
    # e is the duality cycle: p_ζ is the identity on arity 0
    assert bv.certificate.ranks[0] == (2, 2, 2)


def test_duality_on_semisimple_chains(q2):
    for name in ("q", "qxq"):
        inst = q2 if name == "q" else load_instance(name, 2)
        reg, cert, transfer = inst.duality("chains", 2)
        assert cert.checks.passed
        assert cert.d == 0
        assert 0 in cert.arities()
        units = records(transfer.checks, "unit = ±[zeta]")
        assert len(units) == 1 and units[0].passed


def test_dual_numbers_are_not_poincare_dual_on_chains(dual2):
    with pytest.raises(NotQuasiIso) as err:
        dual2.duality("chains", 2)
    assert err.value.degree == 1


def test_cyclic_bracket_vanishes_for_semisimple_algebra():
    inst = load_instance("qxq", 2)
    reg, cert, transfer = inst.duality("chains", 2)
    table = theoremA_bracket(reg, cert, transfer=transfer)
    assert table.is_zero(reg.field)
    assert table.nonzero_witness(reg.field) is None


def test_cyclic_bracket_reports_its_cross_check():
    inst = load_instance("qxq", 2)
    reg, cert, transfer = inst.duality("chains", 2)
    table = theoremA_bracket(reg, cert, transfer=transfer)
    assert table.cross_checked is not None
    assert 0 <= table.cross_checked <= len(table.entries)
    assert table.to_dict(include_entries=False)["cross_checked"] == table.cross_checked
    assert len(records(table.checks, "formula = semidirect route")) == table.cross_checked


def test_missing_lift_fails_the_cyclic_bracket(monkeypatch):
    inst = load_instance("qxq", 2)
    reg, cert, transfer = inst.duality("chains", 2)

    def no_lift(reg, cert):
        raise LiftNotFound("no closed lift in window")

    monkeypatch.setattr(structures, "lift_palladio", no_lift)
    table = theoremA_bracket(reg, cert, transfer=transfer)
    missing = records(table.checks, "semidirect route available")
    assert len(missing) == 1 and not missing[0].passed
    assert not table.passed
    assert table.cross_checked is None
    assert not records(table.checks, "formula = semidirect route")


def test_negative_cyclic_brackets_on_semisimple_chains():
    inst = load_instance("qxq", 2)
    reg, cert, transfer = inst.duality("chains", 2)
    assert transfer.bracket.is_zero(reg.field)
    csm = csm_bracket(reg, cert, transfer)
    assert csm.shift == -1
    for (a, b), tensor in csm.entries.items():
        assert tensor.shape[1:] == (csm.dims[a], csm.dims[b])
    e3 = e3_bracket(reg, cert, transfer)
    assert e3.shift == -1
    assert e3.dims == transfer.cup.dims
    assert e3.is_zero(reg.field)
    assert e3.passed


def test_cyclic_bracket_read_on_chains():
    inst = load_instance("qxq", 2)
    reg, cert, transfer = inst.duality("chains", 2)
    table = theoremA_bracket(reg, cert, transfer=transfer)
    relabeled = negative_cyclic_homology_bracket(reg, cert, table=table)
    d = reg.d
    assert relabeled.shift == 1 - d
    assert relabeled.dims == {d - 1 - n: dim for n, dim in table.dims.items()}
    assert set(relabeled.entries) == {(d - 1 - a, d - 1 - b) for (a, b) in table.entries}
    assert relabeled.is_zero(reg.field)


def test_e3_needs_a_vanishing_bracket(dual2):
    reg, cert, transfer = dual2.duality("operad", 2)
    if transfer.bracket.is_zero(reg.field):
        pytest.skip("transferred bracket vanishes on this window")
    with pytest.raises(BracketNonzero):
        e3_bracket(reg, cert, transfer)


def test_corollaries_on_chains():
    inst = load_instance("qxq", 2)
    reg, cert, _ = inst.duality("chains", 2)
    commutes, poisson = corollary_checks(reg, cert)
    assert commutes.passed
    assert poisson.recorded_only and poisson.passed


def test_unit_cycle_and_regrading(q2):
    calc = q2.chain_calc
    zeta = unit_cycle(calc)
    assert zeta.shape == (1, 1)
    reg = regrade_for_theoremA(calc, 0)
    assert reg.chain_degree(-1) == 0
    assert reg.mixed.hi == -1
    assert verify_palladio(reg, zeta).ranks[0] == (1, 1, 1)


def test_operad_side_needs_a_form():
    alg = AlgebraSpec.from_json({"basis": ["1", "x"], "unit": [1, 0],
                                 "mul": [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]})
    with pytest.raises(NoFrobeniusForm):
        OperadCartanCalculus(end_operad(alg, 2))
    with pytest.raises(NoFrobeniusForm):
        Instance(alg, 2).operad_calc
