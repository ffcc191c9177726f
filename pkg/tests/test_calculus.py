import itertools

import numpy as np
import pytest

from opcalc.calculus import (
    SUITES,
    ModuleCalculus,
    OpFamily,
    UOp,
    commutator,
    cyclic_side,
    extra_checks,
    identity_suite,
)
from opcalc.structures import operad_cartan_data


@pytest.fixture(scope="module")
def full_calc(dual3):
    return ModuleCalculus(dual3.module, dual3.nbar, dual3.chains, normalized=False)


def chain_index(*factors):
    index = 0
    for a in factors:
        index = 2 * index + a
    return index


@pytest.mark.parametrize("name", sorted(SUITES))
def test_identity_suites_hold_on_dual_numbers(dual3, name):
    report = identity_suite(name, dual3.chain_calc)
    assert report.passed
    assert report.checked + report.skipped > 0


def test_core_identities_are_actually_checked(dual3):
    for name in ("cartan_rinehart", "cap_mult", "L_chain_map"):
        report = identity_suite(name, dual3.chain_calc)
        assert report.holds
        assert report.checked > 0


def test_unknown_suite(dual3):
    with pytest.raises(KeyError):
        identity_suite("cartan", dual3.chain_calc)


def test_extra_checks(dual3):
    reports = extra_checks(dual3.chain_calc)
    assert [r.name for r in reports] == ["face_assembly", "cap_mult_full"]
    assert all(r.passed for r in reports)


def test_cap_by_unit_is_identity(dual3, full_calc):
    unit = dual3.alg.unit
    for n in range(0, 4):
        i_e = np.tensordot(unit, full_calc.cap(0).at(n), axes=1)
        assert dual3.field.equal(i_e, np.eye(2 ** (n + 1), dtype=object))


def test_homotopy_s_against_hand_expansion(dual3, full_calc):
    # S_e(a0 ⊗ a1) = 1⊗a0⊗1⊗a1 - 1⊗a0⊗a1⊗1 + 1⊗a1⊗a0⊗1
    s_e = np.tensordot(dual3.alg.unit, full_calc.homotopy_s(0).at(1), axes=1)
    expected = np.zeros((16, 4), dtype=object)
    for a0, a1 in itertools.product(range(2), repeat=2):
        col = chain_index(a0, a1)
        expected[chain_index(0, a0, 0, a1), col] += 1
        expected[chain_index(0, a0, a1, 0), col] -= 1
        expected[chain_index(0, a1, a0, 0), col] += 1
    assert dual3.field.equal(s_e, expected)


def test_homotopy_t_against_hand_expansion(full_calc):
    # T(φ, ψ)(a0 ⊗ a1 ⊗ a2 ⊗ a3) = φ(a0, ψ(a1)) ⊗ a2 ⊗ a3 for φ of arity 2, ψ of arity 1
    t = full_calc.homotopy_t(2, 1).at(3)
    expected = np.zeros((8, 4, 8, 16), dtype=object)
    for u1, u2, v, w, a2, a3 in itertools.product(range(2), repeat=6):
        phi, psi = chain_index(u1, u2, v), chain_index(w, u2)
        expected[phi, psi, chain_index(v, a2, a3), chain_index(u1, w, a2, a3)] += 1
    assert full_calc.field.equal(t, expected)
    assert full_calc.field.is_zero(full_calc.homotopy_t(1, 1).at(2))


def test_gdt_left_side_in_lowest_degree(full_calc):
    # φ of arity 1, ψ = c of arity 0, on a0: [i_ψ, L_φ] - i_{ψ,φ} = φ(a0)c - φ(a0 c) + a0 φ(c) = δφ(a0, c)
    calc = full_calc
    left = commutator(calc.cap(0), calc.lie(1)) - calc.cap(0).reindex(calc.bracket_coords(0, 1))
    delta_phi = calc.operad.delta(calc.operad.basis(1), 1).reshape(4, 2, 2, 2)
    expected = delta_phi.transpose(2, 0, 3, 1)
    assert calc.field.equal(left.at(0), expected)
    t_delta = calc.homotopy_t(2, 0).reindex(calc.delta_coords(1), axis=0).at(0)
    assert calc.field.equal(left.at(0), t_delta.transpose(1, 0, 2, 3))


def test_gdt_b_holds_on_full_chains(full_calc):
    report = identity_suite("gdt_b", full_calc)
    assert report.passed
    assert report.checked > 0


def test_gdt_checks_are_not_vacuous(dual3):
    for name in ("gdt_b", "gdt_B", "gdt_combined"):
        report = identity_suite(name, dual3.chain_calc)
        assert report.holds
        assert report.checked > 0


def test_families_outside_the_window(dual3):
    calc = dual3.chain_calc
    top = calc.space.hi
    # L of arity 0 raises degree by one: unknown past the open end
    assert calc.lie(0).at(top) is None
    assert calc.b().at(0).shape == (0, 2)
    with pytest.raises(ValueError):
        calc.b() + calc.B()


def test_graded_commutator_of_b_with_itself(dual3):
    b = dual3.chain_calc.b()
    square = commutator(b, b)
    for n in range(2, dual3.chain_calc.space.hi + 1):
        assert dual3.field.is_zero(square.at(n))


def test_u_polynomials(dual3):
    calc = dual3.chain_calc
    d_u = calc.d_u()
    assert sorted(d_u.terms) == [0, 1]
    assert d_u.degree == -1
    assert UOp.of(calc.b()).shifted(2).degree == -5
    zero = OpFamily.zero(calc.space, 1)
    assert dual3.field.is_zero(zero.at(0))


def test_cyclic_module_side(dual2):
    reports = cyclic_side(dual2.operad, dual2.nbar)
    names = [r.name for r in reports]
    assert names[-2:] == ["transposition", "operad_as_module"]
    assert all(name.startswith("dual ") for name in names[:-2])
    assert all(r.passed for r in reports)


def test_operad_side_battery(dual2):
    calc, reports = operad_cartan_data(dual2.operad, dual2.nbar)
    assert calc.space.open_end == "lo"
    assert calc.preservation_checks().passed
    assert all(r.passed for r in reports)


def test_homotopy_s_is_cached_per_arity(dual2, full_calc):
    operad_calc, _ = operad_cartan_data(dual2.operad, dual2.nbar)
    for calc in (full_calc, operad_calc):
        assert calc.homotopy_s(1) is calc.homotopy_s(1)
        assert calc.homotopy_s(1) is not calc.homotopy_s(2)
        with pytest.raises(TypeError):
            calc.homotopy_s(1, calc.inputs(1))


def test_operators_are_reached_through_a_calculus():
    from opcalc import calculus

    for name in ("cap", "lie", "homotopy_s", "homotopy_t"):
        assert not hasattr(calculus, name)
        assert callable(getattr(ModuleCalculus, name))
