from fractions import Fraction

import numpy as np
import pytest

from opcalc.exact_linalg import (
    QQ,
    FieldSpec,
    Subspace,
    columns,
    hstack,
    image_basis,
    induced_map,
    inverse,
    kernel_basis,
    left_inverse,
    mat,
    rank,
    row_reduce,
    sign,
    solve,
    subquotient,
)
from opcalc.exceptions import ContainmentViolation, InconsistentSystem, InputError, NotAChainMap

F101 = FieldSpec("Fp", 101)


def m(rows):
    return np.array(rows, dtype=object)


def test_field_selectors():
    assert FieldSpec.parse("Q") == QQ
    assert FieldSpec.parse(None) == QQ
    assert FieldSpec.parse({"Fp": 101}) == F101
    assert FieldSpec.parse("F101") == F101
    assert FieldSpec.parse("Fp:101") == F101
    assert F101.label == "F101"
    assert F101.to_json() == {"Fp": 101}
    for bad in ("R", "F100", {"Fp": 4}, {"p": 5}, 3):
        with pytest.raises(InputError):
            FieldSpec.parse(bad)


def test_scalars():
    assert QQ.scalar("1/2") == Fraction(1, 2)
    assert QQ.scalar(4) == 4
    assert F101.scalar("1/2") == 51
    assert F101.scalar(-1) == 100
    with pytest.raises(InputError):
        F101.scalar("1/101")
    with pytest.raises(InputError):
        QQ.scalar(True)
    with pytest.raises(InputError):
        QQ.scalar("x")


def test_sign():
    assert [sign(k) for k in (-3, -2, -1, 0, 1, 2)] == [-1, 1, -1, 1, -1, 1]


def test_rank_over_both_fields():
    a = m([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert rank(a) == 2
    assert rank(a, F101) == 2
    assert rank(m([[Fraction(1, 2), Fraction(1, 3)], [3, 2]])) == 1
    # 101 = 0 in F101
    assert rank(m([[101]]), F101) == 0
    assert rank(np.zeros((0, 3), dtype=object)) == 0


def test_row_reduce_pivots():
    r, pivots = row_reduce(m([[0, 2, 4], [0, 1, 3]]))
    assert pivots == [1, 2]
    assert QQ.equal(r, m([[0, 1, 0], [0, 0, 1]]))


def test_kernel_and_image():
    a = m([[1, 1, 0], [0, 0, 1]])
    k = kernel_basis(a)
    assert k.dim == 1
    assert QQ.is_zero(mat(a, k.basis))
    assert image_basis(a).dim == 2
    assert kernel_basis(np.zeros((0, 4), dtype=object)).dim == 4


def test_solve_and_inverse():
    a = m([[2, 0], [0, 3]])
    x = solve(a, m([[4], [1]]))
    assert QQ.equal(mat(a, x), m([[4], [1]]))
    assert QQ.equal(mat(a, inverse(a)), np.eye(2, dtype=object))
    with pytest.raises(InconsistentSystem):
        solve(m([[1, 0], [0, 0]]), m([[0], [1]]))
    with pytest.raises(InconsistentSystem):
        inverse(m([[1, 2], [2, 4]]))
    k = m([[1, 0], [1, 1], [0, 1]])
    assert QQ.equal(mat(left_inverse(k), k), np.eye(2, dtype=object))


def test_empty_blocks_keep_their_shape():
    assert columns(np.zeros((0,), dtype=object), 3).shape == (3, 0)
    assert columns(m([1, 2]), 2).shape == (2, 1)
    assert columns(np.zeros((2, 0, 4), dtype=object), 2).shape == (2, 0)
    stacked = hstack([np.zeros((2, 0), dtype=object), m([[1], [2]]), np.zeros((0,), dtype=object)], 2)
    assert QQ.equal(stacked, m([[1], [2]]))
    assert hstack([], 3).shape == (3, 0)
    assert hstack([np.zeros((0, 0), dtype=object)], 0).shape == (0, 0)


def test_solve_and_inverse_on_empty_systems():
    assert solve(np.eye(2, dtype=object), np.zeros((2, 0), dtype=object)).shape == (2, 0)
    assert solve(np.zeros((0, 3), dtype=object), np.zeros((0, 2), dtype=object)).shape == (3, 2)
    assert QQ.equal(solve(m([[2, 0], [0, 3]]), m([4, 3])), m([[2], [1]]))
    assert inverse(np.zeros((0, 0), dtype=object)).shape == (0, 0)
    assert Subspace.full(2).contains(np.zeros((2, 0), dtype=object))


def test_subquotient_of_a_small_complex():
    # 0 -> Q -> Q^2 -> Q -> 0 with d0 = (1, 0)^T, d1 = (0, 1)
    d0 = m([[1], [0]])
    d1 = m([[0, 1]])
    sq = subquotient(kernel_basis(d1), image_basis(d0))
    assert sq.dim == 0
    sq = subquotient(kernel_basis(m([[0, 0]])), image_basis(d0))
    assert sq.dim == 1
    assert sq.is_boundary(d0)
    assert not sq.is_boundary(m([[0], [1]]))
    assert QQ.equal(sq.classes(sq.representatives(m([[1]]))), m([[1]]))


def test_subquotient_rejects_foreign_boundaries():
    with pytest.raises(ContainmentViolation):
        subquotient(Subspace(2, m([[1], [0]])), Subspace(2, m([[0], [1]])))


def test_induced_map_checks_chain_condition():
    full = subquotient(Subspace.full(2), Subspace.zero(2))
    line = subquotient(Subspace(2, m([[1], [0]])), Subspace.zero(2))
    assert QQ.equal(induced_map(np.eye(2, dtype=object), line, full), m([[1], [0]]))
    with pytest.raises(NotAChainMap):
        induced_map(m([[0, 1], [1, 0]]), full, line)
    with pytest.raises(NotAChainMap):
        induced_map(np.eye(3, dtype=object), full, full)
