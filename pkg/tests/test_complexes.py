import numpy as np
import pytest

from opcalc.complexes import (
    CYCLIC,
    END_CLOSED,
    END_OPEN,
    NEGATIVE,
    PERIODIC,
    UWindowComplex,
    homology,
    sbi_maps,
    stability_check,
    truncate,
    validate_mixed,
)
from opcalc.exact_linalg import QQ
from opcalc.exceptions import NotAComplex, UntrustedDegree

from conftest import load_instance


def point():
    """The ground field in degree zero with b = B = 0."""
    return truncate(QQ, {0: 1}, {}, {}, 0, 0, name="point")


def cyclic_dims(n):
    """dim HC_n(k[x]/x^2) over Q."""
    if n < 0:
        return 0
    return 2 if n % 2 == 0 else 0


def test_homology_rejects_non_complexes():
    d = np.array([[1]], dtype=object)
    with pytest.raises(NotAComplex):
        homology(1, d, d, 0)
    with pytest.raises(NotAComplex):
        homology(2, d, d, 0)


def test_homology_with_empty_neighbours():
    assert homology(2, np.zeros((2, 0), dtype=object), np.zeros((0, 2), dtype=object), 0).dim == 2
    assert homology(0, np.zeros((0, 3), dtype=object), np.zeros((1, 0), dtype=object), 1).dim == 0


@pytest.mark.parametrize("incoming,low_dim", [(0, 1), (1, 0)])
def test_open_low_end_with_trivial_differentials(incoming, low_dim):
    def one(v):
        return np.array([[v]], dtype=object)

    mc = truncate(QQ, {-2: 1, -1: 1, 0: 1}, {-2: one(incoming), -1: one(0)}, {-1: one(0), 0: one(0)},
                  -1, 0, open_low=True, name="line")
    assert mc.dim(-1) == low_dim
    assert mc.homology(-1).dim == low_dim
    assert mc.homology(0).dim == 1
    assert mc.ends["lo"] == END_OPEN
    assert mc.b_at(-1).shape == (1, low_dim)


def test_point_variants():
    mc = point()
    assert validate_mixed(mc).passed
    cyclic = UWindowComplex(mc, CYCLIC).homology_result().dims()
    assert cyclic == {-2: 0, -1: 0, 0: 1, 1: 0, 2: 1}
    negative = UWindowComplex(mc, NEGATIVE).homology_result().dims()
    assert negative == {-2: 1, -1: 0, 0: 1, 1: 0, 2: 0}
    periodic = UWindowComplex(mc, PERIODIC, margin=4).homology_result().dims()
    assert periodic == {n: 1 if n % 2 == 0 else 0 for n in range(-4, 5)}


def test_unknown_variant():
    with pytest.raises(ValueError):
        UWindowComplex(point(), "hyper")


def test_chain_windows(q3, dual3):
    mc = q3.mixed
    assert mc.ends == {"lo": END_CLOSED, "hi": END_CLOSED}
    assert mc.homology_result().dims() == {-3: 0, -2: 0, -1: 0, 0: 1}

    mc = dual3.mixed
    assert validate_mixed(mc).passed
    assert mc.ends["lo"] == END_OPEN
    assert mc.homology_result().dims() == {-3: 1, -2: 1, -1: 1, 0: 2}


def test_field_cyclic_homology(q3):
    cc = UWindowComplex(q3.mixed, CYCLIC)
    assert cc.validate().passed
    result = cc.homology_result()
    assert result.trusted_degrees() == list(range(cc.n_lo, cc.n_hi + 1))
    assert result.dims() == {n: 1 if n >= 0 and n % 2 == 0 else 0 for n in range(cc.n_lo, cc.n_hi + 1)}


def test_dual_numbers_negative_variant(dual3):
    cc = UWindowComplex(dual3.mixed, NEGATIVE)
    assert cc.validate().passed
    assert cc.euler_check().passed
    result = cc.homology_result()
    assert {0, -1} <= set(result.trusted_degrees())
    for n, dim in result.dims(trusted_only=True).items():
        assert dim == cyclic_dims(-n)


def test_cyclic_variant_untrusted_on_open_window(dual3):
    cc = UWindowComplex(dual3.mixed, CYCLIC)
    assert cc.homology_result().trusted_degrees() == []
    with pytest.raises(UntrustedDegree):
        cc.require_trusted(0)


def test_sbi_contracts(q3, dual3):
    maps = sbi_maps(UWindowComplex(q3.mixed, CYCLIC))
    assert maps.checks.passed
    assert maps.checks.checked > 0
    assert sbi_maps(UWindowComplex(dual3.mixed, NEGATIVE)).checks.passed
    with pytest.raises(ValueError):
        sbi_maps(UWindowComplex(q3.mixed, PERIODIC))
    with pytest.raises(UntrustedDegree):
        maps.get("S", 100)


def test_stability_between_truncations():
    report = stability_check(lambda n: load_instance("dualnumbers", n).mixed, NEGATIVE, 2, 3)
    assert report.passed
    assert report.checked > 0
