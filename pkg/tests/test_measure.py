import math

import numpy as np
import pytest

from phonlcs import measure
from phonlcs.errors import ParameterOutOfDomain
from phonlcs.measure import WeightPath
from phonlcs.nlcs import DomainClass, classify
from phonlcs.specfun import macdonald_k_array

# G^{30}_{13}(r | 1; 2gamma, sigma+1, sigma+1), mpmath at 30 digits
G3013_REFERENCE = [
    (0.4, -0.5, 0.1, 0.51006261648392085806),
    (0.4, -0.5, 1.0, 0.21368193415590615706),
    (0.4, -0.5, 5.0, 0.024302388826969992548),
    (0.3, 1.5, 0.01, 0.026520465184385367795),
    (0.3, 1.5, 2.0, 0.74294265462047568688),
    (1.0, -1e-3, 0.1, 0.076981085117560006377),
    (1.0, -1e-3, 1.0, 0.27995955137854392164),
    (1.0, -1e-3, 5.0, 0.16312251919875965819),
]


def test_paths_available():
    assert measure.admissible_paths(classify(0.5, 0.0)) == [WeightPath.MACDONALD]
    assert measure.admissible_paths(classify(0.4, -0.5)) == [WeightPath.CASE1, WeightPath.CASE2]
    assert measure.default_path(classify(0.5, 0.0)) is WeightPath.MACDONALD
    assert measure.default_path(classify(0.4, -0.5)) is WeightPath.CASE1
    assert measure.default_path(classify(0.3, 1.5)) is WeightPath.CASE2
    assert measure.default_path(classify(2.0, -0.25)) is WeightPath.CASE1


def test_evaluator_rejects_wrong_path_and_domain():
    with pytest.raises(ParameterOutOfDomain):
        measure.WeightEvaluator(classify(2.0, -0.5), WeightPath.CASE2)
    with pytest.raises(ParameterOutOfDomain):
        measure.WeightEvaluator(classify(2.0, 3.0))
    with pytest.raises(ParameterOutOfDomain):
        measure.weight(classify(0.5, 0.0), 0.0)


@pytest.mark.parametrize("gamma, sigma, r, expected", G3013_REFERENCE)
def test_g3013_reference(gamma, sigma, r, expected):
    p = classify(gamma, sigma)
    for path in measure.admissible_paths(p):
        got = measure.meijer_g3013(p, r, path=path).value
        assert got == pytest.approx(expected, rel=1e-10), path


@pytest.mark.parametrize("r", [0.1, 1.0, 5.0])
def test_cross_path_agreement(r):
    p = classify(0.4, -0.5)
    c1 = measure.meijer_g3013(p, r, path=WeightPath.CASE1).value
    c2 = measure.meijer_g3013(p, r, path=WeightPath.CASE2).value
    assert c1 == pytest.approx(c2, rel=1e-6)


def test_macdonald_closed_form_order_reduction():
    r = np.array([0.1, 1.0, 5.0])
    g = measure.WeightEvaluator(classify(1.0, 0.0)).g3013(r).value
    exact = 2 * r**1.5 * macdonald_k_array(1.0, 2 * np.sqrt(r)).value
    assert np.allclose(g, exact, rtol=1e-13)


def test_sigma_to_zero_continuity():
    # the weight is smooth in sigma, so the Case1 value at sigma -> 0 approaches
    # the closed form linearly; the slope here is about 4 (relative)
    r = np.array([0.1, 1.0, 5.0])
    closed = measure.WeightEvaluator(classify(1.0, 0.0)).g3013(r).value
    gaps = []
    for s in (-1e-3, -1e-4, -1e-5):
        v = measure.WeightEvaluator(classify(1.0, s), WeightPath.CASE1).g3013(r).value
        gaps.append(np.abs(v / closed - 1))
    assert np.all(gaps[2] <= 1e-4)
    assert np.allclose(gaps[0] / gaps[1], 10.0, rtol=1e-2)
    assert np.allclose(gaps[1] / gaps[2], 10.0, rtol=1e-2)


def test_weight_example():
    assert measure.weight(classify(0.5, 0.0), 1.0) == pytest.approx(0.45557549099813374261, rel=1e-12)


def test_weight_sigma0_closed_form():
    gamma = 1.3
    r = np.logspace(-4, 1.5, 12)
    m = measure.WeightEvaluator(classify(gamma, 0.0)).weight(r).value
    exact = 4 / math.gamma(2 * gamma) * r ** (gamma - 0.5) * macdonald_k_array(2 * gamma - 1, 2 * np.sqrt(r)).value
    assert np.allclose(m, exact, rtol=1e-12)


def test_positivity_s2_point():
    r = np.logspace(-6, math.log10(50), 40)
    m = measure.WeightEvaluator(classify(0.3, 1.5)).weight(r).value
    assert np.all(m > 0) and np.all(np.isfinite(m))


def test_moment_targets():
    assert measure.moment_target(classify(0.7, 0.3), 0) == 2.0
    assert measure.moment_target(classify(0.5, 0.0), 2) == pytest.approx(8.0)
    assert measure.moment_target(classify(1.0, -0.5), 1) == pytest.approx(1.0)


def test_moments_closed_form_case():
    res = measure.moments(classify(0.5, 0.0), 10)
    assert res[0].value == pytest.approx(2.0, rel=1e-9)
    for m in res:
        assert abs(m.rel_deviation) <= 1e-6


def test_single_moment_matches_batch():
    p = classify(0.4, 0.5)
    batch = measure.moments(p, 3)
    one = measure.moment(p, 3)
    assert one.value == pytest.approx(batch[3].value, rel=1e-9)
    assert abs(one.rel_deviation) <= 1e-6


def test_moment_limits():
    with pytest.raises(ParameterOutOfDomain):
        measure.moment(classify(0.5, 0.0), 13)
    with pytest.raises(ParameterOutOfDomain):
        measure.moments(classify(2.0, 3.0), 2)


def test_sigma0_moments_match_barut_girardello_measure():
    # int r^n (4/Gamma(2g)) r^{g-1/2} K_{2g-1}(2 sqrt r) dr = 2 n! (2g)_n
    p = classify(1.5, 0.0)
    for m in measure.moments(p, 6):
        bg = 2.0 * math.factorial(m.n) * math.gamma(3.0 + m.n) / math.gamma(3.0)
        assert m.value == pytest.approx(bg, rel=1e-6)


def test_identity_resolution_closed_form():
    o = measure.identity_resolution_check(classify(0.5, 0.0), 10)
    assert np.all(np.abs(np.diag(o) - 1) <= 1e-6)
    assert np.all(o[~np.eye(11, dtype=bool)] == 0.0)


@pytest.mark.parametrize(
    "gamma, sigma, s1, s2, domain",
    [
        (2.0, -0.5, True, False, DomainClass.MEASURE_ADMISSIBLE),
        (0.25, 3.0, False, True, DomainClass.MEASURE_ADMISSIBLE),
        (2.0, 3.0, False, False, DomainClass.NORMALIZABLE_ONLY),
    ],
)
def test_admissibility_table(gamma, sigma, s1, s2, domain):
    rep = measure.admissibility_table(classify(gamma, sigma))
    assert len(rep.rows) == 4
    assert (rep.in_s1, rep.in_s2, rep.domain_class) == (s1, s2, domain)
    assert rep.admissible == (s1 or s2)
    satisfied = {row.condition for row in rep.rows if row.satisfied}
    if s1:
        assert satisfied == {"0<gamma, -1<sigma<=0"}
    if s2:
        assert satisfied == {"0<gamma<=1/2, -1<sigma"}
    if not rep.admissible:
        assert not satisfied
