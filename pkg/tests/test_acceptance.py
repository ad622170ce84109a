"""The ten acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""

import io
import math
import time
from contextlib import redirect_stderr, redirect_stdout

import mpmath as mp
import numpy as np
import pytest

from phonlcs import bargmann, cli, measure, nlcs, pho
from phonlcs.bargmann import BargmannSpec
from phonlcs.measure import WeightPath
from phonlcs.nlcs import classify
from phonlcs.specfun import bessel_i, macdonald_k_array, pochhammer

MOMENT_PAIRS = [(0.5, 0.0), (1.0, -0.5), (2.0, -0.25), (0.4, 0.5), (0.3, 1.5)]
POSITIVITY_PAIRS = MOMENT_PAIRS + [(0.2, -0.5)]


def test_criterion_01_moment_identity(record):
    start = time.perf_counter()
    worst = 0.0
    for g, s in MOMENT_PAIRS:
        for m in measure.moments(classify(g, s), 8):
            worst = max(worst, abs(m.rel_deviation))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed <= 120.0
    record(1, ok, f"max |M_n/target - 1| = {worst:.2e} over 5 pairs, n <= 8; {elapsed:.1f} s")
    assert worst <= 1e-6
    assert elapsed <= 120.0


def test_criterion_02_resolution_of_identity(record):
    pairs = [(1.0, -0.5), (0.4, 0.5)]  # S1 only, S2 only
    assert classify(*pairs[0]).in_s1 and not classify(*pairs[0]).in_s2
    assert classify(*pairs[1]).in_s2 and not classify(*pairs[1]).in_s1
    diag_dev, off_max = 0.0, 0.0
    for g, s in pairs:
        o = measure.identity_resolution_check(classify(g, s), 8)
        diag_dev = max(diag_dev, float(np.max(np.abs(np.diag(o) - 1.0))))
        off_max = max(off_max, float(np.max(np.abs(o[~np.eye(9, dtype=bool)]))))
    ok = diag_dev <= 1e-6 and off_max == 0.0
    record(2, ok, f"max |O_nn - 1| = {diag_dev:.2e}, max |O_nk| = {off_max} (n != k)")
    assert diag_dev <= 1e-6
    assert off_max == 0.0


def test_criterion_03_normalization_special_cases(record):
    worst_i, worst_s = 0.0, 0.0
    for g in (0.3, 0.5, 1.0, 2.5):
        for r in (0.1, 1.0, 3.0):
            got = nlcs.normalization(classify(g, 0.0), r * r).value
            exact = math.gamma(2 * g) * r ** (1 - 2 * g) * bessel_i(2 * g - 1, 2 * r)
            worst_i = max(worst_i, abs(got / exact - 1))
    for s in (1, 2, 3):
        for r in (0.1, 1.0, 3.0):
            got = nlcs.normalization(classify(0.5, float(s)), r * r).value
            with mp.workdps(40):
                x = mp.mpf(r)
                head = mp.fsum(x ** (2 * k) / mp.factorial(k) ** 2 for k in range(s))
                exact = float(mp.factorial(s) ** 2 * x ** (-2 * s) * (mp.besseli(0, 2 * x) - head))
            worst_s = max(worst_s, abs(got / exact - 1))
    ok = worst_i <= 1e-10 and worst_s <= 1e-10
    record(3, ok, f"sigma=0 Bessel form {worst_i:.2e}; gamma=1/2 integer sigma {worst_s:.2e}")
    assert worst_i <= 1e-10
    assert worst_s <= 1e-10


def test_criterion_04_weight_positivity(record):
    r = np.logspace(-6, math.log10(50.0), 40)
    all_positive = True
    worst_cross = 0.0
    compared = 0
    for g, s in POSITIVITY_PAIRS:
        p = classify(g, s)
        values = {path: measure.WeightEvaluator(p, path).weight(r).value for path in measure.admissible_paths(p)}
        for v in values.values():
            all_positive &= bool(np.all(v > 0) and np.all(np.isfinite(v)))
        if WeightPath.CASE1 in values and WeightPath.CASE2 in values:
            compared += 1
            worst_cross = max(worst_cross, float(np.max(np.abs(values[WeightPath.CASE1] / values[WeightPath.CASE2] - 1))))
    ok = all_positive and worst_cross <= 1e-6 and compared >= 1
    record(4, ok, f"6 pairs x 40 points positive: {all_positive}; Case1 vs Case2 ({compared} pairs) {worst_cross:.2e}")
    assert all_positive
    assert compared >= 1
    assert worst_cross <= 1e-6


def test_criterion_05_eigenbasis(record):
    cfg = pho.OscillatorConfig.from_mu(2.5, 1.0)
    gram_err = float(np.max(np.abs(pho.gram_matrix(cfg, 12) - np.eye(13))))
    xi = np.arange(0.01, 8.0 + 5e-4, 1e-3)
    resid = max(pho.hamiltonian_residual(cfg, n, xi) for n in range(4))
    ok = gram_err <= 1e-8 and resid <= 1e-4
    record(5, ok, f"Gram max deviation {gram_err:.2e} (n, m <= 12); Hamiltonian residual {resid:.2e} (n <= 3)")
    assert gram_err <= 1e-8
    assert resid <= 1e-4


def test_criterion_06_closed_form_vs_series(record):
    spec = BargmannSpec.from_mu(2.5, 1.0, -0.3)
    zs = [0.3, 0.8 + 0.2j, -0.5 + 1.0j, 1.5j, 2.0 - 0.7j]
    xis = [0.2, 0.7, 1.1, 2.0, 3.5]
    series_err = 0.0
    for z in zs:
        closed = bargmann.wavefunction(spec, z, np.array(xis))
        series = bargmann.wavefunction_series(spec, z, np.array(xis))
        series_err = max(series_err, float(np.max(np.abs(closed - series))))
    spec0 = BargmannSpec.from_mu(2.5, 1.0, 0.0)
    xi = np.linspace(0.1, 5.0, 25)
    bessel_err = 0.0
    for z in np.linspace(0.2, 2.9, 10):
        a = bargmann.wavefunction_sigma0(spec0, z, xi)
        b = bargmann.wavefunction(spec0, z, xi)
        bessel_err = max(bessel_err, float(np.max(np.abs(a - b))))
    ok = series_err <= 1e-8 and bessel_err <= 1e-10
    record(6, ok, f"closed form vs 60-term series {series_err:.2e} (5x5); sigma=0 Bessel form {bessel_err:.2e} (10 z)")
    assert series_err <= 1e-8
    assert bessel_err <= 1e-10


def test_criterion_07_basis_images(record):
    worst = 0.0
    for sigma in (-0.3, 0.0):
        spec = BargmannSpec.from_mu(2.5, 1.0, sigma)
        for z in (0.5, 1 + 0.5j):
            for n in range(9):
                got = bargmann.basis_image(spec, n, z)
                exact = math.sqrt(math.factorial(n) / pochhammer(2.5, n)) * z**n / pochhammer(sigma + 1, n)
                worst = max(worst, abs(got / exact - 1))
    ok = worst <= 1e-6
    record(7, ok, f"max relative error {worst:.2e} (n <= 8, z in {{0.5, 1+0.5i}}, sigma in {{-0.3, 0}})")
    assert worst <= 1e-6


def test_criterion_08_corollary_identities(record):
    bessel_worst = 0.0
    for mu, beta, z in ((2.5, 1.0, 1.0), (2.0, 0.7, 2.0)):
        spec = BargmannSpec.from_mu(mu, beta, 0.0)
        for n in range(9):
            bessel_worst = max(bessel_worst, bargmann.bessel_identity_check(spec, n, z).residual)
    kdf_worst = 0.0
    for sigma in (0.0, -0.3):
        spec = BargmannSpec.from_mu(2.5, 1.0, sigma)
        for z in (0.9, 1.0 + 0.5j):
            for n in range(9):
                kdf_worst = max(kdf_worst, bargmann.kdf_identity_check(spec, n, z).residual)
    ok = bessel_worst <= 1e-7 and kdf_worst <= 1e-6
    record(8, ok, f"Bessel identity {bessel_worst:.2e}; KdF identity {kdf_worst:.2e} (n <= 8)")
    assert bessel_worst <= 1e-7
    assert kdf_worst <= 1e-6


def test_criterion_09_known_families(record):
    # Barut-Girardello coefficients conj(z)^n / sqrt(n! (2gamma)_n)
    bg_err = 0.0
    for two_gamma in (1, 2, 3):
        p = classify(two_gamma / 2.0, 0.0)
        for z in (0.7, 1.2 - 0.4j, -2.0 + 1.0j):
            for n in range(25):
                bg = np.conj(z) ** n / math.sqrt(math.factorial(n) * pochhammer(two_gamma, n))
                bg_err = max(bg_err, abs(nlcs.coefficient(p, z, n) - bg) / max(abs(bg), 1e-300))
    # sigma = 0 weight against the Macdonald measure: pointwise under r = rho^2 ...
    rho = np.logspace(-3, 1.2, 30)
    point_err = 0.0
    mom_err = 0.0
    for two_gamma in (1, 2, 3):
        g = two_gamma / 2.0
        p = classify(g, 0.0)
        m = measure.WeightEvaluator(p).weight(rho**2).value
        dlam = 4.0 / math.gamma(2 * g) * macdonald_k_array(2 * g - 1, 2 * rho).value * rho ** (2 * g)
        point_err = max(point_err, float(np.max(np.abs(rho * m / dlam - 1))))
        # ... and on moments: int r^n m dr = 2 n! (2gamma)_n
        for res in measure.moments(p, 6):
            mom_err = max(mom_err, abs(res.value / (2 * math.factorial(res.n) * pochhammer(2 * g, res.n)) - 1))
    ok = bg_err <= 1e-12 and point_err <= 1e-6 and mom_err <= 1e-6
    record(9, ok, f"coefficients {bg_err:.2e}; rho m(rho^2) vs Macdonald measure {point_err:.2e}; moments {mom_err:.2e}")
    assert bg_err <= 1e-12
    assert point_err <= 1e-6
    assert mom_err <= 1e-6


RUNS = [
    ["verify", "moments", "--gamma", "0.4", "--sigma", "0.5", "--n-max", "8"],
    ["verify", "identity", "--gamma", "0.5", "--sigma", "0", "--n-max", "8"],
    ["verify", "orthonormality", "--mu", "2.5", "--beta", "1"],
    ["verify", "bargmann-basis", "--mu", "2.5", "--beta", "1", "--sigma", "-0.3", "--z", "1,0.5"],
    ["verify", "bessel-identity", "--mu", "2", "--beta", "0.7", "--sigma", "0", "--z", "2"],
    ["verify", "kdf-identity", "--mu", "2.5", "--beta", "1", "--sigma", "-0.3", "--z", "0.9"],
    ["verify", "positivity", "--gamma", "0.2", "--sigma", "-0.5"],
    ["emit", "sequence", "--gamma", "0.4", "--sigma", "-0.3", "--n-max", "20", "--format", "csv"],
    ["emit", "normalization", "--gamma", "0.5", "--sigma", "0", "--zz", "1"],
    ["emit", "photon", "--gamma", "0.5", "--sigma", "0", "--z", "1", "--n-max", "5", "--format", "csv"],
    ["emit", "weight", "--gamma", "0.3", "--sigma", "1.5", "--format", "csv"],
    ["emit", "wavefunction", "--mu", "2.5", "--sigma", "-0.3", "--z", "0.8,0.2", "--format", "csv"],
]


def _run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli.main(argv)
    return code, out.getvalue().encode("utf-8")


def test_criterion_10_determinism(record):
    differing = []
    failed = []
    for argv in RUNS:
        c1, b1 = _run_cli(argv)
        c2, b2 = _run_cli(argv)
        if c1 != 0 or c2 != 0:
            failed.append(" ".join(argv[:2]))
        if b1 != b2 or not b1:
            differing.append(" ".join(argv[:2]))
    ok = not differing and not failed
    record(10, ok, f"{len(RUNS)} CLI runs repeated: {len(differing)} differ, {len(failed)} nonzero exits")
    assert not differing
    assert not failed
