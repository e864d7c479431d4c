"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
report lines. Two checks are marked strict-xfail because they are
mathematically unattainable exactly as stated; each carries an inline
explanation and a passing sharp counterpart elsewhere in the suite.
"""

import math
import time

import numpy as np
import pytest

from qeep import (
    add_noise,
    bin_centers,
    build_filterbank,
    bump_fourier,
    bump_norm,
    decay_onset,
    dft,
    estimate_bins,
    estimate_moment,
    evaluate_filter_series,
    exact_bins,
    exact_moment,
    fig6_spectrum,
    filter_coefficient,
    generate_clean,
    hoeffding_shots,
    mp_estimate,
    mp_moment,
    random_spectrum,
)
from qeep.cli import NOISE_SEED_OFFSET
from qeep.filterbank import SQRT_2PI, filter_grid


def _report(cid: str, name: str, detail: str = "") -> None:
    line = f"ACCEPTANCE {cid} {name}: PASS"
    if detail:
        line += f" ({detail})"
    print(line)


def test_c01_bump_normalization():
    start = time.perf_counter()
    bump_norm.cache_clear()
    a = bump_norm()
    elapsed = time.perf_counter() - start
    assert 2.24 <= a <= 2.26
    xs = np.linspace(-1.0, 1.0, 20_001)
    with np.errstate(divide="ignore", over="ignore"):
        ys = np.where(np.abs(xs) < 1.0, np.exp(-1.0 / (1.0 - xs**2)), 0.0)
    oracle = 1.0 / np.trapezoid(ys, xs)
    assert abs(a - oracle) <= 1e-6
    assert elapsed < 1.0
    _report("C01", "bump-normalization", f"a={a:.9f}, {elapsed:.3f}s")


def test_c02_partition_of_unity():
    start = time.perf_counter()
    for eps in (0.25, 0.005):
        xs, table = filter_grid(eps, 201)
        total = table.sum(axis=0)
        assert np.max(np.abs(total - 1.0)) <= 1e-9
        centers = bin_centers(eps)
        for j in range(centers.size):
            outside = np.abs(xs - centers[j]) >= eps
            assert np.all(table[j, outside] == 0.0)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    _report("C02", "partition-of-unity", f"{elapsed:.1f}s")


def test_c03_coefficient_identities(bank_appc):
    eps = bank_appc.eps
    assert np.max(np.abs(bank_appc.coeffs[:, 0] - eps / SQRT_2PI)) <= 1e-10
    for j, k in ((0, 1), (57, 13), (200, 565)):
        assert filter_coefficient(j, -k, eps) == pytest.approx(
            np.conj(filter_coefficient(j, k, eps)), abs=1e-15
        )
        assert bank_appc.coeffs[j, k] == pytest.approx(
            filter_coefficient(j, k, eps), abs=1e-13
        )
    _report("C03", "coefficient-identities")


@pytest.mark.xfail(
    strict=True,
    reason="unattainable as stated: the k = 0 coefficient is exactly "
    "eps/sqrt(2*pi), which already exceeds the stated cap eps/(2*pi); the "
    "sharp bound eps/sqrt(2*pi) is verified in test_filterbank.py",
)
def test_c03_coefficient_cap_as_stated(bank_appc):
    eps = bank_appc.eps
    max_mag = float(np.max(np.abs(bank_appc.coeffs)))
    print(
        "ACCEPTANCE C03 coefficient-cap-as-stated: FAIL "
        f"(max |F|={max_mag:.6g} vs stated cap {eps / (2 * math.pi):.6g}; "
        f"sharp cap {eps / SQRT_2PI:.6g} holds)"
    )
    assert max_mag <= eps / (2.0 * math.pi) + 1e-12


def test_c04_decay_regime():
    kps = np.arange(10.0, 201.0, 10.0)
    for kp in kps:
        assert abs(bump_fourier(kp)) <= math.exp(-math.sqrt(kp))
    threshold = decay_onset(kps)
    assert threshold <= 10.0
    _report("C04", "decay-regime", f"recorded threshold kp={threshold}")


def test_c05_series_quadrature_convergence(bank_quarter_strict):
    eps = 0.25
    xs, quad_table = filter_grid(eps, 101)
    errors = []
    for n in (50, 100, 200, 400, 800):
        bank = build_filterbank(eps, n)
        worst = 0.0
        for j in range(bank.m_bins):
            series = evaluate_filter_series(j, xs, bank)
            worst = max(worst, float(np.max(np.abs(series - quad_table[j]))))
        errors.append(worst)
    assert all(b < a for a, b in zip(errors, errors[1:]))
    strict_bank = bank_quarter_strict
    worst_strict = max(
        float(
            np.max(np.abs(evaluate_filter_series(j, xs, strict_bank) - quad_table[j]))
        )
        for j in range(strict_bank.m_bins)
    )
    assert worst_strict <= eps / (2 * strict_bank.m_bins)
    _report(
        "C05",
        "series-quadrature-convergence",
        f"errors {['%.2e' % e for e in errors]}, strict gap {worst_strict:.2e}",
    )


@pytest.mark.xfail(
    strict=True,
    reason="unattainable as stated: at N = 566 the dropped-series sidelobes "
    "contribute ~1e-3 per bin across 201 bins, so the L1 distance is O(1) "
    "rather than eps/2; the bound does hold at the strict truncation order "
    "(see C07 and test_ts_estimator.py), and moment errors at N = 566 stay "
    "small because the sidelobes cancel (see C08, C10)",
)
def test_c06_noiseless_l1_as_stated(bank_appc):
    eps = bank_appc.eps
    worst = 0.0
    for seed in range(20):
        spec = random_spectrum(5, seed)
        q = estimate_bins(generate_clean(spec, bank_appc.n_trunc), bank_appc)
        p = exact_bins(spec, eps)
        worst = max(worst, float(np.abs(q.values - p.values).sum()))
    print(
        "ACCEPTANCE C06 noiseless-l1-as-stated: FAIL "
        f"(worst L1={worst:.3f} vs stated bound {eps / 2})"
    )
    assert worst <= eps / 2


def test_c07_noisy_l1_bound(bank_quarter_strict, bank_mid_strict):
    worst_ratio = 0.0
    for bank in (bank_quarter_strict, bank_mid_strict):
        eps = bank.eps
        for seed in range(10):
            spec = random_spectrum(5, seed + 500)
            clean = generate_clean(spec, bank.n_trunc)
            noisy = add_noise(clean, eps / bank.n_trunc, seed)
            assert np.abs(noisy.values - clean.values).sum() <= eps
            q = estimate_bins(noisy, bank)
            p = exact_bins(spec, eps)
            l1 = float(np.abs(q.values - p.values).sum())
            assert l1 <= eps
            worst_ratio = max(worst_ratio, l1 / eps)
    _report("C07", "noisy-l1-bound", f"20 runs, worst L1/eps={worst_ratio:.2e}")


def test_c08_reference_table_bands(bank_appc):
    start = time.perf_counter()
    eps = eps_prime = 0.005
    n_trunc = bank_appc.n_trunc
    seeds = (1, 2, 3, 4, 5)
    bands = {1: 1.5, 2: 0.6, 4: 0.3}
    delta_ts = {s: [] for s in bands}
    delta_mp = {s: [] for s in bands}
    for seed in seeds:
        spec = random_spectrum(5, seed)
        noisy = add_noise(generate_clean(spec, n_trunc), eps_prime, seed + NOISE_SEED_OFFSET)
        q = estimate_bins(noisy, bank_appc)
        pencil = mp_estimate(noisy, n_trunc - 1)
        for s in bands:
            tau = exact_moment(spec, s)
            delta_ts[s].append((tau - estimate_moment(q, s)) / eps)
            delta_mp[s].append((tau - mp_moment(pencil, s)) / eps)
    for s, band in bands.items():
        within = sum(abs(d) <= band for d in delta_ts[s])
        assert within >= 4, f"s={s}: only {within}/5 runs within |delta|<={band}"
    mean_mp4 = float(np.mean(np.abs(delta_mp[4])))
    mean_ts4 = float(np.mean(np.abs(delta_ts[4])))
    assert mean_mp4 > mean_ts4
    elapsed = time.perf_counter() - start
    assert elapsed < 15 * 60
    _report(
        "C08",
        "reference-table-bands",
        f"max|dTS|={ {s: round(max(map(abs, v)), 3) for s, v in delta_ts.items()} }, "
        f"mean|dMP|(s=4)={mean_mp4:.1f}, {elapsed:.1f}s",
    )


def test_c09_pencil_noiseless_exactness():
    start = time.perf_counter()
    spec = fig6_spectrum()
    est = mp_estimate(generate_clean(spec, 20), 10)
    keep = np.abs(est.moduli - 1.0) <= 0.5
    assert keep.sum() == 5
    phases = est.eigenphases[keep]
    amps = est.amplitudes[keep]
    order = np.argsort(phases)
    assert np.max(np.abs(phases[order] - spec.lambdas)) <= 1e-6
    assert np.max(np.abs(amps[order] - spec.weights)) <= 1e-6
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    _report("C09", "pencil-noiseless-exactness", f"{elapsed:.2f}s")


def test_c10_moment_error_bound(bank_mid_strict):
    bank = bank_mid_strict
    eps = bank.eps
    violations = 0
    worst_ratio = 0.0
    for i in range(50):
        spec = random_spectrum(5, 7000 + i)
        noisy = add_noise(generate_clean(spec, bank.n_trunc), eps / bank.n_trunc, i)
        q = estimate_bins(noisy, bank)
        for s in (1, 2, 4):
            bound = eps * (2.0**-s + s * 2.0 ** -(s - 1))
            err = abs(estimate_moment(q, s) - exact_moment(spec, s))
            worst_ratio = max(worst_ratio, err / bound)
            if err > bound:
                violations += 1
    assert violations == 0
    _report("C10", "moment-error-bound", f"50 pairs, worst err/bound={worst_ratio:.3f}")


def test_c11_shot_planner():
    shots = hoeffding_shots(566, 0.005, 0.99)
    assert 5.2e8 <= shots <= 5.3e8
    _report("C11", "shot-planner", f"R={shots}")


def test_c12_dft_leakage():
    m = 20
    lam = 2.0 * math.pi / 80.0
    result = dft(np.exp(-1j * lam * np.arange(m)))
    mags = np.abs(result.coefficients)
    assert np.all(mags > 0)
    peak = int(np.argmax(mags))
    nearest = int(np.argmin(np.abs(result.frequency_grid - lam)))
    assert peak == nearest
    floor_at = lambda d: min(mags[(peak + d) % m], mags[(peak - d) % m])
    c = floor_at(1)
    for d in range(1, 6):
        assert floor_at(d) >= c / d - 1e-12
    _report("C12", "dft-leakage", f"peak at {result.frequency_grid[peak]:.3f}")


def test_c13_mass_concentration(bank_appc):
    eps = bank_appc.eps
    spec = fig6_spectrum()
    centers = bin_centers(eps)
    near = np.zeros(centers.size, dtype=bool)
    for lam in spec.lambdas:
        near |= np.abs(centers - lam) <= 2.0 * eps + 1e-15

    p = exact_bins(spec, eps)
    assert p.values[near].sum() == pytest.approx(1.0, abs=1e-9)

    fractions = []
    for seed in (7, 42, 2026):
        noisy = add_noise(generate_clean(spec, bank_appc.n_trunc), eps, seed)
        q = estimate_bins(noisy, bank_appc)
        frac = float(q.values[near].sum() / q.values.sum())
        assert frac >= 0.95
        fractions.append(frac)
    _report("C13", "mass-concentration", f"fractions={[round(f, 4) for f in fractions]}")
