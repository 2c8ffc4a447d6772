"""Exit criteria. Each test records one PASS/FAIL line shown in the terminal summary.

Run alone with ``pytest tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from squeezed_atom import validate as validation
from squeezed_atom.cli import main
from squeezed_atom.correlation import correlator_exact, correlator_numeric, correlator_paper
from squeezed_atom.master import build_liouvillian, evolve, max_squeeze, populations, steady_state, upper_population, validate_params
from squeezed_atom.spectrum import (
    MODES,
    DetuningGrid,
    SpectrumSeries,
    default_tau_window,
    lorentzian,
    lorentzian_fit,
    peak_and_hwhm,
    spectral_weight,
    spectrum_consistent,
    spectrum_exact,
    spectrum_numeric,
    spectrum_series,
)

from conftest import ACCEPTANCE_LINES, SQRT2, SQRT30


def record(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
    assert ok, detail


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_1_steady_state():
    with Timer() as t:
        worst = 0.0
        for N in (0.0, 1.0, 5.0, 6.0, 7.0):
            for M in (0.0, max_squeeze(N)):
                rho = steady_state(build_liouvillian(validate_params(1.0, N, M)))
                worst = max(worst, abs(rho[0, 0].real - N / (2 * N + 1)))
    ok = worst <= 1e-12 and t.elapsed < 1.0
    record(1, "steady state", ok, f"max |rho_a - N/(2N+1)| = {worst:.2e} (tol 1e-12), {t.elapsed:.3f}s (< 1s)")


def test_2_population_dynamics():
    with Timer() as t:
        times = np.linspace(0.0, 2.0, 200)
        worst = 0.0
        for N in (0.0, 5.0):
            p = validate_params(1.0, N, 0.0)
            L = build_liouvillian(p)
            for r0 in (0.0, 0.25, 1.0):
                evolved = populations(evolve(L, np.diag([r0, 1 - r0]), times))[0]
                worst = max(worst, float(np.max(np.abs(evolved - upper_population(p, r0, times)))))
    ok = worst <= 1e-8 and t.elapsed < 1.0
    record(2, "population dynamics", ok, f"max closed-vs-expm gap {worst:.2e} (tol 1e-8), {t.elapsed:.3f}s (< 1s)")


def test_3_thermal_sweep(tmp_path, capsys):
    with Timer() as t:
        code = main(["sweep", "--gamma", "1", "--n-list", "5,6,7", "--m-rule", "zero", "--mode", "paper", "--out", str(tmp_path)])
    lines = capsys.readouterr().out.strip().splitlines()
    rows = np.array([l.split(",") for l in lines[1:]], dtype=float)
    nbar = np.array([5.0, 6.0, 7.0])
    # direct substitution at zero detuning: 2n / ((2n+1)(n+1/2)^2)
    expected = 2 * nbar / ((2 * nbar + 1) * (nbar + 0.5) ** 2)
    peak_err = float(np.max(np.abs(rows[:, 2] - expected)))
    hwhm_rel = float(np.max(np.abs(rows[:, 3] / (nbar + 0.5) - 1)))
    order = bool(np.all((rows[:, 2] > 1e-2) & (rows[:, 2] < 1e-1)))
    ok = code == 0 and peak_err <= 1e-6 and hwhm_rel <= 5e-3 and order and t.elapsed < 5.0
    record(
        3,
        "thermal sweep",
        ok,
        f"peaks {', '.join(f'{v:.6f}' for v in rows[:, 2])} (err {peak_err:.1e}, tol 1e-6), "
        f"hwhm rel err {hwhm_rel:.1e} (tol 5e-3), {t.elapsed:.2f}s (< 5s)",
    )


def test_4_regression_oracle():
    rng = np.random.default_rng(4)
    with Timer() as t:
        oracle = 0.0
        for _ in range(20):
            N = rng.uniform(0.0, 8.0)
            p = validate_params(1.0, N, rng.uniform(0.0, 1.0) * max_squeeze(N))
            tau = np.linspace(0.0, 10.0 / p.gamma, 201)
            oracle = max(oracle, float(np.max(np.abs(correlator_exact(p, tau) - correlator_numeric(p, tau)))))
        thermal = 0.0
        for N in (0.0, 0.5, 1.0, 5.0, 6.0, 7.0):
            p = validate_params(1.0, N, 0.0)
            tau = np.linspace(0.0, 10.0, 201)
            num = correlator_numeric(p, tau)
            for c in (correlator_paper(p, tau), correlator_exact(p, tau)):
                thermal = max(thermal, float(np.max(np.abs(c - num))))
    ok = oracle <= 1e-8 and thermal <= 1e-10 and t.elapsed < 10.0
    record(
        4,
        "regression-theorem oracle",
        ok,
        f"exact vs numeric {oracle:.2e} (tol 1e-8), thermal three-way {thermal:.2e} (tol 1e-10), {t.elapsed:.2f}s (< 10s)",
    )


def test_5_quadrature_consistency():
    grid = DetuningGrid(-10.0, 10.0, 401)
    d = grid.deltas
    with Timer() as t:
        errs = {}
        p5 = validate_params(1.0, 5.0, 0.0)
        s = spectrum_numeric(lambda x: correlator_paper(p5, x), grid, 8.0, 16000)
        errs["paper N5"] = np.max(np.abs(s.values - spectrum_consistent(p5, d)))
        q = validate_params(1.0, 1.0, SQRT2)
        s = spectrum_numeric(lambda x: correlator_exact(q, x), grid, 400.0, 200000)
        errs["exact N1 M=sqrt2"] = np.max(np.abs(s.values - spectrum_exact(q, d)))
        s = spectrum_numeric(lambda x: correlator_paper(q, x), grid, *default_tau_window(q, "paper", grid))
        errs["paper N1 M=sqrt2"] = np.max(np.abs(s.values - spectrum_consistent(q, d)))
        m = validate_params(1.0, 5.0, SQRT30)
        s = spectrum_numeric(lambda x: correlator_exact(m, x), grid, *default_tau_window(m, "exact", grid))
        errs["exact N5 M=max"] = np.max(np.abs(s.values - spectrum_exact(m, d)))
    worst = max(errs.values())
    ok = worst <= 1e-6 and t.elapsed < 30.0
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errs.items())
    record(5, "quadrature consistency", ok, f"{detail} (tol 1e-6), {t.elapsed:.2f}s (< 30s)")


def test_6_sum_rule():
    # wide enough that the Lorentzian wings beyond the grid hold < 0.02% of the area
    grid = DetuningGrid(-20000.0, 20000.0, 4_000_001)
    d = grid.deltas
    with Timer() as t:
        worst = 0.0
        for N, M in ((5.0, 0.0), (1.0, SQRT2), (5.0, SQRT30)):
            p = validate_params(1.0, N, M)
            target = 2 * math.pi * p.steady_upper
            for fn in (spectrum_consistent, spectrum_exact):
                area = spectral_weight(SpectrumSeries(grid, fn(p, d)))
                worst = max(worst, abs(area / target - 1))
    ok = worst <= 1e-3 and t.elapsed < 10.0
    record(6, "sum rule", ok, f"max relative error {worst:.2e} (tol 1e-3), {t.elapsed:.2f}s (< 10s)")


def test_7_single_peak():
    failures = []
    for N, M in validation.SHIPPED_PARAMS:
        p = validate_params(1.0, N, M)
        for mode in MODES:
            series = spectrum_series(p, mode)
            pk = peak_and_hwhm(series)
            if pk.peak_delta != 0.0 or not validation.is_monotone_in_abs_delta(series):
                failures.append(f"{mode} N={N:g} M={M:.4g}")
    n = len(validation.SHIPPED_PARAMS) * len(MODES)
    record(7, "single peak at zero detuning", not failures, f"{n - len(failures)}/{n} mode/parameter sets" + (f"; failed {failures}" if failures else ""))


def test_8_fit_roundtrip():
    rng = np.random.default_rng(8)
    grid = DetuningGrid()
    with Timer() as t:
        worst = 0.0
        cases = [(10 / 11, 0.0, 5.5)] + [(rng.uniform(0.1, 10), rng.uniform(-3, 3), rng.uniform(0.3, 6)) for _ in range(10)]
        for A, c, w in cases:
            fit = lorentzian_fit(SpectrumSeries(grid, lorentzian(grid.deltas, A, c, w)))
            c_err = abs(fit.center - c) / (abs(c) if c else w)
            worst = max(worst, abs(fit.amplitude / A - 1), c_err, abs(fit.half_width / w - 1))
        series = spectrum_series(validate_params(1.0, 5.0, SQRT30), "exact", grid)
        misfit = lorentzian_fit(series).residual_norm / series.values.max()
    ok = worst <= 1e-6 and misfit > 1e-3 and t.elapsed < 5.0
    record(
        8,
        "fit round-trip",
        ok,
        f"max relative parameter error {worst:.1e} (tol 1e-6), maximal-M misfit rms/height {misfit:.2e} (> 1e-3), {t.elapsed:.2f}s (< 5s)",
    )


def test_9_documented_discrepancies():
    report = {c.name: c for c in validation.run_checks()}
    spec = report.get("paper-spectrum-is-consistent-times-2-over-a")
    corr = report.get("paper-correlator-misses-oracle-squeezed")
    ok = bool(spec and spec.passed and corr and corr.passed and all(c.passed for c in report.values()))
    record(
        9,
        "documented discrepancies",
        ok,
        f"spectrum factor 2/a rel err {spec.observed:.1e} (tol {spec.tolerance:g}); "
        f"paper vs oracle correlator gap {corr.observed:.4f} (> {corr.expected:g}); "
        f"{sum(c.passed for c in report.values())}/{len(report)} validate checks pass",
    )


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
