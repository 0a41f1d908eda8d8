"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) for the summary alone.
"""

import time

import numpy as np
import pytest

from superosc.analysis import local_wavenumber, phase_gradient, random_wave, so_fraction_closed
from superosc.analysis import so_fraction_mc
from superosc.synthesis import MinEnergyInterpolator, elementary_so, optimize_yield
from superosc.synthesis import synthesize_gaussian
from superosc.vortex import VortexProbe, kz_marginal, kz_marginal_numeric, oracle_l1
from superosc.weakvalue import (
    collective_spin_weak_value, collective_spin_weak_value_tensor, fig5_sweep,
    spin_tail_fractions, superweak_probability, weak_value,
)


def report(number, ok, detail):
    line = f"ACCEPTANCE {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line, flush=True)
    return ok


@pytest.fixture
def emit(capsys):
    def _emit(number, ok, detail):
        with capsys.disabled():
            print()
            report(number, ok, detail)
        assert ok, detail
    return _emit


def criterion_1():
    t0 = time.perf_counter()
    so = elementary_so(4, 20)
    k = local_wavenumber(so(0.0), so.derivative(0.0)).magnitude
    band = so.spectrum.band_limit
    dt = time.perf_counter() - t0
    ok = abs(k - 4.0) <= 1e-6 and band == 1.0 and dt < 1.0
    return ok, f"|k(0)|={k:.12f} band_limit={band} time={dt:.3f}s"


def criterion_2(seed=0):
    t0 = time.perf_counter()
    parts, ok = [], True
    for d in (1, 2, 3):
        res = so_fraction_mc(d, 400, 1.0, 10 ** 6, seed)
        exact = so_fraction_closed(d)
        z = (res.estimate - exact) / res.stderr
        ok &= abs(z) <= 3
        parts.append(f"D={d}: {res.estimate:.5f} vs {exact:.5f} (z={z:+.2f})")
    dt = time.perf_counter() - t0
    ok &= dt < 30
    return ok, "; ".join(parts) + f" time={dt:.1f}s"


def criterion_3():
    p = superweak_probability([-1.0, 1.0])
    err = abs(p - (1 - 1 / np.sqrt(2)))
    return err <= 1e-12, f"P_super={p:.15f} err={err:.1e}"


def criterion_4(seed=0):
    t0 = time.perf_counter()
    est, err = spin_tail_fractions([0.5], 10 ** 6, seed)
    z = (est[0] - 1 / 3) / err[0]
    far, _ = spin_tail_fractions([100.0], 10 ** 8, seed + 1)
    rel = far[0] * 120000 - 1
    dt = time.perf_counter() - t0
    ok = abs(z) <= 3 and abs(rel) <= 0.15 and dt < 120
    return ok, (f"P(>1/2)={est[0]:.5f} (z={z:+.2f}); P(>100)={far[0]:.3e} "
                f"vs {1 / 120000:.3e} ({rel:+.1%}) time={dt:.1f}s")


def criterion_5():
    op, tsv, rows = fig5_sweep()
    errors = np.array([r["supershift_error"] for r in rows])
    decreasing = bool(np.all(np.diff(errors) < 0))
    shift = 1.0 * weak_value(tsv, op).real
    last = rows[-1]
    outside = last["peak_q"] > op.a_max or last["peak_q"] < op.a_min
    near = abs(last["peak_q"] - shift) <= 0.05 * abs(shift)
    ratio = last["peak_amplitude"] / rows[0]["peak_amplitude"]
    ok = decreasing and outside and near and 1e-9 <= ratio <= 1e-7
    return ok, (f"errors {errors[0]:.3f}->{errors[-1]:.3f} decreasing={decreasing}; "
                f"peak q={last['peak_q']:.2f} vs lambda Re A_w={shift:.2f}; ratio={ratio:.2e}")


def criterion_6():
    worst = max(abs(collective_spin_weak_value_tensor(n) - np.sqrt(2) / 2 * n)
                for n in range(1, 5))
    exceeds = all(collective_spin_weak_value(n) > n / 2 for n in range(1, 1001))
    return worst <= 1e-12 and exceeds, f"tensor err={worst:.1e}; exceeds N/2 for N<=1000: {exceeds}"


def criterion_7():
    t0 = time.perf_counter()
    l1 = {}
    kz = np.linspace(7, 13, 25)
    kz_err = 0.0
    for m, x0 in [(1, 1.0), (3, 1.0), (3, 2.0), (4, 5.0)]:
        p = VortexProbe(m, 10.0, 1.0, x0)
        l1[(m, x0)] = oracle_l1(p, 256)
        kz_err = max(kz_err, np.max(np.abs(kz_marginal_numeric(p, kz) - kz_marginal(p, kz))))
    dt = time.perf_counter() - t0
    ok = max(l1.values()) < 1e-3 and kz_err <= 1e-8 and dt < 20
    return ok, (f"max L1={max(l1.values()):.1e}; kz marginal err={kz_err:.1e} "
                f"time={dt:.1f}s")


def criterion_8():
    pts = np.array([(0.0, 0.0), (0.1, 1.0), (0.2, 0.0), (0.35, -0.5)])
    est = MinEnergyInterpolator(1.0).fit(pts[:, 0], pts[:, 1])
    resid = np.max(np.abs(est.predict(pts[:, 0]) - pts[:, 1]))
    rng = np.random.default_rng(0)
    beaten = 0
    for _ in range(100):
        s = rng.choice([-1, 1]) * rng.uniform(1, 5) + 0.175
        eps = rng.normal() * rng.choice([0.3, 1, 100])
        bump = MinEnergyInterpolator(1.0).fit([s], [1.0])
        corr = MinEnergyInterpolator(1.0).fit(pts[:, 0], bump.predict(pts[:, 0]))
        knots = np.r_[est.knots_, s]
        coef = np.r_[est.coef_ - eps * corr.coef_, eps * bump.coef_]
        beaten += est.energy_of(knots, coef) > est.energy_

    opt = optimize_yield([(0.0, 0.0), (0.25, 1.0)], 0.5, 4)
    null = opt.null_basis_
    base = opt.coef_ - null @ (null.T @ opt.coef_)
    wins = 0
    for _ in range(1000):
        b = base + null @ (rng.standard_normal(null.shape[1]) * rng.choice([0.1, 1, 10]))
        wins += opt.yield_of(b) <= opt.yield_ + 1e-15
    grad = opt.projected_gradient_norm()
    ok = resid <= 1e-8 and beaten == 100 and wins == 1000 and grad < 1e-8
    return ok, (f"residual={resid:.1e}; beats {beaten}/100 perturbations; "
                f"Y={opt.yield_:.6f} beats {wins}/1000; grad={grad:.1e}")


def criterion_9():
    rng = np.random.default_rng(9)
    worst, used = 0.0, 0
    for i in range(1000):
        wave = random_wave(2 + i % 2, 40, 1.0, seed=i)
        r = rng.uniform(-15, 15, (1, wave.dimension))
        psi = wave(r)
        if abs(psi[0]) ** 2 < 1e-3 * np.sum(np.abs(wave.amplitudes) ** 2):
            continue
        cur = local_wavenumber(psi, wave.gradient(r)).vector[0]
        fd = phase_gradient(wave, r, 1e-5).vector[0]
        worst = max(worst, np.linalg.norm(fd - cur) / max(1.0, np.linalg.norm(cur)))
        used += 1
    return worst <= 1e-6 and used >= 900, f"{used} points, max relative diff={worst:.1e}"


def criterion_10():
    x = np.arange(-1000, 1001) * 0.02
    res = synthesize_gaussian(0.25, x, delta=0.005)
    lo, hi = res.window
    inside = (x >= lo) & (x <= hi)
    rel = np.max(np.abs(res.field.values[inside] - res.target[inside]) / res.target[inside])
    ok = rel < 0.05 and res.sidelobe_ratio >= 1e6
    return ok, (f"window=[{lo:.2f}, {hi:.2f}] max rel err={rel:.3f}; "
                f"sidelobe/in-window={res.sidelobe_ratio:.2e}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("number", range(1, 11))
def test_acceptance(number, emit):
    ok, detail = CRITERIA[number - 1]()
    emit(number, ok, detail)


if __name__ == "__main__":
    results = [report(i + 1, *c()) for i, c in enumerate(CRITERIA)]
    raise SystemExit(0 if all(results) else 1)
