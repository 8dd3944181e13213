"""End-to-end acceptance gate: ten release criteria, one pass/fail line each."""

import contextlib
import itertools
import math
import numpy as np
import pytest

from effcap_kit import (
    GrowthLaw,
    LinkConfig,
    QosSpec,
    SimSpec,
    asymptotics_numeric_check,
    asymptotics_sparse_bounded,
    bit_energy_db,
    bit_energy_vs_bandwidth,
    effective_capacity_at,
    effective_capacity_wideband,
    effective_snr,
    last_decade_rise_db,
    min_bit_energy_numeric,
    outage_threshold,
    rho_opt_closed_form,
    rho_opt_numeric,
    simulate_queue,
    spectral_efficiency,
    transition_probabilities,
    uniform_wideband_config,
)
from effcap_kit.cli import main
from effcap_kit.wideband import WidebandConfig

LN2 = math.log(2.0)

T = 2e-3
SNR_GRID = np.geomspace(1e-6, 1e3, 100)
BANDS = (1e5, 1e7)
THETAS = (0.001, 0.01, 0.1, 1.0)


@contextlib.contextmanager
def criterion(capsys, num, label):
    # report outside pytest capture so the line shows for passes too
    try:
        yield
    except BaseException:
        with capsys.disabled():
            print(f"criterion {num:02d} ({label}): FAIL", flush=True)
        raise
    with capsys.disabled():
        print(f"criterion {num:02d} ({label}): PASS", flush=True)


def link_at(snr, bandwidth):
    return LinkConfig(T, bandwidth, 1.0, snr * bandwidth)


def test_criterion_01_limit_table(capsys):
    table = (
        (0.0, 4.6776, 0.4720),
        (0.001, 4.7029, 0.4749),
        (0.01, 4.9177, 0.4978),
        (0.1, 6.3828, 0.6151),
        (1.0, 10.8333, 0.6061),
    )
    with criterion(capsys, 1, "closed-form limit table"):
        for theta, want_db, want_s0 in table:
            got = asymptotics_sparse_bounded(theta, T, 1, 1e4, 1.0)
            got_db = 10.0 * math.log10(got.ebn0_min)
            assert got_db == pytest.approx(want_db, abs=5e-3)
            assert got.wideband_slope == pytest.approx(want_s0, abs=5e-4)


def test_criterion_02_limit_extrapolation(capsys):
    bc_grid = np.geomspace(1e7, 1e10, 16)
    with criterion(capsys, 2, "finite-bandwidth extrapolation"):
        for theta in THETAS:
            ref = asymptotics_sparse_bounded(theta, T, 1, 1e4, 1.0)
            ref_db = 10.0 * math.log10(ref.ebn0_min)
            got_db, got_slope = asymptotics_numeric_check(theta, T, 1, 1e4, 1.0, bc_grid)
            assert abs(got_db - ref_db) <= 0.05
            assert abs(got_slope / ref.wideband_slope - 1.0) <= 0.05


def joint_grid_best(snr, bandwidth, theta, rate_center):
    # raw re-evaluation of the fixed-rate service law over a broad
    # (training fraction, rate) grid; no library calls on the hot path
    tb = T * bandwidth
    a = T / (tb - 1.0)
    r_grid = rate_center * np.geomspace(1.0 / 50.0, 50.0, 60)
    best = 0.0
    for rho in np.linspace(0.02, 0.98, 49):
        ep = rho * snr * tb
        es = (1.0 - rho) * snr * tb / (tb - 1.0)
        snr_eff = es * ep / (ep + 1.0 + es)
        with np.errstate(over="ignore"):
            alpha = np.expm1(a * r_grid * LN2) / snr_eff
            inner = 1.0 - np.exp(-alpha) * (-np.expm1(-theta * T * r_grid))
        vals = -np.log(inner) / (theta * T * bandwidth)
        best = max(best, float(vals.max()))
    return best


def test_criterion_03_training_fraction_optimality(capsys):
    with criterion(capsys, 3, "training-fraction optimality"):
        worst = 0.0
        for bandwidth in BANDS:
            for snr in SNR_GRID:
                cfg = link_at(float(snr), bandwidth)
                closed = rho_opt_closed_form(cfg).rho_opt
                numeric = rho_opt_numeric(cfg)
                worst = max(worst, abs(closed - numeric))
        assert worst <= 1e-9

        theta = 0.01
        for bandwidth in BANDS:
            for snr in SNR_GRID:
                cfg = link_at(float(snr), bandwidth)
                res = spectral_efficiency(cfg, QosSpec(theta))
                best = joint_grid_best(float(snr), bandwidth, theta, res.rate_opt_bps)
                assert best <= res.spectral_efficiency * (1.0 + 1e-6)


def test_criterion_04_training_fraction_limits(capsys):
    with criterion(capsys, 4, "training-fraction limits"):
        lo = rho_opt_closed_form(link_at(1e-8, 1e5)).rho_opt
        assert 0.499 <= lo <= 0.501
        hi = rho_opt_closed_form(link_at(1e6, 1e7)).rho_opt  # TB = 2e4
        assert 0.0065 <= hi <= 0.0075


def test_criterion_05_rate_stationarity_residual(capsys):
    with criterion(capsys, 5, "rate stationarity residual"):
        worst = 0.0
        for bandwidth in BANDS:
            tb = T * bandwidth
            a = T / (tb - 1.0)
            for snr in SNR_GRID:
                cfg = link_at(float(snr), bandwidth)
                rho = rho_opt_closed_form(cfg).rho_opt
                snr_eff = effective_snr(cfg, rho).effective_snr
                k = T * LN2 / ((tb - 1.0) * snr_eff)
                for theta in THETAS:
                    res = spectral_efficiency(cfg, QosSpec(theta))
                    r = res.rate_opt_bps
                    lhs = k * 2.0 ** (a * r) * (-math.expm1(-theta * T * r)) - (
                        theta * T * math.exp(-theta * T * r)
                    )
                    worst = max(worst, abs(lhs))
        assert worst < 1e-12


def test_criterion_06_bit_energy_minimum_shape(capsys):
    grid = np.geomspace(1e-6, 10.0, 48)
    with criterion(capsys, 6, "bit-energy minimum shape"):
        mins = {}
        for theta in THETAS:
            qos = QosSpec(theta)
            snr_at, min_db = min_bit_energy_numeric(link_at(1.0, 1e5), qos, grid)
            assert grid[0] < snr_at < grid[-1]
            below = np.geomspace(snr_at, snr_at / 100.0, 13)
            vals = [bit_energy_db(link_at(float(s), 1e5), qos) for s in below]
            assert all(b > a for a, b in zip(vals, vals[1:]))
            mins[theta] = min_db
        for lo_t, hi_t in zip(THETAS, THETAS[1:]):
            assert mins[lo_t] <= mins[hi_t]
        for theta in THETAS:
            qos = QosSpec(theta)
            per_band = [
                min_bit_energy_numeric(link_at(1.0, b), qos, grid)[1]
                for b in (1e4, 1e5, 1e6, 1e7)
            ]
            assert all(x >= y for x, y in zip(per_band, per_band[1:]))


def subchannel_on_probability(bc, power, gamma, rho, rate):
    sub = LinkConfig(T, bc, 1.0, power, gamma)
    snr_eff = effective_snr(sub, rho).effective_snr
    return math.exp(-outage_threshold(sub, rate, snr_eff))


def test_criterion_07_state_model_equivalence(capsys):
    with criterion(capsys, 7, "state-model equivalence"):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(1, 13))
            powers = rng.uniform(100.0, 5e3, n)
            variances = rng.uniform(0.5, 2.0, n)
            rhos = rng.uniform(0.05, 0.95, n)
            link = LinkConfig(T, n * 1e4, 1.0, float(powers.sum()))
            wcfg = WidebandConfig(n, 1e4, link, tuple(variances), tuple(powers), tuple(rhos))
            rate = float(rng.uniform(1e3, 2e4))
            probs = transition_probabilities(wcfg, rate)
            ps = [
                subchannel_on_probability(1e4, powers[k], variances[k], rhos[k], rate)
                for k in range(n)
            ]
            want = np.zeros(n + 1)
            for states in itertools.product((0, 1), repeat=n):
                weight = 1.0
                for s, p in zip(states, ps):
                    weight *= p if s else (1.0 - p)
                want[sum(states)] += weight
            np.testing.assert_allclose(probs, want, rtol=0, atol=1e-12)

        rng = np.random.default_rng(19)
        for _ in range(100):
            n = int(rng.integers(1, 30))
            bc = float(rng.uniform(2e3, 5e4))
            per_power = float(rng.uniform(50.0, 5e3))
            rho = float(rng.uniform(0.05, 0.95))
            gamma = float(rng.uniform(0.5, 2.0))
            theta = float(rng.uniform(1e-4, 2.0))
            rate = float(rng.uniform(1e2, 3e4))
            wcfg = uniform_wideband_config(n, bc, T, 1.0, per_power * n, gamma, rho)
            wide = effective_capacity_wideband(wcfg, QosSpec(theta), rate)
            sub = LinkConfig(T, bc, 1.0, per_power, gamma)
            narrow = effective_capacity_at(sub, QosSpec(theta), rate, rho)
            assert wide == pytest.approx(narrow, rel=1e-10)


def test_criterion_08_growth_law_divergence(capsys):
    bands = np.geomspace(1e8, 1e12, 13)
    theta = 0.001
    with criterion(capsys, 8, "growth-law divergence"):
        sub = bit_energy_vs_bandwidth(theta, T, GrowthLaw("sublinear", 10, 1e8, 0.5), 1e5, 1.0, bands)
        fix = bit_energy_vs_bandwidth(theta, T, GrowthLaw("bounded", 10, 1e8), 1e5, 1.0, bands)
        b_values = [p.bandwidth_hz for p in sub]
        assert last_decade_rise_db(b_values, [p.ebn0_db for p in sub]) > 3.0
        assert abs(last_decade_rise_db(b_values, [p.ebn0_db for p in fix])) <= 0.05


def test_criterion_09_queue_tail_calibration(capsys):
    with criterion(capsys, 9, "queue-tail calibration"):
        for theta in (0.005, 0.01, 0.05):
            spec = SimSpec(link_at(1.0, 1e5), QosSpec(theta), 10_000_000, 0, 1.0)
            est = simulate_queue(spec)
            assert 0.85 * theta <= est.theta_hat <= 1.15 * theta
            assert abs(est.theta_hat - theta) <= est.ci_halfwidth


def test_criterion_10_sweep_determinism(capsys, tmp_path):
    with criterion(capsys, 10, "sweep determinism"):
        sweep = [
            "se-vs-ebn0",
            "--snr-min", "0.001",
            "--snr-max", "1",
            "--points", "6",
            "--bandwidth", "1e5",
            "--theta-list", "0,0.01",
        ]
        a, b = tmp_path / "sweep_a.csv", tmp_path / "sweep_b.csv"
        assert main(sweep + ["--out", str(a)]) == 0
        assert main(sweep + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

        queue = [
            "queue-validate",
            "--theta-list", "0.01",
            "--snr", "1",
            "--bandwidth", "1e5",
            "--seed", "7",
        ]
        qa, qb = tmp_path / "queue_a.csv", tmp_path / "queue_b.csv"
        assert main(queue + ["--out", str(qa)]) == 0
        assert main(queue + ["--out", str(qb)]) == 0
        assert qa.read_bytes() == qb.read_bytes()
