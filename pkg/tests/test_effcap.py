"""Effective capacity, optimal rate, bit energy and its minimum."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq, minimize_scalar

from effcap_kit import (
    DomainError,
    GridEndpointError,
    LinkConfig,
    QosSpec,
    bit_energy,
    bit_energy_db,
    effective_capacity_at,
    effective_capacity_theta0,
    effective_snr,
    min_bit_energy_numeric,
    nominal_snr,
    optimal_rate,
    rho_opt_closed_form,
    spectral_efficiency,
)

LN2 = math.log(2.0)


def make_cfg(snr, t=2e-3, b=1e5, gamma=1.0):
    return LinkConfig(t, b, 1.0, snr * b, gamma)


def eq14_raw(cfg, theta, rate, rho):
    """Independent scalar evaluation of the normalized effective capacity."""
    snr_eff = effective_snr(cfg, rho).effective_snr
    if rate == 0.0 or snr_eff <= 0.0:
        return 0.0
    tb = cfg.symbols_per_frame
    t = cfg.frame_duration_s
    alpha = (2.0 ** (rate * t / (tb - 1.0)) - 1.0) / snr_eff
    p_on = math.exp(-alpha)
    inner = 1.0 - p_on * (1.0 - math.exp(-theta * t * rate))
    return -math.log(inner) / (theta * t * cfg.bandwidth_hz)


class TestEffectiveCapacityAt:
    def test_zero_rate(self):
        cfg = make_cfg(0.1)
        assert effective_capacity_at(cfg, QosSpec(0.01), 0.0, 0.3) == 0.0

    def test_zero_snr_eff(self):
        cfg = make_cfg(0.1)
        # rho=0 starves the estimator, so the ON probability vanishes
        assert effective_capacity_at(cfg, QosSpec(0.01), 1e4, 0.0) == 0.0

    def test_rejects_theta_zero(self):
        cfg = make_cfg(0.1)
        with pytest.raises(DomainError):
            effective_capacity_at(cfg, QosSpec(0.0), 1e4, 0.3)

    def test_small_theta_taylor_limit(self):
        # around theta=0 the formula collapses to (r/B) e^{-alpha}
        cfg = make_cfg(0.5)
        rho, rate = 0.2, 2e4
        got = effective_capacity_at(cfg, QosSpec(1e-6), rate, rho)
        snr_eff = effective_snr(cfg, rho).effective_snr
        tb = cfg.symbols_per_frame
        alpha = (2.0 ** (rate * cfg.frame_duration_s / (tb - 1.0)) - 1.0) / snr_eff
        want = (rate / cfg.bandwidth_hz) * math.exp(-alpha)
        assert got == pytest.approx(want, rel=1e-3)

    def test_matches_raw_formula(self):
        cfg = make_cfg(0.5)
        for theta, rate, rho in [(0.01, 1e4, 0.2), (0.5, 3e4, 0.1), (2.0, 500.0, 0.4)]:
            got = effective_capacity_at(cfg, QosSpec(theta), rate, rho)
            assert got == pytest.approx(eq14_raw(cfg, theta, rate, rho), rel=1e-12)


class TestOptimalRate:
    def test_residual_recomputed_independently(self):
        # the stationarity condition, rebuilt here from scratch, must be
        # satisfied to 1e-12 at the returned rate
        for snr in (0.01, 0.1, 1.0, 10.0):
            for theta in (0.001, 0.01, 0.1, 1.0):
                cfg = make_cfg(snr)
                rho = rho_opt_closed_form(cfg).rho_opt
                res = optimal_rate(cfg, QosSpec(theta), rho)
                snr_eff = effective_snr(cfg, rho).effective_snr
                t = cfg.frame_duration_s
                tb = cfg.symbols_per_frame
                k = t * LN2 / ((tb - 1.0) * snr_eff)
                a = t / (tb - 1.0)
                r = res.rate_opt_bps
                e = math.exp(-theta * t * r)
                residual = k * 2.0 ** (a * r) * (1.0 - e) - theta * t * e
                assert abs(residual) < 1e-12, f"snr={snr} theta={theta}"

    def test_agrees_with_scalar_maximizer(self):
        # scipy's bounded Brent search over the rate is the oracle
        cfg = make_cfg(1.0)
        rho = rho_opt_closed_form(cfg).rho_opt
        for theta in (0.001, 0.1, 1.0):
            res = optimal_rate(cfg, QosSpec(theta), rho)
            opt = minimize_scalar(
                lambda r: -effective_capacity_at(cfg, QosSpec(theta), r, rho),
                bounds=(1.0, 20.0 * cfg.bandwidth_hz),
                method="bounded",
                options={"xatol": 1e-6},
            )
            assert res.spectral_efficiency == pytest.approx(-opt.fun, rel=1e-6)

    def test_rate_decreases_with_theta(self):
        cfg = make_cfg(0.5)
        rho = rho_opt_closed_form(cfg).rho_opt
        thetas = (1e-3, 1e-2, 1e-1, 1.0, 10.0)
        rates = [optimal_rate(cfg, QosSpec(th), rho).rate_opt_bps for th in thetas]
        assert all(a > b for a, b in zip(rates, rates[1:]))

    def test_dominates_random_rates(self):
        cfg = make_cfg(0.3)
        rho = rho_opt_closed_form(cfg).rho_opt
        qos = QosSpec(0.01)
        res = optimal_rate(cfg, qos, rho)
        rng = np.random.default_rng(20240817)
        rates = 10.0 ** rng.uniform(0.0, math.log10(20.0 * cfg.bandwidth_hz), 1000)
        for r in rates:
            other = effective_capacity_at(cfg, qos, float(r), rho)
            assert other <= res.spectral_efficiency * (1.0 + 1e-10)

    def test_fixed_point_consistency(self):
        cfg = make_cfg(2.0)
        rho = rho_opt_closed_form(cfg).rho_opt
        qos = QosSpec(0.05)
        res = optimal_rate(cfg, qos, rho)
        again = effective_capacity_at(cfg, qos, res.rate_opt_bps, rho)
        assert again == pytest.approx(res.spectral_efficiency, rel=1e-12)

    def test_rejects_bad_inputs(self):
        cfg = make_cfg(0.1)
        with pytest.raises(DomainError):
            optimal_rate(cfg, QosSpec(0.0), 0.3)
        with pytest.raises(DomainError):
            optimal_rate(cfg, QosSpec(0.01), 0.0)


class TestThetaZero:
    def test_brute_force_grid_oracle(self):
        # pick the nominal SNR that makes the post-estimation SNR exactly 1
        # (solved here, independently), then compare the maximized r e^{-alpha}
        # with a million-point grid scan of the same objective
        t, b = 2e-3, 1e7
        rho = 0.3

        def snr_eff_at(snr):
            return effective_snr(make_cfg(snr, t=t, b=b), rho).effective_snr

        snr_star = brentq(lambda s: snr_eff_at(s) - 1.0, 1e-3, 1e3, xtol=1e-14)
        cfg = make_cfg(snr_star, t=t, b=b)
        res = effective_capacity_theta0(cfg, rho)

        tb = t * b
        rates = np.linspace(1.0, 3e7, 1_000_000)
        alpha = np.expm1(rates * (t / (tb - 1.0)) * LN2)  # snr_eff = 1
        values = rates * np.exp(-alpha)
        best = values.max()
        assert res.spectral_efficiency * b == pytest.approx(best, rel=1e-6)

    def test_rho_zero_gives_zero(self):
        cfg = make_cfg(0.1)
        res = effective_capacity_theta0(cfg, 0.0)
        assert res.spectral_efficiency == 0.0
        assert res.rate_opt_bps == 0.0
        assert res.on_probability == 0.0

    def test_upper_bounds_positive_theta(self):
        cfg = make_cfg(0.5)
        rho = rho_opt_closed_form(cfg).rho_opt
        r0 = effective_capacity_theta0(cfg, rho).spectral_efficiency
        r1 = optimal_rate(cfg, QosSpec(1e-4), rho).spectral_efficiency
        assert r0 >= r1

    def test_theta_continuity(self):
        cfg = make_cfg(0.5)
        rho = rho_opt_closed_form(cfg).rho_opt
        r0 = effective_capacity_theta0(cfg, rho).spectral_efficiency
        r_small = optimal_rate(cfg, QosSpec(1e-7), rho).spectral_efficiency
        assert abs(r_small - r0) / r0 < 1e-4


class TestSpectralEfficiency:
    def test_joint_grid_never_beats_composed(self):
        # exhaustive 200x200 grid over (rate, rho), built from raw numpy
        # without touching the package's own formulas
        t, b, gamma, theta = 2e-3, 1e5, 1.0, 0.01
        snr = 1.0
        cfg = make_cfg(snr, t=t, b=b, gamma=gamma)
        res = spectral_efficiency(cfg, QosSpec(theta))

        tb = t * b
        rhos = np.linspace(5e-3, 0.995, 200)[:, None]
        rates = np.linspace(1.0, 5.0 * b, 200)[None, :]
        e_t = rhos * snr * tb  # pilot energy over N0
        sigma_est = gamma**2 * e_t / (gamma * e_t + 1.0)
        sigma_err = gamma / (gamma * e_t + 1.0)
        e_s = (1.0 - rhos) * snr * tb / (tb - 1.0)  # data energy over N0
        snr_eff = sigma_est * e_s / (1.0 + sigma_err * e_s)
        alpha = np.expm1(rates * (t / (tb - 1.0)) * LN2) / snr_eff
        inner = 1.0 - np.exp(-alpha) * (-np.expm1(-theta * t * rates))
        grid = -np.log(inner) / (theta * t * b)
        assert grid.max() <= res.spectral_efficiency * (1.0 + 1e-6)

    def test_uses_closed_form_rho(self):
        cfg = make_cfg(0.7)
        res = spectral_efficiency(cfg, QosSpec(0.2))
        assert res.rho_used == rho_opt_closed_form(cfg).rho_opt

    def test_nondecreasing_in_snr(self):
        for theta in (0.0, 0.01, 1.0):
            values = [
                spectral_efficiency(make_cfg(s), QosSpec(theta)).spectral_efficiency
                for s in np.geomspace(1e-3, 1e2, 20)
            ]
            assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))

    def test_nonincreasing_in_theta(self):
        cfg = make_cfg(0.5)
        hi = spectral_efficiency(cfg, QosSpec(0.001)).spectral_efficiency
        lo = spectral_efficiency(cfg, QosSpec(1.0)).spectral_efficiency
        assert lo <= hi

    def test_on_off_bound(self):
        # R_E B <= r e^{-alpha}, tight as theta vanishes
        cfg = make_cfg(0.5)
        for theta, gap_cap in ((0.01, None), (1e-6, 1e-3)):
            res = spectral_efficiency(cfg, QosSpec(theta))
            cap = res.rate_opt_bps * res.on_probability
            achieved = res.spectral_efficiency * cfg.bandwidth_hz
            assert achieved <= cap * (1.0 + 1e-12)
            if gap_cap is not None:
                assert (cap - achieved) / achieved < gap_cap


class TestBitEnergy:
    def test_ratio_identity(self):
        for snr, theta in ((0.1, 0.01), (1.0, 0.0), (5.0, 1.0)):
            cfg = make_cfg(snr)
            qos = QosSpec(theta)
            se = spectral_efficiency(cfg, qos).spectral_efficiency
            assert bit_energy(cfg, qos) == pytest.approx(snr / se, rel=1e-12)
            assert bit_energy_db(cfg, qos) == pytest.approx(
                10.0 * math.log10(snr / se), rel=1e-12
            )

    def test_diverges_at_low_snr(self):
        qos = QosSpec(0.01)
        grid = np.geomspace(1e-6, 10.0, 48)
        cfg = make_cfg(1.0)
        _, min_db = min_bit_energy_numeric(cfg, qos, grid)
        low = bit_energy_db(make_cfg(1e-6), qos)
        assert low >= min_db + 10.0

    def test_interior_grid_minimum(self):
        qos = QosSpec(0.01)
        grid = np.geomspace(1e-6, 10.0, 48)
        values = [bit_energy_db(make_cfg(float(s)), qos) for s in grid]
        k = int(np.argmin(values))
        assert 0 < k < len(grid) - 1


class TestMinBitEnergy:
    def test_decreasing_then_increasing(self):
        qos = QosSpec(0.01)
        grid = np.geomspace(1e-6, 10.0, 48)
        values = [bit_energy_db(make_cfg(float(s)), qos) for s in grid]
        k = int(np.argmin(values))
        before, after = values[: k + 1], values[k:]
        assert all(a > b for a, b in zip(before, before[1:]))
        assert all(a < b for a, b in zip(after, after[1:]))

    def test_wider_band_lowers_minimum(self):
        qos = QosSpec(0.01)
        grid = np.geomspace(1e-6, 10.0, 48)
        _, narrow = min_bit_energy_numeric(make_cfg(1.0, b=1e5), qos, grid)
        _, wide = min_bit_energy_numeric(make_cfg(1.0, b=1e7), qos, grid)
        assert wide < narrow

    def test_refinement_is_grid_stable(self):
        qos = QosSpec(0.01)
        cfg = make_cfg(1.0)
        base = np.geomspace(1e-6, 10.0, 48)
        step = base[1] / base[0]
        _, db0 = min_bit_energy_numeric(cfg, qos, base)
        _, db_minus = min_bit_energy_numeric(cfg, qos, base / step)
        _, db_plus = min_bit_energy_numeric(cfg, qos, base * step)
        assert abs(db_minus - db0) < 1e-3
        assert abs(db_plus - db0) < 1e-3

    def test_endpoint_minimum_is_flagged(self):
        # the minimizer near snr 0.18 sits below this grid, so the best
        # grid point is the left edge
        qos = QosSpec(0.01)
        with pytest.raises(GridEndpointError):
            min_bit_energy_numeric(make_cfg(1.0), qos, np.geomspace(1.0, 10.0, 16))

    def test_grid_validation(self):
        cfg = make_cfg(1.0)
        qos = QosSpec(0.01)
        with pytest.raises(DomainError):
            min_bit_energy_numeric(cfg, qos, np.geomspace(1e-4, 1.0, 15))
        with pytest.raises(DomainError):
            min_bit_energy_numeric(cfg, qos, np.geomspace(1e-4, 1.0, 16)[::-1])
        with pytest.raises(DomainError):
            min_bit_energy_numeric(cfg, qos, np.linspace(-1.0, 1.0, 16))


def test_result_invariants():
    cfg = make_cfg(0.5)
    for theta in (0.0, 0.01, 1.0):
        res = spectral_efficiency(cfg, QosSpec(theta))
        assert res.rate_opt_bps >= 0.0
        assert res.alpha_opt >= 0.0
        assert 0.0 <= res.rho_used <= 1.0
        assert res.spectral_efficiency >= 0.0
        assert 0.0 <= res.on_probability <= 1.0
        assert res.on_probability == pytest.approx(
            math.exp(-res.alpha_opt), rel=1e-12
        )


def test_nominal_snr_identity_for_bit_energy_cfgs():
    cfg = make_cfg(0.25)
    assert nominal_snr(cfg) == pytest.approx(0.25, rel=1e-15)
