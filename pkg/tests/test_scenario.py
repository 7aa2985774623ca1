"""Scenario tests: topology sampling moments, fading statistics, one
fully hand-computed trial, sweep behaviour and determinism."""

import math

import numpy as np
import pytest

from fdwpcn import (
    AlphaSpec,
    ChannelState,
    ScenarioConfig,
    SweepSpec,
    SweepVariable,
    channel_gain,
    run_trial,
    sample_channels,
    sample_topology,
    sweep,
)
from fdwpcn.scenario import apply_grid_value


def base_config(**kw):
    defaults = dict(
        k=3,
        p0=1.0,  # 30 dBm
        sigma0_sq=1e-13,  # -160 dBm/Hz over 1 MHz
        cap_gamma=10 ** 0.98,
        alpha=AlphaSpec(0.01, relative_to_beta=True),
        phi=10 ** -1.5,
        theta=0.5,
        pathloss_exp=2.0,
    )
    defaults.update(kw)
    return ScenarioConfig(**defaults)


class TestTopology:
    def test_distance_range(self):
        rng = np.random.default_rng(0)
        top = sample_topology(1, rng)
        assert 2.5 <= top.d_ap[0] <= 5.0

    def test_uniform_by_area_moment(self):
        # E[D^2] = (2.5^2 + 5^2) / 2 = 15.625 for uniform-by-area draws
        rng = np.random.default_rng(1)
        d2 = np.concatenate(
            [sample_topology(10, rng).d_ap ** 2 for _ in range(10_000)])
        assert d2.mean() == pytest.approx(15.625, rel=0.01)

    def test_pairwise_distance_is_euclidean(self):
        rng = np.random.default_rng(2)
        top = sample_topology(2, rng)
        expected = math.dist(top.positions[0], top.positions[1])
        assert top.d_inter[0, 1] == pytest.approx(expected, rel=1e-12)
        assert top.d_inter[1, 0] == top.d_inter[0, 1]
        assert top.d_inter[0, 0] == 0.0

    def test_k_zero_rejected(self):
        with pytest.raises(ValueError):
            sample_topology(0, np.random.default_rng(0))


class TestChannelGain:
    def test_reference_distance(self):
        # 30 dB attenuation at 1 m with fading disabled
        assert channel_gain(1.0, 2.0) == pytest.approx(1e-3, rel=1e-15)

    def test_pathloss_rolloff(self):
        assert channel_gain(10.0, 2.0) == pytest.approx(1e-5, rel=1e-12)

    def test_fading_unit_mean(self):
        rng = np.random.default_rng(3)
        draws = np.array([channel_gain(1.0, 2.0, rng) for _ in range(200)])
        big = rng.exponential(size=1_000_000)
        assert big.mean() == pytest.approx(1.0, rel=0.005)
        assert draws.mean() * 1e3 == pytest.approx(1.0, rel=0.2)

    def test_nonpositive_distance_rejected(self):
        with pytest.raises(ValueError):
            channel_gain(0.0, 2.0)

    def test_sample_channels_symmetric(self):
        rng = np.random.default_rng(4)
        ch = sample_channels(sample_topology(5, rng), 2.0, rng)
        assert np.array_equal(ch.h_inter, ch.h_inter.T)
        assert (ch.h_ap > 0).all()


class TestRunTrial:
    def test_hand_computed_two_ue_instance(self):
        # fading disabled, hand-set gains; compute the whole chain with
        # explicit scalar arithmetic, independent of the library
        h1, h2, h12 = 0.5, 0.15, 0.01
        theta, phi = 0.5, 0.03
        p0, s0, cap_g = 100.0, 1.0, 1.0
        config = base_config(k=2, p0=p0, sigma0_sq=s0, cap_gamma=cap_g,
                             alpha=AlphaSpec(0.0), phi=phi, theta=theta)
        channels = ChannelState(
            h_ap=np.array([h1, h2]),
            h_inter=np.array([[0.0, h12], [h12, 0.0]]))
        practical, genie, resamples = run_trial(
            config, np.random.default_rng(0), channels=channels)
        assert resamples == 0

        diag = (1 - theta * phi) / (1 - phi)
        rho_p = [theta * h1 / diag, theta * h2 / diag]
        gam_p = [r * h * p0 / (cap_g * s0)
                 for r, h in zip(rho_p, [h1, h2])]
        assert practical == pytest.approx(math.log2(1 + sum(gam_p)),
                                          rel=1e-12)

        # genie: solve the 2x2 system [diag, -c; -c, diag] by hand
        c = theta * h12
        det = diag * diag - c * c
        b1, b2 = theta * h1, theta * h2
        rho_g = [(diag * b1 + c * b2) / det, (c * b1 + diag * b2) / det]
        gam_g = [r * h * p0 / (cap_g * s0)
                 for r, h in zip(rho_g, [h1, h2])]
        assert genie == pytest.approx(math.log2(1 + sum(gam_g)), rel=1e-12)
        assert genie >= practical

    def test_huge_residual_si_kills_throughput(self):
        config = base_config(k=2, alpha=AlphaSpec(1e30))
        practical, genie, _ = run_trial(config, np.random.default_rng(5))
        assert practical < 1e-12
        assert genie < 1e-12

    @pytest.mark.parametrize("seed", range(10))
    def test_genie_at_least_practical(self, seed):
        config = base_config(k=6)
        practical, genie, _ = run_trial(config,
                                        np.random.default_rng(seed))
        assert genie >= practical > 0

    def test_full_leakage_is_exactly_zero(self):
        config = base_config(phi=1.0)
        practical, genie, _ = run_trial(config, np.random.default_rng(0))
        assert practical == 0.0
        assert genie == 0.0


def small_spec(variable, grid, trials=40, seed=99, **base_kw):
    return SweepSpec(variable=variable, grid=grid, trials=trials, seed=seed,
                     base=base_config(**base_kw))


class TestSweep:
    def test_p0_sweep_strictly_increasing(self):
        spec = small_spec(SweepVariable.P0_DBM, (10.0, 20.0, 30.0))
        result = sweep(spec)
        means = result.mean_practical
        assert means[0] < means[1] < means[2]
        assert (result.genie >= result.practical).all()

    def test_sic_sweep_monotone(self):
        spec = small_spec(SweepVariable.SIC_GAIN_DB, (math.inf, 120.0))
        result = sweep(spec)
        assert result.mean_practical[0] >= result.mean_practical[1]

    def test_phi_sweep_zero_at_full_leakage(self):
        spec = small_spec(SweepVariable.ISOLATION_DB, (0.0, 10.0), trials=20)
        result = sweep(spec)
        assert (result.practical[0] == 0.0).all()
        assert (result.genie[0] == 0.0).all()
        assert (result.practical[1] > 0.0).all()

    def test_deterministic_repeat(self):
        spec = small_spec(SweepVariable.P0_DBM, (20.0, 30.0), trials=25)
        a = sweep(spec)
        b = sweep(spec)
        assert np.array_equal(a.practical, b.practical)
        assert np.array_equal(a.genie, b.genie)

    def test_worker_count_does_not_change_results(self):
        spec = small_spec(SweepVariable.ISOLATION_DB, (5.0, 10.0, 15.0),
                          trials=15)
        serial = sweep(spec, workers=1)
        parallel = sweep(spec, workers=3)
        assert np.array_equal(serial.practical, parallel.practical)
        assert np.array_equal(serial.genie, parallel.genie)

    def test_isolation_tail_flat(self):
        # relative change per 1 dB step is tiny once phi is small
        spec = small_spec(SweepVariable.ISOLATION_DB,
                          tuple(float(v) for v in range(14, 21)), trials=30,
                          k=5)
        result = sweep(spec)
        means = result.mean_practical
        rel = np.abs(np.diff(means)) / means[1:]
        assert (rel <= 0.01).all()

    def test_mean_is_average_of_trials(self):
        spec = small_spec(SweepVariable.P0_DBM, (25.0,), trials=12)
        result = sweep(spec)
        assert result.mean_practical[0] == pytest.approx(
            result.practical[0].mean(), rel=0)
        assert result.trials == 12

    def test_weights_variable_rejected(self):
        with pytest.raises(ValueError):
            apply_grid_value(base_config(), SweepVariable.WEIGHTS, 0.5)

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            small_spec(SweepVariable.P0_DBM, ())


class TestApplyGridValue:
    def test_p0_override(self):
        cfg = apply_grid_value(base_config(), SweepVariable.P0_DBM, 40.0)
        assert cfg.p0 == pytest.approx(10.0)

    def test_sic_override(self):
        cfg = apply_grid_value(base_config(), SweepVariable.SIC_GAIN_DB, 120.0)
        assert cfg.alpha.resolve(1.0, 1.0) == pytest.approx(1e-12)
        cfg = apply_grid_value(base_config(), SweepVariable.SIC_GAIN_DB,
                               math.inf)
        assert cfg.alpha.resolve(1.0, 1.0) == 0.0

    def test_isolation_override(self):
        cfg = apply_grid_value(base_config(), SweepVariable.ISOLATION_DB, 0.0)
        assert cfg.phi == 1.0
        cfg = apply_grid_value(base_config(), SweepVariable.ISOLATION_DB, 15.0)
        assert cfg.phi == pytest.approx(0.031622776601683794, rel=1e-15)
