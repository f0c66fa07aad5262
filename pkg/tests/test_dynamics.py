import math

import numpy as np
import pytest

from spinheat.dynamics import (
    ConvergenceError,
    PopulationState,
    RatePair,
    aligned_state,
    collective_generator,
    evolve,
    gibbs_state,
    independent_generator,
    ladder_generator,
    relaxation_time,
    spectral_gap,
    stationary_state,
    transition_rate_range,
    uniform_state,
)
from spinheat.sectors import BlockWeights, SpinEnsemble, symmetric_weights, thermal_product_weights
from spinheat.special import ladder_boltzmann


class TestRatePair:
    def test_thermal_detailed_balance(self):
        r = RatePair.thermal(2.0, g_down=3.0)
        assert r.g_up == pytest.approx(3.0 * math.exp(-2.0), rel=1e-14)
        assert r.bath_b == pytest.approx(2.0, rel=1e-14)

    def test_zero_temperature(self):
        r = RatePair(1.0, 0.0)
        assert r.bath_b == math.inf

    def test_validation(self):
        with pytest.raises(ValueError):
            RatePair(0.0, 1.0)
        with pytest.raises(ValueError):
            RatePair(1.0, -0.5)


class TestGenerators:
    def test_qubit_block_by_hand(self):
        r = RatePair(1.0, 0.25)
        a = ladder_generator(1, r)
        # two levels, single transition with unit angular factor
        assert a == pytest.approx(np.array([[-0.25, 1.0], [0.25, -1.0]]))

    def test_columns_sum_to_zero_offdiag_nonneg(self):
        r = RatePair.thermal(1.3)
        for two_j in [1, 2, 5, 40]:
            a = ladder_generator(two_j, r)
            assert np.abs(a.sum(axis=0)).max() < 1e-12 * max(1.0, np.abs(a).max())
            off = a - np.diag(np.diag(a))
            assert off.min() >= 0.0

    def test_gibbs_vector_is_stationary(self):
        # detailed balance: the per-sector Gibbs vector is annihilated, J up to 50
        for b in [0.5, 2.0, 10.0]:
            r = RatePair.thermal(b)
            for two_j in range(1, 101, 7):
                a = ladder_generator(two_j, r)
                pi = ladder_boltzmann(two_j, b)
                assert np.abs(a @ pi).max() <= 1e-10 * np.abs(a).max()

    def test_stationary_vector_is_unique(self):
        a = ladder_generator(4, RatePair.thermal(1.0))
        evals = np.linalg.eigvals(a)
        assert np.sum(np.abs(evals) < 1e-10) == 1

    def test_independent_matches_collective_qubit(self):
        r = RatePair.thermal(0.7)
        ind = independent_generator(1, r)
        col = collective_generator(SpinEnsemble(1, 1), r)
        assert ind.blocks[1] == pytest.approx(col.blocks[1])

    def test_collective_covers_all_sectors(self):
        gen = collective_generator(SpinEnsemble(4, 1), RatePair.thermal(1.0))
        assert sorted(gen.blocks) == [0, 2, 4]
        assert gen.blocks[0].shape == (1, 1)
        assert gen.blocks[0][0, 0] == 0.0


class TestPopulationState:
    def test_validation(self):
        with pytest.raises(ValueError, match="levels"):
            PopulationState({2: np.array([0.5, 0.5])})
        with pytest.raises(ValueError, match="sum to 1"):
            PopulationState({2: np.array([0.2, 0.2, 0.2])})
        with pytest.raises(ValueError, match="negative"):
            PopulationState({2: np.array([-0.2, 0.6, 0.6])})

    def test_constructors_and_energy(self):
        w = thermal_product_weights(SpinEnsemble(3, 1), 1.0)
        for state in (gibbs_state(w, 1.0), aligned_state(w), uniform_state(w)):
            assert sum(state.sector_masses().values()) == pytest.approx(1.0, abs=1e-12)
        top = aligned_state(symmetric_weights(SpinEnsemble(4, 1)), excited=True)
        assert top.energy() == pytest.approx(2.0)
        assert uniform_state(symmetric_weights(SpinEnsemble(4, 1))).energy() == (
            pytest.approx(0.0, abs=1e-14)
        )

    def test_tv_distance(self):
        w = symmetric_weights(SpinEnsemble(2, 1))
        bottom = aligned_state(w)
        top = aligned_state(w, excited=True)
        assert bottom.tv_distance(top) == pytest.approx(1.0)
        assert bottom.tv_distance(bottom) == 0.0


class TestEvolve:
    def test_t_zero_is_identity(self):
        w = symmetric_weights(SpinEnsemble(3, 1))
        gen = collective_generator(SpinEnsemble(3, 1), RatePair.thermal(2.0))
        s0 = aligned_state(w, excited=True)
        assert evolve(s0, gen, 0.0) is s0

    def test_semigroup_property(self):
        ens = SpinEnsemble(4, 1)
        gen = collective_generator(ens, RatePair.thermal(1.5))
        s0 = uniform_state(thermal_product_weights(ens, 0.0))
        one = evolve(s0, gen, 0.8)
        two = evolve(evolve(s0, gen, 0.4), gen, 0.4)
        assert one.tv_distance(two) < 1e-12

    def test_mass_conservation_per_sector(self):
        ens = SpinEnsemble(4, 1)
        w = thermal_product_weights(ens, 0.7)
        gen = collective_generator(ens, RatePair.thermal(2.0))
        s0 = aligned_state(w, excited=True)
        st = evolve(s0, gen, 3.0)
        for tj, mass in s0.sector_masses().items():
            assert st.sector_masses()[tj] == pytest.approx(mass, abs=1e-12)

    def test_long_time_reaches_sector_gibbs(self):
        ens = SpinEnsemble(3, 1)
        w = thermal_product_weights(ens, 0.3)
        rates = RatePair.thermal(1.2)
        gen = collective_generator(ens, rates)
        s0 = aligned_state(w, excited=True)
        target = stationary_state(s0, rates)
        assert evolve(s0, gen, 80.0).tv_distance(target) < 1e-9

    def test_zero_temperature_absorbs_to_ground(self):
        w = symmetric_weights(SpinEnsemble(2, 1))
        rates = RatePair(1.0, 0.0)
        gen = collective_generator(SpinEnsemble(2, 1), rates)
        st = evolve(aligned_state(w, excited=True), gen, 60.0)
        assert st.blocks[2][0] == pytest.approx(1.0, abs=1e-12)

    def test_negative_time_rejected(self):
        w = symmetric_weights(SpinEnsemble(2, 1))
        gen = collective_generator(SpinEnsemble(2, 1), RatePair.thermal(1.0))
        with pytest.raises(ValueError):
            evolve(aligned_state(w), gen, -1.0)


class TestRelaxation:
    def test_trivial_sector_is_instant(self):
        w = BlockWeights(SpinEnsemble(2, 1), {0: 1.0})
        gen = collective_generator(SpinEnsemble(2, 1), RatePair.thermal(2.0))
        res = relaxation_time(aligned_state(w), gen)
        assert res.time == 0.0
        assert res.spectral_gap == math.inf

    def test_time_decreases_with_j(self):
        # bottom-start relaxation accelerates in larger sectors
        rates = RatePair.thermal(2.0)
        times = []
        for two_j in (2, 4, 10):
            ens = SpinEnsemble(two_j, 1)
            gen = collective_generator(ens, rates)
            s0 = aligned_state(symmetric_weights(ens))
            times.append(relaxation_time(s0, gen, 1e-3).time)
        assert times[0] > times[1] > times[2]

    def test_nonconvergence_reports(self):
        w = symmetric_weights(SpinEnsemble(2, 1))
        gen = collective_generator(SpinEnsemble(2, 1), RatePair.thermal(10.0))
        with pytest.raises(ConvergenceError):
            relaxation_time(aligned_state(w, excited=True), gen, 1e-3, t_max=1e-4)

    def test_epsilon_validation(self):
        w = symmetric_weights(SpinEnsemble(2, 1))
        gen = collective_generator(SpinEnsemble(2, 1), RatePair.thermal(1.0))
        with pytest.raises(ValueError):
            relaxation_time(aligned_state(w), gen, 2.0)

    def test_gap_restricted_to_populated_sectors(self):
        ens = SpinEnsemble(4, 1)
        rates = RatePair.thermal(5.0)
        gen = collective_generator(ens, rates)
        sym_gap = spectral_gap(aligned_state(symmetric_weights(ens)), gen)
        mixed_gap = spectral_gap(uniform_state(thermal_product_weights(ens, 0.0)), gen)
        # smaller populated sectors relax slower, dragging the gap down
        assert mixed_gap < sym_gap

    @pytest.mark.parametrize("two_s", [1, 2, 3])
    def test_factor_n_speedup_at_strong_bias(self, two_s):
        # bath at b = 10, ground-state-like start: the symmetric sector beats
        # n independent spins by the full factor n, in gap and in TV time
        b, eps = 10.0, 1e-8
        rates = RatePair.thermal(b)
        single_gen = independent_generator(two_s, rates)
        w1 = symmetric_weights(SpinEnsemble(1, two_s))
        t_single = relaxation_time(aligned_state(w1), single_gen, eps)
        for n in range(2, 11):
            ens = SpinEnsemble(n, two_s)
            gen = collective_generator(ens, rates)
            res = relaxation_time(aligned_state(symmetric_weights(ens)), gen, eps)
            assert res.spectral_gap / t_single.spectral_gap >= 0.9 * n
            assert t_single.time / res.time >= 0.9 * n


class TestTransitionRates:
    def test_qubit_single_rate(self):
        r = RatePair(2.0, 0.1)
        assert transition_rate_range(1, r) == (2.0, 2.0)

    def test_integer_j_extremes(self):
        r = RatePair(1.0, 0.0)
        assert transition_rate_range(20, r) == (20.0, 110.0)  # J = 10

    def test_half_integer_band_center(self):
        r = RatePair(1.0, 0.0)
        lo, hi = transition_rate_range(3, r)  # J = 3/2
        assert lo == 3.0  # 2J
        assert hi == 4.0  # (J + 1/2)^2

    def test_edge_rate_scales_as_n(self):
        r = RatePair(1.0, 0.5)
        for n, two_s in [(3, 1), (5, 2), (7, 3)]:
            lo_col, _ = transition_rate_range(n * two_s, r)
            lo_ind, _ = transition_rate_range(two_s, r)
            assert lo_col / lo_ind == pytest.approx(n, rel=1e-14)

    def test_validation(self):
        with pytest.raises(ValueError):
            transition_rate_range(0, RatePair(1.0, 0.0))
