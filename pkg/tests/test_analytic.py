import numpy as np
import pytest

from qdchain.analytic import (
    SpectrumSpec,
    effective_pair_coupling,
    optimal_1e_amplitude,
    optimal_2e_amplitude,
    spectrum,
    uniform_1e_amplitude,
)
from qdchain.hamiltonian import build_1e, build_2e
from qdchain.hilbert import StateVector
from qdchain.model import ChainParams
from qdchain.propagate import EvolutionPlan, evolve


class TestUniformAmplitude:
    def test_initial_condition(self):
        for n in (2, 5, 13):
            amps = [uniform_1e_amplitude(n, 1.0, 0.0, j) for j in range(1, n + 1)]
            assert abs(amps[0] - 1.0) < 1e-12
            assert max(abs(a) for a in amps[1:]) < 1e-12

    def test_two_dots_reduce_to_rabi(self):
        taus = np.linspace(0, 9, 50)
        a1 = uniform_1e_amplitude(2, 1.0, taus, 1)
        a2 = uniform_1e_amplitude(2, 1.0, taus, 2)
        assert np.allclose(a1, np.cos(taus), atol=1e-12)
        assert np.allclose(a2, -1j * np.sin(taus), atol=1e-12)

    @pytest.mark.parametrize("n", [2, 5, 20])
    def test_matches_numeric_evolution(self, n):
        grid = np.linspace(0, 30, 301)
        ham = build_1e(ChainParams.uniform(n))
        out = evolve(ham, StateVector.basis_state(ham.basis, 1), EvolutionPlan(grid))
        exact = np.column_stack([uniform_1e_amplitude(n, 1.0, grid, j)
                                 for j in range(1, n + 1)])
        assert np.max(np.abs(out.amps - exact)) < 1e-8

    def test_normalized_at_all_times(self):
        n = 17
        taus = np.linspace(0, 50, 400)
        total = sum(np.abs(uniform_1e_amplitude(n, 1.0, taus, j)) ** 2
                    for j in range(1, n + 1))
        assert np.max(np.abs(total - 1.0)) < 1e-12

    def test_out_of_range_dot(self):
        with pytest.raises(ValueError):
            uniform_1e_amplitude(5, 1.0, 1.0, 6)


class TestOptimalAmplitude:
    def test_perfect_transfer_and_revival(self):
        n, t0 = 20, 1.0
        assert abs(optimal_1e_amplitude(n, t0, np.pi / 2, n)) ** 2 == pytest.approx(1.0)
        assert abs(optimal_1e_amplitude(n, t0, np.pi, 1)) ** 2 == pytest.approx(1.0)

    def test_periodicity_up_to_global_phase(self):
        n = 11
        taus = np.linspace(0.1, 2.9, 23)
        for j in (1, 4, n):
            a = optimal_1e_amplitude(n, 1.0, taus, j)
            b = optimal_1e_amplitude(n, 1.0, taus + np.pi, j)
            assert np.allclose(np.abs(a), np.abs(b), atol=1e-12)

    def test_matches_numeric_evolution(self):
        n = 20
        grid = np.linspace(0, 30, 301)
        ham = build_1e(ChainParams.optimal(n))
        out = evolve(ham, StateVector.basis_state(ham.basis, 1), EvolutionPlan(grid))
        exact = np.column_stack([optimal_1e_amplitude(n, 1.0, grid, j)
                                 for j in range(1, n + 1)])
        assert np.max(np.abs(out.amps - exact)) < 1e-9

    def test_binomial_normalization_large_n(self):
        # log-space binomials keep the sum rule far past the overflow point
        n = 120
        taus = np.linspace(0, 3, 10)
        total = sum(np.abs(optimal_1e_amplitude(n, 1.0, taus, j)) ** 2
                    for j in range(1, n + 1))
        assert np.max(np.abs(total - 1.0)) < 1e-9


class TestOptimalPairAmplitude:
    def test_initial_condition(self):
        n = 8
        for (i, j) in [(1, 2), (1, 3), (4, 7), (7, 8)]:
            val = optimal_2e_amplitude(n, 1.0, 0.0, i, j)
            assert abs(val - (1.0 if (i, j) == (1, 2) else 0.0)) < 1e-12

    def test_pair_reaches_last_two_dots(self):
        n = 20
        val = optimal_2e_amplitude(n, 1.0, np.pi / 2, n - 1, n)
        assert abs(val) ** 2 == pytest.approx(1.0)

    def test_matches_numeric_evolution(self):
        n = 6
        grid = np.linspace(0, 10, 201)
        ham = build_2e(ChainParams.optimal(n))
        out = evolve(ham, StateVector.basis_state(ham.basis, (1, 2)), EvolutionPlan(grid))
        exact = np.column_stack([optimal_2e_amplitude(n, 1.0, grid, i, j)
                                 for (i, j) in ham.basis.pairs()])
        assert np.max(np.abs(out.amps - exact)) < 1e-8

    def test_normalized_at_all_times(self):
        n = 9
        taus = np.linspace(0, 12, 100)
        total = sum(np.abs(optimal_2e_amplitude(n, 1.0, taus, i, j)) ** 2
                    for i in range(1, n) for j in range(i + 1, n + 1))
        assert np.max(np.abs(total - 1.0)) < 1e-12

    def test_aggregates_to_fictitious_chain(self):
        # summed pair weight at s = i + j - 2 equals the one-electron weight
        # on site s of the 2n-3 site optimal chain
        n = 7
        taus = np.linspace(0, 5, 40)
        agg = np.zeros((len(taus), 2 * n - 3))
        for i in range(1, n):
            for j in range(i + 1, n + 1):
                agg[:, i + j - 3] += np.abs(optimal_2e_amplitude(n, 1.0, taus, i, j)) ** 2
        for s in range(1, 2 * n - 2):
            ref = np.abs(optimal_1e_amplitude(2 * n - 3, 1.0, taus, s)) ** 2
            assert np.allclose(agg[:, s - 1], ref, atol=1e-12)

    def test_out_of_range_pair(self):
        with pytest.raises(ValueError):
            optimal_2e_amplitude(6, 1.0, 1.0, 3, 3)


class TestNoRevival:
    def test_uniform_chain_never_fully_revives(self):
        n = 20
        taus = np.arange(0.1, 100.0, 0.005) + 0.005
        p1 = np.abs(uniform_1e_amplitude(n, 1.0, taus, 1)) ** 2
        assert p1.max() < 1.0 - 1e-6


class TestSpectrum:
    def test_optimal_1e_small(self):
        assert np.allclose(spectrum(SpectrumSpec("optimal-1e", 3)), [-2.0, 0.0, 2.0])

    def test_optimal_2e_values(self):
        vals = spectrum(SpectrumSpec("optimal-2e", 20))
        assert len(vals) == 37
        assert np.allclose(np.diff(vals), 2.0)
        assert vals[0] == -36.0 and vals[-1] == 36.0

    def test_uniform_matches_diagonalization(self):
        n = 20
        ham = build_1e(ChainParams.uniform(n))
        w = np.sort(np.linalg.eigvalsh(ham.dense().real))
        assert np.max(np.abs(w - spectrum(SpectrumSpec("uniform-1e", n)))) < 1e-10

    def test_validation(self):
        with pytest.raises(ValueError):
            SpectrumSpec("optimal-2e", 2)
        with pytest.raises(ValueError):
            SpectrumSpec("bogus", 5)


class TestEffectivePairCoupling:
    def test_values(self):
        assert effective_pair_coupling(1.0, 2.5) == pytest.approx(0.4)
        assert effective_pair_coupling(1.0, 1.0) == pytest.approx(1.0)

    def test_rejects_nonpositive_v(self):
        with pytest.raises(ValueError):
            effective_pair_coupling(1.0, 0.0)

    def test_pair_shift_resonance(self):
        # second-order picture: the three adjacent-pair states form a chain
        # with hopping t_eff and a level shift t_eff on the middle one, so a
        # pair started at (2, 3) reaches (3, 4) as (2/9)(1 - cos(3 t_eff tau));
        # the full dynamics must agree on the oscillation frequency to 10%
        v = 10.0
        t_eff = effective_pair_coupling(1.0, v)
        ham = build_2e(ChainParams.uniform(4, v=v))
        psi0 = StateVector.basis_state(ham.basis, (2, 3))
        period = 2 * np.pi / (3 * t_eff)
        grid = np.linspace(0.0, period, 1500)
        out = evolve(ham, psi0, EvolutionPlan(grid))
        p34 = np.abs(out.amps[:, ham.basis.index_of((3, 4))]) ** 2
        tau_peak = grid[np.argmax(p34)]
        assert abs(tau_peak - period / 2) / (period / 2) < 0.10
        assert p34.max() == pytest.approx(4.0 / 9.0, abs=0.05)
