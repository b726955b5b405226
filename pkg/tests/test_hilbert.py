import numpy as np
import pytest

from qdchain.hilbert import (
    SectorBasis,
    Spin,
    StateVector,
    dim_2e,
    index_2e,
    occupation_1e,
    occupation_2e,
    pair_from_index,
    state_from_csv,
    state_to_csv,
)


class TestPairIndexing:
    def test_two_dots(self):
        assert index_2e(1, 2, 2) == 0
        assert dim_2e(2) == 1

    def test_dimensions(self):
        assert dim_2e(10) == 45
        assert dim_2e(20) == 190

    @pytest.mark.parametrize("n", [2, 3, 7, 20, 30])
    def test_round_trip_is_a_bijection(self, n):
        seen = set()
        for i in range(1, n):
            for j in range(i + 1, n + 1):
                k = index_2e(i, j, n)
                assert 0 <= k < dim_2e(n)
                assert pair_from_index(k, n) == (i, j)
                seen.add(k)
        assert len(seen) == dim_2e(n)

    def test_flat_order_is_row_major(self):
        basis = SectorBasis.two_electron(4)
        assert basis.pairs() == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
        assert [index_2e(i, j, 4) for i, j in basis.pairs()] == list(range(6))

    def test_rejects_bad_pairs(self):
        for i, j in [(2, 2), (3, 2), (0, 1), (1, 5)]:
            with pytest.raises(ValueError):
                index_2e(i, j, 4)
        with pytest.raises(ValueError):
            pair_from_index(6, 4)


class TestOccupations:
    def test_1e_basis_state(self):
        basis = SectorBasis.one_electron(5)
        state = StateVector.basis_state(basis, 1)
        assert np.allclose(occupation_1e(state), [1, 0, 0, 0, 0])

    def test_1e_equal_superposition(self):
        basis = SectorBasis.one_electron(4)
        state = StateVector(basis, np.full(4, 0.5))
        assert np.allclose(occupation_1e(state), [0.25] * 4)

    def test_1e_sum_rule(self):
        rng = np.random.default_rng(0)
        basis = SectorBasis.one_electron(9)
        amps = rng.normal(size=9) + 1j * rng.normal(size=9)
        state = StateVector(basis, amps)
        assert abs(occupation_1e(state).sum() - state.norm2()) < 1e-12

    def test_2e_adjacent_pair(self):
        basis = SectorBasis.two_electron(5)
        state = StateVector.basis_state(basis, (1, 2))
        assert np.allclose(occupation_2e(state), [1, 1, 0, 0, 0])

    def test_2e_end_pair(self):
        basis = SectorBasis.two_electron(6)
        state = StateVector.basis_state(basis, (1, 6))
        occ = occupation_2e(state)
        assert occ[0] == occ[5] == 1.0 and occ[1:5].sum() == 0.0

    def test_2e_sum_rule(self):
        rng = np.random.default_rng(1)
        basis = SectorBasis.two_electron(8)
        amps = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
        state = StateVector(basis, amps)
        assert abs(occupation_2e(state).sum() - 2 * state.norm2()) < 1e-12

    def test_non_negative(self):
        rng = np.random.default_rng(2)
        basis = SectorBasis.two_electron(6)
        state = StateVector(basis, rng.normal(size=basis.dim) + 0j)
        assert np.all(occupation_2e(state) >= 0)

    def test_wrong_sector_rejected(self):
        one = StateVector.basis_state(SectorBasis.one_electron(3), 1)
        two = StateVector.basis_state(SectorBasis.two_electron(3), (1, 2))
        with pytest.raises(ValueError):
            occupation_2e(one)
        with pytest.raises(ValueError):
            occupation_1e(two)


class TestStateVector:
    def test_shape_checked(self):
        with pytest.raises(ValueError):
            StateVector(SectorBasis.one_electron(3), np.zeros(4))

    def test_normalized(self):
        state = StateVector(SectorBasis.one_electron(2), np.array([3.0, 4.0]))
        assert state.normalized().norm2() == pytest.approx(1.0)

    def test_spin_labels(self):
        assert SectorBasis.one_electron(3, Spin.DOWN).spin_label == "d"
        assert SectorBasis.two_electron(3, (Spin.UP, Spin.DOWN)).spin_label == "ud"

    def test_dot_n_mask(self):
        basis = SectorBasis.two_electron(4)
        mask = basis.dot_n_mask()
        flagged = [basis.pairs()[k] for k in np.nonzero(mask)[0]]
        assert flagged == [(1, 4), (2, 4), (3, 4)]

    def test_csv_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        basis = SectorBasis.two_electron(5)
        state = StateVector(basis, rng.normal(size=10) + 1j * rng.normal(size=10))
        path = tmp_path / "state.csv"
        state_to_csv(state, path)
        header = path.read_text().splitlines()[0]
        assert "sector=2e" in header and "spins=ud" in header
        back = state_from_csv(path, basis)
        assert np.array_equal(back.amps, state.amps)
