import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import exhaustive_energy, random_integer_qubo
from qubolin import QuboMatrix, energy, flip_delta, load_qubo, od_count, save_qubo, symmetric_coefficient


class TestEnergy:
    def test_worked_example_local_minimum(self, example_q):
        assert energy(example_q, (1, 1, 0)) == -6

    def test_worked_example_global_minimum(self, example_q):
        assert energy(example_q, (0, 0, 1)) == -8

    def test_all_zeros_is_zero(self, example_q):
        assert energy(example_q, (0, 0, 0)) == 0

    def test_empty_matrix(self):
        q = QuboMatrix(3, {})
        assert energy(q, (1, 0, 1)) == 0

    def test_zero_variables_is_legal(self):
        q = QuboMatrix(0, {})
        assert energy(q, ()) == 0

    def test_dimension_mismatch(self, example_q):
        with pytest.raises(ValueError):
            energy(example_q, (1, 0))

    def test_non_binary_rejected(self, example_q):
        with pytest.raises(ValueError):
            energy(example_q, (2, 0, 0))

    def test_matches_exhaustive_evaluation(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            q = random_integer_qubo(rng, 6)
            bits = tuple(rng.integers(0, 2, 6))
            assert energy(q, bits) == exhaustive_energy(q, bits)


class TestOdCount:
    def test_worked_example(self, example_q):
        assert od_count(example_q) == 3

    def test_linearized_example(self, example_q_linearized):
        assert od_count(example_q_linearized) == 1

    def test_empty(self):
        assert od_count(QuboMatrix(4, {})) == 0

    def test_diagonal_only(self):
        q = QuboMatrix.from_entries(3, [(0, 0, 1), (2, 2, -4)])
        assert od_count(q) == 0


class TestFlipDelta:
    def test_from_zero_equals_diagonal(self, example_q):
        assert flip_delta(example_q, (0, 0, 0), 2) == -8

    def test_against_full_reevaluation(self, example_q):
        # flipping bit 0 of (1, 1, 0) must land at the energy of (0, 1, 0)
        expected = energy(example_q, (0, 1, 0)) - energy(example_q, (1, 1, 0))
        assert expected == 1
        assert flip_delta(example_q, (1, 1, 0), 0) == 1

    def test_double_flip_cancels(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            q = random_integer_qubo(rng, 7)
            bits = list(rng.integers(0, 2, 7))
            i = int(rng.integers(0, 7))
            d1 = flip_delta(q, bits, i)
            bits[i] ^= 1
            d2 = flip_delta(q, bits, i)
            assert d1 + d2 == 0

    def test_index_out_of_range(self, example_q):
        with pytest.raises(ValueError):
            flip_delta(example_q, (0, 0, 0), 3)

    @given(st.integers(2, 8), st.integers(0, 10_000))
    def test_consistent_with_energy(self, n, seed):
        rng = np.random.default_rng(seed)
        q = random_integer_qubo(rng, n)
        bits = list(rng.integers(0, 2, n))
        i = int(rng.integers(0, n))
        before = energy(q, bits)
        delta = flip_delta(q, bits, i)
        bits[i] ^= 1
        assert energy(q, bits) == before + delta


class TestSymmetricCoefficient:
    def test_off_diagonal_is_symmetric(self, example_q):
        assert symmetric_coefficient(example_q, 0, 1) == symmetric_coefficient(example_q, 1, 0) == 2

    def test_diagonal(self, example_q):
        assert symmetric_coefficient(example_q, 2, 2) == -8

    def test_absent_pair_is_zero(self):
        q = QuboMatrix.from_entries(3, [(0, 1, 5)])
        assert symmetric_coefficient(q, 1, 2) == 0


class TestCanonicalization:
    def test_lower_entry_folds_by_addition(self):
        q = QuboMatrix.from_entries(3, [(0, 1, 2), (1, 0, 3)])
        assert q.terms == {(0, 1): 5.0}

    def test_fold_to_zero_drops_key(self):
        q = QuboMatrix.from_entries(3, [(0, 1, 2), (1, 0, -2)])
        assert q.terms == {}

    def test_duplicate_key_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            QuboMatrix.from_entries(3, [(0, 1, 2), (0, 1, 3)])

    def test_zero_entry_not_stored(self):
        q = QuboMatrix.from_entries(3, [(0, 1, 0)])
        assert q.terms == {}

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            QuboMatrix.from_entries(2, [(0, 0, math.inf)])

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            QuboMatrix.from_entries(2, [(0, 2, 1)])

    def test_constructor_enforces_upper_triangle(self):
        with pytest.raises(ValueError):
            QuboMatrix(3, {(2, 1): 1.0})

    def test_constructor_rejects_explicit_zero(self):
        with pytest.raises(ValueError):
            QuboMatrix(3, {(0, 1): 0.0})


entry_lists = st.lists(
    st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(-9, 9)),
    max_size=20,
    unique_by=lambda e: (e[0], e[1]),
)


class TestCanonicalFormProperties:
    @given(entry_lists)
    def test_from_entries_invariants(self, entries):
        q = QuboMatrix.from_entries(6, entries)
        assert all(i <= j for i, j in q.terms)
        assert all(v != 0 for v in q.terms.values())

    @given(entry_lists)
    def test_folding_preserves_energy(self, entries):
        # a lower-triangular entry contributes exactly like its mirror
        q = QuboMatrix.from_entries(6, entries)
        for idx in (0, 21, 42, 63):
            bits = [(idx >> b) & 1 for b in range(6)]
            direct = sum(v * bits[i] * bits[j] for i, j, v in entries)
            assert energy(q, bits) == direct


class TestSerialization:
    def test_round_trip(self, tmp_path, example_q):
        path = tmp_path / "q.json"
        save_qubo(example_q, path)
        assert load_qubo(path) == example_q

    def test_reserialization_idempotent(self, tmp_path):
        rng = np.random.default_rng(3)
        q = random_integer_qubo(rng, 9)
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_qubo(q, p1)
        save_qubo(load_qubo(p1), p2)
        assert p1.read_text() == p2.read_text()

    def test_format_shape(self, tmp_path, example_q):
        path = tmp_path / "q.json"
        save_qubo(example_q, path)
        data = json.loads(path.read_text())
        assert data["n"] == 3
        assert all(i <= j for i, j, _ in data["terms"])

    def test_duplicate_keys_in_file_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"n": 2, "terms": [[0, 1, 2], [0, 1, 3]]}))
        with pytest.raises(ValueError, match="duplicate"):
            load_qubo(path)

    def test_lower_triangle_in_file_folds(self, tmp_path):
        path = tmp_path / "fold.json"
        path.write_text(json.dumps({"n": 2, "terms": [[1, 0, 4], [0, 1, 1]]}))
        assert load_qubo(path).terms == {(0, 1): 5.0}
