import numpy as np
import pytest

from ecdl.dictionaries import (
    Dictionary,
    normalize_columns,
    overcomplete_dct,
    random_dictionary,
    replace_degenerate_atoms,
)
from ecdl.linalg import RngState, seeded_uniform_matrix


class TestDictionaryType:
    def test_valid_construction(self):
        atoms = np.eye(4, 8)
        atoms[0, 4:] = 1.0
        d = Dictionary(atoms)
        assert d.n_dims == 4 and d.n_atoms == 8
        assert d.zero_atoms == ()

    def test_atoms_read_only(self):
        d = random_dictionary(4, 8, RngState(0))
        with pytest.raises(ValueError):
            d.atoms[0, 0] = 5.0

    def test_undercomplete_rejected(self):
        with pytest.raises(ValueError, match="at least as many atoms"):
            Dictionary(np.eye(4, 3))

    def test_barely_overcomplete_warns(self):
        with pytest.warns(UserWarning, match="barely overcomplete"):
            Dictionary(np.eye(4, 5))

    def test_non_unit_norm_rejected(self):
        with pytest.raises(ValueError, match="norms deviate"):
            Dictionary(np.full((2, 4), 0.5) + np.eye(2, 4))

    def test_zero_columns_tracked(self):
        atoms = np.eye(3, 7)
        atoms[:, 6] = 0.0
        d = Dictionary(atoms)
        assert d.zero_atoms == (3, 4, 5, 6)


class TestOvercompleteDct:
    def test_paper_scale_shape_and_norms(self):
        d = overcomplete_dct(8, 256)
        assert d.atoms.shape == (64, 256)
        assert np.abs(np.linalg.norm(d.atoms, axis=0) - 1.0).max() <= 1e-12

    def test_first_atom_constant(self):
        d = overcomplete_dct(2, 4)
        assert np.allclose(d.atoms[:, 0], 0.5)

    def test_gram_diagonal_all_ones(self):
        d = overcomplete_dct(4, 64)
        gram = d.atoms.T @ d.atoms
        assert np.allclose(np.diag(gram), 1.0, atol=1e-12)

    def test_bit_deterministic(self):
        a = overcomplete_dct(8, 256).atoms
        b = overcomplete_dct(8, 256).atoms
        assert np.array_equal(a, b)

    def test_non_constant_atoms_zero_mean_in_1d_factor(self):
        # every 1-D factor beyond p=0 is mean-subtracted, so atom (0, p)
        # pairs a constant with a zero-mean profile
        d = overcomplete_dct(4, 16)
        atom = d.atoms[:, 1].reshape(4, 4)
        assert abs(atom.sum()) < 1e-12

    def test_not_perfect_square_rejected(self):
        with pytest.raises(ValueError, match="perfect square"):
            overcomplete_dct(8, 200)

    def test_too_few_atoms_rejected(self):
        with pytest.raises(ValueError, match="fewer than patch_side"):
            overcomplete_dct(8, 49)

    def test_init_mode(self):
        assert overcomplete_dct(4, 16).init_mode == "dct"


class TestRandomDictionary:
    def test_deterministic_per_seed(self):
        a = random_dictionary(64, 256, RngState(1))
        b = random_dictionary(64, 256, RngState(1))
        assert np.array_equal(a.atoms, b.atoms)
        assert a.seed == 1

    def test_unit_norms(self):
        d = random_dictionary(16, 48, RngState(3))
        assert np.abs(np.linalg.norm(d.atoms, axis=0) - 1.0).max() <= 1e-12

    def test_coherence_strictly_below_one(self):
        d = random_dictionary(4, 8, RngState(7))
        gram = np.abs(d.atoms.T @ d.atoms)
        np.fill_diagonal(gram, 0.0)
        assert gram.max() < 1.0

    def test_undercomplete_rejected(self):
        with pytest.raises(ValueError, match="K >= n"):
            random_dictionary(8, 4, RngState(0))


class TestNormalizeColumns:
    def test_three_four_five(self):
        res = normalize_columns(np.array([[3.0, 0.0, 1.0, 2.0], [4.0, 1.0, 0.0, 0.0]]))
        assert np.allclose(res.dictionary.atoms[:, 0], [0.6, 0.8])
        assert res.scales[0] == pytest.approx(5.0)
        assert res.zero_atoms == ()

    def test_idempotent_on_unit_columns(self):
        m = np.eye(3, 6)
        m[0, 3:] = 1.0
        res = normalize_columns(m)
        assert np.array_equal(res.dictionary.atoms, m)
        assert np.array_equal(res.scales, np.ones(6))

    def test_zero_column_flagged_not_divided(self):
        m = np.zeros((2, 4))
        m[0, 0] = 2.0
        m[1, 1] = 1.0
        m[0, 2] = 1.0
        res = normalize_columns(m)
        assert res.zero_atoms == (3,)
        assert np.array_equal(res.dictionary.atoms[:, 3], [0.0, 0.0])
        assert res.scales[3] == 0.0
        assert res.dictionary.zero_atoms == (3,)

    def test_product_preserved_after_rescaling(self):
        rng = RngState(21)
        D = seeded_uniform_matrix(6, 12, 0.1, 2.0, rng)
        X = seeded_uniform_matrix(12, 9, -1.0, 1.0, rng)
        res = normalize_columns(D)
        rescaled = res.scales[:, None] * X
        assert np.linalg.norm(D @ X - res.dictionary.atoms @ rescaled) < 1e-10


class TestReplaceDegenerateAtoms:
    def _residuals(self, M):
        return np.arange(M, dtype=float)

    def test_clean_dictionary_untouched(self):
        d = random_dictionary(4, 8, RngState(5))
        Y = seeded_uniform_matrix(4, 10, 0.0, 1.0, RngState(6))
        res = replace_degenerate_atoms(d, Y, self._residuals(10), RngState(7))
        assert res.replaced == ()
        assert np.array_equal(res.dictionary.atoms, d.atoms)

    def test_zero_atom_takes_highest_residual_sample(self):
        atoms = np.eye(3, 6)
        atoms[:, 3] = [1.0, 1.0, 1.0] / np.sqrt(3.0)
        atoms[:, 4] = [1.0, -1.0, 0.0] / np.sqrt(2.0)
        atoms[:, 5] = 0.0
        d = Dictionary(atoms)
        Y = seeded_uniform_matrix(3, 8, 0.1, 1.0, RngState(9))
        residuals = np.zeros(8)
        residuals[7] = 3.0
        res = replace_degenerate_atoms(d, Y, residuals, RngState(1))
        assert res.replaced == (5,)
        expected = Y[:, 7] / np.linalg.norm(Y[:, 7])
        assert np.allclose(res.dictionary.atoms[:, 5], expected)

    def test_duplicate_pair_one_replaced(self):
        rng = RngState(13)
        d0 = random_dictionary(4, 8, rng)
        atoms = np.array(d0.atoms)
        atoms[:, 6] = atoms[:, 2]  # exact duplicate
        atoms[:, 7] = -atoms[:, 3]  # sign-flipped duplicate
        d = Dictionary(atoms)
        Y = seeded_uniform_matrix(4, 10, 0.1, 1.0, RngState(14))
        res = replace_degenerate_atoms(d, Y, self._residuals(10), RngState(15))
        assert res.replaced == (6, 7)
        # earlier atom of each pair kept
        assert np.array_equal(res.dictionary.atoms[:, 2], atoms[:, 2])
        assert np.array_equal(res.dictionary.atoms[:, 3], atoms[:, 3])
        gram = np.abs(res.dictionary.atoms.T @ res.dictionary.atoms)
        np.fill_diagonal(gram, 0.0)
        assert gram.max() < 1.0 - 1e-6

    def test_random_fallback_when_samples_run_out(self):
        atoms = np.zeros((2, 5))
        atoms[0, 0] = 1.0
        d = Dictionary(atoms)
        Y = np.array([[1.0], [1.0]])
        res = replace_degenerate_atoms(d, Y, np.array([1.0]), RngState(3))
        assert res.replaced == (1, 2, 3, 4)
        norms = np.linalg.norm(res.dictionary.atoms, axis=0)
        assert np.abs(norms - 1.0).max() <= 1e-12
        # first repaired atom is the only sample, normalized
        assert np.allclose(res.dictionary.atoms[:, 1], Y[:, 0] / np.sqrt(2.0))

    def test_each_sample_used_once(self):
        atoms = np.eye(4, 8)
        atoms[:, 4] = [0.5, 0.5, 0.5, 0.5]
        atoms[:, 5] = [0.5, -0.5, 0.5, -0.5]
        atoms[:, 6] = 0.0
        atoms[:, 7] = 0.0
        d = Dictionary(atoms)
        Y = seeded_uniform_matrix(4, 6, 0.1, 1.0, RngState(2))
        residuals = np.array([0.0, 5.0, 4.0, 0.0, 0.0, 0.0])
        res = replace_degenerate_atoms(d, Y, residuals, RngState(4))
        a6 = Y[:, 1] / np.linalg.norm(Y[:, 1])
        a7 = Y[:, 2] / np.linalg.norm(Y[:, 2])
        assert np.allclose(res.dictionary.atoms[:, 6], a6)
        assert np.allclose(res.dictionary.atoms[:, 7], a7)

    def test_residual_length_validated(self):
        d = random_dictionary(3, 6, RngState(1))
        with pytest.raises(ValueError, match="one entry per sample"):
            replace_degenerate_atoms(d, np.ones((3, 4)), np.ones(3), RngState(0))


def test_all_construction_paths_unit_norm_and_finite():
    dicts = [
        overcomplete_dct(4, 16),
        random_dictionary(9, 36, RngState(44)),
        normalize_columns(seeded_uniform_matrix(5, 11, -1.0, 1.0, RngState(45))).dictionary,
    ]
    for d in dicts:
        assert np.all(np.isfinite(d.atoms))
        assert np.abs(np.linalg.norm(d.atoms, axis=0) - 1.0).max() <= 1e-12
