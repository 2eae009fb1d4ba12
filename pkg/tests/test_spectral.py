import math

import numpy as np
import pytest
import scipy.linalg

from isingbridge import markov, quantum, spectral, spins
from test_spins import random_model


class TestEigSym:
    def test_identity(self):
        evals, _ = spectral.eig_sym(np.eye(8))
        assert np.all(evals == 1.0)

    def test_two_by_two_flip_matrix(self):
        evals, vecs = spectral.eig_sym(np.array([[0.0, -1.0], [-1.0, 0.0]]))
        assert np.abs(evals - np.array([-1.0, 1.0])).max() <= 1e-15
        expected = np.array([1.0, 1.0]) / math.sqrt(2)
        for col in range(2):
            v = vecs[:, col]
            assert np.abs(np.abs(v) - expected).max() <= 1e-15

    def test_reconstruction_residual(self):
        rng = np.random.default_rng(17)
        m = rng.normal(size=(64, 64))
        m = m + m.T
        evals, vecs = spectral.eig_sym(m)
        residual = np.abs(m - (vecs * evals) @ vecs.T).max()
        assert residual <= 1e-9 * np.abs(m).max()
        assert np.abs(vecs.T @ vecs - np.eye(64)).max() <= 1e-10

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            spectral.eig_sym(np.array([[0.0, 1.0], [0.5, 0.0]]))

    def test_rejects_oversized(self):
        with pytest.raises(ValueError, match="cap"):
            spectral.eig_sym(np.zeros((4097, 4097)))

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError, match="square"):
            spectral.eig_sym(np.zeros((3, 4)))


class TestGeneratorSpectrum:
    def test_top_eigenvalue_is_zero(self):
        rng = np.random.default_rng(2)
        model = random_model(5, 6, rng)
        gen = markov.build_generator(model, 0.7, markov.HEAT_BATH)
        report = spectral.spectrum_of_generator(gen)
        assert abs(report.eigenvalues[-1]) <= 1e-10
        assert report.eigenvalues[0] <= report.eigenvalues[-1]

    def test_uniform_chain_gap(self):
        gen = markov.build_generator(spins.chain_model(6, [1.0] * 6), 0.5,
                                     markov.HEAT_BATH)
        report = spectral.spectrum_of_generator(gen)
        assert abs(report.gap - (1.0 - math.tanh(1.0))) <= 1e-9

    def test_infinite_temperature_binomial_multiplicities(self):
        rng = np.random.default_rng(4)
        model = random_model(4, 5, rng)
        gen = markov.build_generator(model, 0.0, markov.HEAT_BATH)
        report = spectral.spectrum_of_generator(gen)
        expected = np.sort(np.concatenate(
            [np.full(math.comb(4, k), -float(k)) for k in range(5)]))
        assert np.abs(report.eigenvalues - expected).max() <= 1e-10

    def test_ground_vector_is_sqrt_boltzmann(self):
        model = spins.chain_model(4, [1.0] * 4)
        gen = markov.build_generator(model, 0.9, markov.HEAT_BATH)
        report = spectral.spectrum_of_generator(gen)
        expected = np.sqrt(spins.boltzmann(model, 0.9))
        v = report.ground_vector * np.sign(report.ground_vector.sum())
        assert np.abs(v - expected).max() <= 1e-10


class TestCompareSpectra:
    def test_identical(self):
        result = spectral.compare_spectra([1.0, 2.0], [2.0, 1.0], 1e-12)
        assert result.matched and result.max_deviation == 0.0

    def test_small_difference_fails_tight_tolerance(self):
        result = spectral.compare_spectra([0.0, 1.0], [0.0, 1.0 + 1e-6], 1e-9)
        assert not result.matched

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            spectral.compare_spectra([1.0], [1.0, 2.0], 1e-9)

    def test_mapped_pair_shares_spectrum(self):
        gen = markov.build_generator(spins.chain_model(8, [1.0] * 8), 0.6,
                                     markov.HEAT_BATH)
        ham = quantum.classical_to_quantum(gen)
        gen_report = spectral.spectrum_of_generator(gen)
        ham_evals = spectral.spectrum_of_hamiltonian(ham).eigenvalues
        result = spectral.compare_spectra(-gen_report.eigenvalues, ham_evals, 1e-9)
        assert result.matched


class TestEigenvectorCorrespondence:
    def test_gap_is_inverse_relaxation_time(self):
        gen = markov.build_generator(spins.chain_model(5, [1.0] * 5), 0.8,
                                     markov.HEAT_BATH)
        ham_gap = spectral.spectrum_of_hamiltonian(
            quantum.classical_to_quantum(gen)).gap
        assert abs(ham_gap - 1.0 / markov.relaxation_time(gen)) <= 1e-9

    def test_nondegenerate_modes_map_through_exponential(self):
        rng = np.random.default_rng(23)
        model = random_model(4, 6, rng)
        gen = markov.build_generator(model, 0.7, markov.HEAT_BATH)
        ham = quantum.classical_to_quantum(gen)
        evals_h, vecs_h = spectral.eig_sym(ham.matrix)

        # independent oracle: right eigenvectors of the raw nonsymmetric W
        evals_w, vecs_w = scipy.linalg.eig(gen.matrix)
        order = np.argsort(-evals_w.real)  # -lambda ascending = H order
        gaps = np.diff(np.sort(-evals_w.real))
        if gaps.min() < 1e-8:
            pytest.skip("random model drew a degenerate spectrum")
        half = 0.5 * gen.beta * gen.energies
        scale = np.exp(half - half.max())
        for n, idx in enumerate(order):
            mapped = scale * vecs_w[:, idx].real
            mapped /= np.linalg.norm(mapped)
            cos = abs(float(mapped @ vecs_h[:, n]))
            assert cos >= 1.0 - 1e-8

    def test_degenerate_subspaces_match_as_projectors(self):
        model = spins.chain_model(4, [1.0] * 4)  # translation symmetry degeneracies
        gen = markov.build_generator(model, 0.7, markov.HEAT_BATH)
        ham = quantum.classical_to_quantum(gen)
        evals_h, vecs_h = spectral.eig_sym(ham.matrix)

        evals_w, vecs_w = scipy.linalg.eig(gen.matrix)
        order = np.argsort(-evals_w.real)
        half = 0.5 * gen.beta * gen.energies
        scale = np.exp(half - half.max())
        mapped = scale[:, None] * vecs_w[:, order].real

        start = 0
        while start < evals_h.size:
            stop = start + 1
            while stop < evals_h.size and evals_h[stop] - evals_h[stop - 1] < 1e-8:
                stop += 1
            block = mapped[:, start:stop]
            q, _ = np.linalg.qr(block)
            proj_w = q @ q.T
            vh = vecs_h[:, start:stop]
            proj_h = vh @ vh.T
            assert np.abs(proj_w - proj_h).max() <= 1e-8
            start = stop
