import functools

import numpy as np
import pytest
from scipy import linalg, optimize

import galerkin
from errors import ConfigError
from galerkin import GridSpec
from kernels import Regime, SpectralProblem
from spectra import Branch, Method, solve_eigenvalue


@functools.lru_cache(maxsize=None)
def model(L, kappa, n_trunc=100):
    return galerkin.build_model(L, kappa, n_trunc)


@functools.lru_cache(maxsize=None)
def spectrum(L, kappa):
    return galerkin.eigenvalues(model(L, kappa))


def test_alpha_without_barrier():
    for n in range(4):
        assert galerkin.solve_alpha(n, 0.0) == np.pi * (n + 0.5)


def test_alpha_strong_barrier():
    # alpha cot(alpha) = -2000 puts alpha_0 at about pi - pi / 2001
    assert abs(galerkin.solve_alpha(0, 1e3) - np.pi) <= 2e-3


def test_alphas_in_their_intervals():
    alphas = model(6.0, 1.0).alphas
    n = np.arange(alphas.size)
    assert np.all(alphas > np.pi * (n + 0.5))
    assert np.all(alphas < np.pi * (n + 1.0))
    assert np.all(np.diff(alphas) > 0.0)


def test_position_operator_structure():
    b = model(6.0, 1.0).matrix_b
    assert np.array_equal(b, b.T)
    assert not np.any(b[0::2, 0::2])
    assert not np.any(b[1::2, 1::2])
    assert np.all(np.diag(model(6.0, 1.0).matrix_lambda) > 0.0)


@pytest.mark.parametrize("kappa", [0.0, 1.0])
def test_position_matrix_matches_closed_form(kappa):
    small = galerkin.build_model(6.0, kappa, 20)
    indices = np.arange(10)
    expected = small.matrix_b[np.ix_(indices, indices)]
    assert np.allclose(galerkin.position_matrix(small, indices), expected, rtol=0.0, atol=1e-10)


def test_resonant_coupling_matches_closed_form():
    # at kappa = 0 the closed form is 0/0 on the diagonal pairs K_n = alpha_n
    small = galerkin.build_model(6.0, 1e-3, 8)
    freq, alpha, beta = small.frequencies[1], small.alphas[1], small.betas[1]
    assert galerkin.resonant_coupling(freq, alpha, beta, 6.0) == pytest.approx(
        small.matrix_b[2, 3], rel=1e-6
    )


@pytest.mark.filterwarnings("error::scipy.integrate.IntegrationWarning")
def test_resonant_coupling_at_high_frequency():
    freq = alpha = np.pi * 400.5
    exact = np.sin(freq) / 4.0 - (np.sin(freq) - freq * np.cos(freq)) / (4.0 * freq**2)
    assert galerkin.resonant_coupling(freq, alpha, 1.0, 0.5) == pytest.approx(exact, abs=1e-11)


def test_basis_is_orthonormal():
    gram = galerkin.gram_matrix(model(6.0, 1.0), np.arange(10))
    assert np.allclose(gram, np.eye(10), rtol=0.0, atol=1e-10)


def test_basis_transmission_condition():
    kappa = 1.0
    values, derivs = galerkin.basis_values(model(6.0, kappa), np.array([0.0, -0.0]))
    right, left = values[:, 1::2]
    right_slope, left_slope = derivs[:, 1::2]
    assert np.allclose(right_slope, left_slope, rtol=0.0, atol=1e-10)
    assert np.allclose(right_slope, kappa * (right - left), rtol=0.0, atol=1e-10)


def test_numerical_range_is_accretive():
    assert np.all(galerkin.numerical_range_sample(model(6.0, 1.0), 200) >= -1e-10)


@pytest.mark.parametrize(
    "L, kappa, index, expected",
    [
        (6.0, 0.0, 0, 0.5094 - 0.8823j),
        (10.0, 1.0, 4, 1.8390 - 2.8685j),
        (10.0, 0.0, 2, 1.1691 - 7.9751j),
    ],
)
def test_galerkin_eigenvalues(L, kappa, index, expected):
    records = spectrum(L, kappa)
    assert records[index].lam == pytest.approx(expected, abs=1e-4)
    assert records[index].branch == Branch.PLUS
    assert records[index].method == Method.GALERKIN
    assert records[index + 1].lam == pytest.approx(np.conj(expected), abs=1e-4)


def test_eigenvalues_sorted_and_paired():
    lams = np.array([rec.lam for rec in spectrum(6.0, 1.0)])
    assert np.all(np.diff(lams.real) >= -1e-9)
    distance = np.abs(lams[:, None] - np.conj(lams)[None, :])
    rows, cols = optimize.linear_sum_assignment(distance)
    assert np.max(distance[rows, cols]) <= 1e-8


def test_truncation_convergence():
    coarse = galerkin.eigenvalues(model(8.0, 1.0, 100))[0].lam
    fine = galerkin.eigenvalues(model(8.0, 1.0, 140))[0].lam
    assert abs(coarse - fine) <= 1e-5


def test_filter_drops_wall_modes():
    records = galerkin.filter_spurious(spectrum(8.0, 0.0), spectrum(10.0, 0.0), 8.0, 10.0)
    kept = np.array([rec.lam for rec in records])
    assert np.min(np.abs(kept - (0.5094 - 0.8823j))) <= 1e-4
    assert np.min(np.abs(kept - (1.6241 - 2.8130j))) <= 1e-4
    assert np.min(np.abs(kept - (1.1691 - 7.9751j))) > 1.0


def test_filtered_mode_matches_newton_root():
    kept = galerkin.filter_spurious(spectrum(8.0, 1.0), spectrum(10.0, 1.0), 8.0, 10.0)
    exact = solve_eigenvalue(SpectralProblem(Regime.TRANSMISSION, 1.0), 1).lam
    assert min(abs(rec.lam - exact) for rec in kept) <= 1e-4
    with pytest.raises(ConfigError):
        galerkin.filter_spurious(kept, kept, 10.0, 8.0)


def test_singular_values_vanish_at_eigenvalues():
    records = spectrum(6.0, 1.0)
    sigma = galerkin.smallest_singular_values(model(6.0, 1.0), [records[0].lam])
    assert sigma[0] < 1e-6


def test_accretivity_bound_in_left_half_plane():
    points = np.array([-0.5, -1.0 + 3j, -2.0 - 5j])
    sigma = galerkin.smallest_singular_values(model(6.0, 1.0), points)
    assert np.all(sigma >= np.abs(points.real) * (1.0 - 1e-10))


def test_pseudospectrum_grid():
    grid = GridSpec(0.0, 3.0, -2.0, 2.0, 4, 5)
    result = galerkin.pseudospectrum(model(6.0, 1.0), grid)
    assert result.values.shape == (5, 4)
    assert result.resolution == (4, 5)
    assert np.all(result.values >= 0.0)
    # conjugate points have the same resolvent norm
    assert np.allclose(result.values, result.values[::-1], rtol=1e-8, atol=1e-12)


def test_semigroup_decay():
    times = np.linspace(0.0, 20.0, 21)
    decay = galerkin.semigroup_decay(model(10.0, 1.0), times)
    assert decay.norms[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(decay.norms <= 1.0 + 1e-10)
    exact = solve_eigenvalue(SpectralProblem(Regime.TRANSMISSION, 1.0), 1).lam
    assert decay.rate >= 0.95 * exact.real


def test_invalid_models():
    with pytest.raises(ConfigError):
        galerkin.build_model(6.0, 1.0, 11)
    with pytest.raises(ConfigError):
        galerkin.build_model(0.0, 1.0, 10)
    with pytest.raises(ConfigError):
        galerkin.build_model(6.0, -1.0, 10)
    with pytest.raises(ConfigError):
        GridSpec(0.0, 1.0, 0.0, 1.0, 0, 3)
    with pytest.raises(ConfigError):
        galerkin.semigroup_decay(model(6.0, 1.0), [-1.0, 1.0])


def test_singular_value_row_matches_points():
    schur_form, _ = linalg.schur(model(6.0, 1.0).matrix(), output="complex")
    re_values = np.array([0.0, 1.5, 3.0])
    row = galerkin._sigma_row(schur_form, re_values, 2.0)
    direct = galerkin.smallest_singular_values(model(6.0, 1.0), re_values + 2j)
    assert np.allclose(row, direct, rtol=1e-12, atol=0.0)


def test_resolvent_norm_is_vertical():
    sigma = galerkin.smallest_singular_values(
        model(galerkin.PSEUDOSPECTRUM_L, 1.0), [1 + 4j, 1 + 6j, 1 - 4j, 1 - 6j]
    )
    assert abs(sigma[1] / sigma[0] - 1.0) < 0.05
    assert abs(sigma[3] / sigma[2] - 1.0) < 0.05
