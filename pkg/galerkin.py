"""Galerkin approximation of the transmission problem on [-L, L].

The basis is made of the eigenfunctions of the Laplacian on [-L, L] with
Dirichlet walls at +-L and the transmission condition at 0:

    v_{n,1}(x) = L^{-1/2} cos(K_n x / L),          K_n = pi (n + 1/2)
    v_{n,2}(x) = +-beta_n L^{-1/2} sin(alpha_n (1 -+ x / L)),  x >< 0

with alpha_n cot(alpha_n) = -2 kappa L. The matrix of -d^2 + ix is
Lambda + iB, Lambda diagonal, B the (real symmetric) position operator
which only couples the two symmetry classes. Basis functions are ordered
(0,1), (0,2), (1,1), (1,2), ...
"""

import argparse
import dataclasses
import functools
import logging
import time

import numpy as np
from scipy import integrate, linalg, optimize

from errors import (
    AlphaBracketFailure,
    ConfigError,
    EigensolverFailure,
    MatchingAmbiguous,
)
from kernels import Regime
from quadrature import gauss_legendre
from spectra import Branch, EigenvalueRecord, Method
from workers import parallel_map

logging.basicConfig(format="%(asctime)s %(levelname)s %(message)s", level=logging.INFO)

ALPHA_XTOL = 1e-14
RESONANCE_TOL = 1e-6
RESIDUAL_TOL = 1e-8
PAIRING_FACTOR = 1e3
TIE_TOL = 1e-6
DRIFT_FACTOR = 0.5
GRAM_PANELS = 40
QUAD_LIMIT = 100
SORT_DECIMALS = 9
PSEUDOSPECTRUM_L = 10.0 ** (4.0 / 3.0)


@dataclasses.dataclass(frozen=True)
class GalerkinModel:
    L: float
    kappa: float
    n_trunc: int
    alphas: np.ndarray
    betas: np.ndarray
    matrix_b: np.ndarray
    matrix_lambda: np.ndarray

    @property
    def frequencies(self):
        return np.pi * (np.arange(self.n_trunc // 2) + 0.5)

    def matrix(self):
        return self.matrix_lambda + 1j * self.matrix_b


@dataclasses.dataclass(frozen=True)
class GridSpec:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ConfigError(f"grid: nx, ny must be >= 1, got {self.nx}, {self.ny}")
        if self.re_min > self.re_max or self.im_min > self.im_max:
            raise ConfigError(f"grid: empty range {self}")

    @property
    def re_values(self):
        return np.linspace(self.re_min, self.re_max, self.nx)

    @property
    def im_values(self):
        return np.linspace(self.im_min, self.im_max, self.ny)


@dataclasses.dataclass
class PseudospecGrid:
    re_range: tuple
    im_range: tuple
    resolution: tuple
    values: np.ndarray


@dataclasses.dataclass
class SemigroupDecay:
    times: np.ndarray
    norms: np.ndarray
    rate: float


def solve_alpha(n, kappa_l):
    """Root of alpha cot(alpha) = -2 kappa L in (pi n + pi/2, pi n + pi)"""
    if kappa_l == 0.0:
        return np.pi * (n + 0.5)
    lo, hi = np.pi * (n + 0.5), np.pi * (n + 1.0)
    try:
        alpha = optimize.brentq(
            lambda a: a * np.cos(a) + 2.0 * kappa_l * np.sin(a), lo, hi, xtol=ALPHA_XTOL
        )
    except ValueError as exc:
        raise AlphaBracketFailure(f"solve_alpha(n={n}, kappa L={kappa_l}): no sign change") from exc
    if not lo < alpha < hi:
        raise AlphaBracketFailure(
            f"solve_alpha(n={n}, kappa L={kappa_l}): root {alpha} outside ({lo}, {hi})"
        )
    return alpha


def resonant_coupling(freq, alpha, beta, L):
    """2 beta L int_0^1 t cos(K t) sin(alpha (1 - t)) dt by adaptive quadrature"""
    value, _ = integrate.quad(
        lambda t: t * np.cos(freq * t) * np.sin(alpha * (1.0 - t)),
        0.0,
        1.0,
        epsabs=1e-14,
        epsrel=1e-13,
        limit=QUAD_LIMIT + 4 * int((freq + alpha) / np.pi),
    )
    return 2.0 * beta * L * value


def _coupling(freqs, alphas, betas, L):
    """B[(n,1), (n',2)] for all n (rows) and n' (columns)"""
    K = freqs[:, None]
    a = alphas[None, :]
    beta = betas[None, :]
    sign = (-1.0) ** np.arange(freqs.size)[:, None]
    gap = a**2 - K**2
    resonant = np.abs(gap) < RESONANCE_TOL * K**2
    with np.errstate(divide="ignore", invalid="ignore"):
        coupling = (
            -2.0 * L * beta * (np.sin(a) * (a**2 + K**2) - sign * 2.0 * K * a) / gap**2
        )
    for i, j in zip(*np.nonzero(resonant)):
        coupling[i, j] = resonant_coupling(freqs[i], alphas[j], betas[j], L)
    return coupling


def build_model(L, kappa, n_trunc):
    if L <= 0.0:
        raise ConfigError(f"build_model: L must be > 0, got {L}")
    if kappa < 0.0:
        raise ConfigError(f"build_model: kappa must be >= 0, got {kappa}")
    if n_trunc < 4 or n_trunc % 2:
        raise ConfigError(f"build_model: n_trunc must be even and >= 4, got {n_trunc}")
    half = n_trunc // 2
    freqs = np.pi * (np.arange(half) + 0.5)
    kappa_l = kappa * L
    alphas = np.array([solve_alpha(n, kappa_l) for n in range(half)])
    betas = (1.0 + 2.0 * kappa_l / (alphas**2 + 4.0 * kappa_l**2)) ** -0.5

    mu = np.empty(n_trunc)
    mu[0::2] = (freqs / L) ** 2
    mu[1::2] = (alphas / L) ** 2
    coupling = _coupling(freqs, alphas, betas, L)
    matrix_b = np.zeros((n_trunc, n_trunc))
    matrix_b[0::2, 1::2] = coupling
    matrix_b[1::2, 0::2] = coupling.T
    return GalerkinModel(L, kappa, n_trunc, alphas, betas, matrix_b, np.diag(mu))


def basis_values(model, x):
    """Values and derivatives of the basis at x, shape (len(x), n_trunc)"""
    x = np.asarray(x, dtype=float)[:, None]
    L = model.L
    K, alpha, beta = model.frequencies, model.alphas, model.betas
    root = np.sqrt(L)
    values = np.empty((x.shape[0], model.n_trunc))
    derivs = np.empty_like(values)

    values[:, 0::2] = np.cos(K * x / L) / root
    derivs[:, 0::2] = -K / L * np.sin(K * x / L) / root

    # -0.0 is the left limit 0^-
    side = np.where(np.signbit(x), -1.0, 1.0)
    arg = alpha * (1.0 - side * x / L)
    values[:, 1::2] = side * beta * np.sin(arg) / root
    derivs[:, 1::2] = -beta * alpha / L * np.cos(arg) / root
    return values, derivs


def _gram_nodes(L):
    left, left_w = gauss_legendre(np.linspace(-L, 0.0, GRAM_PANELS + 1))
    right, right_w = gauss_legendre(np.linspace(0.0, L, GRAM_PANELS + 1))
    return np.concatenate([left, right]), np.concatenate([left_w, right_w])


def gram_matrix(model, indices=None):
    """Quadrature Gram matrix of the basis (a subset of it by index)"""
    nodes, weights = _gram_nodes(model.L)
    values, _ = basis_values(model, nodes)
    if indices is not None:
        values = values[:, indices]
    return values.T @ (weights[:, None] * values)


def position_matrix(model, indices=None):
    """Quadrature matrix of x in the basis, compares with matrix_b"""
    nodes, weights = _gram_nodes(model.L)
    values, _ = basis_values(model, nodes)
    if indices is not None:
        values = values[:, indices]
    return values.T @ ((weights * nodes)[:, None] * values)


def numerical_range_sample(model, n_samples, seed=0):
    """Re(u* M u) for random unit vectors u"""
    rng = np.random.default_rng(seed)
    u = rng.normal(size=(n_samples, model.n_trunc)) + 1j * rng.normal(
        size=(n_samples, model.n_trunc)
    )
    u /= np.linalg.norm(u, axis=1)[:, None]
    return np.real(np.einsum("ki,ij,kj->k", np.conj(u), model.matrix(), u))


def eigenvalues(model):
    """Eigenvalues of Lambda + iB sorted by real part, then imaginary part"""
    where = f"eigenvalues(L={model.L}, kappa={model.kappa}, n_trunc={model.n_trunc})"
    matrix = model.matrix()
    try:
        lams, left, right = linalg.eig(matrix, left=True, right=True)
    except linalg.LinAlgError as exc:
        raise EigensolverFailure(f"{where}: {exc}") from exc
    scale = np.linalg.norm(matrix, 2)
    residuals = np.linalg.norm(matrix @ right - right * lams, axis=0)
    if np.any(residuals > RESIDUAL_TOL * scale):
        raise EigensolverFailure(f"{where}: residual {residuals.max():.3e}")

    # PT symmetry pairs lambda with conj(lambda) up to the eigenvalue condition
    condition = 1.0 / np.abs(np.sum(np.conj(left) * right, axis=0))
    partner = np.min(np.abs(lams[None, :] - np.conj(lams)[:, None]), axis=1)
    tolerance = PAIRING_FACTOR * np.finfo(float).eps * scale * condition
    if np.any(partner > tolerance):
        worst = np.argmax(partner / tolerance)
        raise EigensolverFailure(f"{where}: {lams[worst]} has no conjugate partner")

    order = np.lexsort((lams.imag, np.round(lams.real, SORT_DECIMALS)))
    return [
        EigenvalueRecord(
            i + 1,
            Branch.PLUS if lams[k].imag <= 0.0 else Branch.MINUS,
            complex(lams[k]),
            float(residuals[k]),
            Method.GALERKIN,
            model.kappa,
            Regime.TRANSMISSION,
        )
        for i, k in enumerate(order)
    ]


def filter_spurious(first, second, l1, l2):
    """Records of the L = l2 run that persist from the L = l1 run.

    Modes created by the walls move with them: their imaginary part drifts
    by about l2 - l1, and translating them back lands on a mode of the l1
    run. Both kinds of drift are discarded.
    """
    if l2 <= l1:
        raise ConfigError(f"filter_spurious: need l2 > l1, got {l1}, {l2}")
    threshold = DRIFT_FACTOR * (l2 - l1)
    lams = np.array([rec.lam for rec in first])
    kept = []
    for rec in second:
        dist = np.abs(lams - rec.lam)
        order = np.argsort(dist, kind="stable")
        nearest = dist[order[0]]
        if (
            nearest <= threshold
            and order.size > 1
            and dist[order[1]] - nearest <= TIE_TOL
            and abs(lams[order[1]] - lams[order[0]]) > TIE_TOL
        ):
            raise MatchingAmbiguous(
                f"filter_spurious: {rec.lam} is equidistant from "
                f"{lams[order[0]]} and {lams[order[1]]}"
            )
        shifted = rec.lam - 1j * np.sign(rec.lam.imag) * (l2 - l1)
        translated = np.min(np.abs(lams - shifted)) < nearest
        drift = abs(abs(rec.lam.imag) - abs(lams[order[0]].imag))
        if nearest > threshold or drift > threshold or translated:
            continue
        kept.append(rec)
    return kept


def _sigma_min(schur_form, points):
    eye = np.eye(schur_form.shape[0])
    return np.array([linalg.svdvals(schur_form - z * eye)[-1] for z in points])


def _sigma_row(schur_form, re_values, im_value):
    return _sigma_min(schur_form, np.asarray(re_values) + 1j * im_value)


def smallest_singular_values(model, points):
    schur_form, _ = linalg.schur(model.matrix(), output="complex")
    return _sigma_min(schur_form, np.atleast_1d(points))


def pseudospectrum(model, grid):
    """Smallest singular value of M - z on the grid, rows along Im z"""
    start = time.time()
    # sigma_min(M - z) = sigma_min(T - z), M = Z T Z*
    schur_form, _ = linalg.schur(model.matrix(), output="complex")
    rows = parallel_map(
        functools.partial(_sigma_row, schur_form, grid.re_values), grid.im_values
    )
    logging.info("  Pseudospectrum done in %.3fs", time.time() - start)
    return PseudospecGrid(
        (grid.re_min, grid.re_max),
        (grid.im_min, grid.im_max),
        (grid.nx, grid.ny),
        np.array(rows),
    )


def semigroup_decay(model, t_grid):
    """||exp(-t M)|| on t_grid and the decay rate fitted on the second half"""
    times = np.asarray(t_grid, dtype=float)
    if np.any(times < 0.0):
        raise ConfigError("semigroup_decay: times must be >= 0")
    matrix = model.matrix()
    norms = np.array([linalg.svdvals(linalg.expm(-t * matrix))[0] for t in times])
    tail = times >= 0.5 * times.max()
    if np.count_nonzero(tail) < 2 or times.max() <= 0.0:
        raise ConfigError("semigroup_decay: need at least two positive times in the tail")
    slope, _ = np.polyfit(times[tail], np.log(norms[tail]), 1)
    return SemigroupDecay(times, norms, float(-slope))


def main(L, kappa, n_trunc, count):
    start = time.time()
    model = build_model(L, kappa, n_trunc)
    for rec in eigenvalues(model)[:count]:
        print(f"{rec.n:4d} {rec.lam.real: .6f} {rec.lam.imag: .6f}  residual {rec.residual:.2e}")
    logging.info("  Done in %.3fs", time.time() - start)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Galerkin eigenvalues on [-L, L]")
    parser.add_argument("-L", type=float, default=6.0)
    parser.add_argument("-k", "--kappa", type=float, default=0.0)
    parser.add_argument("-t", "--trunc", type=int, default=100)
    parser.add_argument("-c", "--count", type=int, default=10)
    args = parser.parse_args()
    main(args.L, args.kappa, args.trunc, args.count)
