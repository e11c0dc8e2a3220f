"""Hilbert-Schmidt norms of the resolvents and the integrals behind them.

Every kernel factorizes as p(min(x, y)) q(max(x, y)) per quadrant, so

    ||G||_HS^2 = 2 int int_{x < y} |p(x)|^2 |q(y)|^2 dx dy   (+ cross blocks)

is a triangle integral of two one-dimensional densities. It is computed
in log space on a window around the turning point x = -Im lambda. Beyond
the window the pairs near the diagonal still contribute an algebraically
decaying row mass |G(y, y)|^2 / (2 Re k), k = sqrt(-(ix + lambda)); those
rows are integrated on a mapped half-line with the inner integral cut to
the last TAIL_WIDTH / Re k, past which |p|^2 is below e^{-2 TAIL_WIDTH}.
"""

import argparse
import dataclasses
import logging
import time

import numpy as np
from scipy import optimize, special

import kernels
import quadrature
from errors import ConfigError, TailUncertified
from kernels import HALF_LINE, TWO_PI, Regime, Sign, SpectralProblem

logging.basicConfig(format="%(asctime)s %(levelname)s %(message)s", level=logging.INFO)

WINDOW_BASE = 20.0
TAIL_WIDTH = 20.0
TAIL_MIN_REK = 1.0
TAIL_PANELS = 6
LEVELS = ((8.0, 32), (4.0, 48))
HS_TOL = 1e-6
LOG_SCALE_LIMIT = np.log(1e250)
DECAY_CUT = 40.0
COMPACT_RANGE = (0.0, 5.0)
PHI_REACH = 4.0


@dataclasses.dataclass
class HsResult:
    lam: complex
    problem: SpectralProblem
    hs_norm: float
    quadrature_error: float
    log_scaled: bool = False


def _rate(w_of):
    return lambda x: 2.0 * np.sqrt(abs(w_of(x))) + 1.0


def _re_k(w):
    return np.real(np.sqrt(-w))


def _log_sq(fun, index):
    return lambda x: 2.0 * fun(x)[index].log_abs()


def _reflected(log_fun):
    return lambda s: log_fun(-s)


def _right_tail(log_p2, log_q2, w_of, start, log_pb, phase, tail_nodes):
    """log of the pairs x < y with y > start, p-mass up to start being exp(log_pb)"""
    rek = _re_k(w_of(start))
    if rek < TAIL_MIN_REK:
        raise TailUncertified(
            f"hs tail at x={start}: Re k = {rek:.3e} too small to cut the rows"
        )
    width = TAIL_WIDTH / rek
    layer = quadrature.graded_edges(start, start + width, _rate(w_of), phase)
    log_qb = quadrature.log_integral(log_q2, layer)
    log_layer = quadrature.log_triangle_integral(log_q2, log_p2, layer)

    far_start = start + width
    ys, weights = quadrature.mapped_tail_nodes(far_start, abs(w_of(far_start)), tail_nodes)
    widths = TAIL_WIDTH / _re_k(w_of(ys))
    log_rows = quadrature.log_window_integrals(log_p2, ys - widths, ys, TAIL_PANELS)
    log_far = special.logsumexp(log_q2(ys) + log_rows + np.log(weights))
    return np.logaddexp(log_pb + log_qb, np.logaddexp(log_layer, log_far))


def _window(regime, lam):
    center = -lam.imag
    reach = WINDOW_BASE + 2.0 * abs(lam.real)
    if regime == Regime.FREE_LINE:
        return center - reach, center + reach
    if regime in HALF_LINE:
        return 0.0, max(center, 0.0) + reach
    return min(center, 0.0) - reach, max(center, 0.0) + reach


def _block(log_p2, log_q2, w_of, edges, phase, tail_nodes):
    """log of the x < y pairs of p(x) q(y) on edges[0] <= x, continued to +inf"""
    triangle = quadrature.log_triangle_integral(log_q2, log_p2, edges)
    log_pb = quadrature.log_integral(log_p2, edges)
    tail = _right_tail(log_p2, log_q2, w_of, edges[-1], log_pb, phase, tail_nodes)
    return np.logaddexp(triangle, tail)


def _log_hs_squared(problem, lam, phase, tail_nodes):
    regime = problem.regime
    lo, hi = _window(regime, lam)
    w_right = lambda x: 1j * np.asarray(x, dtype=float) + lam
    w_left = lambda s: -1j * np.asarray(s, dtype=float) + lam
    rate = _rate(w_right)

    if regime == Regime.FREE_LINE:
        solutions = lambda x: kernels.free_solutions(lam, x)
        log_p2, log_q2 = _log_sq(solutions, 0), _log_sq(solutions, 1)
        edges = quadrature.graded_edges(lo, hi, rate, phase)
        right = _block(log_p2, log_q2, w_right, edges, phase, tail_nodes)
        left = _right_tail(
            _reflected(log_q2),
            _reflected(log_p2),
            w_left,
            -lo,
            quadrature.log_integral(log_q2, edges),
            phase,
            tail_nodes,
        )
        # the window triangle is counted in right
        return np.log(2.0) + np.logaddexp(right, left)

    if regime in HALF_LINE:
        coefs = kernels.half_line_coefficients(problem, lam)
        solutions = lambda x: kernels.right_solution(coefs, x)
        edges = quadrature.graded_edges(0.0, hi, rate, phase)
        block = _block(
            _log_sq(solutions, 0), _log_sq(solutions, 1), w_right, edges, phase, tail_nodes
        )
        return np.log(2.0) + block

    if regime == Regime.TRANSMISSION:
        coefs = kernels.transmission_coefficients(lam, problem.kappa)
        right = lambda x: kernels.right_solution(coefs, x)
        left = lambda x: kernels.left_solution(coefs, x)
        right_edges = quadrature.graded_edges(0.0, hi, rate, phase)
        # x < y < 0 is reflected onto 0 < s < t
        reflected_edges = quadrature.graded_edges(0.0, -lo, _rate(w_left), phase)
        left_edges = -reflected_edges[::-1]
        log_pm, log_qm = _log_sq(left, 0), _log_sq(left, 1)
        log_qp = _log_sq(right, 1)

        positive = _block(_log_sq(right, 0), log_qp, w_right, right_edges, phase, tail_nodes)
        negative = _block(
            _reflected(log_qm),
            _reflected(log_pm),
            w_left,
            reflected_edges,
            phase,
            tail_nodes,
        )
        across = (
            2.0 * coefs.mixed.log_abs()
            + quadrature.log_integral(log_pm, left_edges)
            + quadrature.log_integral(log_qp, right_edges)
        )
        return np.log(2.0) + special.logsumexp([positive, negative, across])

    raise ConfigError(f"hs_norm: unsupported regime {regime}")


def hs_norm(problem, lam):
    """HS norm of the resolvent kernel of problem at lambda"""
    lam = complex(lam)
    if problem.sign == Sign.PLUS_IX:
        # conjugation preserves the HS norm
        lam = np.conj(lam)
    where = f"hs_norm({problem.regime}, kappa={problem.kappa}, lambda={lam})"
    start = time.time()
    coarse, fine = (
        _log_hs_squared(problem, lam, phase, tail_nodes) for phase, tail_nodes in LEVELS
    )
    log_hs = 0.5 * fine
    relative = abs(np.expm1(0.5 * (fine - coarse)))
    if not np.isfinite(log_hs) or relative > HS_TOL:
        raise TailUncertified(f"{where}: refinement changed the norm by {relative:.3e}")
    logging.debug("  %s done in %.3fs", where, time.time() - start)
    if log_hs > LOG_SCALE_LIMIT:
        return HsResult(lam, problem, float(log_hs), float(relative), True)
    value = np.exp(log_hs)
    return HsResult(lam, problem, float(value), float(relative * value), False)


def log_i0_integral(lam, side=1):
    """log int_0^inf |Ai(w' (ix + lambda))|^2 dx (side=1), or the mirror
    int_{-inf}^0 |Ai(w (ix + lambda))|^2 dx (side=-1)"""
    lam = complex(lam)
    if side > 0:
        w_of = lambda x: 1j * np.asarray(x, dtype=float) + lam
        log_fun = lambda x: 2.0 * kernels.free_solutions(lam, x)[1].log_abs()
    else:
        w_of = lambda s: -1j * np.asarray(s, dtype=float) + lam
        log_fun = lambda s: 2.0 * kernels.free_solutions(lam, -s)[0].log_abs() - 2.0 * np.log(
            TWO_PI
        )
    center = -side * lam.imag
    stop = max(center, 0.0) + WINDOW_BASE + 2.0 * abs(lam.real)
    while True:
        edges = quadrature.graded_edges(0.0, stop, _rate(w_of))
        nodes, weights = quadrature.gauss_legendre(edges)
        values = log_fun(nodes)
        if values[-1] < np.max(values) - DECAY_CUT:
            return special.logsumexp(values + np.log(weights))
        stop *= 2.0


def i0_integral(lam, side=1):
    if not np.isreal(lam) or np.real(lam) <= 0.0:
        raise ConfigError(f"i0_integral: lambda must be real and > 0, got {lam}")
    return float(np.exp(log_i0_integral(float(np.real(lam)), side)))


def _log_block_norms(lam, kappa):
    coefs = kernels.transmission_coefficients(lam, kappa)
    f = kernels.f_value(lam)
    across = (-TWO_PI * f) / (f + kappa)
    log_plus = log_i0_integral(lam, 1)
    log_minus = log_i0_integral(lam, -1)
    return (
        float(coefs.rotated.log_abs()) + log_plus,
        float(across.log_abs()) + 0.5 * (log_plus + log_minus),
        float(coefs.rotated_left.log_abs()) + log_minus,
    )


def transmission_block_norms(lam, kappa):
    """HS norms (N1, N2, N3) of the x,y > 0, cross and x,y < 0 blocks of G - G0"""
    return tuple(float(np.exp(v)) for v in _log_block_norms(complex(lam), kappa))


def transmission_correction_norm(lam0, eta, kappa):
    """HS norm of G - G0 for the transmission problem at lam0 + i eta"""
    if not COMPACT_RANGE[0] <= lam0 <= COMPACT_RANGE[1]:
        raise ConfigError(
            f"transmission_correction_norm: lambda0={lam0} outside {list(COMPACT_RANGE)}"
        )
    n1, n2, n3 = _log_block_norms(complex(lam0, eta), kappa)
    return float(np.exp(0.5 * special.logsumexp([2 * n1, np.log(2.0) + 2 * n2, 2 * n3])))


def half_line_correction_norm(problem, lam):
    """HS norm of G^{half-line} - G0 on x, y > 0"""
    coefs = kernels.half_line_coefficients(problem, complex(lam))
    return float(np.exp(coefs.rotated.log_abs() + log_i0_integral(lam, 1)))


def difference_norm(kind, lam, kappa=0.0):
    """HS norm of G^D - G^N (kind "dirichlet-neumann") or G^N - G^R ("neumann-robin")"""
    lam = complex(lam)
    if kind == "dirichlet-neumann":
        coef, _ = kernels.dirichlet_neumann_difference(0.0, 0.0, lam)
    elif kind == "neumann-robin":
        coef, _ = kernels.neumann_robin_difference(0.0, 0.0, lam, kappa)
    else:
        raise ConfigError(f"difference_norm: unknown kind '{kind}'")
    return float(np.exp(coef.log_abs() + log_i0_integral(lam, 1)))


def _phi(x):
    return -(x**3) / 3.0 + x


def _phi_edges(h):
    return quadrature.graded_edges(0.0, PHI_REACH, lambda x: 2.0 / h * abs(1.0 - x * x) + 1.0)


def _check_h(h, where):
    if not 0.0 < h <= 1.0:
        raise ConfigError(f"{where}: h must lie in (0, 1], got {h}")


def log_i4_integral(h):
    """log int_0^inf exp(2/h phi(x)) dx"""
    _check_h(h, "i4_integral")
    return quadrature.log_integral(lambda x: 2.0 / h * _phi(x), _phi_edges(h))


def i4_integral(h):
    return float(np.exp(log_i4_integral(h)))


def log_i1_integral(h):
    """log int_0^inf exp(2/h phi(x)) int_0^x exp(-2/h phi(y)) dy dx"""
    _check_h(h, "i1_integral")
    body = quadrature.log_triangle_integral(
        lambda x: 2.0 / h * _phi(x), lambda y: -2.0 / h * _phi(y), _phi_edges(h)
    )
    # past PHI_REACH only the diagonal layer is left, of mass h / (2 (x^2 - 1))
    tail = np.log(h / 4.0 * np.log((PHI_REACH + 1.0) / (PHI_REACH - 1.0)))
    return np.logaddexp(body, tail)


def log_phi_integral(h):
    return np.logaddexp(np.log(2.0) + log_i1_integral(h), 2.0 * log_i4_integral(h))


def phi_integral(h):
    """Phi(h) = int int_{y < x} exp(2/h (phi(x) - phi(y))) = 2 I1 + I4^2"""
    return float(np.exp(log_phi_integral(h)))


def semigroup_symbol_norm(t):
    """sup over xi of exp(-xi^2 t - xi t^2 - t^3 / 3)"""
    if t <= 0.0:
        raise ConfigError(f"semigroup_symbol_norm: t must be > 0, got {t}")
    res = optimize.minimize_scalar(lambda xi: xi * xi * t + xi * t * t + t**3 / 3.0)
    return float(np.exp(-res.fun))


def main(regime, kappa, lams):
    problem = SpectralProblem(Regime.from_name(regime), kappa)
    for lam in lams:
        start = time.time()
        res = hs_norm(problem, lam)
        kind = "log" if res.log_scaled else "   "
        print(f"{lam}: {kind} {res.hs_norm:.12e} (error {res.quadrature_error:.2e})")
        logging.info("  Done in %.3fs", time.time() - start)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Hilbert-Schmidt norms of the resolvents")
    parser.add_argument("-r", "--regime", default="free_line")
    parser.add_argument("-k", "--kappa", type=float, default=0.0)
    parser.add_argument("lams", type=complex, nargs="+", help="Spectral parameters")
    args = parser.parse_args()
    main(args.regime, args.kappa, args.lams)
