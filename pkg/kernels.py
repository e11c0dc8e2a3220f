"""Resolvent kernels of the complex Airy operator for every boundary regime.

Kernels are written for the operator -d^2 - ix (sign MINUS_IX); the +ix
kernels follow from conjugation_map. With w_x = ix + lambda every kernel
factorizes as G(x, y) = p(min(x, y)) q(max(x, y)) on each quadrant, p and q
being Airy solutions Ai(c w_x), c in {1, e^{i alpha}, e^{-i alpha}}.

Adding the rank-one correction to the free kernel term by term cancels
catastrophically when lambda is far from the spectrum (both terms are
exponentially large, their sum is not). The factors are therefore built
in whichever pair of Airy solutions is well conditioned at w_x, with
coefficients reduced through the Wronskian identities.
"""

import argparse
import dataclasses
import enum
import logging

import numpy as np

from airy_core import OMEGA, OMEGA_BAR, Scaled, airye
from errors import AccuracyLoss, AtPole, ConfigError

logging.basicConfig(format="%(asctime)s %(levelname)s %(message)s", level=logging.INFO)

TWO_PI = 2.0 * np.pi
POLE_GUARD = 1e-14
FD_STEP = 1e-3


class Regime(enum.Enum):
    FREE_LINE = enum.auto()
    DIRICHLET = enum.auto()
    NEUMANN = enum.auto()
    ROBIN = enum.auto()
    TRANSMISSION = enum.auto()
    FREE_LAPLACIAN_BARRIER = enum.auto()

    def __str__(self):
        return super().name.lower()

    @classmethod
    def from_name(cls, name):
        try:
            return cls[name.upper().replace("-", "_")]
        except KeyError as exc:
            raise ConfigError(f"unknown regime '{name}'") from exc


class Sign(enum.Enum):
    PLUS_IX = enum.auto()
    MINUS_IX = enum.auto()

    def __str__(self):
        return super().name.lower()

    def flipped(self):
        return Sign.MINUS_IX if self == Sign.PLUS_IX else Sign.PLUS_IX


HALF_LINE = (Regime.DIRICHLET, Regime.NEUMANN, Regime.ROBIN)


@dataclasses.dataclass(frozen=True)
class SpectralProblem:
    regime: Regime
    kappa: float = 0.0
    sign: Sign = Sign.MINUS_IX

    def __post_init__(self):
        if self.kappa < 0.0 and self.regime != Regime.FREE_LAPLACIAN_BARRIER:
            raise ConfigError(f"{self.regime}: kappa must be >= 0, got {self.kappa}")


@dataclasses.dataclass(frozen=True)
class KernelSample:
    x: float
    y: float
    lam: complex
    value: complex
    sign: Sign = Sign.MINUS_IX


def select(mask, first, second):
    return Scaled(
        np.where(mask, first.mant, second.mant),
        np.where(mask, first.expo, second.expo),
    )


def _guard(den, lam, where):
    if den.log_abs() <= np.log(POLE_GUARD * np.sqrt(1.0 + abs(lam))):
        raise AtPole(f"{where}: lambda={lam} is a pole of the kernel")


def values_at(lam):
    """Scaled Ai and Ai' at (lambda, w lambda, w' lambda)"""
    return airye(np.array([lam, OMEGA * lam, OMEGA_BAR * lam], dtype=complex))


def _solutions(lam, x):
    """Scaled Ai(w_x), Ai(e^{i alpha} w_x), Ai(e^{-i alpha} w_x)"""
    w = 1j * np.asarray(x, dtype=float) + lam
    ai, _ = airye(np.stack([w, OMEGA * w, OMEGA_BAR * w]))
    return ai[0], ai[1], ai[2]


def f_value(lam):
    """f(lambda) = 2 pi Ai'(e^{-i alpha} lambda) Ai'(e^{i alpha} lambda), Scaled"""
    _, aip = values_at(lam)
    return TWO_PI * aip[2] * aip[1]


@dataclasses.dataclass
class Coefficients:
    """Kernel coefficients of one problem at one lambda.

    On x >= 0 the solution satisfying the condition at 0 is
    2 pi Ai(w w_x) + rotated Ai(w' w_x) = -2 pi w' (Ai(w_x) + direct Ai(w' w_x)).
    On x < 0 (transmission only) the connected solution is
    2 pi Ai(w' w_x) + rotated_left Ai(w w_x) = -2 pi w (Ai(w_x) + direct_left Ai(w w_x)),
    and mixed couples the two half-lines.
    """

    lam: complex
    rotated: Scaled
    direct: Scaled
    rotated_left: Scaled = None
    direct_left: Scaled = None
    mixed: Scaled = None


def half_line_coefficients(problem, lam):
    ai, aip = values_at(lam)
    kappa = problem.kappa
    if problem.regime == Regime.DIRICHLET:
        den = ai[2]
        rotated = -TWO_PI * ai[1] / den
        direct = -ai[0] / den
    elif problem.regime == Regime.NEUMANN:
        den = OMEGA_BAR * aip[2]
        rotated = -TWO_PI * OMEGA * aip[1] / den
        direct = -aip[0] / den
    elif problem.regime == Regime.ROBIN:
        den = 1j * OMEGA_BAR * aip[2] - kappa * ai[2]
        rotated = -TWO_PI * (1j * OMEGA * aip[1] - kappa * ai[1]) / den
        direct = -(1j * aip[0] - kappa * ai[0]) / den
    else:
        raise ConfigError(f"half_line_coefficients: {problem.regime} is not a half-line")
    _guard(den, lam, f"kernel_half_line({problem.regime}, kappa={kappa})")
    return Coefficients(lam, rotated, direct)


def transmission_coefficients(lam, kappa):
    _, aip = values_at(lam)
    den = TWO_PI * aip[2] * aip[1] + kappa
    _guard(den, lam, f"kernel_transmission(kappa={kappa})")
    rotated = -4.0 * np.pi**2 * OMEGA**2 * aip[1] * aip[1] / den
    direct = -OMEGA_BAR * (TWO_PI * OMEGA_BAR * aip[0] * aip[1] - kappa) / den
    rotated_left = -4.0 * np.pi**2 * OMEGA_BAR**2 * aip[2] * aip[2] / den
    direct_left = -OMEGA * (TWO_PI * OMEGA * aip[0] * aip[2] - kappa) / den
    mixed = Scaled(TWO_PI * kappa) / den
    return Coefficients(lam, rotated, direct, rotated_left, direct_left, mixed)


def right_solution(coefs, x):
    """Solution on x >= 0 fixed by the condition at 0, with the decaying one"""
    s1, sw, swb = _solutions(coefs.lam, x)
    theta = np.angle(1j * np.asarray(x, dtype=float) + coefs.lam)
    # (1, w') is well conditioned for arg w_x > -pi/3, (w, w') below
    p = select(
        theta > -np.pi / 3.0,
        -TWO_PI * OMEGA_BAR * (s1 + coefs.direct * swb),
        TWO_PI * sw + coefs.rotated * swb,
    )
    return p, swb


def left_solution(coefs, x):
    """Mirror of right_solution on x < 0: (decaying at -inf, connected)"""
    s1, sw, swb = _solutions(coefs.lam, x)
    theta = np.angle(1j * np.asarray(x, dtype=float) + coefs.lam)
    q = select(
        theta < np.pi / 3.0,
        -TWO_PI * OMEGA * (s1 + coefs.direct_left * sw),
        TWO_PI * swb + coefs.rotated_left * sw,
    )
    return sw, q


def free_solutions(lam, x):
    _, sw, swb = _solutions(lam, x)
    return TWO_PI * sw, swb


def _ordered(x, y):
    x, y = np.broadcast_arrays(
        np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    )
    return np.minimum(x, y), np.maximum(x, y)


def _negative(x):
    # -0.0 stands for the left limit 0^-
    return np.signbit(x)


def to_values(scaled, where):
    value = scaled.value()
    if not np.all(np.isfinite(value)):
        raise AccuracyLoss(f"{where}: kernel value overflows, use kernel_scaled")
    return value[()] if value.ndim == 0 else value


def free_line_scaled(x, y, lam):
    lo, hi = _ordered(x, y)
    p, _ = free_solutions(lam, lo)
    _, q = free_solutions(lam, hi)
    return p * q


def half_line_scaled(problem, x, y, lam):
    lo, hi = _ordered(x, y)
    if np.any(lo < 0.0):
        raise ConfigError(f"kernel_half_line: x, y must be >= 0, got {lo.min()}")
    coefs = half_line_coefficients(problem, lam)
    p, _ = right_solution(coefs, lo)
    _, q = right_solution(coefs, hi)
    return p * q


def transmission_scaled(x, y, lam, kappa):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    # order by value, keeping -0.0 on the left of +0.0
    swap = (x > y) | ((x == y) & ~_negative(x) & _negative(y))
    lo = np.where(swap, y, x)
    hi = np.where(swap, x, y)
    coefs = transmission_coefficients(lam, kappa)

    p_right, _ = right_solution(coefs, lo)
    _, q_right = right_solution(coefs, hi)
    p_left, _ = left_solution(coefs, lo)
    _, q_left = left_solution(coefs, hi)
    _, swb_hi = free_solutions(lam, hi)

    both_right = p_right * q_right
    both_left = p_left * q_left
    across = coefs.mixed * p_left * swb_hi
    lo_neg, hi_neg = _negative(lo), _negative(hi)
    return select(~lo_neg, both_right, select(hi_neg, both_left, across))


def kernel_free_line(x, y, lam):
    return to_values(free_line_scaled(x, y, complex(lam)), "kernel_free_line")


def kernel_half_line(problem, x, y, lam):
    if problem.regime not in HALF_LINE:
        raise ConfigError(f"kernel_half_line: unsupported regime {problem.regime}")
    return to_values(
        half_line_scaled(problem, x, y, complex(lam)),
        f"kernel_half_line({problem.regime})",
    )


def kernel_transmission(x, y, lam, kappa):
    if kappa < 0.0:
        raise ConfigError(f"kernel_transmission: kappa must be >= 0, got {kappa}")
    return to_values(
        transmission_scaled(x, y, complex(lam), kappa),
        f"kernel_transmission(kappa={kappa})",
    )


def kernel_laplacian_barrier(x, y, mu, kappa):
    """Resolvent kernel of -d^2 with the transmission barrier, at mu < 0"""
    if mu >= 0.0:
        raise ConfigError(f"kernel_laplacian_barrier: mu must be < 0, got {mu}")
    root = np.sqrt(-mu)
    if abs(root + 2.0 * kappa) <= POLE_GUARD * np.sqrt(1.0 + abs(mu)):
        raise AtPole(
            f"kernel_laplacian_barrier: mu={mu} is the eigenvalue -4 kappa^2 (kappa={kappa})"
        )
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    eps = np.where(_negative(x), -1.0, 1.0)
    sigma = np.where(_negative(y), -1.0, 1.0)
    value = np.exp(-root * np.abs(x - y)) / (2.0 * root) + eps * sigma * np.exp(
        -root * (np.abs(x) + np.abs(y))
    ) / (2.0 * (root + 2.0 * kappa))
    return value[()] if value.ndim == 0 else value


def robin_kernel_negative_axis(x, y, lam, kappa):
    """Robin kernel on the negative half-line, condition u'(0) + kappa u(0) = 0.

    Obtained from the positive half-line by x -> -x, which turns -ix into
    +ix, hence the conjugation.
    """
    problem = SpectralProblem(Regime.ROBIN, kappa)
    value = kernel_half_line(
        problem, -np.asarray(x, dtype=float), -np.asarray(y, dtype=float), np.conj(lam)
    )
    return np.conj(value)


def kernel_scaled(problem, x, y, lam):
    """Kernel of the MINUS_IX operator as Scaled numbers"""
    if problem.regime == Regime.FREE_LINE:
        return free_line_scaled(x, y, lam)
    if problem.regime in HALF_LINE:
        return half_line_scaled(problem, x, y, lam)
    if problem.regime == Regime.TRANSMISSION:
        return transmission_scaled(x, y, lam, problem.kappa)
    raise ConfigError(f"kernel_scaled: unsupported regime {problem.regime}")


def kernel(problem, x, y, lam):
    """Kernel of the problem at lambda, honouring its sign"""
    lam = complex(lam)
    if problem.regime == Regime.FREE_LAPLACIAN_BARRIER:
        return kernel_laplacian_barrier(x, y, lam.real, problem.kappa)
    if problem.sign == Sign.PLUS_IX:
        minus = dataclasses.replace(problem, sign=Sign.MINUS_IX)
        return np.conj(kernel(minus, x, y, np.conj(lam)))
    return to_values(kernel_scaled(problem, x, y, lam), f"kernel({problem.regime})")


def conjugation_map(sample):
    """G^{+}(x, y; lambda) = conj G^{-}(x, y; conj lambda), both ways"""
    return KernelSample(
        sample.x,
        sample.y,
        np.conj(sample.lam),
        np.conj(sample.value),
        sample.sign.flipped(),
    )


def dirichlet_neumann_difference(x, y, lam):
    """G^D - G^N = -i w Ai(w' w_x) Ai(w' w_y) / (Ai(w' lambda) Ai'(w' lambda))"""
    ai, aip = values_at(lam)
    coef = -1j * OMEGA / (ai[2] * aip[2])
    return coef, _rank_one(coef, x, y, lam)


def neumann_robin_difference(x, y, lam, kappa):
    """G^N - G^R = -i kappa w Ai(w' w_x) Ai(w' w_y) / (Ai'(w' lambda) f^R)"""
    ai, aip = values_at(lam)
    robin = 1j * OMEGA_BAR * aip[2] - kappa * ai[2]
    _guard(robin, lam, f"neumann_robin_difference(kappa={kappa})")
    coef = -1j * kappa * OMEGA / (aip[2] * robin)
    return coef, _rank_one(coef, x, y, lam)


def _rank_one(coef, x, y, lam):
    _, swb_x = free_solutions(lam, x)
    _, swb_y = free_solutions(lam, y)
    return to_values(coef * swb_x * swb_y, "rank-one kernel")


def _second_derivative(fun, x, h):
    return (
        -fun(x + 2 * h) + 16 * fun(x + h) - 30 * fun(x) + 16 * fun(x - h) - fun(x - 2 * h)
    ) / (12 * h**2)


def pde_residual(problem, x, y, lam, h=FD_STEP):
    """Relative residual of (-d_x^2 - ix - lambda) G off the diagonal"""
    fun = lambda t: kernel(problem, t, y, lam)
    value = fun(x)
    second = _second_derivative(fun, x, h)
    potential = (1j * x + lam) if problem.sign == Sign.MINUS_IX else (-1j * x + lam)
    terms = [abs(second), abs(potential * value)]
    return abs(-second - potential * value) / max(terms)


def derivative_jump(problem, y, lam, h=FD_STEP):
    """d_x G(y^+, y) - d_x G(y^-, y) from one-sided differences on each side"""
    fun = lambda t: kernel(problem, t, y, lam)
    return one_sided_derivative(fun, 1, h, y) - one_sided_derivative(fun, -1, h, y)


def one_sided_derivative(fun, side, h=FD_STEP, at=0.0):
    """Derivative at at^+ (side=1) or at^- (side=-1), Richardson extrapolated"""
    origin = -0.0 if side < 0 and at == 0.0 else at

    def second_order(step):
        return side * (
            -3 * fun(origin) + 4 * fun(at + side * step) - fun(at + 2 * side * step)
        ) / (2 * step)

    return (4 * second_order(h / 2) - second_order(h)) / 3


def interface_residuals(fun, kappa, h=FD_STEP):
    """(|u'(0+) - u'(0-)|, |u'(0+) - kappa (u(0+) - u(0-))|) for u = fun"""
    right = one_sided_derivative(fun, 1, h)
    left = one_sided_derivative(fun, -1, h)
    jump = fun(0.0) - fun(-0.0)
    return abs(right - left), abs(right - kappa * jump)


def robin_residual(kappa, y, lam, h=FD_STEP):
    problem = SpectralProblem(Regime.ROBIN, kappa)
    fun = lambda t: kernel_half_line(problem, t, y, lam)
    return abs(one_sided_derivative(fun, 1, h) - kappa * fun(0.0))


def main(regime, kappa, lam, y, xs):
    problem = SpectralProblem(Regime.from_name(regime), kappa)
    for x in xs:
        value = kernel(problem, x, y, lam)
        print(f"{x: .6f} {value.real: .16e} {value.imag: .16e}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Evaluate a resolvent kernel")
    parser.add_argument("-r", "--regime", default="transmission")
    parser.add_argument("-k", "--kappa", type=float, default=1.0)
    parser.add_argument("-l", "--lam", type=complex, default=1 + 1j)
    parser.add_argument("-y", type=float, default=1.0)
    parser.add_argument("xs", type=float, nargs="+", help="Evaluation points")
    args = parser.parse_args()
    main(args.regime, args.kappa, args.lam, args.y, args.xs)
