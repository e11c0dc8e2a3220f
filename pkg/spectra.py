"""Eigenvalues of the complex Airy operator with a transmission barrier.

Eigenvalues (poles of the resolvent) are the zeros of the denominators met
in the kernels module: f(lambda) + kappa for the transmission problem,
Ai(w' lambda), Ai'(w' lambda) and f^R(kappa, lambda) on the half-line. They
are found by damped Newton iteration seeded on the rays lambda = e^{+-i alpha} a_n
and followed in kappa by continuation, so the index n of a root is the one
of the kappa = 0 root it comes from.
"""

import argparse
import dataclasses
import enum
import functools
import logging
import time

import numpy as np

import kernels
from airy_core import OMEGA, OMEGA_BAR, Scaled, ZeroKind, airy_zero, airye
from errors import (
    AccuracyLoss,
    ConfigError,
    JordanBlockSuspected,
    NoConvergence,
    OutsideBall,
)
from kernels import HALF_LINE, TWO_PI, Regime, SpectralProblem
from quadrature import gauss_legendre, graded_edges
from workers import parallel_map

logging.basicConfig(format="%(asctime)s %(levelname)s %(message)s", level=logging.INFO)

NEWTON_TOL = 1e-12
ACCEPT_TOL = 1e-10
NEWTON_MAX_ITER = 50
DAMPING_MIN = 1.0 / 1024.0
CONTINUATION_DRIFT = 0.25
CONTINUATION_MIN_STEP = 1e-10
JORDAN_TOL = 1e-8
IDEMPOTENCE_TOL = 1e-6
DELTA_MIN_N = 20
DELTA_FIT_START = 10
PROJECTOR_CUT = 32.0
PROJECTOR_PHASE = 4.0
PROJECTOR_ROUNDING = 1e5
LOG_NORM_LIMIT = np.log(1e300)
WINDING_SAMPLES = 64
WINDING_MAX_STEP = np.pi / 4.0
WINDING_MAX_POINTS = 200_000


class Branch(enum.Enum):
    PLUS = enum.auto()
    MINUS = enum.auto()

    def __str__(self):
        return super().name.lower()

    @classmethod
    def from_name(cls, name):
        try:
            return cls[name.upper()]
        except KeyError as exc:
            raise ConfigError(f"unknown branch '{name}'") from exc

    @property
    def phase(self):
        return OMEGA if self == Branch.PLUS else OMEGA_BAR


class Method(enum.Enum):
    EXACT_NEWTON = enum.auto()
    GALERKIN = enum.auto()

    def __str__(self):
        return super().name.lower()


@dataclasses.dataclass
class EigenvalueRecord:
    n: int
    branch: Branch
    lam: complex
    residual: float
    method: Method
    kappa: float
    regime: Regime = Regime.TRANSMISSION
    in_ball: bool = None

    def as_dict(self):
        return {
            "n": self.n,
            "branch": str(self.branch),
            "re": self.lam.real,
            "im": self.lam.imag,
            "residual": self.residual,
            "method": str(self.method),
            "kappa": self.kappa,
            "regime": str(self.regime),
        }


@dataclasses.dataclass
class ProjectorEval:
    record: EigenvalueRecord
    norm: float
    eigfun_sq_integral: complex
    idempotence: float


def f_transmission(lam):
    """f(lambda) = 2 pi Ai'(e^{-i alpha} lambda) Ai'(e^{i alpha} lambda)"""
    value = complex(kernels.f_value(complex(lam)).value())
    if not np.isfinite(value):
        raise AccuracyLoss(f"f_transmission(lambda={lam}): overflow")
    return value


def f_transmission_derivative(lam):
    """f'(lambda) = -i lambda + 4 pi lambda e^{2i alpha} Ai'(e^{-i alpha} lambda) Ai(e^{i alpha} lambda)"""
    lam = complex(lam)
    ai, aip = kernels.values_at(lam)
    value = -1j * lam + complex((4.0 * np.pi * lam * OMEGA_BAR * aip[2] * ai[1]).value())
    if not np.isfinite(value):
        raise AccuracyLoss(f"f_transmission_derivative(lambda={lam}): overflow")
    return value


def target_function(problem, lam):
    """(F, dF/dlambda, dF/dkappa) for the eigenvalue equation F(kappa, lambda) = 0"""
    lam = complex(lam)
    kappa = problem.kappa
    if problem.regime == Regime.TRANSMISSION:
        return f_transmission(lam) + kappa, f_transmission_derivative(lam), 1.0

    ai, aip = kernels.values_at(lam)
    ai, aip = ai.value(), aip.value()
    if not (np.all(np.isfinite(ai)) and np.all(np.isfinite(aip))):
        raise AccuracyLoss(f"target_function({problem.regime}, lambda={lam}): overflow")
    if problem.regime == Regime.DIRICHLET:
        return ai[2], OMEGA_BAR * aip[2], 0.0
    if problem.regime == Regime.NEUMANN:
        # (Ai')' = z Ai
        return aip[2], OMEGA * lam * ai[2], 0.0
    if problem.regime == Regime.ROBIN:
        return (
            1j * OMEGA_BAR * aip[2] - kappa * ai[2],
            1j * lam * ai[2] - kappa * OMEGA_BAR * aip[2],
            -ai[2],
        )
    raise ConfigError(f"target_function: {problem.regime} has no eigenvalue equation")


def _value_and_slope(problem, lam):
    value, slope, _ = target_function(problem, lam)
    return value, slope


def _newton(fun, lam, where):
    value, slope = fun(lam)
    eps = np.finfo(float).eps
    for _ in range(NEWTON_MAX_ITER):
        if abs(value) <= NEWTON_TOL * (1.0 + abs(lam)) or slope == 0.0:
            break
        step = value / slope
        damping = 1.0
        trial = lam - step
        trial_value, trial_slope = fun(trial)
        while abs(trial_value) > abs(value) and damping > DAMPING_MIN:
            damping /= 2.0
            trial = lam - damping * step
            trial_value, trial_slope = fun(trial)
        stalled = abs(trial - lam) <= 4.0 * eps * (1.0 + abs(lam))
        lam, value, slope = trial, trial_value, trial_slope
        if stalled:
            break
    if abs(value) <= ACCEPT_TOL * (1.0 + abs(lam)):
        return lam
    raise NoConvergence(f"{where}: |F| = {abs(value):.3e} at lambda={lam} after Newton")


def _zero_kind(regime):
    return ZeroKind.OF_AI if regime == Regime.DIRICHLET else ZeroKind.OF_AI_PRIME


def unperturbed_eigenvalue(n, branch, kind=ZeroKind.OF_AI_PRIME):
    """e^{+-i alpha} times the n-th zero of Ai (or Ai')"""
    return complex(branch.phase * airy_zero(n, kind).location)


def _spacing(n, kind, seed):
    gaps = [abs(airy_zero(n + 1, kind).location - airy_zero(n, kind).location)]
    if n > 1:
        gaps.append(abs(airy_zero(n, kind).location - airy_zero(n - 1, kind).location))
    gaps.append(2.0 * abs(seed.imag))
    return min(gaps)


def _track(problem, lam, spacing, where):
    """Follow a root from kappa = 0 to problem.kappa by predictor-corrector steps"""
    target = problem.kappa
    kappa, step = 0.0, target
    while kappa < target:
        step = min(step, target - kappa)
        new_kappa = target if step >= target - kappa else kappa + step
        _, slope, dkappa = target_function(dataclasses.replace(problem, kappa=kappa), lam)
        predicted = lam - dkappa * (new_kappa - kappa) / slope
        current = dataclasses.replace(problem, kappa=new_kappa)
        try:
            root = _newton(functools.partial(_value_and_slope, current), predicted, where)
        except (NoConvergence, AccuracyLoss):
            root = None
        if root is None or abs(root - predicted) > CONTINUATION_DRIFT * spacing:
            step /= 2.0
            if step < CONTINUATION_MIN_STEP * max(1.0, target):
                raise NoConvergence(f"{where}: continuation stalled at kappa={kappa}")
            continue
        lam, kappa = root, new_kappa
        step *= 2.0
    return lam


def _residual(problem, lam):
    if problem.regime == Regime.TRANSMISSION:
        # re-evaluated through the kernel denominator
        return abs(complex(kernels.f_value(lam).value()) + problem.kappa)
    return abs(target_function(problem, lam)[0])


def solve_eigenvalue(problem, n, branch=Branch.PLUS):
    """n-th eigenvalue of the problem on the given branch.

    Half-line problems are posed for -ix, whose eigenvalues sit on the PLUS
    branch; their MINUS record is the conjugate, eigenvalue of the +ix problem.
    """
    regime, kappa = problem.regime, problem.kappa
    where = f"solve_eigenvalue({regime}, kappa={kappa}, n={n}, branch={branch})"
    if n < 1:
        raise ConfigError(f"{where}: n must be >= 1")
    if regime == Regime.FREE_LINE:
        raise ConfigError(f"{where}: the operator on the whole line has empty spectrum")
    if regime == Regime.FREE_LAPLACIAN_BARRIER:
        if kappa < 0.0 and n == 1:
            return EigenvalueRecord(
                1, branch, complex(-4.0 * kappa**2), 0.0, Method.EXACT_NEWTON, kappa, regime
            )
        raise ConfigError(f"{where}: only eigenvalue is -4 kappa^2, for kappa < 0")
    if regime in HALF_LINE and branch == Branch.MINUS:
        record = solve_eigenvalue(problem, n, Branch.PLUS)
        return dataclasses.replace(record, branch=Branch.MINUS, lam=np.conj(record.lam))

    kind = _zero_kind(regime)
    seed = unperturbed_eigenvalue(n, branch, kind)
    start = dataclasses.replace(problem, kappa=0.0)
    lam = _newton(functools.partial(_value_and_slope, start), seed, where)
    if kappa > 0.0 and regime in (Regime.ROBIN, Regime.TRANSMISSION):
        lam = _track(problem, lam, _spacing(n, kind, seed), where)

    residual = _residual(problem, lam)
    if residual > ACCEPT_TOL * (1.0 + abs(lam)):
        raise NoConvergence(f"{where}: residual {residual:.3e} at lambda={lam}")
    in_ball = None
    if regime == Regime.TRANSMISSION:
        in_ball = bool(abs(lam - seed) <= 2.0 * kappa / abs(seed))
        if not in_ball:
            logging.warning("  %s: lambda=%s outside the localization ball", where, lam)
    return EigenvalueRecord(
        n, branch, complex(lam), float(residual), Method.EXACT_NEWTON, kappa, regime, in_ball
    )


def _solve_item(problem, item):
    return solve_eigenvalue(problem, *item)


def solve_spectrum(problem, n_max, branches=(Branch.PLUS, Branch.MINUS)):
    """Records for n = 1..n_max on each branch, ordered by n then branch"""
    items = [(n, branch) for n in range(1, n_max + 1) for branch in branches]
    return parallel_map(functools.partial(_solve_item, problem), items)


def perturbed_eigenvalue(n, branch, kappa):
    """lambda_n^{+-} + e^{-+i pi/6} kappa / |a'_n|, first order in kappa"""
    if kappa < 0.0:
        raise ConfigError(f"perturbed_eigenvalue: kappa must be >= 0, got {kappa}")
    zero = abs(airy_zero(n, ZeroKind.OF_AI_PRIME).location)
    turn = np.exp(-1j * np.pi / 6.0) if branch == Branch.PLUS else np.exp(1j * np.pi / 6.0)
    return complex(-branch.phase * zero + turn * kappa / zero)


def delta_table(kappa, n_max):
    """delta_n = |lambda_n(kappa) - lambda_n| |lambda_n| / kappa on the PLUS branch"""
    if kappa <= 0.0:
        raise ConfigError(f"delta_table: kappa must be > 0, got {kappa}")
    problem = SpectralProblem(Regime.TRANSMISSION, kappa)
    records = solve_spectrum(problem, n_max, branches=(Branch.PLUS,))
    seeds = np.array([unperturbed_eigenvalue(n, Branch.PLUS) for n in range(1, n_max + 1)])
    lams = np.array([rec.lam for rec in records])
    return np.abs(lams - seeds) * np.abs(seeds) / kappa


def delta_fit(kappa, n_max):
    """(c, delta_n) with (1 - delta_n) / kappa ~ c n^{-1/3} + d n^{-2/3}"""
    if n_max < DELTA_MIN_N:
        raise ConfigError(f"delta_fit: n_max must be >= {DELTA_MIN_N}, got {n_max}")
    deltas = delta_table(kappa, n_max)
    n = np.arange(1, n_max + 1)
    fitted = n >= DELTA_FIT_START
    coefs = np.polynomial.polynomial.polyfit(
        n[fitted] ** (-1.0 / 3.0), (1.0 - deltas[fitted]) / kappa, [1, 2]
    )
    return float(coefs[1]), deltas


def ball_report(kappa, n_max):
    """(records, N): every PLUS root with n >= N lies in its localization ball"""
    problem = SpectralProblem(Regime.TRANSMISSION, kappa)
    records = solve_spectrum(problem, n_max, branches=(Branch.PLUS,))
    first = 1
    for rec in records:
        if not rec.in_ball:
            first = rec.n + 1
    return records, first


def check_localization(kappa, n_max, n_from):
    _, first = ball_report(kappa, n_max)
    if first > n_from:
        raise OutsideBall(
            f"check_localization(kappa={kappa}, n_max={n_max}): roots up to n={first - 1} "
            f"leave their ball, expected from n={n_from} on"
        )
    return first


def _phase(kappa, z):
    _, aip = airye(np.stack([OMEGA * z, OMEGA_BAR * z]))
    return (TWO_PI * aip[1] * aip[0] + kappa).angle()


def _edge_winding(kappa, start, stop):
    t = np.linspace(0.0, 1.0, WINDING_SAMPLES + 1)
    while True:
        phase = _phase(kappa, start + (stop - start) * t)
        steps = np.angle(np.exp(1j * np.diff(phase)))
        coarse = np.abs(steps) > WINDING_MAX_STEP
        if not coarse.any():
            return steps.sum()
        if t.size > WINDING_MAX_POINTS:
            raise NoConvergence(
                f"argument_count(kappa={kappa}): phase unresolved on [{start}, {stop}]"
            )
        t = np.sort(np.concatenate([t, 0.5 * (t[:-1] + t[1:])[coarse]]))


def argument_count(kappa, re_max, im_max):
    """Zeros of f + kappa in [0, re_max] x [-im_max, im_max], by the argument principle"""
    corners = [-1j * im_max, re_max - 1j * im_max, re_max + 1j * im_max, 1j * im_max]
    corners.append(corners[0])
    winding = sum(
        _edge_winding(kappa, start, stop) for start, stop in zip(corners[:-1], corners[1:])
    )
    count = winding / (2.0 * np.pi)
    if abs(count - round(count)) > 0.1:
        raise NoConvergence(f"argument_count(kappa={kappa}): winding number {count:.3f}")
    return int(round(count))


def counting_rectangle(kappa, n_max):
    """(re_max, im_max) enclosing the roots n <= n_max of both branches only"""
    problem = SpectralProblem(Regime.TRANSMISSION, kappa)
    last = solve_eigenvalue(problem, n_max).lam
    following = solve_eigenvalue(problem, n_max + 1).lam
    return 0.5 * (last.real + following.real), abs(last.imag) + 1.0


def _eigenfunction_scaled(lam, x):
    """psi = Ai'(w lambda) Ai(w' w_x) on x >= 0, w Ai'(w' lambda) Ai(w w_x) on x < 0.

    Scaling by Ai'(w lambda) keeps both halves finite on the two branches,
    including kappa = 0 where one of the two factors vanishes.
    """
    x = np.asarray(x, dtype=float)
    sw, swb = kernels.free_solutions(lam, x)
    _, aip = kernels.values_at(lam)
    negative = np.signbit(x)
    left = OMEGA * aip[2] * sw / TWO_PI
    return kernels.select(negative, left, aip[1] * swb), negative


def eigenfunction(record, x):
    """Eigenfunction psi_n (not normalized) of a transmission record at x"""
    if record.regime != Regime.TRANSMISSION:
        raise ConfigError(f"eigenfunction: {record.regime} records are not supported")
    psi, _ = _eigenfunction_scaled(record.lam, x)
    return kernels.to_values(psi, f"eigenfunction(n={record.n})")


def _projector_rate(lam):
    return lambda x: 2.0 * np.sqrt(abs(1j * x + lam)) + 1.0


def _projector_grid(lam):
    reach = 12.0 + 3.0 * abs(lam)
    scan = np.linspace(-reach, reach, 4001)
    psi, _ = _eigenfunction_scaled(lam, scan)
    log_mass = 2.0 * psi.log_abs()
    kept = np.nonzero(log_mass >= np.max(log_mass) - PROJECTOR_CUT)[0]
    lo = min(scan[kept[0]] - 1.0, -1.0)
    hi = max(scan[kept[-1]] + 1.0, 1.0)
    rate = _projector_rate(lam)
    nodes_left, weights_left = gauss_legendre(graded_edges(lo, 0.0, rate, PROJECTOR_PHASE))
    nodes_right, weights_right = gauss_legendre(graded_edges(0.0, hi, rate, PROJECTOR_PHASE))
    # 0 is an edge: left nodes stay negative
    return np.concatenate([nodes_left, nodes_right]), np.concatenate(
        [weights_left, weights_right]
    )


def projector(record):
    """Spectral projector of a transmission eigenvalue, from the residue of the kernel.

    The residue of the kernel at lambda_n is the rank-one P = K psi(x) psi(y)
    with K = 4 pi^2 w^2 / f'(lambda_n) for the psi of _eigenfunction_scaled,
    so ||P|| = |K| ||psi||^2 and ||P^2 - P|| / ||P|| = |K int psi^2 - 1|.
    The quadrature of int psi^2 cancels down to 1 / ||P|| of its terms: the
    residual is only checked down to the rounding floor that leaves.
    """
    where = f"projector(kappa={record.kappa}, n={record.n}, branch={record.branch})"
    if record.regime != Regime.TRANSMISSION:
        raise ConfigError(f"{where}: only transmission records are supported")
    lam = record.lam
    slope = f_transmission_derivative(lam)
    if abs(slope) < JORDAN_TOL:
        raise JordanBlockSuspected(f"{where}: |f'(lambda)| = {abs(slope):.3e}")
    residue = 4.0 * np.pi**2 * OMEGA**2 / slope

    nodes, weights = _projector_grid(lam)
    psi, _ = _eigenfunction_scaled(lam, nodes)
    top = float(np.max(psi.log_abs()))
    shape = psi.mant * np.exp(psi.expo - top)
    mass = np.sum(weights * np.abs(shape) ** 2)
    square = np.sum(weights * shape**2)

    log_norm = np.log(abs(residue)) + 2.0 * top + np.log(mass)
    if not np.isfinite(log_norm) or log_norm > LOG_NORM_LIMIT:
        raise AccuracyLoss(f"{where}: projector norm e^{log_norm:.1f} overflows")
    norm = float(np.exp(log_norm))
    idempotence = abs(complex((Scaled(residue * square, 2.0 * top)).value()) - 1.0)
    floor = PROJECTOR_ROUNDING * np.finfo(float).eps * norm
    if idempotence > max(IDEMPOTENCE_TOL, floor):
        raise AccuracyLoss(f"{where}: idempotence residual {idempotence:.3e}")
    if floor > IDEMPOTENCE_TOL:
        logging.warning(
            "  %s: ||P|| = %.3e, idempotence only checked to %.1e", where, norm, floor
        )
    return ProjectorEval(record, norm, complex(square / mass), float(idempotence))


def robin_pole_simplicity(kappa, n):
    """|dF^R/dlambda| at the n-th Robin pole"""
    problem = SpectralProblem(Regime.ROBIN, kappa)
    record = solve_eigenvalue(problem, n)
    return float(abs(target_function(problem, record.lam)[1]))


def main(regime, kappa, n_max, branch):
    problem = SpectralProblem(Regime.from_name(regime), kappa)
    branches = (Branch.PLUS, Branch.MINUS) if branch == "both" else (Branch.from_name(branch),)
    start = time.time()
    records = solve_spectrum(problem, n_max, branches)
    for rec in records:
        print(
            f"{rec.n:4d} {str(rec.branch):5s} {rec.lam.real: .10f} {rec.lam.imag: .10f}"
            f"  residual {rec.residual:.2e}"
        )
    logging.info("  Done in %.3fs", time.time() - start)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Eigenvalues of the complex Airy operator")
    parser.add_argument("-r", "--regime", default="transmission")
    parser.add_argument("-k", "--kappa", type=float, default=1.0)
    parser.add_argument("-n", "--n_max", type=int, default=10)
    parser.add_argument(
        "-b", "--branch", choices=["plus", "minus", "both"], default="both"
    )
    args = parser.parse_args()
    main(args.regime, args.kappa, args.n_max, args.branch)
