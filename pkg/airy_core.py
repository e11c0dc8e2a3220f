"""Airy function Ai(z), Ai'(z) for complex z and the real zeros a_n, a'_n.

Two evaluators live here:

* ``eval_airy`` is the self-contained one (Maclaurin series near the
  origin, large-|z| expansions elsewhere, rotation identity next to the
  negative axis) and reports which regime answered and an error estimate;
* ``airye`` wraps ``scipy.special.airye`` and returns exponentially scaled
  values as ``Scaled`` numbers. The kernels and the quadratures use this
  one since it keeps full relative precision on the recessive solution.
"""

import argparse
import dataclasses
import enum
import logging

import numpy as np
from scipy import optimize, special

from errors import AccuracyLoss, ConfigError, NoConvergence

logging.basicConfig(format="%(asctime)s %(levelname)s %(message)s", level=logging.INFO)

ALPHA = 2.0 * np.pi / 3.0
OMEGA = np.exp(1j * ALPHA)
OMEGA_BAR = np.exp(-1j * ALPHA)
WRONSKIAN = 0.5j / np.pi

AI0 = 1.0 / (3.0 ** (2.0 / 3.0) * special.gamma(2.0 / 3.0))
AIP0 = -1.0 / (3.0 ** (1.0 / 3.0) * special.gamma(1.0 / 3.0))

SWITCH_RADIUS = 7.0
SECTOR_GUARD = np.pi / 20.0
SERIES_TERMS = 160
ASYMPTOTIC_TERMS = 40
ACCURACY_LOSS_TOL = 1e-8
ZERO_RESIDUAL_TOL = 1e-12
ZERO_STEP_TOL = 1e-13
ZERO_NOISE_TOL = 1e-10
AIRYE_LIMIT = 1e4
NEWTON_MAX_ITER = 50


class Scaled:
    """Complex number stored as mant * exp(expo), expo real.

    Works elementwise on numpy arrays. Products of Airy functions of
    large argument are formed this way without overflow.
    """

    # let numpy scalars defer to the reflected operators
    __array_ufunc__ = None

    def __init__(self, mant, expo=0.0):
        self.mant = np.asarray(mant, dtype=complex)
        self.expo = np.broadcast_to(
            np.asarray(expo, dtype=float), self.mant.shape
        ).copy()

    def normalized(self):
        mag = np.abs(self.mant)
        nonzero = mag > 0.0
        safe = np.where(nonzero, mag, 1.0)
        return Scaled(self.mant / safe, self.expo + np.log(safe))

    def __mul__(self, other):
        if isinstance(other, Scaled):
            return Scaled(self.mant * other.mant, self.expo + other.expo).normalized()
        return Scaled(self.mant * other, self.expo)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Scaled):
            return Scaled(self.mant / other.mant, self.expo - other.expo).normalized()
        return Scaled(self.mant / other, self.expo)

    def __rtruediv__(self, other):
        return Scaled(other) / self

    def __neg__(self):
        return Scaled(-self.mant, self.expo)

    def __add__(self, other):
        if not isinstance(other, Scaled):
            other = Scaled(other)
        top = np.maximum(self.expo, other.expo)
        mant = self.mant * np.exp(self.expo - top) + other.mant * np.exp(
            other.expo - top
        )
        return Scaled(mant, top)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __getitem__(self, key):
        return Scaled(self.mant[key], self.expo[key])

    def conj(self):
        return Scaled(np.conj(self.mant), self.expo)

    def value(self):
        with np.errstate(over="ignore"):
            return self.mant * np.exp(self.expo)

    def log_abs(self):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.mant)) + self.expo

    def angle(self):
        return np.angle(self.mant)


class Regime(enum.Enum):
    SERIES = enum.auto()
    ASYMPTOTIC_RIGHT = enum.auto()
    ASYMPTOTIC_LEFT = enum.auto()
    ROTATED = enum.auto()

    def __str__(self):
        return super().name.lower()


class ZeroKind(enum.Enum):
    OF_AI = enum.auto()
    OF_AI_PRIME = enum.auto()

    def __str__(self):
        return super().name.lower()


@dataclasses.dataclass
class AiryEval:
    value: complex
    derivative: complex
    regime: Regime
    err_estimate: float


@dataclasses.dataclass
class AiryZero:
    index: int
    kind: ZeroKind
    location: float
    residual: float


def _series_coefficients(nterms):
    # Ai'' = z Ai gives c_{k+3} = c_k / ((k+3)(k+2))
    coefs = np.zeros(nterms)
    coefs[0] = AI0
    coefs[1] = AIP0
    for k in range(nterms - 3):
        coefs[k + 3] = coefs[k] / ((k + 3) * (k + 2))
    return coefs


def _asymptotic_coefficients(nterms):
    u = np.ones(nterms)
    v = np.ones(nterms)
    for k in range(1, nterms):
        u[k] = (
            u[k - 1]
            * (6 * k - 5)
            * (6 * k - 3)
            * (6 * k - 1)
            / ((2 * k - 1) * 216 * k)
        )
        v[k] = -(6 * k + 1) / (6 * k - 1) * u[k]
    return u, v


_SERIES = _series_coefficients(SERIES_TERMS)
_SERIES_DER = np.polynomial.polynomial.polyder(_SERIES)
_U, _V = _asymptotic_coefficients(ASYMPTOTIC_TERMS)


def _truncated_sum(coefs, ratio):
    """Sum coefs[k] * ratio**k, stopped before the smallest term.

    Returns the partial sum and the magnitude of the first neglected term.
    """
    powers = ratio[np.newaxis, :] ** np.arange(coefs.size)[:, np.newaxis]
    terms = coefs[:, np.newaxis] * powers
    mags = np.abs(terms)
    decreasing = np.logical_and.accumulate(mags[1:] < mags[:-1], axis=0)
    keep = np.vstack([np.ones((1, ratio.size), dtype=bool), decreasing])
    total = np.sum(np.where(keep, terms, 0.0), axis=0)
    first_out = np.minimum(keep.sum(axis=0), coefs.size - 1)
    neglected = mags[first_out, np.arange(ratio.size)]
    return total, np.maximum(neglected, np.finfo(float).eps * np.abs(total))


def _series(z):
    ai = np.polynomial.polynomial.polyval(z, _SERIES)
    aip = np.polynomial.polynomial.polyval(z, _SERIES_DER)
    az = np.abs(z)
    eps = np.finfo(float).eps
    rounding = eps * np.maximum(
        np.polynomial.polynomial.polyval(az, np.abs(_SERIES)),
        np.polynomial.polynomial.polyval(az, np.abs(_SERIES_DER)),
    )
    tail = np.abs(_SERIES[-3:]).max() * az ** (SERIES_TERMS - 3)
    return ai, aip, np.zeros(z.shape), np.maximum(rounding, tail)


def _asymptotic_right(z):
    # valid for |arg z| <= 2pi/3, where the subdominant exponential is negligible
    zeta = 2.0 / 3.0 * z * np.sqrt(z)
    z14 = z**0.25
    su, eu = _truncated_sum(_U, -1.0 / zeta)
    sv, ev = _truncated_sum(_V, -1.0 / zeta)
    phase = np.exp(-1j * zeta.imag)
    ai = su / (2.0 * np.sqrt(np.pi) * z14) * phase
    aip = -z14 * sv / (2.0 * np.sqrt(np.pi)) * phase
    err = np.maximum(eu * np.abs(ai), ev * np.abs(aip))
    return ai, aip, -zeta.real, err


def _asymptotic_left(z):
    # oscillatory expansion of Ai(-s), s = -z close to the positive axis
    s = -z
    zeta = 2.0 / 3.0 * s * np.sqrt(s)
    theta = zeta - np.pi / 4.0
    shift = np.abs(theta.imag)
    ep = np.exp(1j * theta - shift)
    em = np.exp(-1j * theta - shift)
    cos = 0.5 * (ep + em)
    sin = -0.5j * (ep - em)
    ratio = -1.0 / zeta**2
    p, ep_ = _truncated_sum(_U[0::2], ratio)
    q, eq_ = _truncated_sum(_U[1::2], ratio)
    r, er_ = _truncated_sum(_V[0::2], ratio)
    t, et_ = _truncated_sum(_V[1::2], ratio)
    q, eq_ = q / zeta, eq_ / np.abs(zeta)
    t, et_ = t / zeta, et_ / np.abs(zeta)
    s14 = s**0.25
    ai = (cos * p + sin * q) / (np.sqrt(np.pi) * s14)
    aip = s14 * (sin * r - cos * t) / np.sqrt(np.pi)
    bound = np.maximum(np.abs(cos), np.abs(sin))
    err = np.maximum(
        bound * (ep_ + eq_) / np.abs(np.sqrt(np.pi) * s14),
        bound * (er_ + et_) * np.abs(s14) / np.sqrt(np.pi),
    )
    return ai, aip, shift, err


def _rotated(z):
    # Ai(z) = -w' Ai(w' z) - w Ai(w z), both rotated points inside |arg| <= 2pi/3
    ai1, aip1, e1, err1 = _asymptotic_right(OMEGA_BAR * z)
    ai2, aip2, e2, err2 = _asymptotic_right(OMEGA * z)
    top = np.maximum(e1, e2)
    w1 = np.exp(e1 - top)
    w2 = np.exp(e2 - top)
    ai = -OMEGA_BAR * ai1 * w1 - OMEGA * ai2 * w2
    aip = -OMEGA * aip1 * w1 - OMEGA_BAR * aip2 * w2
    return ai, aip, top, err1 * w1 + err2 * w2


def _evaluate(z):
    """Scaled in-house evaluation: (ai, aip, expo, err, regime codes)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    ai = np.zeros(z.shape, dtype=complex)
    aip = np.zeros(z.shape, dtype=complex)
    expo = np.zeros(z.shape)
    err = np.zeros(z.shape)
    regime = np.empty(z.shape, dtype=object)

    mod = np.abs(z)
    arg = np.abs(np.angle(z))
    masks = {
        Regime.SERIES: mod <= SWITCH_RADIUS,
        Regime.ASYMPTOTIC_RIGHT: (mod > SWITCH_RADIUS) & (arg <= ALPHA),
        Regime.ROTATED: (mod > SWITCH_RADIUS)
        & (arg > ALPHA)
        & (arg <= np.pi - SECTOR_GUARD),
        Regime.ASYMPTOTIC_LEFT: (mod > SWITCH_RADIUS) & (arg > np.pi - SECTOR_GUARD),
    }
    dispatcher = {
        Regime.SERIES: _series,
        Regime.ASYMPTOTIC_RIGHT: _asymptotic_right,
        Regime.ROTATED: _rotated,
        Regime.ASYMPTOTIC_LEFT: _asymptotic_left,
    }
    for reg, mask in masks.items():
        if not mask.any():
            continue
        ai[mask], aip[mask], expo[mask], err[mask] = dispatcher[reg](z[mask])
        regime[mask] = reg
    return ai, aip, expo, err, regime


def eval_airy(z):
    """Ai(z), Ai'(z) with the regime used and an absolute error estimate"""
    z = complex(z)
    if not np.isfinite(z):
        raise AccuracyLoss(f"eval_airy(z={z}): non-finite argument")
    ai, aip, expo, err, regime = _evaluate(z)
    with np.errstate(over="ignore"):
        scale = np.exp(expo[0])
    value = complex(ai[0] * scale)
    derivative = complex(aip[0] * scale)
    err_abs = float(err[0] * scale)
    if not (np.isfinite(value) and np.isfinite(derivative) and np.isfinite(err_abs)):
        raise AccuracyLoss(f"eval_airy(z={z}): result overflows double precision")
    if err_abs > ACCURACY_LOSS_TOL * max(1.0, abs(value)):
        raise AccuracyLoss(
            f"eval_airy(z={z}): error estimate {err_abs:.3e} ({regime[0]})"
        )
    return AiryEval(value, derivative, regime[0], err_abs)


def airye(z):
    """Exponentially scaled Ai(z), Ai'(z) as Scaled numbers (arrays).

    scipy answers for |z| <= AIRYE_LIMIT; past it the large-|z| expansions
    of _evaluate take over, scipy giving up on arguments of order 1e7.
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    far = np.abs(z) > AIRYE_LIMIT
    eai, eaip, _, _ = special.airye(np.where(far, 0.0, z))
    zeta = 2.0 / 3.0 * z * np.sqrt(z)
    phase = np.exp(-1j * zeta.imag)
    ai, aip, expo = eai * phase, eaip * phase, -zeta.real
    if far.any():
        ai[far], aip[far], expo[far], _, _ = _evaluate(z[far])
    finite = np.isfinite(ai) & np.isfinite(aip) & np.isfinite(expo)
    if not finite.all():
        raise AccuracyLoss(f"airye(z={z[~finite][0]}): evaluation failed")
    expo = expo.reshape(shape)
    return Scaled(ai.reshape(shape), expo), Scaled(aip.reshape(shape), expo)


def airy(z):
    """Unscaled Ai(z), Ai'(z) on arrays; AccuracyLoss when they overflow"""
    ai, aip = airye(z)
    ai, aip = ai.value(), aip.value()
    if not (np.all(np.isfinite(ai)) and np.all(np.isfinite(aip))):
        raise AccuracyLoss("airy: values overflow, use airye instead")
    return ai, aip


def _scaled_terms(z):
    ai, aip, expo, _, _ = _evaluate(z)
    return Scaled(ai, expo), Scaled(aip, expo)


def _relative_residual(total, terms):
    # |total| / max(1, largest term), in log space
    top = np.max([t.log_abs() for t in terms], axis=0)
    return np.exp(total.log_abs() - np.maximum(top, 0.0))


def airy_identity_residuals(z):
    """Residuals of the rotation identity and of the Wronskian at z.

    Both are measured relative to max(1, largest term involved): for large
    |z| the individual products are exponentially large and only cancel in
    their sum.
    """
    z = complex(z)
    ai, aip = _scaled_terms(np.array([z, OMEGA_BAR * z, OMEGA * z]))
    rotation = [ai[0], OMEGA_BAR * ai[1], OMEGA * ai[2]]
    rot_res = _relative_residual(rotation[0] + rotation[1] + rotation[2], rotation)

    first = OMEGA_BAR * aip[1] * ai[2]
    second = OMEGA * aip[2] * ai[1]
    wronskian = first - second - Scaled(WRONSKIAN)
    wr_res = _relative_residual(wronskian, [first, second])
    return float(rot_res), float(wr_res)


def u_envelope(s):
    r = np.sqrt(1.0 + np.asarray(s, dtype=float) ** 2)
    return np.sqrt(r + 1.0) * (r - 2.0) / np.sqrt(2.0)


def log_airy_envelope(lam, x):
    """log of the large-lambda envelope of |Ai(e^{-i alpha}(ix + lambda))|"""
    x = np.asarray(x, dtype=float)
    return (
        -2.0 / 3.0 * lam**1.5 * u_envelope(x / lam)
        - np.log(2.0 * np.sqrt(np.pi))
        - np.log(lam**2 + x**2) / 8.0
    )


def _zero_seed(n, kind):
    if kind == ZeroKind.OF_AI:
        t = 3.0 * np.pi / 8.0 * (4 * n - 1)
        return -(t ** (2.0 / 3.0)) * (1.0 + 5.0 / 48.0 / t**2 - 5.0 / 36.0 / t**4)
    t = 3.0 * np.pi / 8.0 * (4 * n - 3)
    return -(t ** (2.0 / 3.0)) * (1.0 - 7.0 / 48.0 / t**2 + 35.0 / 288.0 / t**4)


def _zero_target(x, kind):
    ai, aip, expo, _, _ = _evaluate(complex(x))
    scale = np.exp(expo[0])
    ai, aip = (ai[0] * scale).real, (aip[0] * scale).real
    if kind == ZeroKind.OF_AI:
        return ai, aip
    # (Ai')' = x Ai
    return aip, x * ai


def airy_zero(n, kind):
    """n-th zero of Ai (kind OF_AI) or of Ai' (kind OF_AI_PRIME)"""
    if n < 1:
        raise ConfigError(f"airy_zero(n={n}): index must be positive")
    seed = _zero_seed(n, kind)
    low = 0.5 * (seed + _zero_seed(n + 1, kind))
    high = 0.0 if n == 1 else 0.5 * (seed + _zero_seed(n - 1, kind))

    x = seed
    previous = np.inf
    for _ in range(NEWTON_MAX_ITER):
        val, der = _zero_target(x, kind)
        step = val / der
        if abs(step) >= previous and abs(step) <= ZERO_NOISE_TOL * max(1.0, abs(x)):
            # steps no longer shrink: x sits in the evaluation noise of the root
            break
        previous = abs(step)
        x -= step
        if not low < x < high:
            # Newton left the bracket, fall back to bisection
            try:
                x = optimize.brentq(
                    lambda t: _zero_target(t, kind)[0],
                    low,
                    high,
                    xtol=1e-15,
                    rtol=4.0 * np.finfo(float).eps,
                )
            except ValueError as exc:
                raise NoConvergence(
                    f"airy_zero(n={n}, kind={kind}): no sign change in [{low}, {high}]"
                ) from exc
            break
        if abs(step) <= ZERO_STEP_TOL * max(1.0, abs(x)):
            break
    else:
        raise NoConvergence(
            f"airy_zero(n={n}, kind={kind}): {NEWTON_MAX_ITER} Newton steps"
        )

    residual = abs(_zero_target(x, kind)[0])
    if residual > ZERO_RESIDUAL_TOL:
        raise NoConvergence(
            f"airy_zero(n={n}, kind={kind}): residual {residual:.3e} at {x}"
        )
    return AiryZero(n, kind, float(x), float(residual))


def airy_zeros(n_max, kind):
    return [airy_zero(n, kind) for n in range(1, n_max + 1)]


def main(z, n_zeros):
    if z is not None:
        res = eval_airy(complex(z))
        print(f"Ai({z}) = {res.value}")
        print(f"Ai'({z}) = {res.derivative}")
        print(f"regime: {res.regime}, error estimate: {res.err_estimate:.3e}")
        rot, wr = airy_identity_residuals(complex(z))
        print(f"rotation residual: {rot:.3e}, Wronskian residual: {wr:.3e}")
    for n in range(1, n_zeros + 1):
        a = airy_zero(n, ZeroKind.OF_AI)
        ap = airy_zero(n, ZeroKind.OF_AI_PRIME)
        print(f"{n:4d} {a.location: .15f} {ap.location: .15f}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description="Evaluate the Airy function and its real zeros"
    )
    parser.add_argument("-z", help="Complex argument, e.g. 1+2j")
    parser.add_argument(
        "-n", "--n_zeros", type=int, default=0, help="Number of zeros to list"
    )
    args = parser.parse_args()
    main(args.z, args.n_zeros)
