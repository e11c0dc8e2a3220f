import numpy as np
import pytest

import spectra
from airy_core import OMEGA, ZeroKind, airy_zero
from errors import ConfigError
from kernels import Regime, SpectralProblem
from spectra import Branch, Method


def transmission(kappa):
    return SpectralProblem(Regime.TRANSMISSION, kappa)


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0, 2.0, 5.0])
def test_f_real_positive_on_real_axis(lam):
    value = spectra.f_transmission(lam)
    assert value.real > 0.0
    assert abs(value.imag) <= 1e-12 * value.real


def test_f_derivative_at_unperturbed_root():
    lam = spectra.unperturbed_eigenvalue(1, Branch.PLUS)
    assert spectra.f_transmission_derivative(lam) == pytest.approx(-1j * lam, abs=1e-8)


def test_f_derivative_matches_difference_quotient():
    lam, h = 1.3 - 0.4j, 1e-5
    quotient = (spectra.f_transmission(lam + h) - spectra.f_transmission(lam - h)) / (2 * h)
    assert spectra.f_transmission_derivative(lam) == pytest.approx(quotient, rel=1e-7)


@pytest.mark.parametrize(
    "kappa, n, expected",
    [(0.0, 1, 0.5094 - 0.8823j), (1.0, 1, 1.0029 - 1.0363j), (1.0, 2, 1.8390 - 2.8685j)],
)
def test_transmission_eigenvalues(kappa, n, expected):
    record = spectra.solve_eigenvalue(transmission(kappa), n, Branch.PLUS)
    assert record.lam == pytest.approx(expected, abs=1e-4)
    assert record.method == Method.EXACT_NEWTON
    assert record.residual <= 1e-10 * (1.0 + abs(record.lam))


@pytest.mark.parametrize("kappa, n", [(0.5, 1), (1.0, 3), (10.0, 2)])
def test_pt_symmetry(kappa, n):
    plus = spectra.solve_eigenvalue(transmission(kappa), n, Branch.PLUS)
    minus = spectra.solve_eigenvalue(transmission(kappa), n, Branch.MINUS)
    assert minus.lam == pytest.approx(np.conj(plus.lam), abs=1e-10)


def test_solve_spectrum_order():
    records = spectra.solve_spectrum(transmission(1.0), 3)
    assert [(rec.n, rec.branch) for rec in records] == [
        (n, branch) for n in (1, 2, 3) for branch in (Branch.PLUS, Branch.MINUS)
    ]
    assert np.all(np.diff([rec.lam.real for rec in records[::2]]) > 0.0)
    assert records[0].as_dict()["branch"] == "plus"


def test_perturbed_eigenvalue_at_zero_kappa():
    for n in (1, 4):
        assert spectra.perturbed_eigenvalue(n, Branch.PLUS, 0.0) == pytest.approx(
            spectra.unperturbed_eigenvalue(n, Branch.PLUS), rel=1e-15
        )


def test_perturbed_eigenvalue_is_first_order():
    kappa, n = 0.1, 5
    lam = spectra.solve_eigenvalue(transmission(kappa), n).lam
    first_order = abs(lam - spectra.perturbed_eigenvalue(n, Branch.PLUS, kappa))
    zeroth_order = abs(lam - spectra.unperturbed_eigenvalue(n, Branch.PLUS))
    assert first_order < 0.2 * zeroth_order
    with pytest.raises(ConfigError):
        spectra.perturbed_eigenvalue(n, Branch.PLUS, -1.0)


def test_delta_table_below_one():
    deltas = spectra.delta_table(1.0, 10)
    assert deltas.shape == (10,)
    assert np.all(deltas > 0.0)
    assert np.all(deltas < 1.0)


def test_delta_fit_needs_enough_roots():
    with pytest.raises(ConfigError):
        spectra.delta_fit(1.0, spectra.DELTA_MIN_N - 1)


@pytest.mark.slow
def test_delta_fit_constant():
    c, deltas = spectra.delta_fit(1.0, 100)
    assert 0.26 <= c <= 0.36
    assert np.all(deltas < 1.0)


def test_dirichlet_pole():
    record = spectra.solve_eigenvalue(SpectralProblem(Regime.DIRICHLET), 1)
    expected = OMEGA * airy_zero(1, ZeroKind.OF_AI).location
    assert record.lam == pytest.approx(expected, abs=1e-10)


def test_robin_poles():
    neumann = spectra.solve_eigenvalue(SpectralProblem(Regime.NEUMANN), 1)
    robin = spectra.solve_eigenvalue(SpectralProblem(Regime.ROBIN, 0.0), 1)
    assert robin.lam == pytest.approx(neumann.lam, abs=1e-10)

    stiff = spectra.solve_eigenvalue(SpectralProblem(Regime.ROBIN, 1e3), 1)
    dirichlet = spectra.solve_eigenvalue(SpectralProblem(Regime.DIRICHLET), 1)
    assert abs(stiff.lam - dirichlet.lam) <= 1e-2


def test_half_line_minus_branch_is_conjugate():
    problem = SpectralProblem(Regime.NEUMANN)
    plus = spectra.solve_eigenvalue(problem, 2, Branch.PLUS)
    minus = spectra.solve_eigenvalue(problem, 2, Branch.MINUS)
    assert minus.lam == np.conj(plus.lam)


@pytest.mark.parametrize("kappa", [0.5, 1.0, 5.0])
def test_robin_poles_are_simple(kappa):
    for n in (1, 2, 3):
        assert spectra.robin_pole_simplicity(kappa, n) > 1e-8


def test_argument_count_finds_every_root():
    re_max, im_max = spectra.counting_rectangle(1.0, 2)
    assert spectra.argument_count(1.0, re_max, im_max) == 4


def test_localization_balls():
    records, first = spectra.ball_report(1.0, 5)
    assert first == 1
    assert all(rec.in_ball for rec in records)
    assert spectra.check_localization(1.0, 5, 1) == 1


def test_projector_norm():
    record = spectra.solve_eigenvalue(transmission(1.0), 1)
    result = spectra.projector(record)
    assert result.norm * abs(result.eigfun_sq_integral) == pytest.approx(1.0, rel=1e-6)
    assert result.norm >= 1.0


def test_projector_idempotence():
    record = spectra.solve_eigenvalue(transmission(1.0), 2)
    assert spectra.projector(record).idempotence <= 1e-6


def test_eigenfunction_at_zero_kappa_lives_on_right():
    record = spectra.solve_eigenvalue(transmission(0.0), 1)
    left = spectra.eigenfunction(record, np.linspace(-3.0, -0.1, 30))
    right = spectra.eigenfunction(record, np.linspace(0.1, 3.0, 30))
    assert np.max(np.abs(left)) <= 1e-8 * np.max(np.abs(right))


def test_laplacian_barrier_eigenvalue():
    problem = SpectralProblem(Regime.FREE_LAPLACIAN_BARRIER, -0.5)
    assert spectra.solve_eigenvalue(problem, 1).lam == pytest.approx(-1.0)
    with pytest.raises(ConfigError):
        spectra.solve_eigenvalue(SpectralProblem(Regime.FREE_LAPLACIAN_BARRIER, 0.5), 1)


def test_invalid_requests():
    with pytest.raises(ConfigError):
        spectra.solve_eigenvalue(SpectralProblem(Regime.FREE_LINE), 1)
    with pytest.raises(ConfigError):
        spectra.solve_eigenvalue(transmission(1.0), 0)
    with pytest.raises(ConfigError):
        Branch.from_name("sideways")
    neumann = spectra.solve_eigenvalue(SpectralProblem(Regime.NEUMANN), 1)
    with pytest.raises(ConfigError):
        spectra.projector(neumann)


@pytest.mark.parametrize("kappa", [0.5, 2.0])
def test_argument_count_to_ten(kappa):
    re_max, im_max = spectra.counting_rectangle(kappa, 10)
    assert spectra.argument_count(kappa, re_max, im_max) == 20


@pytest.mark.parametrize("kappa", [0.0, 1.0])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_projector_first_roots(kappa, n):
    result = spectra.projector(spectra.solve_eigenvalue(transmission(kappa), n))
    assert result.norm * abs(result.eigfun_sq_integral) == pytest.approx(1.0, abs=1e-6)
    assert result.idempotence <= 1e-6


def test_projector_minus_branch_at_zero_kappa():
    record = spectra.solve_eigenvalue(transmission(0.0), 1, Branch.MINUS)
    assert spectra.projector(record).idempotence <= 1e-6


@pytest.mark.parametrize(
    "kappa, n", [(1.0, 30), pytest.param(10.0, 50, marks=pytest.mark.slow)]
)
def test_projector_high_roots(kappa, n):
    result = spectra.projector(spectra.solve_eigenvalue(transmission(kappa), n))
    assert np.isfinite(result.norm)
    assert result.norm >= 1.0
    floor = spectra.PROJECTOR_ROUNDING * np.finfo(float).eps * result.norm
    assert result.idempotence <= max(1e-6, floor)


@pytest.mark.slow
@pytest.mark.parametrize("kappa", [1.0, 10.0])
def test_roots_are_simple(kappa):
    for record in spectra.solve_spectrum(transmission(kappa), 50, (Branch.PLUS,)):
        assert abs(spectra.f_transmission_derivative(record.lam)) >= spectra.JORDAN_TOL


@pytest.mark.slow
@pytest.mark.parametrize("kappa", [0.0, 0.1, 1.0, 10.0])
def test_hundred_roots_residual_and_pairing(kappa):
    records = spectra.solve_spectrum(transmission(kappa), 100)
    for plus, minus in zip(records[::2], records[1::2]):
        assert plus.residual <= 1e-10 * (1.0 + abs(plus.lam))
        assert minus.residual <= 1e-10 * (1.0 + abs(minus.lam))
        assert minus.lam == pytest.approx(np.conj(plus.lam), abs=1e-10 * (1.0 + abs(plus.lam)))


@pytest.mark.slow
@pytest.mark.parametrize("kappa", [0.1, 10.0])
def test_delta_below_one_for_hundred_roots(kappa):
    assert np.all(spectra.delta_table(kappa, 100) < 1.0)


@pytest.mark.slow
def test_delta_fit_constant_is_stable_in_kappa():
    weak, _ = spectra.delta_fit(0.1, 100)
    strong, _ = spectra.delta_fit(1.0, 100)
    assert abs(weak - strong) <= 0.05
