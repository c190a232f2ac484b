import numpy as np
import pytest

from transmission_eigen_toolkit.forward import key_quantity
from transmission_eigen_toolkit.forward.closed_forms import (
    delta_jost_at_origin,
    delta_key_quantity,
    delta_taylor_coefficients,
    square_well_jost_function,
    square_well_jost_solution,
    square_well_key_quantity,
    two_step_asymptotic,
    two_step_key_quantity,
)
from transmission_eigen_toolkit.forward.key_quantity import (
    D_determinant,
    D_eval,
    D_factorized,
    asymptotics_check,
    free_jost_function,
    free_scattering_matrix,
    make_key_quantity,
    scattering_matrix,
)
from transmission_eigen_toolkit.forward.oracle import jost_series_oracle
from transmission_eigen_toolkit.forward.propagation import (
    free_regular_solution,
    jost_at_origin,
    jost_function,
    jost_profile,
    regular_solution,
)
from transmission_eigen_toolkit.models.exceptions import (
    PoleError,
    RangeGuardError,
    UnsupportedInputError,
)
from transmission_eigen_toolkit.potential.model import BoundaryCondition, Potential


def _rel(a, b):
    return np.abs(a - b) / np.maximum(1.0, np.abs(b))


@pytest.mark.parametrize("v", [1.0, -20.0, 16.0 * np.pi ** 2])
def test_square_well_jost_function_matches_closed_form(v, robin):
    p = Potential.square_well(v, 1.0)
    ks = np.array([0.3, 1.7, 4.0 + 0.5j, 9.1 - 0.8j, 2.5j])
    F = jost_function(p, robin, ks)
    expected = square_well_jost_function(ks, v, 1.0, robin.cot_theta)
    assert np.max(_rel(F, expected)) < 1e-10


def test_ode_path_matches_transfer(staircase, robin):
    ks = np.array([0.5, 3.0 + 0.2j, 7.5])
    transfer = jost_function(staircase, robin, ks, method='transfer')
    ode = jost_function(staircase, robin, ks, method='ode')
    assert np.max(_rel(ode, transfer)) < 1e-7


def test_jost_at_origin_record(unit_well, neumann):
    ev = jost_at_origin(unit_well, neumann, 2.0)
    assert ev.F == pytest.approx(-1j * ev.fp0)
    assert ev.F == pytest.approx(complex(square_well_jost_function(2.0, 1.0, 1.0, 0.0)), rel=1e-10)


def test_delta_jost_solution_at_origin(spike, dirichlet):
    ks = np.array([0.7, 3.3, 11.0])
    f0 = jost_function(spike, dirichlet, ks)
    assert np.max(_rel(f0, delta_jost_at_origin(ks, 0.5, 2.0))) < 1e-10


def test_jost_profile_inside_and_outside(unit_well):
    xs = np.array([0.0, 0.25, 0.9, 1.0, 1.5])
    f = jost_profile(unit_well, 1.3, xs)
    inside = square_well_jost_solution(1.3, xs[:4], 1.0, 1.0)
    assert np.max(_rel(f[:4], inside)) < 1e-10
    assert f[4] == pytest.approx(np.exp(1.3j * 1.5))


def test_overflow_guard(unit_well, robin):
    with pytest.raises(RangeGuardError):
        jost_function(unit_well, robin, np.array([800j]))


def test_key_quantity_at_origin_is_sinh_one(unit_well, neumann):
    assert D_eval(unit_well, neumann, 0j).real == pytest.approx(np.sinh(1.0), abs=1e-8)
    assert D_eval(unit_well, neumann, 1e-7).real == pytest.approx(np.sinh(1.0), abs=1e-8)


def test_square_well_key_quantity_closed_form(robin):
    p = Potential.square_well(3.0, 1.0)
    ks = np.linspace(0.2, 25.0, 60).astype(complex)
    assert np.max(_rel(D_eval(p, robin, ks), square_well_key_quantity(ks, 3.0, 1.0, 0.7))) < 1e-9


@pytest.mark.parametrize("cot", [0.0, 1.3, 2.0])
def test_delta_key_quantity_closed_form(spike, cot):
    bc = BoundaryCondition.non_dirichlet(cot)
    ks = np.concatenate([np.linspace(0.1, 20.0, 100), np.linspace(0.1, 8.0, 20) + 0.6j])
    assert np.max(_rel(D_eval(spike, bc, ks), delta_key_quantity(ks, 0.5, 2.0, cot))) < 1e-10


def test_delta_taylor_coefficients_vanish_at_double_branch():
    d0, d2, d4 = delta_taylor_coefficients(0.5, 2.0, 2.0)
    assert d0 == pytest.approx(0.0, abs=1e-15)
    assert d2 == pytest.approx(0.0, abs=1e-15)
    assert d4 == pytest.approx(2.0 * 0.5 ** 4 / 9.0)


def test_two_step_closed_form_and_asymptotics(two_step, neumann):
    ks = np.linspace(0.5, 40.0, 80).astype(complex)
    assert np.max(_rel(D_eval(two_step, neumann, ks), two_step_key_quantity(ks))) < 1e-9
    far = np.linspace(200.0, 210.0, 11).astype(complex)
    assert np.max(np.abs(two_step_key_quantity(far) - two_step_asymptotic(far))) < 1e-3


def test_free_problem_has_vanishing_key_quantity(robin):
    ks = np.linspace(0.0, 30.0, 31).astype(complex)
    assert np.max(np.abs(D_eval(Potential.zero(1.0), robin, ks))) < 1e-12


def _symmetry_points(rng, n=200):
    re = rng.uniform(-12.0, 12.0, n)
    im = rng.uniform(-2.0, 2.0, n)
    k = re + 1j * im
    return k[np.abs(k) > 0.5]


@pytest.mark.parametrize("name", ["staircase", "two_step", "deep_well"])
def test_symmetry_suite(name, request, robin, rng):
    p = request.getfixturevalue(name)
    ks = _symmetry_points(rng)
    D = make_key_quantity(p, robin)
    Dk = D(ks)
    scale = np.maximum(1.0, np.abs(Dk))
    assert np.max(np.abs(D(-ks) - Dk) / scale) < 1e-8
    assert np.max(np.abs(D(-np.conj(ks)) - np.conj(Dk)) / scale) < 1e-8

    real_k = np.linspace(0.05, 30.0, 200)
    assert np.max(np.abs(D(real_k.astype(complex)).imag)) < 1e-10

    F = jost_function(p, robin, ks)
    F_mirror = jost_function(p, robin, -np.conj(ks))
    assert np.max(np.abs(F_mirror + np.conj(F)) / np.maximum(1.0, np.abs(F))) < 1e-10

    F_real = jost_function(p, robin, np.concatenate([real_k, -real_k]).astype(complex))
    S = -F_real[200:] / F_real[:200]
    assert np.max(np.abs(np.abs(S) - 1.0)) < 1e-10

    determinant = D_determinant(p, robin, ks)
    assert np.max(np.abs(determinant - Dk) / scale) < 1e-8


def test_factorized_form_agrees(staircase, robin, dirichlet):
    ks = np.array([0.8, 2.2 + 0.4j, 6.0 - 0.3j])
    for bc in (robin, dirichlet):
        assert np.max(_rel(D_factorized(staircase, bc, ks), D_eval(staircase, bc, ks))) < 1e-9


def test_dirichlet_key_quantity_matches_determinant(staircase, dirichlet):
    ks = np.linspace(0.3, 15.0, 40) + 0.2j
    phi0, _ = free_regular_solution(dirichlet, ks, 1.0)
    assert np.allclose(phi0, np.sin(ks) / ks)
    assert np.max(_rel(D_eval(staircase, dirichlet, ks), D_determinant(staircase, dirichlet, ks))) < 1e-8


def test_regular_solution_boundary_data(staircase, robin):
    ev = regular_solution(staircase, robin, 1.7, 0.0)
    assert ev.phi == pytest.approx(1.0)
    assert ev.phip == pytest.approx(-0.7)


def test_free_jost_and_scattering(robin, dirichlet):
    assert complex(free_jost_function(robin, 2.0)) == pytest.approx(2.0 - 0.7j)
    assert abs(complex(free_scattering_matrix(robin, 3.0))) == pytest.approx(1.0)
    assert complex(free_scattering_matrix(dirichlet, 3.0)) == 1.0


def test_scattering_matrix_is_unitary_on_axis(staircase, robin):
    for k in (0.4, 2.0, 13.0):
        assert abs(scattering_matrix(staircase, robin, k)) == pytest.approx(1.0, abs=1e-10)


def test_scattering_matrix_pole(monkeypatch, unit_well, robin):
    monkeypatch.setattr(key_quantity, 'jost_function',
                        lambda p, bc, k, method='auto': np.zeros(len(k), dtype=complex))
    with pytest.raises(PoleError):
        scattering_matrix(unit_well, robin, 1j)


def test_asymptotic_residuals_shrink(staircase, robin):
    frame = asymptotics_check(staircase, robin, [50.0, 200.0, 800.0])
    assert list(frame.columns) == ['k_re', 'k_im', 'f_residual', 'F_residual', 'D_residual']
    assert frame['F_residual'].iloc[-1] < frame['F_residual'].iloc[0]
    assert frame['D_residual'].iloc[-1] < 0.05


def test_series_oracle_matches_propagation(rng, robin):
    p = Potential.square_well(2.0, 1.0)
    ks = rng.uniform(1.0, 20.0, 50) + 1j * rng.uniform(0.0, 0.5, 50)
    for k in ks:
        oracle = jost_series_oracle(p, k, iterations=30, bc=robin)
        direct = jost_at_origin(p, robin, k)
        assert abs(oracle.f0 - direct.f0) <= 1e-6 * max(1.0, abs(direct.f0))
        assert abs(oracle.fp0 - direct.fp0) <= 1e-6 * max(1.0, abs(direct.fp0))


def test_series_oracle_two_step(two_step, dirichlet):
    for k in (1.5, 6.0 + 0.3j, 17.0):
        oracle = jost_series_oracle(two_step, k, iterations=30, bc=dirichlet)
        assert abs(oracle.F - jost_at_origin(two_step, dirichlet, k).F) < 1e-6


def test_series_oracle_at_zero_wavenumber(robin):
    free = jost_series_oracle(Potential.zero(1.0), 0.0, iterations=5, bc=robin)
    assert free.f0 == pytest.approx(1.0)
    assert free.fp0 == pytest.approx(0.0)

    # f(0, x) = cosh(sqrt(v)(b - x)) inside the well
    oracle = jost_series_oracle(Potential.square_well(2.0, 1.0), 0.0, iterations=30, bc=robin)
    root = np.sqrt(2.0)
    assert abs(oracle.f0 - np.cosh(root)) < 1e-6
    assert abs(oracle.fp0 + root * np.sinh(root)) < 1e-6
    assert oracle.F == pytest.approx(-1j * (oracle.fp0 + robin.cot_theta * oracle.f0))


def test_series_oracle_refuses_deltas(spike):
    with pytest.raises(UnsupportedInputError):
        jost_series_oracle(spike, 2.0, iterations=5)


def test_asymptotic_ladder_on_imaginary_axis(robin):
    p = Potential.square_well(2.0, 1.0)
    frame = asymptotics_check(p, robin, [50j, 100j, 200j])
    assert frame['k_im'].tolist() == [50.0, 100.0, 200.0]
    for column in ('f_residual', 'F_residual'):
        values = frame[column].to_numpy()
        assert np.all(np.diff(values) < 0.0)
    # both residuals fall off like 1/|k|
    assert frame['F_residual'].iloc[-1] < 0.5 * frame['F_residual'].iloc[0]
