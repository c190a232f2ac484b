import json

import numpy as np
import pytest

from transmission_eigen_toolkit.forward.closed_forms import square_well_jost_function
from transmission_eigen_toolkit.forward.propagation import jost_function
from transmission_eigen_toolkit.inverse.cauchy import CauchyTransform
from transmission_eigen_toolkit.inverse.datum import DSource, datum_from_dict, limit_W, load_inverse_input
from transmission_eigen_toolkit.inverse.jost_recovery import RecoveredJost, recover_F
from transmission_eigen_toolkit.inverse.marchenko import (
    default_y_reach,
    derivative_4th_order,
    nystrom_rule,
    solve_marchenko,
)
from transmission_eigen_toolkit.inverse.pipeline import reconstruct, reconstruction_error
from transmission_eigen_toolkit.inverse.scattering import check_reach, marchenko_kernel, scattering_from_F
from transmission_eigen_toolkit.models.exceptions import (
    AccuracyError,
    DatumInconsistencyError,
    PotentialValidationError,
    UnsupportedInputError,
)
from transmission_eigen_toolkit.potential.model import BoundaryCondition, Potential, potential_l1_norm
from transmission_eigen_toolkit.spectra.bound_states import bound_states
from transmission_eigen_toolkit.utils.data_collector import ResultCollector
from transmission_eigen_toolkit.utils.reporting import ToolkitReporter

LIGHT = {'inverse': {'nystrom_nodes': 256, 'dx': 0.05}}


@pytest.fixture
def well_datum():
    return DSource.builtin('square_well', {'v': 2.0, 'b': 1.0}, cot_theta=1.0)


def free_jost(cot):
    return lambda k: np.asarray(k, dtype=complex) - 1j * cot


class TestDatum:
    def test_symmetric_datum_passes_spot_checks(self, well_datum):
        well_datum.probe()

    def test_odd_datum_fails_spot_checks(self):
        odd = DSource.closed(lambda k: np.asarray(k, dtype=complex), label='odd')
        with pytest.raises(DatumInconsistencyError):
            odd.probe()

    def test_limit_of_square_well(self):
        d = DSource.builtin('square_well', {'v': 3.0}, cot_theta=0.5)
        assert limit_W(d) == pytest.approx(3.0, abs=1e-3)

    def test_limit_of_two_step(self):
        assert limit_W(DSource.builtin('two_step')) == pytest.approx(0.0, abs=1e-3)

    def test_limit_from_forward_solver(self, staircase, robin):
        W = limit_W(DSource.from_forward(staircase, robin))
        assert W == pytest.approx(0.3 * 2.0 - 0.4 * 1.5 + 0.3 * 0.5, abs=1e-3)

    def test_builtin_errors(self):
        with pytest.raises(PotentialValidationError):
            DSource.builtin('square_well', {})
        with pytest.raises(PotentialValidationError):
            DSource.builtin('gaussian', {'v': 1.0})
        with pytest.raises(PotentialValidationError):
            DSource.builtin('two_step', cot_theta=1.0)

    def test_input_file_forms(self, tmp_path):
        data = {'cot_theta': 1.0, 'D': {'type': 'builtin', 'name': 'square_well', 'params': {'v': 2.0}}, 'W': 2.0}
        path = tmp_path / "inverse.json"
        path.write_text(json.dumps(data))
        d, cot = load_inverse_input(path)
        assert cot == 1.0
        assert d.W_hint == 2.0
        assert d.form == 'closed'

        hadamard = {'cot_theta': 0.0, 'D': {'type': 'hadamard', 'gamma': 2.0, 'd': 0,
                                            'zeros': [{'k_re': np.pi, 'k_im': 0.0, 'mult': 2}]}}
        d, cot = datum_from_dict(hadamard)
        assert d.form == 'hadamard'
        assert complex(d(np.pi)) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("data", [
        {'D': {'type': 'builtin', 'name': 'zero'}},
        {'cot_theta': 1.0, 'D': {'type': 'builtin'}},
        {'cot_theta': 1.0, 'D': {'type': 'table'}},
        {'cot_theta': 1.0, 'D': {'type': 'builtin', 'name': 'zero'}, 'extra': 1},
    ])
    def test_malformed_input(self, data):
        with pytest.raises(PotentialValidationError):
            datum_from_dict(data)


class TestCauchy:
    def test_reflection_identity_on_real_axis(self, well_datum):
        transform = CauchyTransform(well_datum, 2.0)
        ks = np.linspace(0.1, 20.0, 64)
        lhs = transform.M(ks) + transform.M(-ks)
        rhs = 2.0 * well_datum(ks) - 2.0
        np.testing.assert_allclose(lhs, rhs, rtol=0.0, atol=1e-8)

    def test_lower_half_plane_continuation(self, well_datum):
        transform = CauchyTransform(well_datum, 2.0)
        k = 1.5 - 0.7j
        assert transform.M(k) == pytest.approx(2.0 * complex(well_datum(k)) - 2.0 - transform.M(-k), abs=1e-10)

    def test_analytic_in_upper_half_plane(self, well_datum):
        transform = CauchyTransform(well_datum, 2.0, R=400.0, fixed_R=True, tail_tol=1e-3)
        re, im = np.meshgrid(np.linspace(0.5, 10.0, 20), np.linspace(0.5, 5.0, 20))
        ks = (re + 1j * im).ravel()
        h = 1e-4
        d_re = (transform.M(ks + h) - transform.M(ks - h)) / (2.0 * h)
        d_im = (transform.M(ks + 1j * h) - transform.M(ks - 1j * h)) / (2.0 * h)
        # Cauchy-Riemann: dM/dx + i dM/dy = 0
        assert np.max(np.abs(d_re + 1j * d_im)) < 1e-5

    def test_half_plane_function_is_twice_H(self, well_datum):
        transform = CauchyTransform(well_datum, 2.0)
        cot, W = 1.0, 2.0
        ks = np.linspace(0.5, 10.0, 20) + 0.5j

        def G(k):
            return square_well_jost_function(k, 2.0, 1.0, cot) - k - 1j * (0.5 * W - cot)

        H = G(ks) / 2j + cot / (2.0 * ks) * (G(ks) - G(0.0))
        M = transform.M(ks)
        assert np.max(np.abs(M - 2.0 * H) / np.maximum(1.0, np.abs(H))) < 1e-6

    def test_recovered_jost_matches_forward(self, well_datum):
        p = Potential.square_well(2.0, 1.0)
        bc = BoundaryCondition.non_dirichlet(1.0)
        ks = np.array([0.5, 2.0, 5.0 + 1.0j, 0.4 + 0.1j, 3.0j])
        recovered = recover_F(well_datum, 1.0, ks, W=2.0)
        exact = jost_function(p, bc, ks)
        assert np.max(np.abs(recovered - exact) / np.maximum(1.0, np.abs(exact))) < 1e-5

    def test_recovered_jost_on_real_axis(self, well_datum):
        p = Potential.square_well(2.0, 1.0)
        bc = BoundaryCondition.non_dirichlet(1.0)
        half = np.linspace(0.25, 20.0, 40)
        ks = np.concatenate([-half[::-1], half]).astype(complex)
        recovered = recover_F(well_datum, 1.0, ks, W=2.0)
        exact = jost_function(p, bc, ks)
        assert np.max(np.abs(recovered - exact) / np.abs(exact)) < 1e-6

    def test_free_datum_gives_free_jost(self):
        zero = DSource.builtin('zero')
        ks = np.array([0.5, 3.0, 1.0 + 2.0j])
        np.testing.assert_allclose(recover_F(zero, 0.8, ks, W=0.0), ks - 0.8j, atol=1e-12)

    @pytest.mark.slow
    def test_bound_states_of_deep_well(self, deep_well):
        bc = BoundaryCondition.non_dirichlet(1.0)
        d = DSource.builtin('square_well', {'v': -20.0, 'b': 1.0}, cot_theta=1.0)
        jost = RecoveredJost(CauchyTransform(d, -20.0), 1.0)
        s = scattering_from_F(jost, K_reach=10.0, h=0.05, cot_theta=1.0, W=-20.0)
        expected = bound_states(deep_well, bc, beta_max=20.0)
        assert expected
        assert len(s.bound_states) == len(expected)
        for got, want in zip(s.bound_states, expected):
            assert got.beta == pytest.approx(want.beta, abs=1e-4)
            assert got.norming_constant == pytest.approx(want.norming_constant, abs=1e-4)


class TestScattering:
    def test_free_robin_scattering_data(self):
        s = scattering_from_F(free_jost(1.0), K_reach=200.0, h=0.05, cot_theta=1.0, W=0.0)
        assert np.allclose(s.k_grid, -s.k_grid[::-1])
        assert np.max(np.abs(np.abs(s.S_values) - 1.0)) < 1e-12
        assert len(s.bound_states) == 1
        assert s.bound_states[0].beta == pytest.approx(1.0, abs=1e-10)
        assert s.bound_states[0].norming_constant == pytest.approx(np.sqrt(2.0), rel=1e-8)
        assert check_reach(s) < 1e-10

        # the bound state cancels the free part of the kernel
        y = np.linspace(0.0, 5.0, 51)
        assert np.max(np.abs(marchenko_kernel(s, y))) < 1e-6

    def test_short_reach_is_reported(self):
        p = Potential.square_well(10.0, 1.0)
        bc = BoundaryCondition.non_dirichlet(-1.0)
        s = scattering_from_F(lambda k: jost_function(p, bc, k), K_reach=5.0, h=0.05, cot_theta=-1.0, W=10.0)
        with pytest.raises(AccuracyError) as info:
            check_reach(s)
        assert info.value.stage == 'marchenko_kernel'

    def test_real_zero_of_F(self):
        with pytest.raises(DatumInconsistencyError):
            scattering_from_F(lambda k: np.asarray(k, dtype=complex) - 0.025, 10.0, 0.05, 0.0, 0.0)

    def test_non_unitary_F_is_rejected(self):
        def shifted(k):
            return np.asarray(k, dtype=complex) + 0.1 - 1j

        with pytest.raises(DatumInconsistencyError) as info:
            scattering_from_F(shifted, 10.0, 0.05, 1.0, 0.0)
        assert info.value.stage == 'scattering'
        assert info.value.details['deviation'] > 1e-6

    def test_kernel_needs_nonnegative_y(self):
        s = scattering_from_F(free_jost(-1.0), K_reach=50.0, h=0.05, cot_theta=-1.0, W=0.0)
        with pytest.raises(DatumInconsistencyError):
            marchenko_kernel(s, np.array([-0.5, 1.0]))


def separable_omega(m_sq, beta):
    return lambda y: m_sq * np.exp(-beta * np.asarray(y, dtype=float))


def separable_exact(xs, m_sq, beta):
    u = m_sq * np.exp(-2.0 * beta * xs) / (2.0 * beta)
    return -2.0 * beta * u / (1.0 + u), -8.0 * beta ** 2 * u / (1.0 + u) ** 2


class TestMarchenko:
    @pytest.mark.parametrize("rule, n_nodes, tol", [("gauss", 1024, 1e-8), ("trapezoid", 2048, 1e-4)])
    def test_separable_kernel(self, rule, n_nodes, tol):
        xs = np.arange(0.0, 2.0 + 1e-9, 0.01)
        sol = solve_marchenko(separable_omega(2.0, 1.0), xs, y_reach=20.0, n_nodes=n_nodes, rule=rule)
        K_exact, V_exact = separable_exact(xs, 2.0, 1.0)
        assert np.max(np.abs(sol.K_diagonal - K_exact)) < tol
        assert np.max(np.abs(sol.V_recovered - V_exact)) < 1e3 * tol
        assert np.all(sol.condition_numbers < 1e6)

    def test_grid_validation(self):
        omega = separable_omega(1.0, 1.0)
        with pytest.raises(PotentialValidationError):
            solve_marchenko(omega, [0.0, 0.1, 0.3, 0.4, 0.5], 5.0)
        with pytest.raises(PotentialValidationError):
            solve_marchenko(omega, [0.0, 0.1, 0.2], 5.0)
        with pytest.raises(PotentialValidationError):
            nystrom_rule(5.0, 64, 'simpson')

    def test_derivative_is_exact_on_quartics(self):
        xs = np.linspace(0.0, 1.0, 21)
        np.testing.assert_allclose(derivative_4th_order(xs ** 4, xs[1] - xs[0]), 4.0 * xs ** 3, atol=1e-10)

    def test_default_y_reach(self):
        assert default_y_reach([], 1.0) == 4.0
        assert default_y_reach([0.1], 1.0, cap_factor=1000.0) == 40.0 / 0.1
        assert default_y_reach([], 1.0, cap_factor=1.0) == 2.0




class TestPipeline:
    def test_zero_datum_with_repulsive_boundary(self):
        result = reconstruct(DSource.builtin('zero'), -1.0, LIGHT)
        assert result.W == pytest.approx(0.0, abs=1e-8)
        assert result.bound_states == ()
        assert result.F0 == pytest.approx(1j, abs=1e-8)
        assert np.max(np.abs(result.solution.V_recovered)) < 1e-4

    def test_zero_datum_with_bound_state(self):
        result = reconstruct(DSource.builtin('zero'), 1.0, LIGHT)
        assert len(result.bound_states) == 1
        assert result.bound_states[0].beta == pytest.approx(1.0, abs=1e-8)
        assert result.bound_states[0].norming_constant == pytest.approx(np.sqrt(2.0), rel=1e-6)
        assert np.max(np.abs(result.solution.V_recovered)) < 1e-4
        assert set(result.as_dict()) == {'W', 'F0', 'bound_states', 'V'}
        assert 'max_condition' in result.diagnostics()['quantity'].tolist()

    @pytest.mark.parametrize("cot", [-1.0, 1.0])
    def test_zero_datum_at_default_settings(self, cot):
        result = reconstruct(DSource.builtin('zero'), cot)
        xs = result.solution.x_grid
        assert xs[0] == 0.0 and xs[-1] == pytest.approx(2.0)
        assert np.max(np.abs(result.solution.V_recovered)) < 1e-4

    def test_dirichlet_is_unsupported(self, well_datum):
        with pytest.raises(UnsupportedInputError) as info:
            reconstruct(well_datum, None)
        assert info.value.exit_code == 2

    def test_stage_is_attached_to_errors(self):
        odd = DSource.closed(lambda k: np.asarray(k, dtype=complex), label='odd')
        with pytest.raises(DatumInconsistencyError) as info:
            reconstruct(odd, 1.0, LIGHT)
        assert info.value.stage == 'probe'

    @pytest.mark.slow
    def test_square_well_round_trip(self, tmp_path):
        p = Potential.square_well(2.0, 1.0)
        bc = BoundaryCondition.non_dirichlet(1.0)
        result = reconstruct(DSource.from_forward(p, bc), 1.0)
        assert result.W == pytest.approx(2.0, abs=1e-3)
        assert reconstruction_error(result.solution, p) <= 0.05
        assert np.max(result.solution.condition_numbers) < 1e6

        reporter = ToolkitReporter(ResultCollector(tmp_path / "roundtrip.json", 'json'))
        checks = reporter.intermediate_checks(p, bc, result)
        assert checks['F_relative_error'] < 1e-5
        assert checks['reflection_residual'] < 1e-7

    @pytest.mark.slow
    def test_distinct_data_give_distinct_potentials(self):
        depths = (2.0, 6.0)
        wells = [Potential.square_well(v, 1.0) for v in depths]
        results = [reconstruct(DSource.builtin('square_well', {'v': v}, cot_theta=1.0), 1.0) for v in depths]
        errors = []
        for p, result in zip(wells, results):
            assert np.max(result.solution.condition_numbers) < 1e6
            # absolute L1 error on the support
            errors.append(reconstruction_error(result.solution, p) * potential_l1_norm(p))
        first, second = (r.solution for r in results)
        np.testing.assert_array_equal(first.x_grid, second.x_grid)
        dx = first.x_grid[1] - first.x_grid[0]
        separation = np.sum(np.abs(first.V_recovered - second.V_recovered)) * dx
        assert separation >= 10.0 * max(errors)
