import json

import numpy as np
import pytest

from transmission_eigen_toolkit.models.exceptions import PotentialValidationError
from transmission_eigen_toolkit.potential.io import (
    boundary_from_dict,
    boundary_to_dict,
    load_potential,
    potential_from_dict,
    save_potential,
)
from transmission_eigen_toolkit.potential.model import (
    BoundaryCondition,
    Delta,
    Potential,
    Segment,
    breakpoints,
    evaluate,
    evaluate_many,
    moment_W,
    potential_l1_norm,
    validate,
)


def test_square_well_is_class_a(unit_well):
    report = validate(unit_well)
    assert report.is_class_A
    assert not report.has_deltas


def test_delta_potential_is_flagged(spike):
    report = validate(spike)
    assert not report.is_class_A
    assert report.has_deltas
    assert report.messages


def test_overlapping_segments_rejected():
    p = Potential(support_b=1.0, segments=(Segment(0.0, 0.6, 1.0), Segment(0.5, 1.0, 2.0)))
    with pytest.raises(PotentialValidationError):
        validate(p)


@pytest.mark.parametrize("a", [0.0, 1.0, 1.5])
def test_delta_outside_support_rejected(a):
    with pytest.raises(PotentialValidationError):
        validate(Potential(support_b=1.0, deltas=(Delta(a, 1.0),)))


def test_segment_beyond_support_rejected():
    with pytest.raises(PotentialValidationError):
        validate(Potential(support_b=1.0, segments=(Segment(0.0, 1.2, 1.0),)))


def test_nonuniform_samples_rejected():
    p = Potential.tabulated([0.0, 0.2, 0.7, 1.0], [1.0, 2.0, 3.0, 4.0])
    with pytest.raises(PotentialValidationError):
        validate(p)


def test_two_step_values(two_step):
    assert evaluate(two_step, 0.25) == 1.0
    assert evaluate(two_step, 0.75) == -1.0
    assert evaluate(two_step, 1.5) == 0.0
    assert evaluate(two_step, -0.1) == 0.0


def test_evaluate_many_matches_pointwise(staircase):
    xs = np.linspace(-0.5, 1.5, 41)
    expected = [evaluate(staircase, x) for x in xs]
    np.testing.assert_array_equal(evaluate_many(staircase, xs), expected)


def test_samples_interpolate_linearly():
    p = Potential.tabulated(np.linspace(0.0, 1.0, 5), [0.0, 1.0, 2.0, 3.0, 4.0])
    assert evaluate(p, 0.375) == pytest.approx(1.5)


def test_moment_of_square_well():
    p = Potential.square_well(16.0 * np.pi ** 2, 1.0)
    assert moment_W(p) == pytest.approx(16.0 * np.pi ** 2)


def test_moment_of_two_step_vanishes(two_step):
    assert moment_W(two_step) == pytest.approx(0.0, abs=1e-15)


def test_moment_counts_delta_strength(spike):
    assert moment_W(spike) == pytest.approx(2.0)


def test_l1_norm(staircase, spike):
    assert potential_l1_norm(staircase) == pytest.approx(0.3 * 2.0 + 0.4 * 1.5 + 0.3 * 0.5)
    assert potential_l1_norm(Potential.delta(0.5, -3.0)) == pytest.approx(3.0)


def test_breakpoints(staircase, spike):
    np.testing.assert_allclose(breakpoints(staircase), [0.0, 0.3, 0.7, 1.0])
    np.testing.assert_allclose(breakpoints(spike), [0.0, 0.5, 1.0])


def test_boundary_condition_modes():
    assert BoundaryCondition.dirichlet().is_dirichlet
    assert not BoundaryCondition.non_dirichlet(-2.0).is_dirichlet
    with pytest.raises(PotentialValidationError):
        BoundaryCondition.non_dirichlet(float('inf'))


def test_potential_file_roundtrip(tmp_path, staircase):
    path = tmp_path / "staircase.json"
    save_potential(staircase, path)
    loaded = load_potential(path)
    assert loaded.support_b == staircase.support_b
    assert loaded.segments == staircase.segments


def test_potential_from_dict_with_delta():
    p = potential_from_dict({'b': 1.0, 'deltas': [{'a': 0.5, 'c': 2.0}]})
    assert p.deltas == (Delta(0.5, 2.0),)


@pytest.mark.parametrize("data", [
    {'segments': [{'x0': 0.0, 'x1': 1.0, 'v': 1.0}]},
    {'b': 1.0, 'segments': [{'x0': 0.0, 'x1': 1.0}]},
    {'b': 1.0, 'unknown': 3},
    {'b': 1.0, 'samples': {'xs': [0.0, 1.0], 'vs': [1.0]}},
])
def test_malformed_potential_files(data):
    with pytest.raises(PotentialValidationError):
        potential_from_dict(data)


def test_missing_and_broken_files(tmp_path):
    with pytest.raises(PotentialValidationError):
        load_potential(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(PotentialValidationError):
        load_potential(broken)


def test_boundary_condition_dicts():
    assert boundary_from_dict({'type': 'dirichlet'}).is_dirichlet
    bc = boundary_from_dict({'type': 'non-dirichlet', 'cot_theta': -2.0})
    assert bc.cot_theta == -2.0
    assert boundary_to_dict(bc) == {'type': 'non-dirichlet', 'cot_theta': -2.0}
    assert json.loads(json.dumps(boundary_to_dict(BoundaryCondition.dirichlet()))) == {'type': 'dirichlet'}
    with pytest.raises(PotentialValidationError):
        boundary_from_dict({'type': 'robin', 'cot_theta': 1.0})
