import json
import logging

import numpy as np
import pandas as pd
import pytest

from transmission_eigen_toolkit import main as cli
from transmission_eigen_toolkit.benchmarks.catalog import REPORT_COLUMNS, BenchmarkReport
from transmission_eigen_toolkit.inverse.datum import DSource
from transmission_eigen_toolkit.models.exceptions import PotentialValidationError
from transmission_eigen_toolkit.models.run_config import RunConfig
from transmission_eigen_toolkit.potential.io import save_potential
from transmission_eigen_toolkit.utils.data_collector import KEY_QUANTITY_COLUMNS


@pytest.fixture
def well_file(tmp_path, unit_well):
    path = tmp_path / "well.json"
    save_potential(unit_well, path)
    return str(path)


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    monkeypatch.delenv('TEIG_THREADS', raising=False)


def last_error(capsys):
    lines = [line for line in capsys.readouterr().err.splitlines() if line.strip()]
    return json.loads(lines[-1])


def test_forward_writes_grid(tmp_path, well_file):
    out = tmp_path / "forward.csv"
    status = cli.main(['forward', '--potential', well_file, '--cot-theta', '0.7',
                       '--k-max', '5', '--grid', '11', '--out', str(out)])
    assert status == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == KEY_QUANTITY_COLUMNS
    assert len(frame) == 11
    assert frame['k_re'].iloc[-1] == 5.0
    assert np.max(np.abs(frame['D_im'])) < 1e-10


def test_forward_json_format(tmp_path, well_file):
    out = tmp_path / "forward.json"
    assert cli.main(['forward', '--potential', well_file, '--dirichlet', '--grid', '5',
                     '--format', 'json', '--plot', '--out', str(out)]) == 0
    assert (tmp_path / "forward.png").exists()
    rows = json.loads(out.read_text())
    assert len(rows) == 5
    assert set(rows[0]) == set(KEY_QUANTITY_COLUMNS)


def test_eigs_writes_table_and_hadamard(tmp_path, well_file):
    out = tmp_path / "eigs.csv"
    status = cli.main(['eigs', '--potential', well_file, '--cot-theta', '0.7',
                       '--k-max', '10', '--beta-max', '3', '--plot', '--out', str(out)])
    assert status == 0
    frame = pd.read_csv(out)
    assert len(frame) > 0
    assert (frame['residual'] < 1e-6).all()
    assert (tmp_path / "eigs.png").exists()
    hadamard = json.loads((tmp_path / "eigs_hadamard.json").read_text())
    assert hadamard['b'] == 1.0
    assert len(hadamard['zeros']) == len(frame) - int((frame['kind'] == 'zero').sum())


def test_inverse_from_file(tmp_path):
    source = tmp_path / "inverse.json"
    source.write_text(json.dumps({'cot_theta': -1.0, 'D': {'type': 'builtin', 'name': 'zero'}}))
    out = tmp_path / "recon.json"
    status = cli.main(['inverse', '--input', str(source), '--dx', '0.05', '--grid', '256', '--plot', '--out', str(out)])
    assert status == 0
    result = json.loads(out.read_text())
    assert set(result) == {'W', 'F0', 'bound_states', 'V'}
    assert result['bound_states'] == []
    assert len(result['V']['xs']) == len(result['V']['vs'])
    assert (tmp_path / "recon.png").exists()
    diagnostics = pd.read_csv(tmp_path / "recon_diagnostics.csv")
    assert 'W' in diagnostics['quantity'].tolist()


def test_example_prints_summary(tmp_path, capsys):
    out = tmp_path / "example.csv"
    assert cli.main(['example', '6.1a', '--out', str(out)]) == 0
    assert "example 6.1a: PASS" in capsys.readouterr().out
    assert list(pd.read_csv(out).columns) == REPORT_COLUMNS


@pytest.mark.slow
def test_roundtrip_report(tmp_path):
    path = tmp_path / "well.json"
    path.write_text(json.dumps({'b': 1.0, 'segments': [{'x0': 0.0, 'x1': 1.0, 'v': 2.0}]}))
    out = tmp_path / "roundtrip.json"
    assert cli.main(['roundtrip', '--potential', str(path), '--cot-theta', '1.0', '--out', str(out)]) == 0
    report = json.loads(out.read_text())
    assert report['passed']
    assert report['W_error'] < 1e-3
    assert report['F_relative_error'] < 1e-3


def test_missing_potential_file_exits_2(tmp_path, capsys):
    status = cli.main(['forward', '--potential', str(tmp_path / "absent.json"), '--cot-theta', '0',
                       '--out', str(tmp_path / "d.csv")])
    assert status == 2
    payload = last_error(capsys)
    assert payload['error'] == 'PotentialValidationError'
    assert payload['exit_code'] == 2
    assert payload['stage'] == 'forward'


@pytest.mark.parametrize("argv", [
    ['forward', '--cot-theta', '0'],
    ['roundtrip', '--potential', 'p.json', '--dirichlet'],
    ['example'],
    ['example', '9.9'],
    ['eigs', '--potential', 'p.json', '--cot-theta', '1', '--rect', '1,0,0,1'],
    ['forward', '--potential', 'p.json', '--cot-theta', '1', '--dirichlet'],
    ['solve'],
])
def test_argument_errors_exit_2(argv, capsys):
    assert cli.main(argv) == 2
    assert last_error(capsys)['exit_code'] == 2


def test_failed_example_exits_3(monkeypatch, tmp_path, capsys):
    table = pd.DataFrame([{'quantity': 'D0', 'reference': 1.0, 'computed': 2.0, 'abs_deviation': 1.0,
                           'rel_deviation': 1.0, 'tolerance': 1e-8, 'passed': False}], columns=REPORT_COLUMNS)
    report = BenchmarkReport(table=table, summary={'id': '6.1a', 'description': '', 'passed': False,
                                                   'max_rel_deviation': 1.0, 'rows': 1})
    monkeypatch.setattr(cli, 'run_benchmark', lambda benchmark_id: report)
    assert cli.main(['example', '6.1a', '--out', str(tmp_path / "e.csv")]) == 3
    payload = last_error(capsys)
    assert payload['error'] == 'AccuracyError'
    assert payload['details']['failed'] == ['D0']


def test_inconsistent_datum_exits_4(monkeypatch, tmp_path, capsys):
    odd = DSource.closed(lambda k: np.asarray(k, dtype=complex), label='odd')
    monkeypatch.setattr(cli, 'load_inverse_input', lambda path: (odd, 1.0))
    assert cli.main(['inverse', '--input', 'ignored.json', '--out', str(tmp_path / "r.json")]) == 4
    payload = last_error(capsys)
    assert payload['error'] == 'DatumInconsistencyError'
    assert payload['stage'] == 'probe'


def test_invalid_thread_count(monkeypatch, tmp_path, well_file, capsys):
    monkeypatch.setenv('TEIG_THREADS', 'many')
    assert cli.main(['forward', '--potential', well_file, '--cot-theta', '0',
                     '--out', str(tmp_path / "d.csv")]) == 2
    assert 'TEIG_THREADS' in last_error(capsys)['message']


def test_thread_count_is_logged(monkeypatch, tmp_path, well_file, caplog):
    monkeypatch.setenv('TEIG_THREADS', '3')
    rc = RunConfig(command='forward', out=str(tmp_path / "d.csv"), potential_path=well_file, cot_theta=0.0)
    with caplog.at_level(logging.INFO):
        assert cli.run(rc, cli.load_config()) == 0
    assert any('on 3 thread(s)' in r.getMessage() for r in caplog.records)


def test_config_override(tmp_path, well_file):
    config = tmp_path / "config.yaml"
    config.write_text("forward:\n  grid_points: 7\n")
    out = tmp_path / "d.csv"
    assert cli.main(['forward', '--potential', well_file, '--cot-theta', '0', '--config', str(config),
                     '--out', str(out)]) == 0
    assert len(pd.read_csv(out)) == 7


def test_missing_config_file(tmp_path):
    with pytest.raises(PotentialValidationError):
        cli.load_config(str(tmp_path / "absent.yaml"))


class TestRunConfig:
    def test_boundary_condition_and_search(self):
        rc = RunConfig(command='eigs', out='o.csv', potential_path='p.json', cot_theta=0.5,
                       k_max=12.0, rect='0.1,5,0.1,2')
        assert rc.boundary_condition.cot_theta == 0.5
        search = rc.search_params(cli.load_config()['spectra'])
        assert search.k_max == 12.0
        assert search.rect == (0.1, 5.0, 0.1, 2.0)
        assert search.beta_max == 20.0

    def test_dirichlet_mode(self):
        rc = RunConfig(command='forward', out='o.csv', potential_path='p.json', dirichlet=True)
        assert rc.boundary_condition.is_dirichlet

    def test_inverse_needs_input(self):
        with pytest.raises(ValueError):
            RunConfig(command='inverse', out='o.json')

    def test_nonpositive_values(self):
        with pytest.raises(ValueError):
            RunConfig(command='example', out='o.csv', example_id='6.1a', dx=0.0)
