import csv
import glob
import importlib.util
import json
import os

import numpy as np
import pytest

from ShiftLab.base.pointio import write_points
from ShiftLab.errors import ConfigInvalidError, UnknownScenarioError
from ShiftLab.harness import runner
from ShiftLab.harness.cli import main
from ShiftLab.harness.config import ExperimentConfig
from ShiftLab.harness.runner import check_points, run_experiment, splitmix64, trial_seeds
from ShiftLab.harness.scenarios import generate_scenario

CONFIG_DIR = os.path.join(os.path.dirname(__file__), os.pardir, 'configs')

CROSS = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]

DISJOINT = {
    'name': 'discrete-k',
    'k': 4,
    'train': [0.5, 0.5, 0.0, 0.0],
    'test': [0.0, 0.0, 0.5, 0.5],
    'concept': [1, 1, 1, 1],
}

FAST_DISTINGUISHER = {
    'repetitions_override': 20,
    'candidates_override': 3,
    'attempts_override': 20,
    'evaluations_override': 500,
    'confirm_margin': 0.25,
}


def _weakdist(tmp_path, **overrides):
    data = {
        'mode': 'weakdist',
        'scenario': DISJOINT,
        'seed': 7,
        'trials': 3,
        'learner': {'type': 'support', 'm': 4},
        'distinguisher': FAST_DISTINGUISHER,
        'out': str(tmp_path),
    }
    data.update(overrides)
    return ExperimentConfig.from_dict(data)


@pytest.fixture
def cross_file(tmp_path):
    path = str(tmp_path / 'cross.csv')
    write_points(path, CROSS)
    return path


class TestSeeds:

    def test_splitmix64_reference(self):
        state, first = splitmix64(0)
        _, second = splitmix64(state)
        assert first == 0xE220A8397B1DCDAF
        assert second == 0x6E789E6AA1B965F4

    def test_trial_seeds(self):
        seeds = trial_seeds(2024, 5)
        assert len(set(seeds)) == 5
        assert trial_seeds(2024, 3) == seeds[:3]
        assert all(0 <= s < 2 ** 64 for s in seeds)


class TestConfig:

    def test_defaults(self):
        config = ExperimentConfig.from_dict({'mode': 'forster-check'})
        assert config.trials == 1
        assert config.to_dict['eps'] == 0.1

    def test_overrides_win(self):
        config = ExperimentConfig.from_dict(
            {'mode': 'weakdist', 'scenario': DISJOINT, 'seed': 1}, seed=9, trials=None)
        assert config.seed == 9
        assert config.trials == 1

    @pytest.mark.parametrize('data', [
        {'mode': 'weakdist', 'scenario': DISJOINT, 'colour': 'blue'},
        {'mode': 'nope'},
        {'mode': 'weakdist'},
        {'mode': 'weakdist', 'scenario': DISJOINT, 'eps': 1.5},
        {'mode': 'weakdist', 'scenario': DISJOINT, 'seed': -1},
        {'mode': 'weakdist', 'scenario': DISJOINT, 'boost': {'speed': 2}},
        {'scenario': DISJOINT},
    ])
    def test_invalid(self, data):
        with pytest.raises(ConfigInvalidError):
            ExperimentConfig.from_dict(data)

    def test_load(self, tmp_path):
        path = tmp_path / 'config.json'
        path.write_text(json.dumps({'mode': 'weakdist', 'scenario': DISJOINT}))
        assert ExperimentConfig.load(str(path), trials=4).trials == 4
        with pytest.raises(ConfigInvalidError):
            ExperimentConfig.load(str(tmp_path / 'missing.json'))
        path.write_text('[1, 2]')
        with pytest.raises(ConfigInvalidError):
            ExperimentConfig.load(str(path))


class TestScenarios:

    def test_sphere_uniform(self, rng):
        scenario = generate_scenario('sphere-uniform', {'n': 3}, rng)
        points = scenario.train.draw(rng, 500)
        np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0)
        assert scenario.dimension == 3
        assert np.linalg.norm(scenario.target) == pytest.approx(1.0)

    def test_boundary_concentrated(self, rng):
        scenario = generate_scenario('boundary-concentrated', {'n': 4, 'margin': 0.01}, rng)
        points = scenario.test.draw(rng, 5000)
        np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0)
        assert np.all(np.abs(points @ scenario.target) <= 0.01)

    def test_gaussian_normalized(self, rng):
        scenario = generate_scenario('gaussian-normalized', {'n': 3, 'target': [0, 0, 2]}, rng)
        np.testing.assert_allclose(scenario.target, [0.0, 0.0, 1.0])
        points = scenario.train.draw(rng, 1000)
        np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0)
        # the first axis carries most of the mass
        assert np.mean(points[:, 0] ** 2) > 0.5

    def test_subspace_concentrated(self, rng):
        scenario = generate_scenario('subspace-concentrated', {'n': 3, 'd': 1, 'mass': 1.0}, rng)
        points = scenario.train.draw(rng, 100)
        assert np.linalg.matrix_rank(points, tol=1e-9) == 1
        with pytest.raises(ConfigInvalidError):
            generate_scenario('subspace-concentrated', {'n': 3, 'd': 3}, rng)

    def test_discrete_k_echoes_tables(self, rng):
        scenario = generate_scenario('discrete-k', {k: v for k, v in DISJOINT.items()
                                                    if k != 'name'}, rng)
        assert scenario.params['train'] == DISJOINT['train']
        assert scenario.params['concept'] == DISJOINT['concept']
        assert scenario.domain.k == 4

    def test_unknown(self, rng):
        with pytest.raises(UnknownScenarioError):
            generate_scenario('moon-landing', {}, rng)
        with pytest.raises(ConfigInvalidError):
            generate_scenario('sphere-uniform', {'radius': 2}, rng)


class TestRunExperiment:

    def test_forster_check_cross(self, tmp_path, cross_file):
        config = ExperimentConfig.from_dict({
            'mode': 'forster-check', 'forster': {'points': cross_file}, 'out': str(tmp_path)})
        report = run_experiment(config)
        assert report.trials[0]['verdict'] == 'isotropic, eps=0'
        assert report.trials[0]['metrics']['transformed'] == 0.0
        assert (tmp_path / 'forster-check.csv').exists()
        assert (tmp_path / 'forster-check.timing.json').exists()

    def test_check_points_subspace(self, rng):
        line = np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
        rest = rng.standard_normal((10, 3))
        points = np.vstack([np.repeat(line, 45, axis=0),
                            rest / np.linalg.norm(rest, axis=1, keepdims=True)])
        metrics, verdict = check_points(points, 0.5)
        assert verdict == 'subspace, dim=1'
        assert metrics['isotropic'] == 0

    def test_csv_is_reproducible(self, tmp_path):
        first = run_experiment(_weakdist(tmp_path / 'a'))
        run_experiment(_weakdist(tmp_path / 'b'))
        run_experiment(_weakdist(tmp_path / 'c', workers=2))
        csv_bytes = (tmp_path / 'a' / 'weakdist.csv').read_bytes()
        assert (tmp_path / 'b' / 'weakdist.csv').read_bytes() == csv_bytes
        assert (tmp_path / 'c' / 'weakdist.csv').read_bytes() == csv_bytes
        json_text = (tmp_path / 'a' / 'weakdist.json').read_text()
        assert (tmp_path / 'b' / 'weakdist.json').read_text() == json_text
        assert first.statuses == {'ok': 3, 'error': 0, 'budget': 0}

    def test_csv_layout(self, tmp_path):
        report = run_experiment(_weakdist(tmp_path, trials=2))
        with open(str(tmp_path / 'weakdist.csv')) as csv_file:
            rows = list(csv.reader(csv_file))
        assert rows[0] == ['trial', 'metric', 'value']
        assert rows[1] == ['0', 'status', 'ok']
        assert report.aggregate['success']['count'] == 2
        data = json.loads((tmp_path / 'weakdist.json').read_text())
        assert data['schema_version'] == 1
        assert 'elapsed' not in data['trials'][0]

    def test_module_errors_are_recorded(self, tmp_path):
        path = str(tmp_path / 'wide.csv')
        write_points(path, [[2.0, 0.0], [0.0, 1.0]])
        config = ExperimentConfig.from_dict({
            'mode': 'forster-check', 'forster': {'points': path}, 'trials': 2,
            'out': str(tmp_path)})
        report = run_experiment(config, write=False)
        assert report.statuses['error'] == 2
        assert report.trials[0]['error'].startswith('NonUnitInputError')
        assert report.aggregate == {}

    def test_unexpected_errors_are_recorded(self, tmp_path, monkeypatch):
        calls = []
        weakdist = runner.PIPELINES['weakdist']

        def singular_once(config, scenario, rng):
            calls.append(scenario)
            if len(calls) == 1:
                raise np.linalg.LinAlgError('Singular matrix')
            return weakdist(config, scenario, rng)

        monkeypatch.setitem(runner.PIPELINES, 'weakdist', singular_once)
        report = run_experiment(_weakdist(tmp_path), write=False)
        assert report.statuses == {'ok': 2, 'error': 1, 'budget': 0}
        assert report.trials[0]['error'] == 'LinAlgError: Singular matrix'
        assert report.aggregate['success']['count'] == 2

    def test_wall_time_budget(self, tmp_path):
        report = run_experiment(_weakdist(tmp_path, trials=1, wall_time=1e-3), write=False)
        assert report.statuses['budget'] == 1
        assert report.trials[0]['error'].startswith('trial exceeded')

    def test_unspent_wall_time_keeps_csv(self, tmp_path):
        timed = run_experiment(_weakdist(tmp_path / 'timed', wall_time=60.0))
        run_experiment(_weakdist(tmp_path / 'free'))
        assert timed.statuses == {'ok': 3, 'error': 0, 'budget': 0}
        assert ((tmp_path / 'timed' / 'weakdist.csv').read_bytes()
                == (tmp_path / 'free' / 'weakdist.csv').read_bytes())

    def test_tdsboost_disjoint(self, tmp_path):
        config = ExperimentConfig.from_dict({
            'mode': 'tdsboost',
            'scenario': DISJOINT,
            'trials': 2,
            'n_eval': 2000,
            'learner': {'type': 'support', 'm': 4},
            'boost': {'t_max': 6, 'gamma1': 0.02, 'accept_gamma': 0.05},
            'distinguisher': FAST_DISTINGUISHER,
            'out': str(tmp_path),
        })
        report = run_experiment(config)
        assert report.statuses['ok'] == 2
        assert report.aggregate['selective_error']['mean'] <= 0.5
        assert report.aggregate['exact_selective_error']['mean'] <= 0.5
        assert report.trials[0]['verdict'] == 'root=internal'

    def test_pq_halfspace(self, tmp_path):
        config = ExperimentConfig.from_dict({
            'mode': 'pq-halfspace',
            'scenario': {'name': 'sphere-uniform', 'n': 2},
            'trials': 2,
            'n_eval': 2000,
            'halfspace': {'train_size': 200, 'sample_count': 20000},
            'out': str(tmp_path),
        })
        report = run_experiment(config, write=False)
        assert report.statuses['ok'] == 2
        assert report.aggregate['selective_error']['mean'] == 0.0
        assert report.aggregate['adversarial_error']['mean'] == 0.0
        assert report.aggregate['train_rejection_rate']['mean'] < 0.05


class TestCli:

    def test_forster_check(self, capsys, cross_file):
        assert main(['forster', 'check', cross_file, '-q']) == 0
        out = capsys.readouterr().out
        assert out.strip().splitlines()[-1] == 'isotropic, eps=0'

    def test_run(self, tmp_path, capsys):
        path = tmp_path / 'config.json'
        path.write_text(json.dumps({'mode': 'tdsboost', 'scenario': DISJOINT,
                                    'learner': {'type': 'support', 'm': 4},
                                    'distinguisher': FAST_DISTINGUISHER}))
        out_dir = tmp_path / 'out'
        status = main(['weakdist', '--config', str(path), '--out', str(out_dir),
                       '--trials', '2', '--seed', '3', '-q'])
        assert status == 0
        assert (out_dir / 'weakdist.csv').exists()
        assert 'statuses: ok=2' in capsys.readouterr().out

    def test_invalid_config(self, tmp_path):
        path = tmp_path / 'config.json'
        path.write_text(json.dumps({'mode': 'weakdist', 'scenario': DISJOINT, 'bogus': 1}))
        assert main(['weakdist', '--config', str(path), '-q']) == 2
        assert main(['weakdist', '--config', str(tmp_path / 'missing.json'), '-q']) == 2


class TestShippedConfigs:

    @pytest.mark.parametrize('path', sorted(glob.glob(os.path.join(CONFIG_DIR, '*.json'))))
    def test_valid(self, path):
        config = ExperimentConfig.load(path)
        assert config.out.startswith('results')

    def test_cross_config(self, tmp_path, monkeypatch):
        monkeypatch.chdir(os.path.join(CONFIG_DIR, os.pardir))
        config = ExperimentConfig.load(os.path.join('configs', 'forster_cross.json'),
                                       out=str(tmp_path))
        report = run_experiment(config, write=False)
        assert report.trials[0]['verdict'] == 'isotropic, eps=0'
        assert report.trials[0]['metrics']['min_anticoncentration'] >= 0.125

    def test_dev_checker(self):
        root = os.path.realpath(os.path.join(CONFIG_DIR, os.pardir))
        spec = importlib.util.spec_from_file_location(
            'check_configs', os.path.join(root, 'dev', 'check_configs.py'))
        checker = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(checker)
        files = list(checker.get_config_files(os.path.join(root, 'configs')))
        assert files
        assert all(checker.check_config(path, root) == [] for path in files)
