import json

import numpy as np
import pytest

from ShiftLab.boosting.balance import balance_probability
from ShiftLab.boosting.program import (
    AcceptedLeafNode,
    BoostedSelectiveClassifier,
    BranchingProgram,
    InternalNode,
    LevelLeafNode,
    RareLeafNode,
    node_id,
    parse_node_id,
)
from ShiftLab.boosting.weak_distinguisher import ConstantDistinguisher, TableDistinguisher
from ShiftLab.errors import SerializationError
from ShiftLab.learners.discrete import HistogramTds, SupportTds, ThresholdHypothesis
from ShiftLab.learners.exact import exact_metrics, exact_node_masses

TABLE = [0.95, 0.9, 0.1, 0.05]


def _conditional(law, reach):
    mass = law * reach
    return mass / mass.sum()


def _full_triangle(levels, domain, table, learner=None):
    """
    Every position below the last level holds an internal node with the
    exact ``q_hat`` of its conditioned mixture.
    """
    program = BranchingProgram(levels, learner=learner)
    distinguisher = TableDistinguisher(table)
    for t in range(1, levels + 1):
        reach = exact_node_masses(program, domain)
        for i in range(1, t + 1):
            if t == levels:
                program.add_node(LevelLeafNode((i, t), 1 if i >= levels / 2 else 0))
                continue
            mass = reach[(i, t)]
            q = 0.5 * (np.dot(_conditional(domain.train, mass), table)
                       + np.dot(_conditional(domain.test, mass), table))
            program.add_node(InternalNode((i, t), distinguisher, q))
    return program


def _small_program(learner=None):
    program = BranchingProgram(3, learner=learner, params={'levels': 3})
    program.add_node(InternalNode((1, 1), TableDistinguisher(TABLE), 0.5))
    program.add_node(RareLeafNode((1, 2), 0, {'p_train': 0.0}))
    program.add_node(InternalNode((2, 2), TableDistinguisher([0.2, 0.8, 0.5, 0.5]), 0.6))
    program.add_node(AcceptedLeafNode((2, 3), ThresholdHypothesis(2, -1)))
    program.add_node(LevelLeafNode((3, 3), 1))
    return program


class TestNodeIds:

    def test_ids(self):
        assert node_id(2, 5) == '2:5'
        assert parse_node_id('2:5') == (2, 5)


class TestProgramShape:

    def test_grid_checks(self):
        program = BranchingProgram(3)
        with pytest.raises(ValueError):
            program.add_node(RareLeafNode((2, 1), 0))
        with pytest.raises(ValueError):
            program.add_node(InternalNode((1, 3), ConstantDistinguisher(), 0.5))
        program.add_node(RareLeafNode((1, 1), 0))
        with pytest.raises(ValueError):
            program.add_node(RareLeafNode((1, 1), 1))

    def test_validate(self):
        program = _small_program()
        assert program.validate() == []
        assert program.reachable() == {(1, 1), (1, 2), (2, 2), (2, 3), (3, 3)}
        broken = BranchingProgram(3)
        broken.add_node(InternalNode((1, 1), ConstantDistinguisher(), 0.5))
        broken.add_node(RareLeafNode((1, 2), 0))
        assert broken.validate() == ['reachable position 2:2 has no node']
        assert BranchingProgram(2).validate() == ['missing root']

    def test_listing(self):
        program = _small_program()
        assert [n.id for n in program.all_nodes()] == ['1:1', '1:2', '2:2', '2:3', '3:3']
        assert [n.id for n in program.leaves()] == ['1:2', '2:3', '3:3']
        assert [n.id for n in program.level_nodes(2)] == ['1:2', '2:2']
        assert program.root.children == ((1, 2), (2, 2))


class TestRouting:

    def test_forced_right_drift(self, rng):
        program = BranchingProgram(4)
        for t in range(1, 4):
            for i in range(1, t + 1):
                program.add_node(InternalNode((i, t), ConstantDistinguisher(1), 0.5))
        for i in range(1, 5):
            program.add_node(LevelLeafNode((i, 4), int(i >= 2)))
        index, level = program.route_many(np.zeros((100, 1)), rng)
        assert (index == 4).all()
        assert (level == 4).all()
        assert program.route(np.zeros(1), rng) == (4, 4)

    def test_until_level(self, rng):
        index, level = _small_program().route_many(np.zeros((10, 1)), rng, until_level=1)
        assert (index == 1).all()
        assert (level == 1).all()

    def test_empirical_leaf_frequencies(self, rng, disjoint_domain):
        program = _small_program()
        exact = exact_metrics(disjoint_domain, BoostedSelectiveClassifier(program))
        points = disjoint_domain.train_sampler.draw(rng, 100000)
        index, level = program.route_many(points, rng)
        for leaf in program.leaves():
            frequency = np.mean((index == leaf.i) & (level == leaf.t))
            assert abs(frequency - exact.leaf_masses[leaf.id][0]) <= 0.02

    def test_exact_reach_is_a_distribution(self, disjoint_domain):
        program = _small_program()
        reach = exact_node_masses(program, disjoint_domain)
        total = sum(reach[leaf.pos] for leaf in program.leaves())
        np.testing.assert_allclose(total, 1.0)
        expected = balance_probability(0.5, TABLE[0])
        assert reach[(2, 2)][0] == pytest.approx(expected)

    def test_martingale_separates_disjoint_laws(self, disjoint_domain):
        levels = 12
        program = _full_triangle(levels, disjoint_domain, np.array(TABLE))
        assert program.validate() == []
        reach = exact_node_masses(program, disjoint_domain)
        for node in program.all_nodes():
            if node.is_leaf:
                continue
            mass = reach[node.pos]
            ones = np.array([balance_probability(node.q_hat, p) for p in TABLE])
            advantage = (np.dot(_conditional(disjoint_domain.train, mass), ones)
                         - np.dot(_conditional(disjoint_domain.test, mass), ones))
            assert advantage >= 0.1
        metrics = exact_metrics(disjoint_domain, BoostedSelectiveClassifier(program))
        selected_test = sum(metrics.leaf_masses[leaf.id][1]
                            for leaf in program.leaves() if leaf.label == 1)
        assert metrics.rejection_rate + selected_test < 0.05


class TestBoostedClassifier:

    def test_needs_rng(self):
        with pytest.raises(ValueError):
            BoostedSelectiveClassifier(_small_program()).evaluate_many(np.zeros((1, 1)))

    def test_leaf_labels(self, rng):
        classifier = BoostedSelectiveClassifier(_small_program())
        points = np.repeat(np.arange(4.0), 200).reshape(-1, 1)
        selected, labels = classifier.evaluate_many(points, rng)
        assert selected.any() and not selected.all()
        # only the accepted leaf predicts -1, from bucket 2 on
        accepted_rows = selected & (labels == -1)
        assert (points[accepted_rows, 0] >= 2).all()


class TestProgramDocument:

    def test_document(self, rng):
        learner = SupportTds(k=4)
        program = _small_program(learner)
        data = json.loads(program.serial)
        assert data['graph']['learner'] == learner.type_
        assert len(data['connections']) == 4
        assert {'out': ['1:1', '1'], 'in': ['2:2', 'in']} in data['connections']

        rebuilt = BranchingProgram.from_dict(data, learner)
        assert rebuilt.to_dict == program.to_dict
        points = np.arange(4.0).reshape(4, 1)
        first = BoostedSelectiveClassifier(program).evaluate_many(
            points, np.random.default_rng(5))
        second = BoostedSelectiveClassifier(rebuilt).evaluate_many(
            points, np.random.default_rng(5))
        for expected, actual in zip(first, second):
            np.testing.assert_array_equal(expected, actual)

    def test_leaf_only_program_has_no_connections(self):
        program = BranchingProgram(1)
        program.add_node(RareLeafNode((1, 1), 1))
        assert 'connections' not in program.to_dict

    def test_learner_mismatch(self):
        data = _small_program(SupportTds(k=4)).to_dict
        with pytest.raises(SerializationError):
            BranchingProgram.from_dict(data, HistogramTds(k=4))

    def test_connection_mismatch(self):
        data = _small_program().to_dict
        data['connections'] = data['connections'][:-1]
        with pytest.raises(SerializationError):
            BranchingProgram.from_dict(data, None)

    def test_key_mismatch(self):
        data = _small_program().to_dict
        data['nodes']['9:9'] = data['nodes'].pop('3:3')
        with pytest.raises(SerializationError):
            BranchingProgram.from_dict(data, None)

    def test_unknown_node(self):
        data = _small_program().to_dict
        data['nodes']['3:3']['type_'] = 'ShiftLab.nodes.Nope'
        with pytest.raises(SerializationError):
            BranchingProgram.from_dict(data, None)
