#!/usr/bin/python
"""
Branching program built by the booster.

Nodes sit on a triangular grid ``(i, t)`` with ``1 <= i <= t <= T``.
Internal nodes route a point to ``(i + bit, t + 1)`` where ``bit`` is the
balanced output of their distinguisher; leaves hold the selector label and
the hypothesis used for selected points.
"""
from __future__ import annotations

import json
import logging

import numpy as np

from ShiftLab.base.factory import ClassFactory, Registrable
from ShiftLab.base.selective import (
    ConstantHypothesis,
    MajorityHypothesis,
    SelectiveClassifier,
    hypothesis_from_dict,
)
from ShiftLab.base.types import TSDProgramNode, TSerializedProgram
from ShiftLab.boosting.balance import balance_many
from ShiftLab.boosting.weak_distinguisher import (
    ConstantDistinguisher,
    TableDistinguisher,
    WeakDistinguisher,
)
from ShiftLab.constants import BoostModeEnum, NodeKindEnum, PortTypeEnum
from ShiftLab.errors import SerializationError

logger = logging.getLogger(__name__)


def node_id(i, t):
    """
    Document key of node ``(i, t)``.
    """
    return '{}:{}'.format(i, t)


def parse_node_id(key):
    i, t = key.split(':')
    return int(i), int(t)


# ================================== NODES =====================================


class ProgramNode(Registrable):
    """
    Base class of the program nodes.

    Args:
        pos (tuple[int, int]): grid position ``(i, t)``.
        estimates (dict): estimates recorded while the node was built.
    """

    __identifier__ = 'ShiftLab.nodes'

    KIND = None
    is_leaf = True

    def __init__(self, pos, estimates=None):
        self.pos = (int(pos[0]), int(pos[1]))
        self.estimates = dict(estimates or {})

    def __repr__(self):
        return '<{}({}) object at {}>'.format(
            self.__class__.__name__, self.id, hex(id(self)))

    @property
    def id(self):
        return node_id(*self.pos)

    @property
    def i(self):
        return self.pos[0]

    @property
    def t(self):
        return self.pos[1]

    @property
    def label(self):
        return 0

    @property
    def hypothesis(self):
        return ConstantHypothesis(1)

    @property
    def to_dict(self) -> TSDProgramNode:
        """
        serialize the node.

        Returns:
            dict: node document eg.
                {
                    'type_': 'ShiftLab.nodes.RareLeafNode',
                    'pos': [2, 3],
                    'label': 0,
                    'estimates': {'p_train': 0.0004, 'p_test': 0.12}
                }
        """
        return {
            'type_': self.type_,
            'pos': list(self.pos),
            'label': self.label,
            'estimates': self.estimates,
        }

    @classmethod
    def from_dict(cls, data, learner, factory):
        return cls(data['pos'], estimates=data.get('estimates'))


class InternalNode(ProgramNode):
    """
    Routing node holding a distinguisher and the estimate ``q_hat`` of its
    one probability under the half/half mixture of the conditioned laws.
    """

    NODE_NAME = 'internal'
    KIND = NodeKindEnum.INTERNAL
    is_leaf = False

    def __init__(self, pos, distinguisher, q_hat, estimates=None):
        super(InternalNode, self).__init__(pos, estimates)
        self.distinguisher = distinguisher
        self.q_hat = float(q_hat)

    @property
    def label(self):
        return None

    @property
    def children(self):
        return (self.i, self.t + 1), (self.i + 1, self.t + 1)

    def route_bits(self, points, rng):
        """
        Balanced routing bits, 1 moves a point to ``(i + 1, t + 1)``.
        """
        return balance_many(self.q_hat, self.distinguisher.evaluate_many(points, rng), rng)

    @property
    def to_dict(self):
        data = super(InternalNode, self).to_dict
        data['q_hat'] = self.q_hat
        data['distinguisher'] = self.distinguisher.to_dict
        return data

    @classmethod
    def from_dict(cls, data, learner, factory):
        wd_data = data['distinguisher']
        _Distinguisher = factory.resolve(wd_data['type_'])
        if _Distinguisher is None:
            raise SerializationError('unknown distinguisher "{}"'.format(wd_data['type_']))
        distinguisher = _Distinguisher.from_dict(wd_data, learner)
        return cls(data['pos'], distinguisher, data['q_hat'], data.get('estimates'))


class RareLeafNode(ProgramNode):
    """
    Leaf rarely visited by one of the laws; labelled with the other one.
    """

    NODE_NAME = 'rare'
    KIND = NodeKindEnum.LEAF_RARE

    def __init__(self, pos, label, estimates=None):
        super(RareLeafNode, self).__init__(pos, estimates)
        self._label = int(label)

    @property
    def label(self):
        return self._label

    @classmethod
    def from_dict(cls, data, learner, factory):
        return cls(data['pos'], data['label'], data.get('estimates'))


class AcceptedLeafNode(ProgramNode):
    """
    Leaf where the learner accepts; selects and predicts with the majority
    of the accepting runs.
    """

    NODE_NAME = 'accepted'
    KIND = NodeKindEnum.LEAF_ACCEPTED

    def __init__(self, pos, hypothesis, estimates=None):
        super(AcceptedLeafNode, self).__init__(pos, estimates)
        self._hypothesis = hypothesis

    @property
    def label(self):
        return 1

    @property
    def hypothesis(self):
        return self._hypothesis

    @property
    def to_dict(self):
        data = super(AcceptedLeafNode, self).to_dict
        data['hypothesis'] = self._hypothesis.to_dict
        return data

    @classmethod
    def from_dict(cls, data, learner, factory):
        return cls(data['pos'], hypothesis_from_dict(data['hypothesis'], factory),
                   data.get('estimates'))


class LevelLeafNode(ProgramNode):
    """
    Last level leaf, selecting when ``i >= T / 2``.
    """

    NODE_NAME = 'level'
    KIND = NodeKindEnum.LEAF_LEVEL

    def __init__(self, pos, label, estimates=None):
        super(LevelLeafNode, self).__init__(pos, estimates)
        self._label = int(label)

    @property
    def label(self):
        return self._label

    @classmethod
    def from_dict(cls, data, learner, factory):
        return cls(data['pos'], data['label'], data.get('estimates'))


class AgnosticLeafNode(ProgramNode):
    """
    Agnostic mode leaf whose train mass is at most ``eta`` times its test
    mass; always abstains.
    """

    NODE_NAME = 'agnostic'
    KIND = NodeKindEnum.LEAF_AGNOSTIC


NODE_CLASSES = (InternalNode, RareLeafNode, AcceptedLeafNode, LevelLeafNode, AgnosticLeafNode)


def default_factory():
    """
    Factory holding every class a program document may reference.

    Returns:
        ClassFactory: registry.
    """
    from ShiftLab.learners.discrete import ThresholdHypothesis

    factory = ClassFactory()
    for cls in NODE_CLASSES:
        factory.register(cls)
    for cls in (ConstantHypothesis, MajorityHypothesis, ThresholdHypothesis,
                ConstantDistinguisher, TableDistinguisher, WeakDistinguisher):
        factory.register(cls)
    return factory


# ================================= PROGRAM ====================================


class BranchingProgram(object):
    """
    Triangular grid of program nodes.

    Args:
        levels (int): number of levels ``T``.
        mode (str): ``realizable`` or ``agnostic``.
        eta (float): agnostic threshold.
        learner (TdsLearner): learner the distinguishers call.
        params (dict): construction parameters, echoed in documents.
    """

    def __init__(self, levels, mode=BoostModeEnum.REALIZABLE.value, eta=None,
                 learner=None, params=None):
        if levels < 1:
            raise ValueError('a program needs at least one level')
        self._levels = int(levels)
        self.mode = mode
        self.eta = eta
        self.learner = learner
        self.params = dict(params or {})
        self._nodes = {}

    def __repr__(self):
        return '<{}(T={}, nodes={}) object at {}>'.format(
            self.__class__.__name__, self._levels, len(self._nodes), hex(id(self)))

    @property
    def levels(self):
        return self._levels

    @property
    def root(self):
        return self._nodes.get((1, 1))

    def add_node(self, node):
        """
        Args:
            node (ProgramNode): node to place at ``node.pos``.
        """
        i, t = node.pos
        if not 1 <= i <= t <= self._levels:
            raise ValueError('node position {} is off the grid'.format(node.pos))
        if node.pos in self._nodes:
            raise ValueError('node {} already placed'.format(node.id))
        if not node.is_leaf and t == self._levels:
            raise ValueError('internal node on the last level')
        self._nodes[node.pos] = node

    def node(self, i, t):
        return self._nodes.get((i, t))

    def all_nodes(self):
        """
        Returns:
            list[ProgramNode]: nodes ordered by level then index.
        """
        return [self._nodes[pos] for pos in sorted(self._nodes, key=lambda p: (p[1], p[0]))]

    def level_nodes(self, t):
        return [n for n in self.all_nodes() if n.t == t]

    def leaves(self):
        return [n for n in self.all_nodes() if n.is_leaf]

    def reachable(self):
        """
        Positions reachable from the root.
        """
        if self.root is None:
            return set()
        seen = {(1, 1)}
        frontier = [(1, 1)]
        while frontier:
            node = self._nodes.get(frontier.pop())
            if node is None or node.is_leaf:
                continue
            for child in node.children:
                if child not in seen:
                    seen.add(child)
                    frontier.append(child)
        return seen

    def validate(self):
        """
        Check the program is well formed: every reachable position holds a
        node, internal nodes only sit below the last level and every node
        satisfies ``i <= t``.

        Returns:
            list[str]: problems found, empty when well formed.
        """
        problems = []
        if self.root is None:
            return ['missing root']
        for pos in sorted(self.reachable()):
            node = self._nodes.get(pos)
            if node is None:
                problems.append('reachable position {} has no node'.format(node_id(*pos)))
                continue
            if node.i > node.t:
                problems.append('node {} has i > t'.format(node.id))
            if not node.is_leaf and node.t >= self._levels:
                problems.append('internal node {} on the last level'.format(node.id))
        return problems

    def route_many(self, points, rng, until_level=None):
        """
        Route points from the root with fresh coins per internal node.

        Args:
            points (np.ndarray): ``(size, n)`` points.
            rng (np.random.Generator): routing coins.
            until_level (int): stop when reaching this level.

        Returns:
            tuple[np.ndarray, np.ndarray]: final ``i`` and ``t`` of every point.
        """
        points = np.atleast_2d(points)
        size = len(points)
        index = np.ones(size, dtype=int)
        level = np.ones(size, dtype=int)
        last = self._levels if until_level is None else min(until_level, self._levels)
        for t in range(1, last):
            for node in self.level_nodes(t):
                if node.is_leaf:
                    continue
                rows = np.flatnonzero((level == t) & (index == node.i))
                if not len(rows):
                    continue
                bits = node.route_bits(points[rows], rng)
                index[rows] += bits
                level[rows] += 1
        return index, level

    def route(self, x, rng):
        """
        Returns:
            tuple[int, int]: leaf position reached by ``x``.
        """
        index, level = self.route_many(np.atleast_2d(x), rng)
        return int(index[0]), int(level[0])

    def connections(self):
        connections = []
        for node in self.all_nodes():
            if node.is_leaf:
                continue
            for port, child in enumerate(node.children):
                connections.append({
                    PortTypeEnum.OUT.value: [node.id, str(port)],
                    PortTypeEnum.IN.value: [node_id(*child), PortTypeEnum.IN.value],
                })
        return connections

    @property
    def to_dict(self) -> TSerializedProgram:
        """
        serialize the program to a dict.

        Returns:
            dict: ``{'graph': {...}, 'nodes': {id: data}, 'connections': [...]}``
        """
        serial_data: TSerializedProgram = {'graph': {}, 'nodes': {}, 'connections': []}
        serial_data['graph']['levels'] = self._levels
        serial_data['graph']['mode'] = self.mode
        if self.eta is not None:
            serial_data['graph']['eta'] = self.eta
        serial_data['graph']['learner'] = self.learner.type_ if self.learner else None
        serial_data['graph']['params'] = self.params

        for node in self.all_nodes():
            serial_data['nodes'][node.id] = node.to_dict
        serial_data['connections'] = self.connections()

        if not serial_data['connections']:
            serial_data.pop('connections')
        return serial_data

    @property
    def serial(self):
        return json.dumps(self.to_dict, indent=2, separators=(',', ':'))

    @classmethod
    def from_dict(cls, data: TSerializedProgram, learner, factory=None):
        """
        Rebuild a program. Distinguishers are bound to ``learner``; the
        document only records its type.

        Args:
            data (dict): program document.
            learner (TdsLearner): learner to bind.
            factory (ClassFactory): class registry, see :func:`default_factory`.

        Returns:
            BranchingProgram: program.
        """
        factory = factory or default_factory()
        graph = data.get('graph', {})
        expected = graph.get('learner')
        if expected and learner is not None and learner.type_ != expected:
            raise SerializationError(
                'program was built with "{}", got "{}"'.format(expected, learner.type_))
        program = cls(graph['levels'], graph.get('mode', BoostModeEnum.REALIZABLE.value),
                      graph.get('eta'), learner, graph.get('params'))
        for key, node_data in data.get('nodes', {}).items():
            _Node = factory.resolve(node_data['type_'])
            if _Node is None:
                raise SerializationError('unknown node type "{}"'.format(node_data['type_']))
            node = _Node.from_dict(node_data, learner, factory)
            if node.id != key:
                raise SerializationError('node key {} holds position {}'.format(key, node.id))
            program.add_node(node)
        connections = data.get('connections', [])
        if sorted(map(json.dumps, connections)) != sorted(map(json.dumps, program.connections())):
            raise SerializationError('connections do not match the internal nodes')
        return program


class BoostedSelectiveClassifier(SelectiveClassifier):
    """
    Randomized selective classifier: route ``x`` to a leaf, select with the
    leaf label and predict with the leaf hypothesis.
    """

    def __init__(self, program):
        self.program = program

    def __repr__(self):
        return '<{}({!r})>'.format(self.__class__.__name__, self.program)

    def evaluate_many(self, points, rng=None):
        if rng is None:
            raise ValueError('the boosted classifier needs a random generator')
        points = np.atleast_2d(points)
        index, level = self.program.route_many(points, rng)
        selected = np.zeros(len(points), dtype=bool)
        labels = np.ones(len(points), dtype=int)
        for leaf in self.program.leaves():
            rows = np.flatnonzero((index == leaf.i) & (level == leaf.t))
            if not len(rows):
                continue
            selected[rows] = leaf.label == 1
            labels[rows] = leaf.hypothesis.predict(points[rows])
        return selected, labels

    @property
    def to_dict(self):
        return self.program.to_dict
