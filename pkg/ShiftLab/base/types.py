from __future__ import annotations

from typing_extensions import NotRequired, TypedDict


class TSDHypothesis(TypedDict):
    type_: str
    params: dict


class TSDProgramGraph(TypedDict):
    levels: int
    mode: str
    eta: NotRequired[float]
    learner: str
    params: dict


class TSDProgramNode(TypedDict):
    type_: str
    pos: list[int]  # Actually tuple[int, int], (i, t)
    label: int
    q_hat: NotRequired[float]
    distinguisher: NotRequired[dict]
    hypothesis: NotRequired[TSDHypothesis]
    estimates: dict


TSDConnections = TypedDict(
    "TSDConnections",
    {
        "in": list[str],  # [node_id, port_name]
        "out": list[str],
    }
)


class TSerializedProgram(TypedDict):
    graph: TSDProgramGraph
    nodes: dict[str, TSDProgramNode]
    connections: NotRequired[list[TSDConnections]]


class TSDStage(TypedDict):
    basis: list[list[float]]
    matrix: list[list[float]]
    w_hat: list[float]
    gamma: float


class TSerializedHalfspaceClassifier(TypedDict):
    dimension: int
    lifted: bool
    stages: list[TSDStage]


class TSDScenario(TypedDict):
    k: int
    train: list[float]
    test: list[float]
    concept: list[int]
    # "lambda" is reserved, read with .get()
    flip_rate: NotRequired[float]


class TSDReport(TypedDict):
    schema_version: int
    version: str
    config: dict
    aggregate: dict[str, dict[str, float]]
    statuses: dict[str, int]
    trials: list[dict]
