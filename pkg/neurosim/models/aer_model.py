from typing_extensions import Self

from pydantic import Field, model_validator

from neurosim.models.quantity import FrozenModel, quantity


class AerEvent(FrozenModel):
    source_id: str
    t_req: float
    t_ack: float

    @model_validator(mode='after')
    def check_order(self) -> Self:
        if self.t_ack < self.t_req:
            raise ValueError('t_ack must not precede t_req')
        return self


class Edge(FrozenModel):
    source: str
    target: str
    weight: float = Field(default=1.0, gt=0)


class ConnectivityTable(FrozenModel):
    fanout: dict[str, list[tuple[str, float]]] = Field(default_factory=dict)

    @model_validator(mode='after')
    def check_weights(self) -> Self:
        for src, targets in self.fanout.items():
            for dst, weight in targets:
                if not weight > 0:
                    raise ValueError(f'weight of {src} -> {dst} must be > 0')
        return self

    @classmethod
    def from_edges(cls, sources: list[str], edges: list[Edge]) -> 'ConnectivityTable':
        fanout: dict[str, list[tuple[str, float]]] = {src: [] for src in sources}
        for edge in edges:
            fanout.setdefault(edge.source, []).append((edge.target, edge.weight))
        return cls(fanout=fanout)

    def targets(self) -> set[str]:
        return {dst for targets in self.fanout.values() for dst, _ in targets}


class ReceiverModel(FrozenModel):
    ack_delay: float = quantity('s', 10e-9, ge=0)
    ack_release_delay: float = quantity('s', 10e-9, ge=0)


class Delivery(FrozenModel):
    synapse_id: str
    t_start: float
    I_w: float
