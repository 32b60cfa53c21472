from collections.abc import Mapping

from neurosim.models.aer_model import AerEvent, ConnectivityTable, Delivery
from neurosim.models.generic_error import ProtocolViolation, RoutingError, err_unknown_source
from neurosim.models.neuron_model import HandshakePhase, HandshakeSignal, HandshakeState

# 四相握手：Req↑ Ack↑ Req↓ Ack↓，只允许这一条路径
TRANSITIONS: dict[tuple[HandshakePhase, HandshakeSignal], HandshakePhase] = {
    (HandshakePhase.IDLE, HandshakeSignal.REQ_RISE): HandshakePhase.REQ_HIGH,
    (HandshakePhase.REQ_HIGH, HandshakeSignal.ACK_RISE): HandshakePhase.ACK_HIGH,
    (HandshakePhase.ACK_HIGH, HandshakeSignal.REQ_FALL): HandshakePhase.REQ_LOW,
    (HandshakePhase.REQ_LOW, HandshakeSignal.ACK_FALL): HandshakePhase.IDLE,
}


def hs_step(state: HandshakeState, signal: HandshakeSignal, t: float) -> HandshakeState:
    """
    握手状态机推进一步
    :param state: 当前状态
    :param signal: 收到的信号沿
    :param t: 时刻
    :return: 新状态；非法信号抛 ProtocolViolation
    """
    nxt = TRANSITIONS.get((state.phase, signal))
    if nxt is None:
        raise ProtocolViolation(state.phase.value, signal.value, t)
    return HandshakeState(phase=nxt, last_transition=t)


def deliver_event(event: AerEvent, table: ConnectivityTable, base_weights: Mapping[str, float]) -> list[Delivery]:
    """
    按连接表扇出一个已应答的事件，每个目标突触一个从 t_ack 开始的脉冲
    :param event: 已应答的事件
    :param table: 连接表
    :param base_weights: 每个突触的基础 I_w
    :return: 投递列表，I_w 已乘上边权重
    """
    targets = table.fanout.get(event.source_id)
    if targets is None:
        raise RoutingError(err_unknown_source, event.source_id)
    return [Delivery(synapse_id=sid, t_start=event.t_ack, I_w=base_weights[sid] * weight) for sid, weight in targets]
