from pydantic import BaseModel


class BizError(BaseModel):
    code: int
    msg: str


# 1xxxx 配置  2xxxx 物理/定义域  3xxxx 协议/路由  4xxxx 运行时/拟合
err_unknown_key = BizError(code=10001, msg='Unknown config key')
err_unit_mismatch = BizError(code=10002, msg='Unit does not match parameter dimension')
err_malformed_number = BizError(code=10003, msg='Malformed number')
err_unknown_section = BizError(code=10004, msg='Unknown config section')
err_invalid_value = BizError(code=10005, msg='Invalid parameter value')
err_malformed_line = BizError(code=10006, msg='Malformed config line')
err_unknown_mismatch_param = BizError(code=10007, msg='Unknown parameter in mismatch sigma map')
err_pulse_too_wide = BizError(code=10008, msg='Pulse width must be shorter than the stimulus period')
err_zero_refractory_current = BizError(code=10009, msg='I_ref is zero; request infinite refractory explicitly')
err_bad_network = BizError(code=10010, msg='Invalid network wiring')
err_bad_stimulus = BizError(code=10011, msg='Invalid stimulus program')
err_usage = BizError(code=10012, msg='Invalid command line')
err_unreadable_config = BizError(code=10013, msg='Cannot read config file')
err_non_positive = BizError(code=20001, msg='Value must be positive')
err_negative_step = BizError(code=20002, msg='Time step must be non-negative')
err_non_positive_freq = BizError(code=20003, msg='Frequency must be positive')
err_protocol_violation = BizError(code=30001, msg='Illegal handshake transition')
err_unknown_source = BizError(code=30002, msg='Unknown event source')
err_no_bracket = BizError(code=40001, msg='Step does not bracket a threshold crossing')
err_fit_too_few = BizError(code=40002, msg='Too few samples for fit')
err_fit_non_monotone = BizError(code=40003, msg='Decay segment is not monotone')
err_fit_degenerate = BizError(code=40004, msg='Degenerate fit input')
err_no_root = BizError(code=40005, msg='Target not bracketed by search interval')


class NeurosimError(Exception):
    exit_code = 2

    def __init__(self, detail: BizError, context: str = ''):
        self.detail = detail
        self.context = context
        super().__init__(f'[{detail.code}] {detail.msg}' + (f': {context}' if context else ''))

    def __reduce__(self):
        # 子进程抛出的异常要原样回到主进程
        return self.__class__, (self.detail, self.context)


class ConfigError(NeurosimError):
    exit_code = 1

    def __init__(self, detail: BizError, context: str = '', line: int | None = None):
        self.line = line
        self.raw_context = context
        if line is not None:
            context = f'line {line}: {context}' if context else f'line {line}'
        super().__init__(detail, context)

    def __reduce__(self):
        return self.__class__, (self.detail, self.raw_context, self.line)


class DomainError(NeurosimError):
    exit_code = 1


class ProtocolViolation(NeurosimError):
    def __init__(self, phase: str, signal: str, t: float):
        self.phase = phase
        self.signal = signal
        self.t = t
        super().__init__(err_protocol_violation, f'{signal} in phase {phase} at t={t!r}')

    def __reduce__(self):
        return self.__class__, (self.phase, self.signal, self.t)


class RoutingError(NeurosimError):
    pass


class FitError(NeurosimError):
    pass


class SimulationError(NeurosimError):
    pass
