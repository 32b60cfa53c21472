import pickle

import pytest

from neurosim.models.generic_error import ConfigError, FitError, ProtocolViolation, err_fit_too_few, \
    err_unit_mismatch
from neurosim.utils.batch import run_batch
from neurosim.utils.units import parse_quantity


def test_results_keep_job_order():
    assert run_batch(abs, [-1, -2, 3, -4], threads=2) == [1, 2, 3, 4]


def test_serial_when_single_worker():
    assert run_batch(parse_quantity, ['1pA', '2nA'], threads=1) == [(1e-12, 'A'), (2e-9, 'A')]


def test_worker_error_keeps_its_type():
    with pytest.raises(ConfigError, match='10003'):
        run_batch(parse_quantity, ['1pA', 'abc', '3pA'], threads=2)


def test_config_error_survives_pickling():
    err = ConfigError(err_unit_mismatch, 'I_tau expects A', 7)
    copy = pickle.loads(pickle.dumps(err))
    assert type(copy) is ConfigError
    assert copy.line == 7
    assert copy.detail == err.detail
    assert str(copy) == str(err)


def test_protocol_violation_survives_pickling():
    err = ProtocolViolation('ReqHigh', 'req_rise', 1.5e-3)
    copy = pickle.loads(pickle.dumps(err))
    assert (copy.phase, copy.signal, copy.t) == ('ReqHigh', 'req_rise', 1.5e-3)
    assert str(copy) == str(err)
    assert copy.exit_code == 2


def test_plain_subclass_survives_pickling():
    copy = pickle.loads(pickle.dumps(FitError(err_fit_too_few, 'n=2')))
    assert isinstance(copy, FitError)
    assert copy.context == 'n=2'
