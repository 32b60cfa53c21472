import numpy as np
import pytest

from neurosim.analysis.fi import dc_rate, find_input_for_rate
from neurosim.analysis.montecarlo import calibrate_sigma_scale, histogram, monte_carlo
from neurosim.models.analysis_model import McSetup
from neurosim.models.device_model import MismatchSpec
from neurosim.models.engine_model import EngineConfig
from neurosim.models.generic_error import ConfigError, DomainError, FitError


@pytest.fixture
def setup(neuron) -> McSetup:
    return McSetup(neuron=neuron, I_in=240e-12, engine=EngineConfig(dt_max=1e-4, duration=0.3))


def test_zero_sigma_has_no_spread(setup):
    result = monte_carlo(setup, MismatchSpec(sigmas={'I_leak': 0.0, 'I_thr': 0.0}), 20)
    nominal = dc_rate(setup.neuron, setup.constants, setup.I_in, setup.engine, setup.warmup_fraction, 'isi')
    assert result.rates == [nominal] * 20
    assert result.std == 0.0
    assert result.cv == 0.0
    assert result.zero_rate_runs == []


def test_runs_depend_only_on_seed_and_index(setup):
    spec = MismatchSpec(seed=3)
    short, long = monte_carlo(setup, spec, 3), monte_carlo(setup, spec, 6)
    assert long.rates[:3] == short.rates
    assert monte_carlo(setup, spec.model_copy(update={'seed': 4}), 3).rates != short.rates


def test_parallel_batches_match_serial(setup):
    spec = MismatchSpec(seed=11)
    assert monte_carlo(setup, spec, 4, threads=1) == monte_carlo(setup, spec, 4, threads=2)


def test_mismatch_spreads_rates(setup):
    result = monte_carlo(setup, MismatchSpec(), 30)
    assert result.std > 0
    assert result.cv == pytest.approx(result.std / result.mean)
    assert sum(b.count for b in result.histogram) == 30
    assert len(result.histogram) == 20


def test_silent_runs_are_flagged(setup):
    silent = setup.model_copy(update={'I_in': 0.0})
    result = monte_carlo(silent, MismatchSpec(), 4)
    assert result.rates == [0.0] * 4
    assert result.zero_rate_runs == [0, 1, 2, 3]
    assert result.cv == 0.0


def test_single_run_has_zero_std(setup):
    result = monte_carlo(setup, MismatchSpec(), 1)
    assert result.n_runs == 1
    assert result.std == 0.0


def test_invalid_requests(setup):
    with pytest.raises(DomainError):
        monte_carlo(setup, MismatchSpec(), 0)
    with pytest.raises(ConfigError):
        monte_carlo(setup, MismatchSpec(sigmas={'I_bogus': 0.1}), 2)


def test_histogram_bins():
    bins = histogram([1.0, 2.0, 3.0, 4.0], bins=2)
    assert [(b.low, b.high, b.count) for b in bins] == [(1.0, 2.5, 2), (2.5, 4.0, 2)]


@pytest.mark.slow
def test_calibrated_spread(neuron, consts):
    engine = EngineConfig(dt_max=1e-4, duration=0.5)
    I_in = find_input_for_rate(neuron, consts, 70.0, engine)
    setup = McSetup(neuron=neuron, I_in=I_in, engine=engine)
    result = monte_carlo(setup, MismatchSpec(seed=1), 500, threads=0)
    assert result.mean == pytest.approx(70.0, rel=0.05)
    assert 0.11 <= result.cv <= 0.15
    assert result.zero_rate_runs == []
    assert np.isclose(result.cv, result.std / result.mean)


@pytest.mark.slow
def test_sigma_scale_calibration(setup):
    band = (0.08, 0.2)
    scale, result = calibrate_sigma_scale(setup, MismatchSpec(), 50, band=band)
    assert 0 < scale < 4.0
    assert band[0] <= result.cv <= band[1]


@pytest.mark.slow
def test_sigma_scale_out_of_reach(setup):
    with pytest.raises(FitError):
        calibrate_sigma_scale(setup, MismatchSpec(sigmas={'I_ref': 0.02}), 10, hi=1.0)
