import pytest

from neurosim.analysis.power import calibrate_power, energy_curve, energy_per_spike
from neurosim.models.analysis_model import PowerModel
from neurosim.models.generic_error import DomainError, FitError

ANCHORS = [(30.0, 16e-12), (2.1e3, 1e-12)]


def test_two_point_calibration_is_exact():
    model = calibrate_power(ANCHORS)
    assert model.P_static == pytest.approx(456.52e-12, rel=1e-5)
    assert model.E_switch == pytest.approx(0.78261e-12, rel=1e-5)
    assert model.residual_rms == pytest.approx(0.0, abs=1e-24)
    for freq, energy in ANCHORS:
        assert energy_per_spike(model, freq) == pytest.approx(energy, rel=1e-12)


def test_default_model_is_calibrated():
    default, fitted = PowerModel(), calibrate_power(ANCHORS)
    assert default.P_static == pytest.approx(fitted.P_static, rel=1e-5)
    assert default.E_switch == pytest.approx(fitted.E_switch, rel=1e-5)


def test_energy_falls_with_frequency():
    curve = energy_curve(PowerModel(), [10.0, 100.0, 1e3, 1e4])
    energies = [e for _, e in curve]
    assert energies == sorted(energies, reverse=True)
    assert energies[-1] > PowerModel().E_switch


def test_recalibration_recovers_model():
    model = PowerModel(P_static=2e-10, E_switch=3e-12)
    points = energy_curve(model, [5.0, 50.0, 500.0])
    fitted = calibrate_power(points)
    assert fitted.P_static == pytest.approx(2e-10, rel=1e-9)
    assert fitted.E_switch == pytest.approx(3e-12, rel=1e-9)


def test_noisy_points_report_residual():
    fitted = calibrate_power([(30.0, 16e-12), (300.0, 2.5e-12), (2.1e3, 1e-12)])
    assert fitted.residual_rms > 0
    exact = calibrate_power(ANCHORS)
    assert fitted.P_static == pytest.approx(exact.P_static, rel=0.05)


def test_calibration_errors():
    with pytest.raises(FitError):
        calibrate_power(ANCHORS[:1])
    with pytest.raises(FitError):
        calibrate_power([(30.0, 16e-12), (30.0, 15e-12)])
    with pytest.raises(DomainError):
        calibrate_power([(0.0, 16e-12), (30.0, 15e-12)])
    # 能耗随频率上升时拟合出的静态功耗为负
    with pytest.raises(FitError):
        calibrate_power([(10.0, 1e-12), (100.0, 5e-12)])


def test_frequency_must_be_positive():
    with pytest.raises(DomainError):
        energy_per_spike(PowerModel(), 0.0)
