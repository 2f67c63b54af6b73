import pytest

from laplace_panels import ConfigError, Tolerances
from settings import AppSettings


def test_defaults():
    settings = AppSettings(environ={})
    assert settings.get("threads") == 1
    assert settings.get("format") == "csv"
    assert settings.get("log_level") == "WARNING"
    assert settings.tolerances() == Tolerances()


def test_environment_overrides_defaults():
    settings = AppSettings(environ={"GLQ_THREADS": "4", "GLQ_TOL_TOUCH": "1e-9"})
    assert settings.get("threads") == 4
    assert settings.tolerances().tol_touch == 1e-9


def test_explicit_values_override_environment():
    settings = AppSettings(environ={"GLQ_THREADS": "4", "GLQ_TOL_PARALLEL": "1e-6"})
    settings.set("threads", 2)
    settings.set("tol_parallel", 1e-8)
    settings.set("format", None)
    assert settings.get("threads") == 2
    assert settings.get("format") == "csv"
    assert settings.tolerances().tol_parallel == 1e-8


def test_blank_environment_value_is_ignored():
    assert AppSettings(environ={"GLQ_THREADS": "  "}).get("threads") == 1


def test_bad_environment_value():
    with pytest.raises(ConfigError):
        AppSettings(environ={"GLQ_THREADS": "many"}).get("threads")


def test_negative_tolerance_is_rejected():
    settings = AppSettings(environ={})
    settings.set("tol_touch", -1.0)
    with pytest.raises(ConfigError):
        settings.tolerances()


def test_unknown_tolerance():
    with pytest.raises(ConfigError):
        Tolerances().replace(tol_bogus=1.0)


def test_zero_gap_tolerance_has_a_floor():
    with pytest.raises(ConfigError):
        AppSettings(environ={"GLQ_ZERO_TOL": "1e-14"}).tolerances()
    with pytest.raises(ConfigError):
        Tolerances().replace(zero_tol=1e-14)
    assert Tolerances().replace(zero_tol=1e-12).zero_tol == 1e-12


def test_gap_amplification_limit_is_at_least_one():
    with pytest.raises(ConfigError):
        Tolerances().replace(max_gap_amplification=0.5)
    assert Tolerances().replace(max_gap_amplification=1.0).max_gap_amplification == 1.0
