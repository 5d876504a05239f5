"""Tests for OpenTelemetry instrumentation."""

from __future__ import annotations

import asuman_sim.telemetry as telemetry


def test_telemetry_disabled_by_default(monkeypatch):
    monkeypatch.delenv("ASUMAN_SIM_ENABLE_TELEMETRY", raising=False)
    assert telemetry.observability_enabled() is False


def test_observability_enabled_toggle(monkeypatch):
    monkeypatch.setenv("ASUMAN_SIM_ENABLE_TELEMETRY", "true")
    assert telemetry.observability_enabled() is True
    monkeypatch.setenv("ASUMAN_SIM_ENABLE_TELEMETRY", "0")
    assert telemetry.observability_enabled() is False
    monkeypatch.setenv("ASUMAN_SIM_ENABLE_TELEMETRY", "on")
    assert telemetry.observability_enabled() is True


def test_resolve_endpoint_static_default(monkeypatch):
    monkeypatch.delenv("OTEL_EXPORTER_OTLP_ENDPOINT", raising=False)
    assert telemetry.resolve_endpoint() == telemetry.DEFAULT_OTLP_ENDPOINT
    assert telemetry.DEFAULT_OTLP_ENDPOINT == "http://localhost:4318"

    # Explicit arg wins over everything.
    assert telemetry.resolve_endpoint("http://x:4318") == "http://x:4318"

    monkeypatch.setenv("OTEL_EXPORTER_OTLP_ENDPOINT", "http://standard:4318")
    assert telemetry.resolve_endpoint() == "http://standard:4318"


def test_config_from_env_applies_defaults(monkeypatch):
    monkeypatch.setenv("OTEL_EXPORTER_OTLP_ENDPOINT", "http://collector:4318")
    monkeypatch.setenv("ASUMAN_SIM_SERVICE_NAME", "sweep-farm")
    monkeypatch.setenv("OTEL_SERVICE_VERSION", "1.2.3")

    config = telemetry.TelemetryConfig.from_env()
    assert config.endpoint == "http://collector:4318"
    assert config.service_name == "sweep-farm"
    assert config.service_version == "1.2.3"


def test_default_service_name(monkeypatch):
    monkeypatch.delenv("ASUMAN_SIM_SERVICE_NAME", raising=False)
    monkeypatch.delenv("OTEL_SERVICE_NAME", raising=False)
    config = telemetry.TelemetryConfig.from_env()
    assert config.service_name == "asuman-sim"


def test_resolve_service_name_prefers_package_variable(monkeypatch):
    monkeypatch.setenv("OTEL_SERVICE_NAME", "otel-name")
    monkeypatch.setenv("ASUMAN_SIM_SERVICE_NAME", "sim-name")
    assert telemetry.resolve_service_name() == "sim-name"
    assert telemetry.resolve_service_name("explicit") == "explicit"
    assert telemetry.resolve_service_name("   ") == "sim-name"
    monkeypatch.delenv("ASUMAN_SIM_SERVICE_NAME", raising=False)
    assert telemetry.resolve_service_name() == "otel-name"


def test_configure_otel_returns_false_without_otel(monkeypatch):
    monkeypatch.setattr(telemetry, "_ENABLED", False)
    assert telemetry.configure_otel() is False


def test_resource_attributes_carry_version():
    config = telemetry.TelemetryConfig(service_name="svc", service_version="9.9")
    attrs = telemetry._resource_attributes(config)
    assert attrs == {"service.name": "svc", "service.version": "9.9"}
