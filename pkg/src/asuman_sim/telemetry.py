"""OpenTelemetry instrumentation for asuman-sim.

OpenTelemetry ships with the package. Export is off by default and is toggled
with ``ASUMAN_SIM_ENABLE_TELEMETRY=true``; spans are still created against the
no-op global tracer otherwise, so instrumented code never branches on it.

OTLP/HTTP export defaults to a local collector (:data:`DEFAULT_OTLP_ENDPOINT`).
Override with ``OTEL_EXPORTER_OTLP_ENDPOINT`` or an explicit ``endpoint=``.
"""

from __future__ import annotations

import contextlib
import functools
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator, Mapping, Optional, TypeVar

F = TypeVar("F", bound=Callable[..., Any])

# Span attribute keys.
ATTR_SPEC_KEY = "asuman_sim.spec_key"
ATTR_SEED = "asuman_sim.seed"
ATTR_REPLICATION = "asuman_sim.replication"
ATTR_POLICY = "asuman_sim.policy"
ATTR_NODES = "asuman_sim.n"
ATTR_EPOCHS = "asuman_sim.epochs"
ATTR_EVENTS = "asuman_sim.events"
ATTR_OPERATION = "asuman_sim.operation"

ATTR_LOG_NAME = "log.name"

LOG_CHANNEL_CLI = "cli"

DEFAULT_OTLP_ENDPOINT = "http://localhost:4318"
DEFAULT_SERVICE_NAME = "asuman-sim"

_logger = logging.getLogger("asuman_sim.telemetry")
_LOGS_CONFIGURED = False
_LOGGING_HANDLER: Optional[logging.Handler] = None
_ROOT_LOGGER_NAME = "asuman_sim"

try:
    from opentelemetry import trace as otel_trace
    from opentelemetry.trace import SpanKind, Status, StatusCode

    _ENABLED = True
    _tracer = otel_trace.get_tracer("asuman_sim")
except Exception:  # noqa: BLE001 - any import failure must disable telemetry.
    _ENABLED = False
    _tracer = None  # type: ignore[assignment]
    otel_trace = None  # type: ignore[assignment]
    SpanKind = None  # type: ignore[assignment]
    Status = None  # type: ignore[assignment]
    StatusCode = None  # type: ignore[assignment]


def _truthy(value: Optional[str], default: bool = False) -> bool:
    """Parse a boolean-ish env value (``true`` / ``1`` / ``yes`` / ``on``)."""
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "on"}


def observability_enabled() -> bool:
    return _truthy(os.environ.get("ASUMAN_SIM_ENABLE_TELEMETRY"), default=False)


def resolve_service_name(explicit: Optional[str] = None) -> str:
    """Order: explicit arg, ``ASUMAN_SIM_SERVICE_NAME``, ``OTEL_SERVICE_NAME``, default."""
    return (
        (explicit.strip() if isinstance(explicit, str) and explicit.strip() else None)
        or os.environ.get("ASUMAN_SIM_SERVICE_NAME")
        or os.environ.get("OTEL_SERVICE_NAME")
        or DEFAULT_SERVICE_NAME
    )


def resolve_endpoint(explicit: Optional[str] = None) -> str:
    """Order: explicit arg, ``OTEL_EXPORTER_OTLP_ENDPOINT``, :data:`DEFAULT_OTLP_ENDPOINT`."""
    return explicit or os.environ.get("OTEL_EXPORTER_OTLP_ENDPOINT") or DEFAULT_OTLP_ENDPOINT


def _package_version() -> Optional[str]:
    try:
        from asuman_sim import __version__  # local import to avoid a cycle at import time

        return __version__
    except Exception:  # noqa: BLE001 - version is best-effort metadata.
        return None


@dataclass
class TelemetryConfig:
    """Where and under which service name spans and logs are exported."""

    endpoint: Optional[str] = None
    service_name: str = DEFAULT_SERVICE_NAME
    service_version: Optional[str] = None

    @classmethod
    def from_env(cls, *, service_name: Optional[str] = None) -> "TelemetryConfig":
        return cls(
            endpoint=resolve_endpoint(),
            service_name=resolve_service_name(service_name),
            service_version=os.environ.get("OTEL_SERVICE_VERSION") or _package_version(),
        )


def _quiet_exporter_logs() -> None:
    """Silence transient exporter connection warnings unless ``OTEL_PYTHON_LOG_LEVEL`` is set."""
    if os.environ.get("OTEL_PYTHON_LOG_LEVEL"):
        return
    for name in (
        "opentelemetry.exporter.otlp.proto.http.trace_exporter",
        "opentelemetry.exporter.otlp.proto.http._log_exporter",
        "opentelemetry.sdk.trace.export",
        "opentelemetry.sdk._logs.export",
    ):
        logging.getLogger(name).setLevel(logging.CRITICAL)


def _normalize_otlp_signal_url(base: str, signal: str) -> str:
    """Map a base OTLP endpoint to ``/v1/{traces|logs}``."""
    url = base.rstrip("/")
    suffix = f"/v1/{signal}"
    if url.endswith(suffix):
        return url
    if url.endswith("/v1/traces") or url.endswith("/v1/logs"):
        url = url.rsplit("/v1/", 1)[0]
    return f"{url}{suffix}"


def _resource_attributes(config: TelemetryConfig) -> Dict[str, Any]:
    attributes: Dict[str, Any] = {"service.name": config.service_name}
    version = config.service_version or _package_version()
    if version:
        attributes["service.version"] = version
    return attributes


class _OTLPLoggingHandler(logging.Handler):
    """stdlib ``logging`` records forwarded as OpenTelemetry log records."""

    _STANDARD = frozenset(logging.LogRecord("", 0, "", 0, "", None, None).__dict__) | {"message", "taskName"}

    def emit(self, record: logging.LogRecord) -> None:
        try:
            from opentelemetry import _logs
            from opentelemetry._logs import LogRecord, SeverityNumber
        except Exception:  # noqa: BLE001
            return

        try:
            sev = "WARN" if record.levelname == "WARNING" else record.levelname.upper()
            attrs: Dict[str, Any] = {}
            for key, value in record.__dict__.items():
                if key in self._STANDARD or key.startswith("_") or value is None:
                    continue
                if isinstance(value, (str, int, float, bool)):
                    attrs[key] = value
                else:
                    attrs[key] = json.dumps(value, default=str)
            _logs.get_logger(record.name or _ROOT_LOGGER_NAME).emit(
                LogRecord(
                    body=record.getMessage(),
                    severity_text=sev,
                    severity_number=SeverityNumber(_SEVERITY_MAP.get(sev, 9)),
                    attributes=attrs or None,
                )
            )
        except Exception:  # noqa: BLE001
            self.handleError(record)


_SEVERITY_MAP = {"DEBUG": 5, "INFO": 9, "WARN": 13, "ERROR": 17, "CRITICAL": 21}


def _ensure_log_pipeline(config: TelemetryConfig, endpoint: str, *, silent: bool = False) -> bool:
    """Install a global OTLP LoggerProvider and attach the bridge to the package logger (once)."""
    global _LOGS_CONFIGURED, _LOGGING_HANDLER
    if _LOGS_CONFIGURED:
        return True
    if not _ENABLED:
        return False

    try:
        from opentelemetry import _logs
        from opentelemetry.exporter.otlp.proto.http._log_exporter import OTLPLogExporter
        from opentelemetry.sdk._logs import LoggerProvider
        from opentelemetry.sdk._logs.export import BatchLogRecordProcessor
        from opentelemetry.sdk.resources import Resource
    except Exception:  # noqa: BLE001
        return False

    try:
        if not isinstance(_logs.get_logger_provider(), LoggerProvider):
            if silent:
                _quiet_exporter_logs()
            logs_url = _normalize_otlp_signal_url(endpoint, "logs")
            provider = LoggerProvider(resource=Resource.create(_resource_attributes(config)))
            provider.add_log_record_processor(BatchLogRecordProcessor(OTLPLogExporter(endpoint=logs_url)))
            _logs.set_logger_provider(provider)
            _logger.debug("OTel logging configured: endpoint=%s", logs_url)

        if _LOGGING_HANDLER is None:
            handler = _OTLPLoggingHandler()
            logging.getLogger(_ROOT_LOGGER_NAME).addHandler(handler)
            _LOGGING_HANDLER = handler

        _LOGS_CONFIGURED = True
        return True
    except Exception:  # noqa: BLE001 - best-effort; never break a run.
        _logger.debug("OTel log pipeline setup failed", exc_info=True)
        return False


def configure_otel(config: Optional[TelemetryConfig] = None, *, silent: bool = False) -> bool:
    """Configure global OTLP/HTTP exporters for traces and logs.

    Idempotent and best-effort: returns ``False`` when OpenTelemetry cannot be
    imported and never raises.
    """
    if not _ENABLED:
        return False

    try:
        from opentelemetry.exporter.otlp.proto.http.trace_exporter import OTLPSpanExporter
        from opentelemetry.sdk.resources import Resource
        from opentelemetry.sdk.trace import TracerProvider
        from opentelemetry.sdk.trace.export import BatchSpanProcessor
    except Exception:  # noqa: BLE001 - SDK/exporter not installed.
        return False

    config = config or TelemetryConfig.from_env()
    endpoint = resolve_endpoint(config.endpoint)
    if silent:
        _quiet_exporter_logs()

    traces_configured = False
    try:
        if not isinstance(otel_trace.get_tracer_provider(), TracerProvider):
            traces_url = _normalize_otlp_signal_url(endpoint, "traces")
            provider = TracerProvider(resource=Resource.create(_resource_attributes(config)))
            provider.add_span_processor(BatchSpanProcessor(OTLPSpanExporter(endpoint=traces_url)))
            otel_trace.set_tracer_provider(provider)
            traces_configured = True
            _logger.debug("OTel tracing configured: endpoint=%s service=%s", traces_url, config.service_name)
    except Exception:  # noqa: BLE001
        _logger.debug("OTel tracer setup failed", exc_info=True)

    logs_configured = _ensure_log_pipeline(config, endpoint, silent=silent)
    return traces_configured or logs_configured


class _ChannelLabelFilter(logging.Filter):
    """Stamp ``log.name`` + ``label.*`` on records of the package logger."""

    def __init__(self, channel: str = LOG_CHANNEL_CLI, labels: Optional[Mapping[str, str]] = None) -> None:
        super().__init__()
        self.channel = channel
        self.labels = dict(labels or {})

    def filter(self, record: logging.LogRecord) -> bool:
        setattr(record, ATTR_LOG_NAME, self.channel)
        for key, value in self.labels.items():
            if value is None:
                continue
            setattr(record, f"label.{key}", str(value))
        return True


def setup_logging(
    level: int = logging.WARNING,
    *,
    channel: str = LOG_CHANNEL_CLI,
    labels: Optional[Mapping[str, str]] = None,
) -> logging.Logger:
    """Configure the ``asuman_sim`` logger to write to stderr.

    stdout is reserved for command output. When telemetry is enabled the
    records are also exported over OTLP.
    """
    logger = logging.getLogger(_ROOT_LOGGER_NAME)
    logger.setLevel(level)
    if not any(getattr(h, "_asuman_stderr", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        handler._asuman_stderr = True  # type: ignore[attr-defined]
        logger.addHandler(handler)

    # Replace prior channel filters on this logger only (stable class identity).
    logger.filters = [f for f in logger.filters if not isinstance(f, _ChannelLabelFilter)]
    logger.addFilter(_ChannelLabelFilter(channel=channel, labels=labels))

    if observability_enabled():
        configure_otel(silent=True)
    return logger


@contextlib.contextmanager
def trace(name: str, *, attributes: Optional[Mapping[str, Any]] = None) -> Iterator[Any]:
    """Span context manager. Yields the active OTel span, or ``None`` when OpenTelemetry is missing."""
    if not _ENABLED:
        yield None
        return

    with _tracer.start_as_current_span(name, kind=SpanKind.INTERNAL) as span:
        span.set_attribute(ATTR_OPERATION, name)
        if attributes:
            set_attributes(span, attributes)
        try:
            yield span
        except Exception as exc:  # noqa: BLE001
            span.record_exception(exc)
            span.set_status(Status(StatusCode.ERROR, str(exc)))
            raise


def set_attributes(span: Any, attributes: Mapping[str, Any]) -> None:
    """Set scalar attributes on ``span``; ``None`` spans and ``None`` values are skipped."""
    if span is None:
        return
    for key, value in attributes.items():
        if value is None:
            continue
        if not isinstance(value, (str, bool, int, float)):
            value = str(value)
        span.set_attribute(key, value)


def traced(
    func: Optional[F] = None,
    *,
    name: Optional[str] = None,
    attributes: Optional[Mapping[str, Any]] = None,
) -> Any:
    """Decorator that wraps a synchronous function in a :func:`trace` span."""

    def decorator(fn: F) -> F:
        span_name = name or getattr(fn, "__qualname__", None) or fn.__name__

        @functools.wraps(fn)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            if not _ENABLED:
                return fn(*args, **kwargs)
            with trace(span_name, attributes=attributes):
                return fn(*args, **kwargs)

        return wrapper  # type: ignore[return-value]

    if func is not None:
        return decorator(func)
    return decorator
