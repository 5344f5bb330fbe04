#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
OpenTelemetry集成模块 / OpenTelemetry Integration Module
为分析流水线的各阶段提供可选的追踪 / Optional tracing of analysis pipeline stages
"""

import sys
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional

try:
    from opentelemetry import trace
    from opentelemetry.exporter.otlp.proto.http.trace_exporter import OTLPSpanExporter
    from opentelemetry.sdk.resources import SERVICE_NAME, Resource
    from opentelemetry.sdk.trace import TracerProvider
    from opentelemetry.sdk.trace.export import ConsoleSpanExporter, SimpleSpanProcessor

    OPENTELEMETRY_AVAILABLE = True
except ImportError:
    OPENTELEMETRY_AVAILABLE = False

from src.utils.logging_utils import get_logger

logger = get_logger(__name__)

SPAN_PREFIX = "stratscope"


def get_default_opentelemetry_config() -> Dict[str, Any]:
    """获取默认的OpenTelemetry配置 / Get default OpenTelemetry configuration"""
    return {
        "enabled": False,
        "service_name": "stratscope",
        "exporter": "console",  # console, otlp / 控制台, OTLP
        "otlp_endpoint": "http://localhost:4318/v1/traces",
        "headers": {},
    }


class StageTracer:
    """阶段追踪器 / Wraps each pipeline stage in a span; a no-op when disabled"""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        self.config = {**get_default_opentelemetry_config(), **(config or {})}
        self.tracer = None
        self.provider = None
        self.initialized = False

    def init(self) -> bool:
        """初始化追踪 / Initialise tracing; returns whether spans will be recorded"""
        if not self.config.get("enabled", False):
            return False
        if not OPENTELEMETRY_AVAILABLE:
            logger.info("OpenTelemetry 依赖未安装，将禁用阶段追踪 / SDK not installed, tracing disabled")
            return False
        try:
            resource = Resource.create({SERVICE_NAME: self.config.get("service_name", "stratscope")})
            provider = TracerProvider(resource=resource)
            if self.config.get("exporter") == "otlp":
                exporter = OTLPSpanExporter(
                    endpoint=self.config.get("otlp_endpoint"), headers=self.config.get("headers") or {}
                )
                logger.info("使用OTLP导出器 / OTLP exporter, endpoint: %s", self.config.get("otlp_endpoint"))
            else:
                # stdout carries results; spans go to stderr
                exporter = ConsoleSpanExporter(out=sys.stderr)
            provider.add_span_processor(SimpleSpanProcessor(exporter))
            self.provider = provider
            self.tracer = provider.get_tracer(SPAN_PREFIX)
            self.initialized = True
            return True
        except Exception as exc:  # pylint: disable=broad-exception-caught
            logger.error("OpenTelemetry 初始化失败 / tracing init failed: %s", exc)
            return False

    @contextmanager
    def stage(self, name: str, attributes: Optional[Dict[str, Any]] = None) -> Iterator[Any]:
        """以Span包裹一个阶段 / Run a block inside a ``stratscope.<name>`` span"""
        if not self.initialized or self.tracer is None:
            yield None
            return
        with self.tracer.start_as_current_span(f"{SPAN_PREFIX}.{name}") as span:
            for key, value in (attributes or {}).items():
                span.set_attribute(key, value)
            try:
                yield span
            except Exception as exc:
                span.set_attribute("error", True)
                span.set_attribute("error.message", str(exc))
                raise

    def shutdown(self) -> None:
        if self.provider is not None:
            self.provider.shutdown()

    def is_enabled(self) -> bool:
        """检查追踪是否启用 / Whether spans are being recorded"""
        return self.initialized and self.tracer is not None
