"""Class-diagram tooling: PlantUML I/O, schema reverse engineering,
requirements generation and diagram evaluation."""

import json

from . import _umlforge
from ._umlforge import (
    BackendError,
    ConfigError,
    DdlError,
    Error,
    FormatError,
    SchemaError,
    StageError,
    ValidationError,
    normalize_name,
)

__all__ = [
    "BackendError",
    "ConfigError",
    "DdlError",
    "Error",
    "FormatError",
    "SchemaError",
    "StageError",
    "ValidationError",
    "emit_plantuml",
    "evaluate",
    "generate_requirements",
    "normalize_name",
    "parse_plantuml",
    "reverse_engineer",
    "run_cli",
]


def parse_plantuml(text):
    """Return (model, diagnostics). model is None when the diagram is invalid.

    Each diagnostic is (line, message, severity).
    """
    model, diagnostics = _umlforge.parse_plantuml(text)
    return json.loads(model), [tuple(d) for d in diagnostics]


def emit_plantuml(model):
    return _umlforge.emit_plantuml(json.dumps(model))


def reverse_engineer(sql):
    """Return (model, warnings) for SQL DDL text."""
    model, warnings = _umlforge.reverse_engineer(sql)
    return json.loads(model), list(warnings)


def generate_requirements(plantuml, domain_prefix="REQ", **config):
    """Return (document, trace) for a PlantUML diagram.

    Extra keyword arguments are the keys of the requirements config file.
    """
    config = dict(config, domain_prefix=domain_prefix)
    document, trace = _umlforge.generate_requirements(plantuml, json.dumps(config))
    return document, json.loads(trace)


def evaluate(gold, generated):
    """Evaluation report for two PlantUML diagrams as a dict."""
    return json.loads(_umlforge.evaluate(gold, generated))


def run_cli(*args):
    """Run the command-line tool in process. Returns (exit_code, stdout, stderr)."""
    return _umlforge.run_cli([str(a) for a in args])
