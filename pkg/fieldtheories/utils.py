import json
from pathlib import Path

from rest_framework.exceptions import ValidationError
from rest_framework.renderers import JSONRenderer

from .exceptions import SuperpointError
from .logging_utils import log_error

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_USAGE = 2


class CheckFailed(Exception):
    """A check ran to completion and answered no; carries the report data."""

    def __init__(self, message, data=None):
        self.message = message
        self.data = data
        super().__init__(message)


def prepare_report(data=None, message="Success", code=EXIT_OK):
    return {
        "code": code,
        "data": data,
        "message": message,
    }


def prepare_exception_handler(exc):
    """Map an exception to ``(exit code, error envelope)``."""
    if isinstance(exc, CheckFailed):
        return EXIT_FAILED_CHECK, prepare_report(exc.data, exc.message, EXIT_FAILED_CHECK)

    if isinstance(exc, ValidationError):
        error_message = "Validation error"
        errors = exc.detail
    elif isinstance(exc, OSError):
        error_message = "Could not read input file"
        errors = {"file": [f"{exc.filename or ''}: {exc.strerror or exc}"]}
    elif isinstance(exc, SuperpointError):
        error_message = exc.message
        errors = {"type": type(exc).__name__, **{key: str(value) for key, value in exc.details.items()}}
    else:
        log_error(f"Unhandled exception: {type(exc).__name__}: {str(exc)}")
        envelope = prepare_report(None, "Internal error", EXIT_USAGE)
        envelope["errors"] = {"detail": str(exc)}
        return EXIT_USAGE, envelope

    log_error(f"Command failed: {error_message}", {"exception_type": type(exc).__name__})
    envelope = prepare_report(None, error_message, EXIT_USAGE)
    envelope["errors"] = errors
    return EXIT_USAGE, envelope


def load_json(path, param_name):
    """Read a JSON document; IO errors name the file, syntax errors the flag."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as error:
        raise ValidationError({param_name: [f"{path} is not valid JSON: {error.msg} (line {error.lineno})"]})


def render_report(envelope, indent=2):
    return JSONRenderer().render(envelope, renderer_context={"indent": indent}).decode("utf-8")


def render_table(envelope):
    """Aligned ``key  value`` lines for the human-readable output."""
    lines = [envelope["message"]]
    data = envelope.get("data")
    if isinstance(data, dict):
        width = max((len(str(key)) for key in data), default=0)
        for key, value in data.items():
            if isinstance(value, (dict, list)):
                value = json.dumps(value, ensure_ascii=False)
            lines.append(f"  {str(key).ljust(width)}  {value}")
    elif data is not None:
        lines.append(f"  {data}")
    for key, value in (envelope.get("errors") or {}).items():
        lines.append(f"  error {key}: {value}")
    return "\n".join(lines)
