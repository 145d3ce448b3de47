import logging
import time
from contextlib import contextmanager

logger = logging.getLogger("fieldtheories")

# LogRecord attributes that an ``extra`` dict must not overwrite.
_RESERVED = frozenset(logging.makeLogRecord({}).__dict__) | {"message", "asctime"}


def _extra(context):
    """Render a context dict into LogRecord-safe ``extra`` fields."""
    extra = {}
    for key, value in (context or {}).items():
        if key in _RESERVED:
            key = f"ctx_{key}"
        if not isinstance(value, (str, int, float, bool, type(None))):
            value = str(value)
        extra[key] = value
    return extra


def log_error(error_message, context=None):
    logger.error(
        error_message,
        extra=_extra(context),
        exc_info=True
    )


def log_info(message, context=None):
    logger.info(message, extra=_extra(context))


def log_warning(message, context=None):
    logger.warning(message, extra=_extra(context))


@contextmanager
def log_duration(operation, context=None):
    """Log how long ``operation`` took once the block exits."""
    started = time.perf_counter()
    try:
        yield
    finally:
        elapsed = time.perf_counter() - started
        fields = dict(context or {})
        fields["elapsed_seconds"] = round(elapsed, 3)
        logger.info(f"{operation} finished in {elapsed:.3f}s", extra=_extra(fields))
