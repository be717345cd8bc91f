# xdiff_lab/logger.py
import json
import logging
import os
import sys
import time
from collections.abc import Callable
from datetime import datetime
from functools import wraps
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Optional, TypeVar

from xdiff_lab.config import LoggingConfig, LogHandlerConfig

T = TypeVar("T")


class JsonFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        log_data = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "name": record.name,
            "level": record.levelname,
            "message": record.getMessage(),
            "module": record.module,
            "funcName": record.funcName,
            "lineNo": record.lineno,
            "threadId": record.thread,
            "threadName": record.threadName,
        }

        if record.exc_info and record.exc_info[0]:
            exc_type = record.exc_info[0]
            exc_value = record.exc_info[1]
            log_data["exception"] = {
                "type": exc_type.__name__ if exc_type else "Unknown",
                "message": str(exc_value) if exc_value else "",
                "traceback": self.formatException(record.exc_info),
            }

        context = getattr(record, "context", None)
        if isinstance(context, dict):
            log_data.update(context)

        return json.dumps(log_data, default=str)


class PrivateRotatingFileHandler(RotatingFileHandler):
    """Rotating log file readable by its owner only (mode 0o600)"""

    def __init__(
        self,
        filename: str,
        mode: str = "a",
        maxBytes: int = 0,
        backupCount: int = 0,
        encoding: str | None = None,
        delay: bool = False,
    ) -> None:
        super().__init__(filename, mode, maxBytes, backupCount, encoding, delay)
        if not delay:
            self._restrict_permissions()

    def _open(self) -> Any:
        stream = super()._open()
        self._restrict_permissions()
        return stream

    def _restrict_permissions(self) -> None:
        if sys.platform == "win32":
            return
        try:
            os.chmod(self.baseFilename, 0o600)
        except OSError as e:
            logging.getLogger(__name__).warning(
                f"Could not restrict permissions on log file: {e}"
            )


class LabLogger:
    """Process-wide logging setup rooted at the ``xdiff_lab`` logger"""

    _instance: Optional["LabLogger"] = None
    _handler_classes: dict[str, type[logging.Handler]] = {
        "StreamHandler": logging.StreamHandler,
        "FileHandler": logging.FileHandler,
        "RotatingFileHandler": PrivateRotatingFileHandler,
        "JsonRotatingFileHandler": PrivateRotatingFileHandler,
    }
    _initialized: bool = False

    def __new__(cls) -> "LabLogger":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self) -> None:
        if self._initialized:
            return

        self._initialized = True
        self._logger = logging.getLogger("xdiff_lab")
        self._logger.setLevel(logging.INFO)
        self._handlers: dict[str, logging.Handler] = {}

        if not self._logger.handlers:
            self._add_default_console_handler()

    def get_logger(self, name: str | None = None) -> logging.Logger:
        """
        Get a logger instance with the given name

        Args:
            name: Optional dotted name; a leading ``xdiff_lab.`` is stripped

        Returns:
            logging.Logger: Child of the package logger
        """
        if name:
            if name == "xdiff_lab":
                return self._logger
            return self._logger.getChild(name.removeprefix("xdiff_lab."))
        return self._logger

    def _add_default_console_handler(self) -> None:
        handler = logging.StreamHandler()
        formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        )
        handler.setFormatter(formatter)
        handler.setLevel(logging.INFO)
        self._logger.addHandler(handler)
        self._handlers["console"] = handler

    def configure(self, config: LoggingConfig) -> None:
        self._logger.setLevel(getattr(logging, config.level))

        for handler in list(self._handlers.values()):
            self._logger.removeHandler(handler)
            handler.close()
        self._handlers.clear()

        if config.log_path:
            config.log_path.mkdir(parents=True, exist_ok=True)

        for name, handler_config in config.handlers.items():
            self._add_handler(name, handler_config, config.log_path)

    def set_level(self, level: str) -> None:
        """Set the package level and the level of every installed handler"""
        numeric = getattr(logging, level.upper())
        self._logger.setLevel(numeric)
        for handler in self._handlers.values():
            handler.setLevel(numeric)

    def _add_handler(
        self, name: str, config: LogHandlerConfig, log_path: Path | None = None
    ) -> None:
        """
        Add a handler based on configuration.

        Args:
            name: Handler name
            config: Handler configuration
            log_path: Optional base path for log files
        """
        handler_class = self._handler_classes.get(config.class_name)
        if not handler_class:
            raise ValueError(f"Unknown handler class: {config.class_name}")

        kwargs = config.handler_kwargs.copy()

        if "filename" in kwargs and log_path:
            kwargs["filename"] = log_path / Path(kwargs["filename"]).name

        if config.class_name == "StreamHandler":
            handler = handler_class()
            if hasattr(handler, "stream"):
                handler.stream = sys.stderr
        else:
            handler = handler_class(**kwargs)

        if config.class_name == "JsonRotatingFileHandler":
            handler.setFormatter(JsonFormatter())
        else:
            handler.setFormatter(logging.Formatter(config.format))

        handler.setLevel(getattr(logging, config.level))
        self._logger.addHandler(handler)
        self._handlers[name] = handler


def log_operation(
    logger: logging.Logger | None = None,
    exclude_args: bool = True,
) -> Callable[[Callable[..., T]], Callable[..., T]]:
    """Debug-log entry and exit of a numerical operation, error-log failures.

    Array arguments are large, so only their shapes are recorded unless
    ``exclude_args`` is set (the default), in which case none are.
    """

    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> T:
            nonlocal logger
            if logger is None:
                logger = LabLogger().get_logger(func.__module__)

            context: dict[str, Any] = {
                "function_name": func.__name__,
                "module_path": func.__module__,
            }
            if not exclude_args:
                context["call_args"] = [_describe(a) for a in args]
                context["call_kwargs"] = {k: _describe(v) for k, v in kwargs.items()}

            logger.debug(
                f"Operation start: {func.__qualname__}", extra={"context": context}
            )
            started = time.perf_counter()
            try:
                result = func(*args, **kwargs)
                logger.debug(
                    f"Operation done: {func.__qualname__}",
                    extra={
                        "context": {
                            **context,
                            "status": "success",
                            "elapsed_s": time.perf_counter() - started,
                        }
                    },
                )
                return result
            except Exception as e:
                logger.error(
                    f"Operation failed in {func.__qualname__}: {str(e)}",
                    extra={
                        "context": {
                            **context,
                            "error": str(e),
                            "error_type": type(e).__name__,
                        }
                    },
                    exc_info=logger.isEnabledFor(logging.DEBUG),
                )
                raise

        return wrapper

    return decorator


def _describe(value: Any) -> Any:
    shape = getattr(value, "shape", None)
    if shape is not None:
        return f"<array shape={tuple(shape)}>"
    if isinstance(value, int | float | str | bool):
        return value
    return type(value).__name__
