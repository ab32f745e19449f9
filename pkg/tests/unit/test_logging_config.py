"""
Unit tests for src/logging_config.py.

Tests configure_logging (idempotency, dir creation, level, handler type)
and log_call (entry/exit/failure logging, argument abbreviation, re-raise).
"""

import logging
import logging.handlers
import os
from unittest.mock import MagicMock, patch

import numpy as np
import pytest

from src.engine.core import EnvelopeError, validate_params
from src.logging_config import _short_repr, configure_logging, log_call
from src.models import ReplySequence


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _clear_src_logger():
    """Close and remove all handlers from the src logger."""
    logger = logging.getLogger("src")
    for h in logger.handlers[:]:
        h.close()
        logger.removeHandler(h)
    logger.setLevel(logging.NOTSET)


def _captured(func, *args, **kwargs):
    """Run func under a mock src logger; return the mock."""
    mock_logger = MagicMock()
    with patch("src.logging_config.logging") as mock_logging:
        mock_logging.getLogger.return_value = mock_logger
        mock_logging.DEBUG = logging.DEBUG
        func(*args, **kwargs)
    return mock_logger


# ---------------------------------------------------------------------------
# configure_logging
# ---------------------------------------------------------------------------

class TestConfigureLogging:

    def setup_method(self):
        _clear_src_logger()

    def teardown_method(self):
        _clear_src_logger()

    def _configure(self, log_dir, env=None):
        with patch.dict(os.environ, env or {}), \
             patch("src.logging_config._LOG_DIR", log_dir), \
             patch("src.logging_config._LOG_FILE", log_dir / "trunc_dist.log"):
            return configure_logging()

    def test_returns_src_logger(self, tmp_path):
        result = self._configure(tmp_path)
        assert isinstance(result, logging.Logger)
        assert result.name == "src"

    def test_creates_log_dir_if_missing(self, tmp_path):
        log_dir = tmp_path / "logs"
        self._configure(log_dir)
        assert log_dir.exists()

    def test_adds_rotating_file_handler(self, tmp_path):
        self._configure(tmp_path)
        handlers = logging.getLogger("src").handlers
        assert len(handlers) == 1
        assert isinstance(handlers[0], logging.handlers.RotatingFileHandler)
        assert handlers[0].maxBytes == 5 * 1024 * 1024
        assert handlers[0].backupCount == 3

    def test_idempotent(self, tmp_path):
        for _ in range(3):
            self._configure(tmp_path)
        assert len(logging.getLogger("src").handlers) == 1

    def test_default_level_is_info(self, tmp_path):
        env = {k: v for k, v in os.environ.items() if k != "LOG_LEVEL"}
        with patch.dict(os.environ, env, clear=True):
            self._configure(tmp_path)
        assert logging.getLogger("src").level == logging.INFO

    @pytest.mark.parametrize("name,level", [("DEBUG", logging.DEBUG), ("warning", logging.WARNING),
                                            ("BOGUS", logging.INFO)])
    def test_log_level_from_env(self, tmp_path, name, level):
        self._configure(tmp_path, {"LOG_LEVEL": name})
        assert logging.getLogger("src").level == level

    def test_engine_warnings_reach_the_file(self, tmp_path):
        from src.engine.bounds import birthday_chain

        self._configure(tmp_path, {"LOG_LEVEL": "INFO"})
        birthday_chain(4, 2)
        for h in logging.getLogger("src").handlers:
            h.flush()
        text = (tmp_path / "trunc_dist.log").read_text()
        assert "WARNING" in text and "birthday_chain" in text


# ---------------------------------------------------------------------------
# Argument abbreviation
# ---------------------------------------------------------------------------

class TestShortRepr:

    def test_params_repr_kept(self):
        assert _short_repr(validate_params(4, 1, 2)) == "Params(n=4, m=1, q=2)"

    def test_long_transcript_abbreviated(self):
        omega = ReplySequence(tuple(range(1000)))
        assert _short_repr(omega) == "<ReplySequence len=1000>"

    def test_large_array_abbreviated(self):
        assert _short_repr(np.zeros((5000, 8))) == "<ndarray len=5000>"

    def test_short_list_kept(self):
        assert _short_repr([1, 4, 16]) == "[1, 4, 16]"

    def test_long_string_kept(self):
        assert _short_repr("x" * 40) == repr("x" * 40)


# ---------------------------------------------------------------------------
# log_call decorator
# ---------------------------------------------------------------------------

class TestLogCall:

    def test_passes_return_value_through(self):
        @log_call
        def add(a, b):
            return a + b

        assert add(2, 3) == 5

    def test_preserves_function_name(self):
        @log_call
        def total_variation():
            pass

        assert total_variation.__name__ == "total_variation"

    def test_logs_call_with_args(self):
        @log_call
        def bound(n, m, q=0):
            return n + m + q

        mock_logger = _captured(bound, 4, 1, q=2)
        msg = mock_logger.debug.call_args[0][0]
        assert msg.startswith("CALL bound")
        assert "4, 1" in msg and "q=2" in msg

    def test_no_args_shows_placeholder(self):
        @log_call
        def func():
            pass

        msg = _captured(func).debug.call_args[0][0]
        assert "—" in msg

    def test_transcript_argument_abbreviated(self):
        @log_call
        def decide(omega):
            pass

        msg = _captured(decide, ReplySequence(tuple(range(100)))).debug.call_args[0][0]
        assert "<ReplySequence len=100>" in msg

    def test_skips_argument_formatting_above_debug(self):
        @log_call
        def func(x):
            pass

        mock_logger = MagicMock()
        mock_logger.isEnabledFor.return_value = False
        with patch("src.logging_config.logging") as mock_logging:
            mock_logging.getLogger.return_value = mock_logger
            func(1)
        mock_logger.debug.assert_not_called()
        mock_logger.info.assert_called_once()

    def test_logs_ok_with_timing(self):
        @log_call
        def noop():
            pass

        msg = _captured(noop).info.call_args[0][0]
        assert msg.startswith("OK   noop")
        assert msg.endswith("ms")

    def test_logs_fail_and_reraises(self):
        @log_call
        def enumerate_profiles():
            raise EnvelopeError("enumeration needs q <= 30, got q=31")

        mock_logger = MagicMock()
        with patch("src.logging_config.logging") as mock_logging:
            mock_logging.getLogger.return_value = mock_logger
            with pytest.raises(EnvelopeError, match="q <= 30"):
                enumerate_profiles()

        msg = mock_logger.error.call_args[0][0]
        assert "FAIL enumerate_profiles" in msg
        assert "EnvelopeError" in msg
        assert "ms" in msg
        mock_logger.info.assert_not_called()
