"""
Tests for settings, caching, error handling and report formatting.
"""

import os
import unittest
from unittest.mock import patch

from app.components.report_formatter import Report, ReportFormatter
from app.utils.cache import cache_result, clear_cache
from app.utils.config import get_settings
from app.utils.error_handling import (
    EXIT_OK,
    EXIT_PRECONDITION,
    EXIT_USAGE,
    DegreeCapError,
    InvalidArgumentError,
    UsageError,
    exit_status_for,
    require,
    translate_errors,
)


class TestSettings(unittest.TestCase):
    """Test cases for get_settings"""

    @patch.dict(os.environ, {}, clear=True)
    def test_defaults(self):
        """Test that no variable is required"""
        settings = get_settings()
        self.assertEqual(settings.log_level, "WARNING")
        self.assertEqual(settings.cache_size, 256)
        self.assertEqual(settings.default_seed, 0)

    @patch.dict(os.environ, {"PLANE_LIE_LOG_LEVEL": "debug", "PLANE_LIE_CACHE_SIZE": "16", "PLANE_LIE_SEED": "7"}, clear=True)
    def test_overrides(self):
        """Test values read from the environment"""
        settings = get_settings()
        self.assertEqual(settings.log_level, "DEBUG")
        self.assertEqual(settings.cache_size, 16)
        self.assertEqual(settings.default_seed, 7)

    @patch.dict(os.environ, {"PLANE_LIE_LOG_LEVEL": "loud", "PLANE_LIE_CACHE_SIZE": "many"}, clear=True)
    def test_malformed_values(self):
        """Test that malformed values fall back to the defaults"""
        settings = get_settings()
        self.assertEqual(settings.log_level, "WARNING")
        self.assertEqual(settings.cache_size, 256)


class TestCache(unittest.TestCase):
    """Test cases for cache_result"""

    def setUp(self):
        """Set up test fixtures"""
        self.calls = []

        @cache_result(maxsize=4)
        def square(n):
            self.calls.append(n)
            return n * n

        self.square = square

    def test_memoises(self):
        """Test that repeated calls hit the cache"""
        self.assertEqual(self.square(3), 9)
        self.assertEqual(self.square(3), 9)
        self.assertEqual(self.calls, [3])

    def test_bypass_and_clear(self):
        """Test cache_enabled=False and clear_cache"""
        self.square(2)
        self.square(2, cache_enabled=False)
        self.assertEqual(self.calls, [2, 2])
        clear_cache()
        self.square(2)
        self.assertEqual(self.calls, [2, 2, 2])

    def test_eviction(self):
        """Test the LRU bound"""
        for n in range(6):
            self.square(n)
        self.assertEqual(len(self.square.cache), 4)


class TestErrorHandling(unittest.TestCase):
    """Test cases for the error helpers"""

    def test_require(self):
        """Test the precondition helper"""
        require(True, "unused")
        with self.assertRaises(InvalidArgumentError):
            require(False, "bad")
        with self.assertRaises(DegreeCapError):
            require(False, "too small", DegreeCapError)

    def test_exit_status(self):
        """Test the exit code mapping"""
        self.assertEqual(exit_status_for(UsageError("x")), EXIT_USAGE)
        self.assertEqual(exit_status_for(DegreeCapError("x")), EXIT_PRECONDITION)
        with self.assertRaises(KeyError):
            exit_status_for(KeyError("not ours"))

    def test_translate_errors(self):
        """Test that toolkit errors become a status and a rendered message"""
        @translate_errors(lambda message: f"error: {message}")
        def handler(fail):
            if fail:
                raise InvalidArgumentError("p must be positive")
            return EXIT_OK, "fine"

        self.assertEqual(handler(False), (EXIT_OK, "fine"))
        self.assertEqual(handler(True), (EXIT_PRECONDITION, "error: p must be positive"))


class TestReportFormatter(unittest.TestCase):
    """Test cases for ReportFormatter"""

    def setUp(self):
        """Set up test fixtures"""
        self.report = Report("Title", ["first", "second"], ["a 1", "b 2"])

    def test_formats(self):
        """Test both renderings"""
        self.assertEqual(ReportFormatter().render(self.report), "# Title\nfirst\nsecond")
        self.assertEqual(ReportFormatter("lines").render(self.report), "a 1\nb 2")

    def test_error_report(self):
        """Test the error rendering"""
        self.assertEqual(ReportFormatter("lines").render_error("bad"), "error: bad")
        self.assertTrue(ReportFormatter().generate_error_report("bad").error)

    def test_unknown_format(self):
        """Test that only the two formats exist"""
        with self.assertRaises(ValueError):
            ReportFormatter("xml")


if __name__ == '__main__':
    unittest.main()
