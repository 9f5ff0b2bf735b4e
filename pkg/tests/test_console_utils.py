"""Tests for console_utils module."""
from unittest.mock import patch

from rmhd_dg.console_utils import is_verbose, safe_print, set_verbose, verbose_print


class TestSafePrint:
    def test_plain_text(self, capsys):
        safe_print("hello world")
        assert capsys.readouterr().out == "hello world\n"

    def test_level_adds_tag(self, capsys):
        safe_print("run finished", "SUCCESS")
        assert capsys.readouterr().out.startswith("[SUCCESS] run finished")

    def test_lowercase_level(self, capsys):
        safe_print("careful", "warning")
        assert capsys.readouterr().out.startswith("[WARNING] careful")

    def test_unknown_level_uses_bracket_prefix(self, capsys):
        safe_print("custom", "TRACE")
        assert capsys.readouterr().out.startswith("[TRACE] custom")

    def test_existing_tag_not_doubled(self, capsys):
        safe_print("[SOLVER-FAILURE] recovery failed", "ERROR")
        assert capsys.readouterr().out.startswith("[SOLVER-FAILURE]")

    def test_kwargs_forwarded(self, capsys):
        safe_print("no newline", end="")
        assert capsys.readouterr().out == "no newline"

    def test_unencodable_text_falls_back_to_ascii(self):
        printed = []

        def fake_print(text, **kwargs):
            if not text.isascii():
                raise UnicodeEncodeError("charmap", text, 0, 1, "cannot encode")
            printed.append(text)

        with patch("builtins.print", side_effect=fake_print):
            safe_print("rho ρ = 1", "INFO")
        assert printed == ["[INFO] rho ? = 1"]


class TestVerbose:
    def test_default_off(self, capsys):
        assert not is_verbose()
        verbose_print("hidden")
        assert capsys.readouterr().out == ""

    def test_enabled(self, capsys):
        set_verbose(True)
        assert is_verbose()
        verbose_print("shown", "DEBUG")
        assert "[DEBUG] shown" in capsys.readouterr().out
