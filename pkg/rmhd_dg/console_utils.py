"""
console_utils.py — Console output helpers for rmhd-dg.

safe_print prefixes a level tag and survives consoles that cannot encode the
text (Windows code pages, redirected pipes); verbose_print only prints when
``--verbose`` was given.
"""
from __future__ import annotations

import sys

LEVEL_TAGS = {
    "SUCCESS": "[SUCCESS]",
    "ERROR": "[ERROR]",
    "WARNING": "[WARNING]",
    "INFO": "[INFO]",
    "DEBUG": "[DEBUG]",
}


def safe_print(text: str, level: str | None = None, **kwargs) -> None:
    """print() with an optional level tag and an ASCII fallback.

    The tag is skipped when the text already starts with one.
    """
    prefix = ""
    if level and not text.lstrip().startswith("["):
        prefix = LEVEL_TAGS.get(level.upper(), f"[{level.upper()}]") + " "
    final_text = f"{prefix}{text}"
    try:
        print(final_text, **kwargs)
    except UnicodeEncodeError:
        print(final_text.encode("ascii", errors="replace").decode("ascii"), **kwargs)


def configure_windows_console() -> None:
    if sys.platform != "win32":
        return
    for stream in (sys.stdout, sys.stderr):
        try:
            stream.reconfigure(encoding="utf-8")
        except (AttributeError, ValueError):
            pass


# ---------------------------------------------------------------------------
# Verbose mode
# ---------------------------------------------------------------------------

_verbose: bool = False


def set_verbose(v: bool) -> None:
    global _verbose
    _verbose = v


def is_verbose() -> bool:
    return _verbose


def verbose_print(text: str, level: str | None = None, **kwargs) -> None:
    """Print only when verbose mode is active. Same signature as safe_print."""
    if _verbose:
        safe_print(text, level, **kwargs)


configure_windows_console()
