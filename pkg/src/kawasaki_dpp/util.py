"""Shared parsing/formatting helpers for parameters and window specs."""

from __future__ import annotations

import re

from .kernel import Window

__all__ = ["format_complex", "parse_complex", "parse_window_spec", "format_float"]

_WINDOW_RE = re.compile(r"^(-?\d+)\.\.(-?\d+)$")


def format_float(x: float) -> str:
    return f"{x:.17g}"


def format_complex(value: complex) -> str:
    """Render as ``a`` or ``a+bi`` with %.17g parts."""
    value = complex(value)
    if value.imag == 0.0:
        return format_float(value.real)
    return f"{value.real:.17g}{value.imag:+.17g}i"


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``a+bi`` or ``a-bi`` literals (also accepts j)."""
    cleaned = text.strip().replace(" ", "")
    try:
        return complex(cleaned.replace("i", "j"))
    except ValueError:
        raise ValueError(f"cannot parse complex literal {text!r}") from None


def parse_window_spec(text: str) -> Window:
    """Parse ``lo..hi`` in integer site indices (site value = index + 1/2)."""
    match = _WINDOW_RE.match(text.strip())
    if not match:
        raise ValueError(f"window spec must look like 'lo..hi', got {text!r}")
    lo, hi = int(match.group(1)), int(match.group(2))
    if lo > hi:
        raise ValueError(f"window spec {text!r} has lo > hi")
    return Window.from_indices(lo, hi)
