"""
CLI layer - command-line front end.

Subcommands run figure presets, parameter sweeps, overlap and AAV checks,
and discrimination runs, writing CSV/JSON results.
"""

from .interface import WeakValueCLI

__all__ = [
    "WeakValueCLI"
]
