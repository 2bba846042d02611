"""
Infrastructure layer - result persistence.

JSON record codecs and a directory-backed repository writing CSV and JSON.
"""

from .records import RunMetadata, decision_from_dict, distribution_from_dict
from .repository import ResultRepository

__all__ = [
    "RunMetadata",
    "ResultRepository",
    "decision_from_dict",
    "distribution_from_dict",
]
