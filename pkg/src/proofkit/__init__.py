"""Validator and witness toolchain for DAG-TOML proof bundles."""

from .errors import (
    BundleError,
    BundleParseError,
    CycleError,
    EmptyProfile,
    SpawnError,
    UnknownClaim,
    UnsupportedLanguage,
)
from .model import ProofBundle, parse_bundle, resolve_paths, serialize_bundle
from .outcomes import Outcome, ReportRow, RunSummary, Status

__version__ = "0.1.0"

__all__ = [
    "BundleError",
    "BundleParseError",
    "CycleError",
    "EmptyProfile",
    "Outcome",
    "ProofBundle",
    "ReportRow",
    "RunSummary",
    "SpawnError",
    "Status",
    "UnknownClaim",
    "UnsupportedLanguage",
    "parse_bundle",
    "resolve_paths",
    "serialize_bundle",
]
