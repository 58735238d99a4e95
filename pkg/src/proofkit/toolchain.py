"""Command-availability oracles for the witness harness.

Production resolution consults the executable search path. Hermetic tests (and
CI) inject a manifest instead: a JSON file mapping tool name to an absolute
stub path, or to null for a deliberately absent tool. Tools not named in a
manifest are treated as absent, so a manifest fully pins the visible world.
The manifest file is named by the PROOFKIT_TOOL_MANIFEST environment variable.
"""

import json
import os
import shutil
from dataclasses import dataclass
from typing import Dict, List, Optional

TOOL_MANIFEST_ENV = "PROOFKIT_TOOL_MANIFEST"


@dataclass(frozen=True)
class ToolchainProbe:
    unit_id: str
    required_tools: List[str]
    missing: List[str]

    @property
    def available(self) -> bool:
        return not self.missing


class PathResolver:
    """Resolves command names against the executable search path."""

    def resolve(self, name: str) -> Optional[str]:
        return shutil.which(name)


class ManifestResolver:
    """Resolves command names against a fixed name -> path mapping."""

    def __init__(self, tools: Dict[str, Optional[str]]):
        self._tools = dict(tools)

    @classmethod
    def from_file(cls, path: str) -> "ManifestResolver":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(json.load(fh))

    def resolve(self, name: str) -> Optional[str]:
        return self._tools.get(name)


def resolver_from_env(environ=os.environ):
    manifest = environ.get(TOOL_MANIFEST_ENV)
    if manifest:
        return ManifestResolver.from_file(manifest)
    return PathResolver()


def probe_toolchain(required_tools, resolver, unit_id: str = "") -> ToolchainProbe:
    """Report exactly which of the required command names are unavailable."""
    tools = list(required_tools)
    missing = [name for name in tools if resolver.resolve(name) is None]
    return ToolchainProbe(unit_id=unit_id, required_tools=tools, missing=missing)
