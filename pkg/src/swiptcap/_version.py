from __future__ import annotations

import re
from importlib import metadata

from typing_extensions import NamedTuple

_RELEASE = re.compile(r"^(\d+)\.(\d+)\.(\d+)")


class Version(NamedTuple):
    """Release part of the package version."""

    major: int
    minor: int
    patch: int

    @classmethod
    def parse(cls, version: str) -> Version:
        """Leading ``major.minor.patch`` of a version string; local and pre-release tags are dropped."""
        match = _RELEASE.match(version)
        if match is None:
            return cls(0, 0, 0)
        return cls(*(int(g) for g in match.groups()))


def _get_version() -> str:
    """Installed version of swiptcap, ``0.0.0`` when running from a source tree."""
    try:
        return metadata.version("swiptcap")
    except metadata.PackageNotFoundError:
        return "0.0.0"
