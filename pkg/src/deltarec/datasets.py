"""Bundled case-study datasets (shipped verbatim, provenance in the data files)."""
from __future__ import annotations

from importlib import resources

from .records import IntSequence


def _load(name: str, offset: int) -> IntSequence:
    text = resources.files("deltarec.data").joinpath(name).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    return IntSequence.parse("\n".join(lines), offset=offset)


def xie_goh() -> IntSequence:
    """87 counts of items inspected until a defective one; support offset 1."""
    return _load("xie_goh_1993.txt", offset=1)


def earthquakes() -> IntSequence:
    """74 annual counts of magnitude >= 7.5 earthquakes (1950-2023); offset 0."""
    return _load("usgs_earthquakes_1950_2023.txt", offset=0)
