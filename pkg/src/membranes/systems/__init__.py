"""Bundled example membrane systems (.memb files)."""

from importlib import resources


def path(name):
    """Filesystem path of a bundled .memb file, e.g. path('divisors')."""
    if not name.endswith(".memb"):
        name += ".memb"
    return resources.files(__name__) / name


def read(name):
    return path(name).read_text(encoding="utf-8")
