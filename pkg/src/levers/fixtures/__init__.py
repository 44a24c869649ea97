"""Bundled example graphs.

The regional bio-economy fixtures are illustrative reconstructions for
demos and smoke tests, not measured data; their metadata says so.
"""

from importlib import resources

from ..model import FcmGraph, parse_graph

NAMES = (
    "path3",
    "star",
    "cycle2",
    "two_component",
    "selfloop",
    "humber_nonlocal",
    "humber_local",
)


def fixture_text(name: str) -> str:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(NAMES)}")
    return (
        resources.files(__package__).joinpath(f"{name}.json").read_text(encoding="utf-8")
    )


def load(name: str) -> FcmGraph:
    return parse_graph(fixture_text(name))
