"""Bundled example data for the CLI and the test suite."""

from importlib.resources import files

__all__ = ["example_path"]


def example_path() -> str:
    """Absolute path of the committed synthetic regression CSV."""
    return str(files(__name__).joinpath("synthetic_additive.csv"))
