"""Bundled example data."""
from importlib.resources import as_file, files

SYNTHETIC_EMAIL = "synthetic_email.txt"


def dataset_path(name: str = SYNTHETIC_EMAIL):
    """Context manager yielding a filesystem path to a bundled dataset."""
    return as_file(files(__name__) / name)
