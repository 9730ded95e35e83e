import os

from src.l2gd.errors import DataError

DATA_ROOT = 'data/libsvm'


def ensure_dir_exists(filepath: str) -> None:
    """Ensure the directory for the provided filepath exists."""
    directory = os.path.dirname(filepath)
    if directory and not os.path.exists(directory):
        os.makedirs(directory, exist_ok=True)


def dataset_path(name: str, path: str | None = None, data_root: str = DATA_ROOT) -> str:
    """Explicit path if given, otherwise `<data_root>/<name>`."""
    return path if path else os.path.join(data_root, name)


def read_text(path: str) -> str:
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            return fh.read()
    except FileNotFoundError:
        raise DataError(f"dataset file not found: {path} (set dataset.fetch=true to download it)") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read dataset file {path}: {exc}") from exc
