import logging
import os
import sys
import tempfile

from pathlib import Path

from config import DEFAULT_OUTPUT_DIR, OUTPUT_DIR_ENV_VAR
from errors import StorageError


def configure_logging(debug: bool) -> None:
    """
    Install a single stream handler on the root logger.

    :param debug: Log at DEBUG level when set, otherwise at INFO.
    """
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s %(message)s"))
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if debug else logging.INFO)


def get_output_dir(override: str | None = None) -> Path:
    """
    Resolve the output directory: explicit override, then the environment
    variable, then the configured default.

    :param override: Directory given on the command line, if any.
    :return: The directory path (not yet created).
    """
    if override:
        return Path(override)
    return Path(os.environ.get(OUTPUT_DIR_ENV_VAR, DEFAULT_OUTPUT_DIR))


def atomic_write(path: Path, text: str) -> Path:
    """
    Write text to a temporary file next to the target, then rename it into place.

    :param path: Final file location.
    :param text: File contents.
    :return: The written path.
    """
    path = Path(path)
    tmp_name = None
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except OSError as e:
        if tmp_name is not None and os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise StorageError(f"Failed to write {path}: {e}") from e

    return path
