"""
ArtifactStore -- series CSVs, contour JSON/CSV, tables and manifests on disk.

Every write goes to a temp file in the target directory and is renamed into
place under a filelock, so readers never see partial files. CSV floats use
17 significant digits; JSON floats use Python's shortest round-trip repr.
"""

import json
import os
import tempfile
from pathlib import Path
from typing import Any
from typing import Sequence

import numpy as np
import numpy.typing as npt
import pandas as pd
import structlog
from filelock import FileLock

from vqar.core.quantile import ContourSet
from vqar.errors import SeriesIOError

logger = structlog.get_logger(__name__)

FloatArray = npt.NDArray[np.float64]

FLOAT_FORMAT = "%.17g"


def read_series_csv(path: str) -> FloatArray:
    """Load a T x d series from a CSV with header t, x1..xd."""
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except FileNotFoundError:
        raise SeriesIOError(path, "file not found")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise SeriesIOError(path, f"unreadable CSV: {exc}")

    columns = [c for c in frame.columns if str(c).startswith("x")]
    columns.sort(key=lambda c: int(str(c)[1:]) if str(c)[1:].isdigit() else 0)
    if not columns:
        raise SeriesIOError(path, "no x1..xd columns")
    if "t" in frame.columns:
        frame = frame.sort_values("t", kind="stable")
    try:
        values = frame[columns].to_numpy(dtype=np.float64)
    except ValueError as exc:
        raise SeriesIOError(path, f"non-numeric values: {exc}")
    logger.debug("store.series_read", path=path, T=values.shape[0], d=values.shape[1])
    return values


def series_frame(series: FloatArray, start: int = 1) -> pd.DataFrame:
    series = np.atleast_2d(series)
    frame = pd.DataFrame(series, columns=[f"x{i + 1}" for i in range(series.shape[1])])
    frame.insert(0, "t", np.arange(start, start + series.shape[0]))
    return frame


def read_panel(paths: Sequence[str]) -> list[FloatArray]:
    """One CSV per realization."""
    return [read_series_csv(p) for p in paths]


class ArtifactStore:
    """Writes run artifacts under one output directory."""

    def __init__(self, out_dir: str) -> None:
        self.root = Path(out_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self.written: list[str] = []

    def path(self, name: str) -> Path:
        return self.root / name

    def _atomic_write(self, name: str, text: str) -> str:
        target = self.path(name)
        target.parent.mkdir(parents=True, exist_ok=True)
        lock = FileLock(f"{target}.lock")
        with lock:
            fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
                os.replace(tmp, target)
            except OSError as exc:
                if os.path.exists(tmp):
                    os.remove(tmp)
                raise SeriesIOError(str(target), str(exc))
        try:
            os.remove(f"{target}.lock")
        except OSError:
            pass
        self.written.append(str(target))
        logger.debug("store.written", path=str(target))
        return str(target)

    def write_json(self, name: str, payload: Any) -> str:
        return self._atomic_write(name, json.dumps(payload, indent=2, sort_keys=True) + "\n")

    def write_frame(self, name: str, frame: pd.DataFrame) -> str:
        return self._atomic_write(
            name, frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        )

    def write_series(self, name: str, series: FloatArray) -> str:
        return self.write_frame(name, series_frame(series))

    def write_contours(self, stem: str, cs: ContourSet) -> list[str]:
        """<stem>.json with the contour schema and <stem>.csv one row per vertex."""
        paths = [self.write_json(f"{stem}.json", cs.to_dict())]
        if cs.contours and cs.contours[0].shape[1] == 2:
            frame = pd.DataFrame(cs.rows(), columns=["tau", "angle_index", "y1", "y2"])
            paths.append(self.write_frame(f"{stem}.csv", frame))
        return paths

    def write_text(self, name: str, text: str) -> str:
        return self._atomic_write(name, text)


def read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SeriesIOError(path, "file not found")
    except json.JSONDecodeError as exc:
        raise SeriesIOError(path, f"invalid JSON: {exc}")


def read_contours(path: str) -> ContourSet:
    return ContourSet.from_dict(read_json(path))
