"""Weighted binary-outcome datasets and the development/validation split.

The on-disk format is a CSV with a header row: an ``outcome`` column
(1 = good, 0 = bad), an optional positive ``weight`` column (default
1.0), and one numeric column per characteristic.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from numpy.typing import NDArray

OUTCOME_COLUMN = "outcome"
WEIGHT_COLUMN = "weight"


class DataError(ValueError):
    """Malformed dataset: missing columns, bad outcomes, bad weights."""


@dataclass(frozen=True)
class Dataset:
    outcomes: NDArray[np.int_]
    weights: NDArray[np.float64]
    columns: dict[str, NDArray[np.float64]]

    def __post_init__(self) -> None:
        n = self.outcomes.size
        if self.weights.size != n or any(v.size != n for v in self.columns.values()):
            raise DataError("all dataset columns must have the same length")

    @property
    def n(self) -> int:
        return int(self.outcomes.size)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "Dataset":
        if OUTCOME_COLUMN not in frame.columns:
            raise DataError(f"dataset is missing the {OUTCOME_COLUMN!r} column")
        outcome = frame[OUTCOME_COLUMN].to_numpy()
        if not np.isin(outcome, (0, 1)).all():
            raise DataError(f"{OUTCOME_COLUMN!r} must be 0 (bad) or 1 (good)")
        if WEIGHT_COLUMN in frame.columns:
            weights = frame[WEIGHT_COLUMN].to_numpy(dtype=float)
            if not np.all(np.isfinite(weights)) or np.any(weights < 0):
                raise DataError(f"{WEIGHT_COLUMN!r} must be finite and >= 0")
        else:
            weights = np.ones(len(frame))
        columns = {}
        for name in frame.columns:
            if name in (OUTCOME_COLUMN, WEIGHT_COLUMN):
                continue
            col = frame[name].to_numpy(dtype=float)
            if not np.all(np.isfinite(col)):
                raise DataError(f"column {name!r} has non-finite values")
            columns[name] = col
        return cls(outcomes=outcome.astype(int), weights=weights, columns=columns)

    @classmethod
    def from_csv(cls, path: str | Path) -> "Dataset":
        try:
            frame = pd.read_csv(path)
        except (ValueError, OSError) as err:
            raise DataError(f"cannot read dataset {path}: {err}") from err
        return cls.from_frame(frame)

    def to_frame(self) -> pd.DataFrame:
        data: dict[str, NDArray] = {OUTCOME_COLUMN: self.outcomes, WEIGHT_COLUMN: self.weights}
        data.update(self.columns)
        return pd.DataFrame(data)

    def to_csv(self, path: str | Path) -> None:
        self.to_frame().to_csv(path, index=False)

    def subset(self, idx: NDArray[np.int_]) -> "Dataset":
        return Dataset(
            outcomes=self.outcomes[idx],
            weights=self.weights[idx],
            columns={k: v[idx] for k, v in self.columns.items()},
        )

    def split(self, val_fraction: float, seed: int) -> tuple["Dataset", "Dataset"]:
        """Seeded development/validation split; returns (dev, val)."""
        if not 0.0 < val_fraction < 1.0:
            raise DataError(f"val_fraction must be in (0, 1), got {val_fraction}")
        rng = np.random.default_rng(seed)
        perm = rng.permutation(self.n)
        n_val = int(round(self.n * val_fraction))
        if n_val == 0 or n_val == self.n:
            raise DataError("split leaves an empty development or validation set")
        return self.subset(np.sort(perm[n_val:])), self.subset(np.sort(perm[:n_val]))
