"""
Result files of the toolkit commands: D-grids, eigenvalue tables, Hadamard
data and reconstructions.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..models.records import EigenvalueRecord, HadamardData
from ..spectra.eigenvalues import write_eigenvalues
from ..spectra.hadamard import hadamard_to_dict

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'
KEY_QUANTITY_COLUMNS = ['k_re', 'k_im', 'D_re', 'D_im']


def convert_np(obj):
    """Turn numpy scalars and arrays (also nested in dicts/lists) into plain Python values."""
    if isinstance(obj, dict):
        return {k: convert_np(v) for k, v in obj.items()}
    elif isinstance(obj, (list, tuple)):
        return [convert_np(i) for i in obj]
    elif isinstance(obj, np.ndarray):
        return convert_np(obj.tolist())
    elif isinstance(obj, np.generic):
        return obj.item()
    elif isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def key_quantity_frame(ks: Sequence[complex], Ds: Sequence[complex]) -> pd.DataFrame:
    """D-grid table with columns k_re, k_im, D_re, D_im."""
    ks = np.asarray(ks, dtype=complex)
    Ds = np.asarray(Ds, dtype=complex)
    return pd.DataFrame({
        'k_re': ks.real,
        'k_im': ks.imag,
        'D_re': Ds.real,
        'D_im': Ds.imag
    }, columns=KEY_QUANTITY_COLUMNS)


def write_key_quantity_grid(path: Union[str, Path], ks: Sequence[complex], Ds: Sequence[complex]) -> None:
    """D-grid CSV, one row per evaluation, 17 significant digits."""
    key_quantity_frame(ks, Ds).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"Wrote {len(ks)} D values to {path}")


def write_json(path: Union[str, Path], data: Any) -> None:
    with open(path, 'w') as f:
        json.dump(convert_np(data), f, indent=2, sort_keys=False)


class ResultCollector:
    """Writes the files of one command next to its --out path."""

    def __init__(self, out_path: Union[str, Path], fmt: str = 'csv'):
        """
        Initialize the collector.

        Args:
            out_path: Main output file; companions share its stem
            fmt: 'csv' or 'json' for tabular outputs
        """
        self.out_path = Path(out_path)
        self.fmt = fmt
        self.written: List[Path] = []
        self.out_path.parent.mkdir(parents=True, exist_ok=True)

    def companion(self, suffix: str) -> Path:
        """<out stem>_<suffix> in the output directory."""
        return self.out_path.with_name(f"{self.out_path.stem}_{suffix}")

    def _record(self, path: Path) -> Path:
        self.written.append(path)
        return path

    def save_frame(self, frame: pd.DataFrame, path: Optional[Path] = None) -> Path:
        """A table as CSV or as a JSON list of rows, following the format."""
        path = path or self.out_path
        if self.fmt == 'json':
            write_json(path, frame.to_dict(orient='records'))
        else:
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        return self._record(path)

    def save_json(self, data: Dict[str, Any], path: Optional[Path] = None) -> Path:
        path = path or self.out_path
        write_json(path, data)
        return self._record(path)

    def save_key_quantity(self, ks, Ds) -> Path:
        if self.fmt == 'json':
            return self.save_frame(key_quantity_frame(ks, Ds))
        write_key_quantity_grid(self.out_path, ks, Ds)
        return self._record(self.out_path)

    def save_eigenvalues(self, records: List[EigenvalueRecord], hadamard: Optional[HadamardData] = None,
                         support_b: Optional[float] = None) -> None:
        """Eigenvalue CSV plus <stem>_hadamard.json when Hadamard data is given."""
        write_eigenvalues(self.out_path, records)
        self._record(self.out_path)
        if hadamard is not None:
            self.save_json(hadamard_to_dict(hadamard, support_b), self.companion('hadamard.json'))

    def save_reconstruction(self, result) -> None:
        """Reconstruction JSON plus <stem>_diagnostics.csv."""
        self.save_json(result.as_dict())
        path = self.companion('diagnostics.csv')
        result.diagnostics().to_csv(path, index=False, float_format=FLOAT_FORMAT)
        self._record(path)
        logger.info(f"Saved reconstruction on {len(result.solution.x_grid)} x-points to {self.out_path}")
