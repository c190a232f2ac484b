"""
Static PNG plots of toolkit results, written next to the data files.
"""

import logging
from pathlib import Path
from typing import List, Optional, Union

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..inverse.pipeline import ReconstructionResult  # noqa: E402
from ..models.records import EigenvalueRecord  # noqa: E402
from ..potential.model import Potential, evaluate_many  # noqa: E402

logger = logging.getLogger(__name__)


class ResultVisualizer:
    """Draws one figure per result and saves it as PNG."""

    def __init__(self, title: str = "Transmission eigenvalue toolkit"):
        self.title = title

    def _save(self, fig, path: Union[str, Path]) -> Path:
        path = Path(path)
        fig.suptitle(self.title)
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
        logger.info(f"Saved plot {path}")
        return path

    def plot_key_quantity(self, ks, Ds, path: Union[str, Path]) -> Path:
        """Re D and Im D along the evaluation grid."""
        ks = np.asarray(ks, dtype=complex)
        Ds = np.asarray(Ds, dtype=complex)
        fig, ax = plt.subplots(figsize=(8, 4.5))
        x = ks.real if np.all(ks.imag == 0) else np.abs(ks)
        ax.plot(x, Ds.real, 'b-', label='Re D')
        ax.plot(x, Ds.imag, 'r--', label='Im D')
        ax.axhline(0.0, color='gray', linewidth=0.5)
        ax.set_xlabel("k")
        ax.set_ylabel("D(k)")
        ax.legend()
        return self._save(fig, path)

    def plot_eigenvalues(self, records: List[EigenvalueRecord], path: Union[str, Path]) -> Path:
        """First-quadrant k-plane positions, marker size by multiplicity."""
        fig, ax = plt.subplots(figsize=(6, 6))
        colors = {'positive': 'tab:blue', 'negative': 'tab:red', 'zero': 'black', 'complex': 'tab:green'}
        for kind, color in colors.items():
            chosen = [r for r in records if r.kind == kind]
            if chosen:
                ax.scatter([r.k.real for r in chosen], [r.k.imag for r in chosen],
                           s=[30 * r.multiplicity for r in chosen], c=color, label=kind)
        ax.set_xlabel("Re k")
        ax.set_ylabel("Im k")
        if records:
            ax.legend()
        return self._save(fig, path)

    def plot_reconstruction(self, result: ReconstructionResult, path: Union[str, Path],
                            exact: Optional[Potential] = None) -> Path:
        """Recovered V(x), with the exact potential when known."""
        xs = result.solution.x_grid
        fig, ax = plt.subplots(figsize=(8, 4.5))
        ax.plot(xs, result.solution.V_recovered, 'b-', label='recovered')
        if exact is not None:
            ax.plot(xs, evaluate_many(exact, xs), 'k--', label='exact')
        ax.set_xlabel("x")
        ax.set_ylabel("V(x)")
        ax.legend()
        return self._save(fig, path)
