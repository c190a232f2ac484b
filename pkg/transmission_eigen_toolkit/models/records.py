"""
Immutable result records shared by the forward, spectra and inverse packages.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .exceptions import PotentialValidationError

EIGENVALUE_KINDS = ('positive', 'negative', 'zero', 'complex')


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validating a potential."""

    is_class_A: bool
    has_deltas: bool
    messages: Tuple[str, ...] = ()


@dataclass(frozen=True)
class JostEval:
    """Jost solution data at the origin for one wavenumber."""

    k: complex
    f0: complex
    fp0: complex
    F: complex


@dataclass(frozen=True)
class RegularEval:
    """Regular solution and its derivative at one point."""

    k: complex
    x: float
    phi: complex
    phip: complex


@dataclass(frozen=True)
class EigenvalueRecord:
    """
    A transmission eigenvalue located in the closed first quadrant.

    Attributes:
        lam: The eigenvalue k**2
        k: Wavenumber with Re k >= 0 and Im k >= 0
        multiplicity: Order of k**2 as a zero of D viewed in lambda
        kind: One of positive, negative, zero, complex
        residual: |D(k)| at the stored k
        refined: False when Newton or bisection did not converge, or the
            residual exceeds tol times residual_scale
        residual_scale: max(1, |D|) sampled around k
        gamma_scale: max(1, |gamma|) of the Hadamard data, None when unknown
    """

    lam: complex
    k: complex
    multiplicity: int
    kind: str
    residual: float = 0.0
    refined: bool = True
    residual_scale: float = 1.0
    gamma_scale: Optional[float] = None

    def __post_init__(self):
        if self.kind not in EIGENVALUE_KINDS:
            raise PotentialValidationError(f"Unknown eigenvalue kind '{self.kind}'")
        if self.multiplicity < 1:
            raise PotentialValidationError("Eigenvalue multiplicity must be positive")

    @staticmethod
    def classify(k: complex, tol: float = 1e-9) -> str:
        """Classify a first-quadrant wavenumber."""
        scale = max(1.0, abs(k))
        on_real = abs(k.imag) <= tol * scale
        on_imag = abs(k.real) <= tol * scale
        if on_real and on_imag:
            return 'zero'
        if on_real:
            return 'positive'
        if on_imag:
            return 'negative'
        return 'complex'

    @classmethod
    def from_k(
        cls,
        k: complex,
        multiplicity: int,
        residual: float = 0.0,
        refined: bool = True,
        residual_scale: float = 1.0
    ) -> "EigenvalueRecord":
        """Build a record, snapping k onto an axis when it sits on one."""
        k = complex(k)
        kind = cls.classify(k)
        if kind == 'zero':
            k = 0j
        elif kind == 'positive':
            k = complex(abs(k.real), 0.0)
        elif kind == 'negative':
            k = complex(0.0, abs(k.imag))
        return cls(
            lam=k * k,
            k=k,
            multiplicity=int(multiplicity),
            kind=kind,
            residual=float(residual),
            refined=refined,
            residual_scale=float(residual_scale)
        )


@dataclass(frozen=True)
class HadamardData:
    """
    Parameters of D(k) = gamma * k^(2d) * prod(1 - k^2/k_j^2).

    Attributes:
        gamma: Leading Taylor coefficient at the origin
        d: Lambda-multiplicity of the zero eigenvalue
        zeros: First-quadrant zeros k_j with their multiplicities
    """

    gamma: float
    d: int
    zeros: Tuple[Tuple[complex, int], ...] = ()

    def __post_init__(self):
        if not np.isfinite(self.gamma) or self.gamma == 0.0:
            raise PotentialValidationError("gamma must be finite and nonzero")
        if self.d < 0:
            raise PotentialValidationError("d must be nonnegative")
        for k_j, mult in self.zeros:
            if mult < 1:
                raise PotentialValidationError("zero multiplicities must be positive")
            if k_j == 0:
                raise PotentialValidationError("the origin is carried by d, not by zeros")


@dataclass(frozen=True)
class BoundState:
    """A bound state at k = i*beta with norming constant m."""

    beta: float
    norming_constant: float

    def __post_init__(self):
        if self.beta <= 0 or self.norming_constant <= 0:
            raise PotentialValidationError("bound states need beta > 0 and m > 0")


@dataclass(frozen=True)
class AuxSpectra:
    """Zeros in lambda of phi(k,b) and phi'(k,b)."""

    omega_sq: Tuple[float, ...]
    eta_sq: Tuple[float, ...]
    partial: bool = False


@dataclass(frozen=True)
class SearchParams:
    """
    Search region and tolerances for transmission eigenvalues.

    scan_step defaults to pi/(8b) when left unset.
    """

    k_max: float = 30.0
    beta_max: float = 20.0
    rect: Optional[Tuple[float, float, float, float]] = None
    tol: float = 1e-8
    scan_step: Optional[float] = None
    origin_radius: float = 1e-3
    min_box: float = 1e-3
    axis_offset: float = 1e-2
    quadrant: bool = True

    def __post_init__(self):
        if self.k_max <= 0 or self.beta_max <= 0 or self.tol <= 0:
            raise PotentialValidationError("search reaches and tolerance must be positive")
        if self.rect is not None:
            re0, re1, im0, im1 = self.rect
            if not (re1 > re0 and im1 > im0):
                raise PotentialValidationError("rect must be re0,re1,im0,im1 with re1>re0, im1>im0")


@dataclass(frozen=True, eq=False)
class ScatteringData:
    """
    Scattering matrix on a uniform real grid plus bound-state data.

    Attributes:
        k_grid: Symmetric real grid k_j = (j + 1/2) h
        h: Grid spacing
        K_reach: Largest |k| on the grid
        S_values: S(k_j)
        bound_states: Bound states in increasing beta
        W: Moment of the potential used for the Fourier tail
        cot_theta: Boundary parameter used for the Fourier tail
    """

    k_grid: np.ndarray
    h: float
    K_reach: float
    S_values: np.ndarray
    bound_states: Tuple[BoundState, ...] = ()
    W: float = 0.0
    cot_theta: float = 0.0


@dataclass(frozen=True, eq=False)
class MarchenkoSolution:
    """
    Output of the Marchenko solve.

    K_values[i, j] holds K(x_i, x_i + y_grid[j]).
    """

    x_grid: np.ndarray
    y_grid: np.ndarray
    K_values: np.ndarray
    K_diagonal: np.ndarray
    V_recovered: np.ndarray
    condition_numbers: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def as_dict(self) -> dict:
        """Plain-list form of the recovered potential."""
        return {
            'xs': [float(x) for x in self.x_grid],
            'vs': [float(v) for v in self.V_recovered]
        }


def sort_records(records: List[EigenvalueRecord]) -> List[EigenvalueRecord]:
    """Sort eigenvalue records by |lambda| with a deterministic tie-break."""
    return sorted(records, key=lambda r: (abs(r.lam), r.k.real, r.k.imag))
