"""
The inverse-problem datum: an evaluable key quantity D(k) plus the large-k
limit W = 2 lim D(k).
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..forward.closed_forms import delta_key_quantity, free_key_quantity, square_well_key_quantity, two_step_key_quantity
from ..forward.key_quantity import make_key_quantity
from ..models.exceptions import AccuracyError, DatumInconsistencyError, PotentialValidationError
from ..models.records import HadamardData
from ..potential.io import parse_model
from ..potential.model import BoundaryCondition, Potential
from ..spectra.hadamard import hadamard_eval, hadamard_from_dict

logger = logging.getLogger(__name__)

BUILTINS = ('square_well', 'two_step', 'delta', 'zero')
PROBE_TOL = 1e-8
LADDER_LEVELS = 5
WINDOW_NODES = 256
WINDOW_PERIODS = 8


@dataclass(frozen=True, eq=False)
class DSource:
    """
    An evaluable D(k).

    Attributes:
        form: 'closed' for an exact function, 'hadamard' for a truncated product
        fn: Vectorized k -> D(k)
        support_b: Support length of the underlying potential
        W_hint: Known value of W, used as a consistency check
        label: Short description for logs and reports
    """

    form: str
    fn: Callable
    support_b: float = 1.0
    W_hint: Optional[float] = None
    label: str = ''

    def __call__(self, k):
        return self.fn(k)

    @classmethod
    def closed(cls, fn: Callable, support_b: float = 1.0, W_hint: Optional[float] = None,
               label: str = 'closed') -> "DSource":
        return cls(form='closed', fn=fn, support_b=float(support_b), W_hint=W_hint, label=label)

    @classmethod
    def hadamard(cls, h: HadamardData, support_b: float = 1.0, W_hint: Optional[float] = None) -> "DSource":
        logger.warning("Hadamard-form datum: the truncated product distorts the large-k limit")
        return cls(form='hadamard', fn=lambda k: hadamard_eval(h, k), support_b=float(support_b),
                   W_hint=W_hint, label=f'hadamard ({len(h.zeros)} zeros)')

    @classmethod
    def builtin(cls, name: str, params: Optional[Dict[str, float]] = None,
                cot_theta: Optional[float] = None) -> "DSource":
        """
        Closed-form D of a catalogue potential.

        square_well takes v, b; delta takes a, c, b; two_step is the fixed
        unit-height two-step on (0, 1) with cot(theta) = 0; zero takes b.
        cot_theta may be given in params or as an argument.
        """
        params = dict(params or {})
        cot = float(params.pop('cot_theta', 0.0 if cot_theta is None else cot_theta))
        try:
            if name == 'square_well':
                v, b = float(params['v']), float(params.get('b', 1.0))
                return cls.closed(lambda k: square_well_key_quantity(k, v, b, cot), b, v * b,
                                  f'square_well(v={v:g}, b={b:g})')
            if name == 'delta':
                a, c, b = float(params['a']), float(params['c']), float(params.get('b', 1.0))
                return cls.closed(lambda k: delta_key_quantity(k, a, c, cot), b, c,
                                  f'delta(a={a:g}, c={c:g})')
            if name == 'two_step':
                if cot != 0.0:
                    raise PotentialValidationError("the built-in two_step datum has cot_theta = 0")
                return cls.closed(two_step_key_quantity, 1.0, 0.0, 'two_step')
            if name == 'zero':
                return cls.closed(free_key_quantity, float(params.get('b', 1.0)), 0.0, 'zero')
        except KeyError as exc:
            raise PotentialValidationError(f"built-in '{name}' is missing parameter {exc}") from exc
        raise PotentialValidationError(f"unknown built-in datum '{name}'", details={'known': list(BUILTINS)})

    @classmethod
    def from_forward(cls, p: Potential, bc: BoundaryCondition) -> "DSource":
        """D computed by the forward solver; W is left for the limit ladder."""
        return cls.closed(make_key_quantity(p, bc), p.support_b, None, f'forward ({bc.describe()})')

    def probe(self, n: int = 16) -> None:
        """
        Spot-check evenness, D(-k*) = D(k)* and realness on the real axis.

        Raises:
            DatumInconsistencyError: a check fails beyond PROBE_TOL
        """
        scale = 1.0 / self.support_b
        t = np.linspace(0.3, 9.7, n) * scale
        ks = np.concatenate([t, t * np.exp(0.6j), 1j * t[: n // 2]])
        values = np.asarray(self.fn(np.concatenate([ks, -ks, -np.conj(ks)])), dtype=complex)
        m = len(ks)
        D, D_minus, D_mirror = values[:m], values[m:2 * m], values[2 * m:]
        bound = PROBE_TOL * np.maximum(1.0, np.abs(D))
        checks = {
            'even': np.abs(D - D_minus) <= bound,
            'conjugate': np.abs(D_mirror - np.conj(D)) <= bound,
            'real_on_axis': np.abs(D[:n].imag) <= bound[:n],
        }
        failed = [name for name, ok in checks.items() if not np.all(ok)]
        if failed:
            raise DatumInconsistencyError(
                f"datum {self.label} fails the {', '.join(failed)} check",
                stage='probe', details={'failed': failed}
            )
        logger.debug(f"Datum {self.label} passed symmetry probes")


def _window_mean(d: DSource, k: float, width: float, nodes: np.ndarray, weights: np.ndarray) -> float:
    """Hann-weighted mean of D over [k, k + width]."""
    s = 0.5 * (nodes + 1.0)
    hann = weights * np.sin(np.pi * s) ** 2
    values = np.real(d((k + width * s).astype(complex)))
    return float(np.dot(hann, values) / np.sum(hann))


def limit_W(d: DSource, K0: Optional[float] = None, levels: int = LADDER_LEVELS, tol: float = 1e-3) -> float:
    """
    W = 2 lim D(k) along k = K0 * 2^j.

    Each rung is a Hann-weighted mean of D over WINDOW_PERIODS periods pi/b,
    which suppresses the O(1/k) oscillations; the rungs are then
    Richardson-extrapolated assuming an O(1/k^2) remainder.

    Args:
        d: Datum
        K0: First rung, 50/b by default
        levels: Number of rungs
        tol: Convergence tolerance relative to max(1, |W|)

    Returns:
        W

    Raises:
        AccuracyError: the last two extrapolants disagree
    """
    if d.form == 'hadamard' and d.W_hint is not None:
        logger.warning(f"Using the supplied W={d.W_hint:g} for Hadamard-form datum")
        return float(d.W_hint)

    b = d.support_b
    K0 = K0 or 50.0 / b
    width = WINDOW_PERIODS * np.pi / b
    nodes, weights = np.polynomial.legendre.leggauss(WINDOW_NODES)
    rungs = [_window_mean(d, K0 * 2 ** j, width, nodes, weights) for j in range(levels)]
    extrapolants = [(4.0 * rungs[j + 1] - rungs[j]) / 3.0 for j in range(levels - 1)]
    logger.info(f"Limit ladder rungs {[f'{r:.8g}' for r in rungs]}")

    W = 2.0 * extrapolants[-1]
    spread = 2.0 * abs(extrapolants[-1] - extrapolants[-2])
    if spread > tol * max(1.0, abs(W)):
        raise AccuracyError(
            f"limit ladder did not converge: last extrapolants give W={2 * extrapolants[-2]:.8g} and {W:.8g}",
            stage='limit_W', details={'rungs': rungs, 'K0': K0}
        )
    if d.W_hint is not None and abs(W - d.W_hint) > tol * max(1.0, abs(W)):
        logger.warning(f"Ladder W={W:.8g} disagrees with the supplied W={d.W_hint:g}")
    if d.form == 'hadamard':
        logger.warning(f"W={W:.8g} extracted from a truncated product; supply W to override")
    logger.info(f"Extracted W = {W:.10g}")
    return W


class DatumSpec(BaseModel):
    model_config = ConfigDict(extra='allow')

    type: Literal['hadamard', 'builtin']
    name: Optional[str] = None
    params: Dict[str, float] = {}
    gamma: Optional[float] = None
    d: int = 0
    zeros: List[Dict[str, float]] = []
    b: float = 1.0


class InverseInputFile(BaseModel):
    """{"cot_theta": .., "D": {...}, "W": optional}"""

    model_config = ConfigDict(extra='forbid')

    cot_theta: float
    D: DatumSpec
    W: Optional[float] = Field(default=None)


def datum_from_dict(data: Dict[str, Any]) -> tuple:
    """
    Parse the inverse input JSON form.

    Returns:
        (DSource, cot_theta)
    """
    parsed = parse_model(InverseInputFile, data, 'inverse input')
    spec = parsed.D
    if spec.type == 'builtin':
        if not spec.name:
            raise PotentialValidationError("built-in datum needs a name")
        source = DSource.builtin(spec.name, spec.params, parsed.cot_theta)
        if parsed.W is not None:
            source = DSource(source.form, source.fn, source.support_b, parsed.W, source.label)
        return source, parsed.cot_theta
    h = hadamard_from_dict({'gamma': spec.gamma, 'd': spec.d, 'zeros': spec.zeros})
    return DSource.hadamard(h, spec.b, parsed.W), parsed.cot_theta


def load_inverse_input(path: Union[str, Path]) -> tuple:
    """Read an inverse input file; returns (DSource, cot_theta)."""
    path = Path(path)
    if not path.exists():
        raise PotentialValidationError(f"inverse input not found: {path}")
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise PotentialValidationError(f"inverse input is not JSON: {e}")
    return datum_from_dict(data)
