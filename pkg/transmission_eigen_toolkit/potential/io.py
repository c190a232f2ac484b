"""
JSON exchange formats for potentials and boundary conditions.

Files are parsed through pydantic schemas first, then converted to the
frozen domain types and validated.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from ..models.exceptions import PotentialValidationError
from .model import BoundaryCondition, Delta, Potential, Segment, validate


class SegmentModel(BaseModel):
    model_config = ConfigDict(extra='forbid')

    x0: float
    x1: float
    v: float


class DeltaModel(BaseModel):
    model_config = ConfigDict(extra='forbid')

    a: float
    c: float


class SamplesModel(BaseModel):
    model_config = ConfigDict(extra='forbid')

    xs: List[float]
    vs: List[float]

    @model_validator(mode='after')
    def _same_length(self) -> "SamplesModel":
        if len(self.xs) != len(self.vs):
            raise ValueError("samples.xs and samples.vs differ in length")
        return self


class PotentialFile(BaseModel):
    """On-disk potential; absent keys mean empty."""

    model_config = ConfigDict(extra='forbid')

    b: float
    segments: List[SegmentModel] = []
    deltas: List[DeltaModel] = []
    samples: Optional[SamplesModel] = None


class NonDirichletModel(BaseModel):
    model_config = ConfigDict(extra='forbid')

    type: Literal['non-dirichlet']
    cot_theta: float


class DirichletModel(BaseModel):
    model_config = ConfigDict(extra='forbid')

    type: Literal['dirichlet']


BoundaryConditionFile = Union[NonDirichletModel, DirichletModel]


def parse_model(model: Any, data: Dict[str, Any], what: str) -> Any:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise PotentialValidationError(f"invalid {what}: {e.errors()[0]['msg']}",
                                       details={'errors': json.loads(e.json())})


def potential_from_dict(data: Dict[str, Any]) -> Potential:
    """
    Build and validate a Potential from its JSON form.

    Args:
        data: Dict following the potential file layout

    Returns:
        Validated Potential
    """
    parsed = parse_model(PotentialFile, data, 'potential')
    xs = vs = None
    if parsed.samples is not None and parsed.samples.xs:
        xs = np.asarray(parsed.samples.xs, dtype=float)
        vs = np.asarray(parsed.samples.vs, dtype=float)
    p = Potential(
        support_b=parsed.b,
        segments=tuple(Segment(s.x0, s.x1, s.v) for s in parsed.segments),
        deltas=tuple(Delta(d.a, d.c) for d in parsed.deltas),
        sample_xs=xs,
        sample_vs=vs
    )
    validate(p)
    return p


def potential_to_dict(p: Potential) -> Dict[str, Any]:
    """JSON form of a Potential; floats keep their repr so reading back is exact."""
    data: Dict[str, Any] = {'b': p.support_b}
    if p.segments:
        data['segments'] = [{'x0': s.x0, 'x1': s.x1, 'v': s.v} for s in p.segments]
    if p.deltas:
        data['deltas'] = [{'a': d.a, 'c': d.c} for d in p.deltas]
    if p.has_samples:
        data['samples'] = {
            'xs': [float(x) for x in p.sample_xs],
            'vs': [float(v) for v in p.sample_vs]
        }
    return data


def boundary_from_dict(data: Dict[str, Any]) -> BoundaryCondition:
    """Build a BoundaryCondition from its JSON form."""
    kind = data.get('type') if isinstance(data, dict) else None
    if kind == 'dirichlet':
        parse_model(DirichletModel, data, 'boundary condition')
        return BoundaryCondition.dirichlet()
    parsed = parse_model(NonDirichletModel, data, 'boundary condition')
    return BoundaryCondition.non_dirichlet(parsed.cot_theta)


def boundary_to_dict(bc: BoundaryCondition) -> Dict[str, Any]:
    if bc.is_dirichlet:
        return {'type': 'dirichlet'}
    return {'type': 'non-dirichlet', 'cot_theta': bc.cot_theta}


def load_potential(path: Union[str, Path]) -> Potential:
    """Read a potential JSON file."""
    path = Path(path)
    if not path.exists():
        raise PotentialValidationError(f"potential file not found: {path}")
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise PotentialValidationError(f"potential file is not JSON: {e}")
    return potential_from_dict(data)


def save_potential(p: Potential, path: Union[str, Path]) -> None:
    """Write a potential JSON file."""
    with open(path, 'w') as f:
        json.dump(potential_to_dict(p), f, indent=2)
