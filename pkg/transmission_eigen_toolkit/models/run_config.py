"""
Validated configuration of one command-line invocation.
"""

from typing import Any, Dict, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..potential.model import BoundaryCondition
from .records import SearchParams

COMMANDS = ('forward', 'eigs', 'inverse', 'roundtrip', 'example')
EXAMPLE_IDS = ('6.1a', '6.1b', '6.1c', '6.1d', '6.2', '6.3', '6.4')


class RunConfig(BaseModel):
    """
    Arguments of a run, checked per command.

    Optional numbers left unset fall back to the YAML config.
    """

    model_config = ConfigDict(extra='forbid', frozen=True)

    command: Literal['forward', 'eigs', 'inverse', 'roundtrip', 'example']
    out: str
    potential_path: Optional[str] = None
    input_path: Optional[str] = None
    cot_theta: Optional[float] = None
    dirichlet: bool = False
    format: Literal['csv', 'json'] = 'csv'
    k_max: Optional[float] = None
    beta_max: Optional[float] = None
    rect: Optional[Tuple[float, float, float, float]] = None
    grid: Optional[int] = None
    tol: Optional[float] = None
    x_max: Optional[float] = None
    dx: Optional[float] = None
    example_id: Optional[str] = None
    plot: bool = False
    config_path: Optional[str] = None

    @field_validator('k_max', 'beta_max', 'tol', 'x_max', 'dx')
    @classmethod
    def _positive(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not value > 0:
            raise ValueError("must be positive")
        return value

    @field_validator('grid')
    @classmethod
    def _grid_size(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 2:
            raise ValueError("grid needs at least 2 points")
        return value

    @field_validator('rect', mode='before')
    @classmethod
    def _parse_rect(cls, value: Any) -> Any:
        if isinstance(value, str):
            parts = [p for p in value.split(',') if p.strip()]
            if len(parts) != 4:
                raise ValueError("rect is re0,re1,im0,im1")
            return tuple(float(p) for p in parts)
        return value

    @field_validator('rect')
    @classmethod
    def _rect_order(cls, value):
        if value is not None:
            re0, re1, im0, im1 = value
            if not (re1 > re0 and im1 > im0):
                raise ValueError("rect needs re1 > re0 and im1 > im0")
        return value

    @field_validator('example_id')
    @classmethod
    def _known_example(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value not in EXAMPLE_IDS:
            raise ValueError(f"unknown example '{value}', expected one of {', '.join(EXAMPLE_IDS)}")
        return value

    @model_validator(mode='after')
    def _required_per_command(self) -> "RunConfig":
        if self.dirichlet and self.cot_theta is not None:
            raise ValueError("--cot-theta and --dirichlet exclude each other")
        needs_potential = self.command in ('forward', 'eigs', 'roundtrip')
        if needs_potential and not self.potential_path:
            raise ValueError(f"'{self.command}' needs --potential")
        if needs_potential and self.cot_theta is None and not self.dirichlet:
            raise ValueError(f"'{self.command}' needs --cot-theta or --dirichlet")
        if self.command == 'roundtrip' and self.dirichlet:
            raise ValueError("'roundtrip' needs a non-Dirichlet boundary condition")
        if self.command == 'inverse' and not self.input_path:
            raise ValueError("'inverse' needs --input")
        if self.command == 'example' and not self.example_id:
            raise ValueError("'example' needs an example id")
        return self

    @property
    def boundary_condition(self) -> Optional[BoundaryCondition]:
        if self.dirichlet:
            return BoundaryCondition.dirichlet()
        if self.cot_theta is None:
            return None
        return BoundaryCondition.non_dirichlet(self.cot_theta)

    def search_params(self, spectra_cfg: Dict[str, Any]) -> SearchParams:
        """Search settings from the 'spectra' config section with command-line overrides."""
        settings = {k: v for k, v in spectra_cfg.items() if k in SearchParams.__dataclass_fields__}
        for name in ('k_max', 'beta_max', 'tol'):
            if getattr(self, name) is not None:
                settings[name] = getattr(self, name)
        if self.rect is not None:
            settings['rect'] = tuple(self.rect)
        elif settings.get('rect') is not None:
            settings['rect'] = tuple(settings['rect'])
        return SearchParams(**settings)
