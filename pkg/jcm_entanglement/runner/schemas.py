from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config.settings import config
from ..exceptions import InvalidShapeError
from ..physics.evolve import TimeGrid
from ..physics.hamiltonian import ModelSpec
from ..physics.states import FieldParams

Channel = Literal["concurrence", "negativity", "inversion"]

# parameter name -> scenario section, for --sweep and bare --override keys
SWEEPABLE: Dict[str, str] = {
    "nbar_c": "field",
    "nbar_s": "field",
    "nbar_th": "field",
    "phi": "field",
    "alpha_phase": "field",
    "lambda": "model",
    "omega": "model",
    "nu": "model",
    "delta": "model",
    "jz": "model",
    "gd": "model",
    "kerr_k": "model",
    "theta": "atoms",
    "eta": "atoms",
    "n_max": "truncation",
    "t_max": "grid",
    "steps": "grid",
}


class AtomsSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["bell", "werner"]
    theta: Optional[float] = None
    eta: Optional[float] = Field(default=None, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _one_parameter(self) -> "AtomsSpec":
        if self.kind == "bell" and (self.theta is None or self.eta is not None):
            raise ValueError("bell atoms need theta and no eta")
        if self.kind == "werner" and (self.eta is None or self.theta is not None):
            raise ValueError("werner atoms need eta and no theta")
        return self

    @property
    def parameter(self) -> float:
        return self.theta if self.kind == "bell" else self.eta


class OutputSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    channels: List[Channel] = Field(default_factory=lambda: ["concurrence", "negativity"])
    negativity_cuts: List[Literal["atoms_vs_field", "atomA_vs_rest"]] = Field(default_factory=lambda: ["atoms_vs_field"])
    inversion_atoms: List[Literal["A", "B"]] = Field(default_factory=lambda: ["A"])
    wigner_times: List[float] = Field(default_factory=list)
    wigner_extent: float = Field(default_factory=lambda: config.wigner_extent, gt=0.0)
    wigner_points: int = Field(default_factory=lambda: config.wigner_points, ge=3)
    wigner_method: Literal["recurrence", "direct"] = "recurrence"
    pcd: bool = False
    esd: bool = False
    esd_threshold: float = Field(default_factory=lambda: config.esd_threshold, gt=0.0)
    factorized: bool = False
    diagnostics: bool = True

    @property
    def is_empty(self) -> bool:
        return not (self.channels or self.wigner_times or self.pcd or self.esd or self.factorized)

    def channel_names(self) -> List[str]:
        """CSV column names in output order"""
        names: List[str] = []
        for channel in self.channels:
            if channel == "concurrence":
                names.append("concurrence")
            elif channel == "negativity":
                names.extend(
                    "negativity" if cut == "atoms_vs_field" else f"negativity_{cut}" for cut in self.negativity_cuts
                )
            else:
                names.extend(f"inversion_{atom}" for atom in self.inversion_atoms)
        return names


class SweepSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    parameter: str
    values: List[float] = Field(min_length=1)

    @model_validator(mode="after")
    def _sweepable(self) -> "SweepSpec":
        if self.parameter not in SWEEPABLE:
            raise ValueError(f"{self.parameter!r} is not sweepable; choose one of {sorted(SWEEPABLE)}")
        return self


class Scenario(BaseModel):
    """A fully resolved simulation request"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "scenario"
    model: ModelSpec = Field(default_factory=ModelSpec)
    atoms: AtomsSpec
    fields: Dict[str, FieldParams] = Field(min_length=1)
    grid: TimeGrid = Field(default_factory=TimeGrid)
    outputs: OutputSpec = Field(default_factory=OutputSpec)
    sweep: Optional[SweepSpec] = None

    @model_validator(mode="after")
    def _labels_are_filenames(self) -> "Scenario":
        for label in self.fields:
            if not label or not all(ch.isalnum() or ch in "_-" for ch in label):
                raise ValueError(f"field label {label!r} must be alphanumeric, '_' or '-'")
        return self

    @model_validator(mode="after")
    def _wigner_times_on_grid(self) -> "Scenario":
        t_end = float(self.grid.samples[-1])
        for lambda_t in self.outputs.wigner_times:
            if not 0.0 <= lambda_t <= t_end:
                raise ValueError(f"Wigner snapshot at lambda_t={lambda_t} lies outside the grid [0, {t_end}]")
        return self


@dataclass
class TimeSeries:
    """Rows of (lambda_t, channel values) with a fixed channel set"""
    times: np.ndarray
    channels: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise InvalidShapeError("lambda_t must be strictly increasing")
        for name, values in self.channels.items():
            if len(values) != len(self.times):
                raise InvalidShapeError(f"channel {name!r} has {len(values)} samples, expected {len(self.times)}")

    @property
    def columns(self) -> List[str]:
        return ["lambda_t", *self.channels]

    def rows(self):
        for index, lambda_t in enumerate(self.times):
            yield [lambda_t, *(values[index] for values in self.channels.values())]
