"""
Physical parameters of the Raman medium and their reduction to (g1, g-1, Delta, t).

The slowly-varying propagation equations for the probe E0 and the sidebands
E+-1 in a medium with a fixed Raman coherence rho_ab read

    dE_q/dz = i beta_q (a_q E_q + d_q rho_ab E_{q-1} + d_{q+1} rho_ab* E_{q+1})

with beta_q = N hbar w_q / (eps0 c). Introducing kappa_q = beta_q a_q, the
phase mismatch dk = 2 kappa_0 - kappa_1 - kappa_-1 and rotating the sideband
envelopes by the coherence phase phi0 turns them, in photon-operator form and
in the retarded frame, into the time-domain coupled-mode equations

    db0/dt   = i Delta b0 + i (g_-1 b_-1 + g_1 b_1)
    db+-1/dt = -i Delta b+-1 + i g_+-1 b0

with Delta = c dk / 4, g_1 = (N hbar / eps0) sqrt(w1 w0) d0 rho0 and
g_-1 = (N hbar / eps0) sqrt(w-1 w0) d-1 rho0. The evolution time is t = L / c.
Only the reduced parameters enter the dynamics; phi0 is carried for reporting.
"""
import logging
import math
import warnings
from dataclasses import dataclass, replace, asdict
from typing import Any, Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

import config
from raman_multiplex.errors import (
    CoherenceBoundWarning,
    ConfigValidationError,
    DegenerateCouplingError,
    ValidityBoundWarning,
    config_error_from_validation,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CouplingParams:
    """Reduced dynamical parameters; everything downstream depends only on these."""

    g_anti: float
    g_stokes: float
    detuning: float = 0.0
    evolution_time: float = 0.0

    def __post_init__(self):
        for name in ("g_anti", "g_stokes", "detuning", "evolution_time"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ConfigValidationError("must be finite", field=name)
            object.__setattr__(self, name, value)

        if self.g_anti < 0:
            raise ConfigValidationError("must be non-negative", field="g_anti")
        if self.g_stokes < 0:
            raise ConfigValidationError("must be non-negative", field="g_stokes")
        if self.g_anti == 0 and self.g_stokes == 0:
            raise DegenerateCouplingError("g_anti and g_stokes cannot both be zero", field="g_anti")
        if self.evolution_time < 0:
            raise ConfigValidationError("must be non-negative", field="evolution_time")

    @property
    def g_c(self) -> float:
        return math.hypot(self.g_anti, self.g_stokes)

    @property
    def g(self) -> float:
        return math.hypot(self.g_c, self.detuning)

    @property
    def g_plus(self) -> float:
        return self.g + self.detuning

    @property
    def g_minus(self) -> float:
        return self.g - self.detuning

    @property
    def gt(self) -> float:
        return self.g * self.evolution_time

    @property
    def exceeds_validity_bound(self) -> bool:
        return self.gt > config.GT_WARNING_LEVEL

    def at_time(self, evolution_time: float) -> "CouplingParams":
        return replace(self, evolution_time=evolution_time)

    def with_value(self, name: str, value: float) -> "CouplingParams":
        """Copy with one reduced parameter changed (sweep axes use the document names)."""
        field_name = REDUCED_FIELD_NAMES.get(name, name)
        if field_name not in REDUCED_FIELD_NAMES.values():
            raise ConfigValidationError(f"unknown reduced parameter '{name}'", field=name)
        return replace(self, **{field_name: value})

    def to_dict(self) -> Dict[str, float]:
        data = asdict(self)
        data.update({"g_c": self.g_c, "g": self.g, "gt": self.gt})
        return data


# Document key -> CouplingParams attribute
REDUCED_FIELD_NAMES = {
    "g1": "g_anti",
    "gm1": "g_stokes",
    "delta": "detuning",
    "time": "evolution_time",
}


class PhysicalConfig(BaseModel):
    """Raw medium and field parameters. Natural units hbar = eps0 = c = 1 by default."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    molecular_number_density: float = Field(1.0, gt=0)
    reduced_planck: float = Field(1.0, gt=0)
    vacuum_permittivity: float = Field(1.0, gt=0)
    light_speed: float = Field(1.0, gt=0)
    # (w_-1, w_0, w_1): Stokes, probe, anti-Stokes
    carrier_frequencies: Tuple[float, float, float]
    # (a_-1, a_0, a_1)
    dispersion_constants: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    # (d_-1, d_0)
    coupling_constants: Tuple[float, float]
    coherence_magnitude: float = Field(..., ge=0)
    coherence_phase: float = 0.0
    medium_length: float = Field(..., gt=0)
    phase_mismatch_override: Optional[float] = None

    @field_validator("carrier_frequencies")
    @classmethod
    def _check_frequencies(cls, value):
        w_stokes, w_probe, w_anti = value
        if min(value) <= 0:
            raise ValueError("all carrier frequencies must be strictly positive")
        if not w_anti > w_probe > w_stokes:
            raise ValueError("frequencies must satisfy w_1 > w_0 > w_-1")
        return value

    @property
    def evolution_time(self) -> float:
        return self.medium_length / self.light_speed

    def propagation_constants(self) -> Tuple[float, float, float]:
        """kappa_q = beta_q a_q with beta_q = N hbar w_q / (eps0 c), Stokes/probe/anti-Stokes order."""
        prefactor = self.molecular_number_density * self.reduced_planck / (self.vacuum_permittivity * self.light_speed)
        return tuple(
            prefactor * omega * a
            for omega, a in zip(self.carrier_frequencies, self.dispersion_constants)
        )

    def phase_mismatch(self) -> float:
        if self.phase_mismatch_override is not None:
            return self.phase_mismatch_override
        kappa_stokes, kappa_probe, kappa_anti = self.propagation_constants()
        return 2 * kappa_probe - kappa_anti - kappa_stokes


class ReducedBlock(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    g1: float = Field(..., ge=0)
    gm1: float = Field(..., ge=0)
    delta: float = 0.0
    time: float = Field(..., ge=0)

    def to_params(self) -> CouplingParams:
        return CouplingParams(self.g1, self.gm1, self.delta, self.time)


class ParametersBlock(BaseModel):
    """Exactly one of `physical` or `reduced`."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    physical: Optional[PhysicalConfig] = None
    reduced: Optional[ReducedBlock] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.physical is None) == (self.reduced is None):
            raise ValueError("exactly one of 'physical' or 'reduced' must be given")
        return self


def check_validity_bound(p: CouplingParams) -> Optional[str]:
    """Warn (and return the message) when g*t exceeds the small-coupling regime."""
    if not p.exceeds_validity_bound:
        return None
    message = (
        f"g*t = {p.gt:.4g} exceeds {config.GT_WARNING_LEVEL}; "
        "higher-order sideband generation is no longer negligible"
    )
    logger.warning(message)
    warnings.warn(message, ValidityBoundWarning, stacklevel=2)
    return message


def derive_couplings(cfg: PhysicalConfig, strict: bool = False) -> CouplingParams:
    """Reduce a PhysicalConfig to CouplingParams (g1, g-1, Delta, t = L/c)."""
    if cfg.coherence_magnitude > config.COHERENCE_BOUND:
        message = f"|rho_ab| = {cfg.coherence_magnitude} exceeds the two-level bound {config.COHERENCE_BOUND}"
        if strict:
            raise ConfigValidationError(message, field="coherence_magnitude")
        logger.warning(message)
        warnings.warn(message, CoherenceBoundWarning, stacklevel=2)

    w_stokes, w_probe, w_anti = cfg.carrier_frequencies
    d_stokes, d_probe = cfg.coupling_constants
    scale = cfg.molecular_number_density * cfg.reduced_planck / cfg.vacuum_permittivity
    g_anti = scale * math.sqrt(w_anti * w_probe) * d_probe * cfg.coherence_magnitude
    g_stokes = scale * math.sqrt(w_stokes * w_probe) * d_stokes * cfg.coherence_magnitude

    if g_anti < 0 or g_stokes < 0:
        raise ConfigValidationError("coupling constants must be non-negative", field="coupling_constants")

    detuning = cfg.light_speed * cfg.phase_mismatch() / 4
    params = CouplingParams(g_anti, g_stokes, detuning, cfg.evolution_time)
    check_validity_bound(params)
    return params


def parse_parameters(document: Dict[str, Any], strict: bool = False) -> Tuple[CouplingParams, Optional[PhysicalConfig]]:
    """Parse a `{physical: {...}}` or `{reduced: {...}}` document into CouplingParams."""
    try:
        block = ParametersBlock.model_validate(document)
    except ValidationError as e:
        raise config_error_from_validation(e) from e

    if block.reduced is not None:
        params = block.reduced.to_params()
        check_validity_bound(params)
        return params, None

    return derive_couplings(block.physical, strict=strict), block.physical
