"""Waveguide geometry: mode counting, collection cone, mode-size conversions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .constants import LN2
from .errors import ConfigError
from .materials import MaterialDispersion, refractive_index
from .tables import SpectralTable, coerce_table


def mode_fwhm_from_area(effective_mode_area_um2: float) -> float:
    """FWHM mode width d0 = sqrt(2 ln2 A_eff / pi), both in um-based units."""
    if effective_mode_area_um2 <= 0:
        raise ValueError(
            f"effective mode area must be positive, got {effective_mode_area_um2:g} um^2"
        )
    return math.sqrt(2.0 * LN2 * effective_mode_area_um2 / math.pi)


@dataclass(frozen=True)
class FiberSpec:
    """Geometry, materials and mode parameters of the filled capillary.

    ``mode_fwhm_um`` and ``effective_mode_area_um2`` describe the same
    fundamental mode, so they must satisfy d0 = sqrt(2 ln2 A_eff / pi);
    give either one and the other is derived, or give both consistently.
    """

    core_diameter_um: float
    length_cm: float
    core: MaterialDispersion
    clad: MaterialDispersion
    scatter_per_cm: SpectralTable = field(
        default_factory=lambda: SpectralTable.constant(0.0, name="scatter")
    )
    mode_fwhm_um: float | None = None
    effective_mode_area_um2: float | None = None
    gvd_fs2_per_cm: float = 0.0

    def __post_init__(self):
        if self.core_diameter_um <= 0:
            raise ConfigError(f"core diameter must be positive, got {self.core_diameter_um}")
        if self.length_cm <= 0:
            raise ConfigError(f"fiber length must be positive, got {self.length_cm}")
        if any(v < 0 for v in self.scatter_per_cm.values):
            raise ConfigError("scatter coefficients must be non-negative")
        d0, aeff = self.mode_fwhm_um, self.effective_mode_area_um2
        if d0 is None and aeff is None:
            return
        if aeff is not None and aeff <= 0:
            raise ConfigError(f"effective mode area must be positive, got {aeff}")
        if aeff is not None and d0 is None:
            object.__setattr__(self, "mode_fwhm_um", mode_fwhm_from_area(aeff))
        elif d0 is not None and aeff is None:
            object.__setattr__(
                self, "effective_mode_area_um2", math.pi * d0 * d0 / (2.0 * LN2)
            )
        else:
            expected = mode_fwhm_from_area(aeff)
            if abs(d0 - expected) > 1e-12 * expected:
                raise ConfigError(
                    f"mode FWHM {d0:g} um inconsistent with effective area "
                    f"{aeff:g} um^2 (expects {expected:.12g} um)"
                )

    @classmethod
    def build(cls, core_diameter_um, length_cm, core, clad, scatter=0.0, **kw):
        return cls(
            core_diameter_um=core_diameter_um,
            length_cm=length_cm,
            core=core,
            clad=clad,
            scatter_per_cm=coerce_table(scatter, "scatter_per_cm"),
            **kw,
        )


class ModeCount(NamedTuple):
    v_number: float
    mode_count: float


def v_from_indices(core_diameter_um: float, wavelength_nm: float,
                   n_core: float, n_clad: float) -> ModeCount:
    if n_core <= n_clad:
        raise ValueError(
            f"no index guidance at {wavelength_nm:g} nm: core n={n_core:.6f} "
            f"<= clad n={n_clad:.6f}"
        )
    lam_um = wavelength_nm / 1000.0
    v = math.pi * core_diameter_um / lam_um * math.sqrt(n_core**2 - n_clad**2)
    return ModeCount(v, v * v / 2.0)


def v_number(fiber: FiberSpec, wavelength_nm: float) -> ModeCount:
    """Normalized frequency V and the V^2/2 guided-mode estimate.

    The mode count is reported as a real number; flooring it would imply
    more precision than the step-index estimate carries.
    """
    n_core = refractive_index(fiber.core, wavelength_nm)
    n_clad = refractive_index(fiber.clad, wavelength_nm)
    return v_from_indices(fiber.core_diameter_um, wavelength_nm, n_core, n_clad)


def kappa_from_indices(n_core: float, n_clad: float) -> float:
    if n_core < n_clad:
        raise ValueError(
            f"no guidance cone: core n={n_core:.6f} < clad n={n_clad:.6f}"
        )
    sin_theta = math.sqrt(n_core**2 - n_clad**2) / n_core
    return 0.5 * (1.0 - math.cos(math.asin(min(sin_theta, 1.0))))


def collection_efficiency(fiber: FiberSpec, wavelength_nm: float) -> float:
    """Solid-angle fraction of isotropic emission captured by the guidance cone.

    kappa = (1/2) [1 - cos(arcsin(sqrt(n_core^2 - n_clad^2)/n_core))],
    which is 0 for index-matched core/clad and 1/2 for a full hemisphere.
    """
    n_core = refractive_index(fiber.core, wavelength_nm)
    n_clad = refractive_index(fiber.clad, wavelength_nm)
    return kappa_from_indices(n_core, n_clad)
