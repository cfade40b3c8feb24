"""Material dispersion models for the filled-capillary waveguide.

Two evaluation conventions cover the bundled materials:

``sellmeier``
    n^2(lam) = 1 + sum_i B_i lam^2 / (lam^2 - C_i), with coefficient
    pairs (B_i, C_i) and C_i in um^2.  Used for the fused-silica
    cladding (three-term fit valid over 210-3710 nm).

``inverse_power``
    n^2(lam) = sum_i A_i lam^(p_i), with coefficient pairs (A_i, p_i)
    and lam in um.  Used for the toluene core, where the literature
    fits this Cauchy-type form over the visible/near-IR.

Coefficients ship as editable defaults rather than hard-coded numbers;
replace them via the run configuration if better fits are available.
Evaluating outside a material's stated validity range raises rather
than extrapolating, because both forms diverge off their fit span.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_CONVENTIONS = ("sellmeier", "inverse_power")


@dataclass(frozen=True)
class MaterialDispersion:
    """Refractive-index model for one material.

    Parameters
    ----------
    name : str
        Material label, used in error messages.
    convention : {'sellmeier', 'inverse_power'}
        Interpretation of the coefficient pairs (module docstring).
    coefficients : tuple of (float, float)
        Coefficient pairs in the chosen convention.
    valid_range_nm : (float, float)
        Inclusive wavelength validity interval.
    """

    name: str
    convention: str
    coefficients: tuple[tuple[float, float], ...]
    valid_range_nm: tuple[float, float]

    def __post_init__(self):
        if self.convention not in _CONVENTIONS:
            raise ValueError(
                f"{self.name}: unknown dispersion convention {self.convention!r}; "
                f"expected one of {_CONVENTIONS}"
            )
        lo, hi = self.valid_range_nm
        if not lo < hi:
            raise ValueError(f"{self.name}: empty validity range {self.valid_range_nm}")

    def index_squared(self, wavelength_nm: float) -> float:
        lam = wavelength_nm / 1000.0  # um
        l2 = lam * lam
        if self.convention == "sellmeier":
            n2 = 1.0
            for b, c in self.coefficients:
                n2 += b * l2 / (l2 - c)
        else:
            n2 = 0.0
            for a, p in self.coefficients:
                n2 += a * lam**p
        return n2


def refractive_index(material: MaterialDispersion, wavelength_nm: float) -> float:
    """Evaluate n(lambda) for a material inside its validity range.

    Raises
    ------
    ValueError
        If the wavelength falls outside ``material.valid_range_nm`` or
        the coefficient set produces a non-physical index.
    """
    lo, hi = material.valid_range_nm
    if not lo <= wavelength_nm <= hi:
        raise ValueError(
            f"wavelength {wavelength_nm:g} nm outside valid range "
            f"[{lo:g}, {hi:g}] nm for material {material.name!r}"
        )
    n2 = material.index_squared(wavelength_nm)
    if n2 <= 1.0:
        raise ValueError(
            f"material {material.name!r} yields non-physical n^2={n2:g} "
            f"at {wavelength_nm:g} nm"
        )
    return float(np.sqrt(n2))


# Malitson three-term fit for fused silica (C_i in um^2).
FUSED_SILICA = MaterialDispersion(
    name="fused_silica",
    convention="sellmeier",
    coefficients=(
        (0.6961663, 0.0684043**2),
        (0.4079426, 0.1162414**2),
        (0.8974794, 9.896161**2),
    ),
    valid_range_nm=(210.0, 3710.0),
)

# Inverse-power fit for toluene over the visible/near-IR.  Anchored to
# literature index data in the band where both the excitation and the
# fluorescence of the bundled experiments propagate.
TOLUENE = MaterialDispersion(
    name="toluene",
    convention="inverse_power",
    coefficients=(
        (2.1359722289343375, 0.0),
        (0.044715956100366924, -2.0),
        (-0.0031861911968128916, -4.0),
    ),
    valid_range_nm=(400.0, 1100.0),
)

MATERIAL_REGISTRY: dict[str, MaterialDispersion] = {
    "fused_silica": FUSED_SILICA,
    "toluene": TOLUENE,
}
