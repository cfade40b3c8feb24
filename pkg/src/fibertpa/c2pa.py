"""Classical two-photon excited fluorescence: forward model and inversion.

The detected rate for a quadratic absorber distributed along the fiber is

    F_C = sqrt(2) (ln2/pi)^(3/2) sigma_C n W0^2 / (g (h nu)^2 d0^2)
          * int_0^l eta_A^2(lam_e, z) eta_S^2(lam_e, z) / tau(z)
          * EI(z) dz

where EI(z) is the collected-and-detected emission yield per excitation
at depth z.  Two spectral modes are supported for EI: a single effective
line at the emission peak, and a tabulated emission spectrum integrated
against the wavelength-dependent collection and transmission factors.
Every report records which mode produced it.

All cross-sections are handled internally in cm^4 s / photon; the
Goeppert-Mayer unit (1 GM = 1e-50 cm^4 s) appears only at I/O.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import FS_TO_S, LN2, UM_TO_CM, molar_to_number_density
from .errors import ConfigError, DataError, FitError
from .fiber import FiberSpec, collection_efficiency
from .propagation import AttenuationModel, SourceSpec, pulse_duration
from .tables import SpectralTable, write_csv

_PREFACTOR = np.sqrt(2.0) * (LN2 / np.pi) ** 1.5


@dataclass(frozen=True)
class FluorophoreSpec:
    """Sample photophysics: yield, emission description, concentration.

    ``emission_spectrum`` (photons per excitation per nm), when present,
    must integrate to ``quantum_yield`` on its own grid to within 1e-6
    relative; use :meth:`with_spectrum_shape` to normalize a raw shape.
    """

    quantum_yield: float
    emission_peak_nm: float
    concentration_m: float
    emission_spectrum: SpectralTable | None = None

    def __post_init__(self):
        if not 0 <= self.quantum_yield <= 1:
            raise ConfigError(f"quantum yield must be in [0, 1], got {self.quantum_yield}")
        if self.concentration_m < 0:
            raise ConfigError("concentration must be non-negative")
        if self.emission_spectrum is not None:
            total = np.trapezoid(
                np.asarray(self.emission_spectrum.values),
                np.asarray(self.emission_spectrum.wavelengths_nm),
            )
            if self.quantum_yield > 0 and \
                    abs(total - self.quantum_yield) > 1e-6 * self.quantum_yield:
                raise ConfigError(
                    f"emission spectrum integrates to {total:.8g}, expected "
                    f"quantum yield {self.quantum_yield:g}"
                )

    @property
    def number_density_per_cm3(self) -> float:
        return molar_to_number_density(self.concentration_m)

    def with_concentration(self, concentration_m: float) -> "FluorophoreSpec":
        return FluorophoreSpec(
            quantum_yield=self.quantum_yield,
            emission_peak_nm=self.emission_peak_nm,
            concentration_m=concentration_m,
            emission_spectrum=self.emission_spectrum,
        )

    @classmethod
    def with_spectrum_shape(cls, quantum_yield, emission_peak_nm, concentration_m,
                            shape: SpectralTable) -> "FluorophoreSpec":
        """Build from an arbitrary spectral shape, rescaled to the yield."""
        w = np.asarray(shape.wavelengths_nm)
        v = np.asarray(shape.values, dtype=float)
        total = np.trapezoid(v, w)
        if total <= 0:
            raise DataError("emission shape must have positive integral")
        scaled = SpectralTable(tuple(w), tuple(v * quantum_yield / total),
                               name=shape.name)
        return cls(quantum_yield, emission_peak_nm, concentration_m, scaled)


@dataclass(frozen=True)
class DetectionChain:
    """Static collection/detection factors outside the fiber.

    ``gamma0`` is the product of window/lens/dichroic/filter
    transmittances and camera quantum efficiency; ``band_nm`` bounds the
    emission integral in tabulated-spectrum mode.
    """

    gamma0: SpectralTable
    band_nm: tuple[float, float] = (400.0, 700.0)

    def __post_init__(self):
        if any(not 0 < v <= 1 for v in self.gamma0.values):
            raise ConfigError("gamma0 entries must be in (0, 1]")
        lo, hi = self.band_nm
        if not lo < hi:
            raise ConfigError(f"detection band must satisfy lo < hi, got {self.band_nm}")


def detection_efficiency(gamma0: SpectralTable, attenuation: AttenuationModel,
                         z_cm, wavelength_nm):
    """gamma(z, lambda): in-fiber return transmission times static factors.

    eta_A covers solvent absorption plus sample reabsorption at the
    emission wavelength; eta_S covers fiber scatter.
    """
    return (
        attenuation.absorption_transmission(wavelength_nm, z_cm)
        * attenuation.scatter_transmission(wavelength_nm, z_cm)
        * gamma0(wavelength_nm)
    )


def emission_integral(fluorophore: FluorophoreSpec, detection: DetectionChain,
                      attenuation: AttenuationModel, fiber: FiberSpec, z_cm):
    """Collected, detected photons per excitation generated at depth z.

    Tabulated mode integrates gamma(z, lam) kappa(lam) Phi(lam) over the
    detection band by trapezoid on the spectrum grid; single-line mode
    evaluates the same product at the emission peak.
    """
    spec = fluorophore.emission_spectrum
    if spec is None:
        lam = fluorophore.emission_peak_nm
        kappa = collection_efficiency(fiber, lam)
        return (
            detection_efficiency(detection.gamma0, attenuation, z_cm, lam)
            * kappa
            * fluorophore.quantum_yield
        )
    lo, hi = detection.band_nm
    w = np.asarray(spec.wavelengths_nm)
    if w[0] < lo - 1e-9 or w[-1] > hi + 1e-9:
        raise DataError(
            f"emission spectrum ({w[0]:g}-{w[-1]:g} nm) extends beyond the "
            f"detection band ({lo:g}-{hi:g} nm)"
        )
    phi = np.asarray(spec.values)
    kappa = np.array([collection_efficiency(fiber, wl) for wl in w])
    z = np.asarray(z_cm, dtype=float)
    gam = detection_efficiency(detection.gamma0, attenuation,
                               z[..., None] if z.ndim else z, w)
    return np.trapezoid(gam * kappa * phi, w, axis=-1)[()]


def _composite_simpson(f, a: float, b: float, panels: int) -> float:
    x = np.linspace(a, b, 2 * panels + 1)
    y = np.asarray(f(x), dtype=float)
    h = (b - a) / (2 * panels)
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-2:2].sum()))


def adaptive_simpson(f, a: float, b: float, rtol: float = 1e-8,
                     min_panels: int = 256, max_doublings: int = 14) -> float:
    """Composite Simpson with panel doubling until relative convergence.

    The integrands here are smooth but can decay over decades when
    reabsorption is strong, so the panel floor keeps the first pass from
    missing the boundary layer entirely.
    """
    prev = _composite_simpson(f, a, b, min_panels)
    panels = min_panels
    for _ in range(max_doublings):
        panels *= 2
        cur = _composite_simpson(f, a, b, panels)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise FitError(
        f"z-quadrature did not reach rtol={rtol:g} within {panels} panels"
    )


def configuration_integral(source: SourceSpec, fiber: FiberSpec,
                           attenuation: AttenuationModel,
                           fluorophore: FluorophoreSpec,
                           detection: DetectionChain,
                           rtol: float = 1e-8,
                           length_cm: float | None = None) -> float:
    """int_0^l eta_A^2 eta_S^2 / tau(z) * EI(z) dz  in s^-1 cm.

    This factor carries the entire geometry/attenuation dependence of the
    quadratic forward model and its inversion.
    """
    lam_e = source.wavelength_nm
    l = fiber.length_cm if length_cm is None else length_cm

    def integrand(z):
        t2 = (
            attenuation.absorption_transmission(lam_e, z)
            * attenuation.scatter_transmission(lam_e, z)
        ) ** 2
        tau_s = pulse_duration(source, fiber, z) * FS_TO_S
        return t2 / tau_s * emission_integral(fluorophore, detection,
                                              attenuation, fiber, z)

    return adaptive_simpson(integrand, 0.0, l, rtol=rtol)


def _quadratic_gain(source: SourceSpec, fiber: FiberSpec) -> float:
    """sqrt(2) (ln2/pi)^(3/2) / (g (h nu)^2 d0^2), the per-(sigma n W0^2) gain."""
    if fiber.mode_fwhm_um is None:
        raise ConfigError("fiber needs a mode size for the quadratic model")
    d0_cm = fiber.mode_fwhm_um * UM_TO_CM
    return _PREFACTOR / (
        source.rep_rate_hz * source.photon_energy_j**2 * d0_cm**2
    )


def forward_c2pef(sigma_c_cm4s: float, source: SourceSpec, fiber: FiberSpec,
                  attenuation: AttenuationModel, fluorophore: FluorophoreSpec,
                  detection: DetectionChain, rtol: float = 1e-8) -> float:
    """Detected fluorescence rate (cnt/s) for a laser source.

    Scales exactly quadratically with input power.
    """
    if source.kind != "laser":
        raise ValueError(
            "forward_c2pef models laser excitation; use forward_e2pef for "
            "pair (spdc) sources"
        )
    integral = configuration_integral(source, fiber, attenuation, fluorophore,
                                      detection, rtol=rtol)
    n = fluorophore.number_density_per_cm3
    return (
        sigma_c_cm4s * n * source.input_power_w**2
        * _quadratic_gain(source, fiber) * integral
    )


def invert_sigma_c(fc_per_w0sq_cnt_s_w2: float, source: SourceSpec,
                   fiber: FiberSpec, attenuation: AttenuationModel,
                   fluorophore: FluorophoreSpec, detection: DetectionChain,
                   rtol: float = 1e-8) -> float:
    """Cross-section (cm^4 s) from a fitted quadratic coefficient F_C / W0^2.

    Exact algebraic inverse of :func:`forward_c2pef` at fixed configuration.
    """
    if fc_per_w0sq_cnt_s_w2 <= 0:
        raise ValueError(
            f"fit coefficient must be positive, got {fc_per_w0sq_cnt_s_w2:g}"
        )
    integral = configuration_integral(source, fiber, attenuation, fluorophore,
                                      detection, rtol=rtol)
    n = fluorophore.number_density_per_cm3
    if n <= 0:
        raise ValueError("number density must be positive to invert")
    return fc_per_w0sq_cnt_s_w2 / (n * _quadratic_gain(source, fiber) * integral)


def conc_normalized_curve(sigma_c_cm4s: float, source: SourceSpec,
                          fiber: FiberSpec, attenuation: AttenuationModel,
                          fluorophore: FluorophoreSpec, detection: DetectionChain,
                          concentrations_m, w0_w: float = 100e-9,
                          rtol: float = 1e-8) -> list[tuple[float, float]]:
    """F_C / c over a concentration grid at fixed input power.

    Reabsorption makes this curve fall with concentration; with the
    sample extinction zeroed it is exactly flat.
    """
    c = np.asarray(concentrations_m, dtype=float)
    if c.ndim != 1 or c.size == 0 or np.any(c <= 0) or np.any(np.diff(c) <= 0):
        raise DataError("concentration grid must be positive and ascending")
    source = SourceSpec(
        kind="laser",
        wavelength_nm=source.wavelength_nm,
        rep_rate_hz=source.rep_rate_hz,
        pulse_fwhm_fs=source.pulse_fwhm_fs,
        photon_energy_j=source.photon_energy_j,
        pre_fiber_gdd_fs2=source.pre_fiber_gdd_fs2,
        input_power_w=w0_w,
    )
    out = []
    for ci in c:
        fc = forward_c2pef(
            sigma_c_cm4s, source, fiber,
            attenuation.with_concentration(ci),
            fluorophore.with_concentration(ci),
            detection, rtol=rtol,
        )
        out.append((float(ci), fc / ci))
    return out


def write_conc_curve_csv(path, curve) -> None:
    write_csv(path, ["concentration_M", "fc_per_c"], curve)
