"""Run-configuration ingestion.

Configs are JSON with unit-suffixed keys (``length_cm``,
``rep_rate_hz``, ...).  Loading is strict: unknown keys, missing
required keys, wrong-signed values and dangling file paths all raise
:class:`ConfigError` with the offending field path, so a typo fails the
run instead of silently using a default.  Relative CSV paths resolve
against the config file's directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .c2pa import DetectionChain, FluorophoreSpec
from .errors import ConfigError
from .fiber import FiberSpec
from .frames import CameraConfig
from .jsa import EntanglementTimeModel
from .materials import MATERIAL_REGISTRY, MaterialDispersion
from .propagation import AttenuationModel, SourceSpec
from .e2pa import PairSource
from .tables import SpectralTable, coerce_table

_SECTION_KEYS = {
    "fiber", "source", "attenuation", "fluorophore", "detection",
    "pair_source", "te_model", "camera", "measurement", "comparison",
    "seeds", "tolerances",
}


@dataclass
class RunConfig:
    fiber: FiberSpec
    source: SourceSpec
    attenuation: AttenuationModel
    fluorophore: FluorophoreSpec
    detection: DetectionChain
    pair_source: PairSource | None = None
    te_model: EntanglementTimeModel | None = None
    camera: CameraConfig | None = None
    measurement: dict | None = None
    comparison: dict | None = None
    seeds: dict | None = None
    tolerances: dict | None = None

    @property
    def z_quadrature_rtol(self) -> float:
        if self.tolerances and "z_quadrature_rtol" in self.tolerances:
            return float(self.tolerances["z_quadrature_rtol"])
        return 1e-8


class _Section:
    """Dict wrapper that tracks consumed keys and reports field paths."""

    def __init__(self, data: dict, path: str):
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected an object")
        self.data = data
        self.path = path
        self.seen: set[str] = set()

    def require(self, key, kind=None):
        if key not in self.data:
            raise ConfigError(f"missing required field {self.path}.{key}")
        return self.get(key, kind)

    def get(self, key, kind=None, default=None):
        if key not in self.data:
            return default
        self.seen.add(key)
        v = self.data[key]
        if kind is not None and v is not None and not isinstance(v, kind):
            raise ConfigError(
                f"{self.path}.{key}: expected {getattr(kind, '__name__', kind)}, "
                f"got {type(v).__name__}"
            )
        return v

    def finish(self):
        unknown = set(self.data) - self.seen
        if unknown:
            raise ConfigError(
                f"unknown field(s) in {self.path}: {', '.join(sorted(unknown))}"
            )


def _positive(value, path):
    if not isinstance(value, (int, float)) or value <= 0:
        raise ConfigError(f"{path} must be a positive number, got {value!r}")
    return float(value)


def _non_negative(value, path):
    if not isinstance(value, (int, float)) or value < 0:
        raise ConfigError(f"{path} must be a non-negative number, got {value!r}")
    return float(value)


def _resolve(spec, base: Path):
    """Resolve CSV path strings relative to the config directory."""
    if isinstance(spec, str):
        p = Path(spec)
        if not p.is_absolute():
            p = base / p
        if not p.exists():
            raise ConfigError(f"referenced file does not exist: {p}")
        return p
    return spec


def _material(spec, path: str) -> MaterialDispersion:
    if isinstance(spec, str):
        if spec not in MATERIAL_REGISTRY:
            raise ConfigError(
                f"{path}: unknown material {spec!r}; bundled materials are "
                f"{sorted(MATERIAL_REGISTRY)}"
            )
        return MATERIAL_REGISTRY[spec]
    sec = _Section(spec, path)
    mat = MaterialDispersion(
        name=sec.require("name", str),
        convention=sec.require("convention", str),
        coefficients=tuple(tuple(p) for p in sec.require("coefficients", list)),
        valid_range_nm=tuple(sec.require("valid_range_nm", list)),
    )
    sec.finish()
    return mat


def _load_fiber(data, base) -> FiberSpec:
    sec = _Section(data, "fiber")
    fiber = FiberSpec.build(
        core_diameter_um=_positive(sec.require("core_diameter_um"), "fiber.core_diameter_um"),
        length_cm=_positive(sec.require("length_cm"), "fiber.length_cm"),
        core=_material(sec.require("core_material"), "fiber.core_material"),
        clad=_material(sec.require("clad_material"), "fiber.clad_material"),
        scatter=_resolve(sec.get("scatter_per_cm", default=0.0), base),
        mode_fwhm_um=sec.get("mode_fwhm_um", (int, float)),
        effective_mode_area_um2=sec.get("effective_mode_area_um2", (int, float)),
        gvd_fs2_per_cm=float(sec.get("gvd_fs2_per_cm", (int, float), default=0.0)),
    )
    sec.finish()
    return fiber


def _load_source(data) -> SourceSpec:
    sec = _Section(data, "source")
    kind = sec.require("kind", str)
    src = SourceSpec(
        kind=kind,
        wavelength_nm=_positive(sec.require("wavelength_nm"), "source.wavelength_nm"),
        rep_rate_hz=_positive(sec.require("rep_rate_hz"), "source.rep_rate_hz"),
        pulse_fwhm_fs=_positive(sec.require("pulse_fwhm_fs"), "source.pulse_fwhm_fs"),
        photon_energy_j=sec.get("photon_energy_j", (int, float)),
        pre_fiber_gdd_fs2=float(sec.get("pre_fiber_gdd_fs2", (int, float), default=0.0)),
        input_power_w=sec.get("input_power_w", (int, float)),
        input_rate_per_s=sec.get("input_rate_per_s", (int, float)),
        effective_pulse_fwhm_fs=sec.get("effective_pulse_fwhm_fs", (int, float)),
    )
    sec.finish()
    return src


def _load_attenuation(data, base, fiber: FiberSpec,
                      fluorophore: FluorophoreSpec) -> AttenuationModel:
    sec = _Section(data, "attenuation")
    att = AttenuationModel.build(
        solvent=_resolve(sec.get("solvent_absorption_per_cm", default=0.0), base),
        extinction=_resolve(sec.get("sample_extinction_per_m_cm", default=0.0), base),
        concentration_m=fluorophore.concentration_m,
        scatter=fiber.scatter_per_cm,
        extinction_convention=sec.get("extinction_convention", str, default="decadic"),
    )
    sec.finish()
    return att


def _load_fluorophore(data, base) -> FluorophoreSpec:
    sec = _Section(data, "fluorophore")
    spectrum_path = sec.get("emission_spectrum_csv")
    qy = _non_negative(sec.require("quantum_yield"), "fluorophore.quantum_yield")
    peak = _positive(sec.require("emission_peak_nm"), "fluorophore.emission_peak_nm")
    conc = _non_negative(sec.require("concentration_m"), "fluorophore.concentration_m")
    sec.finish()
    if spectrum_path is None:
        return FluorophoreSpec(qy, peak, conc)
    table = SpectralTable.from_csv(_resolve(spectrum_path, base))
    return FluorophoreSpec.with_spectrum_shape(qy, peak, conc, table)


def _load_detection(data, base) -> DetectionChain:
    sec = _Section(data, "detection")
    gamma0 = coerce_table(_resolve(sec.require("gamma0"), base), "gamma0")
    band = sec.get("band_nm", list, default=[400.0, 700.0])
    sec.finish()
    return DetectionChain(gamma0=gamma0, band_nm=(float(band[0]), float(band[1])))


def _load_pair_source(data) -> tuple[PairSource, dict]:
    sec = _Section(data, "pair_source")
    ae = sec.get("entanglement_area_um2", list, default=[0.0, 0.0])
    ps = PairSource(
        effective_klyshko=_positive(sec.require("effective_klyshko"),
                                    "pair_source.effective_klyshko"),
        free_space_transmission=_positive(sec.require("free_space_transmission"),
                                          "pair_source.free_space_transmission"),
        coupling=_positive(sec.require("coupling"), "pair_source.coupling"),
        single_rate_per_s=_non_negative(sec.require("single_rate_per_s"),
                                        "pair_source.single_rate_per_s"),
        spatial_modes=float(sec.get("spatial_modes", (int, float), default=1.0)),
        entanglement_area_um2=(float(ae[0]), float(ae[1])),
    )
    # context values used only by reports
    extras = {
        "rate_ratio": sec.get("rate_ratio", (int, float)),
        "multimode_rate_per_s_at_crystal": sec.get(
            "multimode_rate_per_s_at_crystal", (int, float)),
    }
    sec.finish()
    return ps, extras


def _load_te_model(data, source: SourceSpec, fiber: FiberSpec) -> EntanglementTimeModel:
    sec = _Section(data, "te_model")
    model = EntanglementTimeModel(
        te0_fs=_positive(sec.require("te0_fs"), "te_model.te0_fs"),
        s0=_positive(sec.require("s0"), "te_model.s0"),
        gdd_fs2=source.pre_fiber_gdd_fs2,
        gvd_fs2_per_cm=fiber.gvd_fs2_per_cm,
    )
    sec.finish()
    return model


def load_config(path) -> RunConfig:
    """Load and validate a run configuration from JSON."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    unknown = set(raw) - _SECTION_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level section(s): {', '.join(sorted(unknown))}")
    for required in ("fiber", "source", "attenuation", "fluorophore", "detection"):
        if required not in raw:
            raise ConfigError(f"missing required section {required!r}")
    base = path.parent

    fiber = _load_fiber(raw["fiber"], base)
    source = _load_source(raw["source"])
    fluorophore = _load_fluorophore(raw["fluorophore"], base)
    attenuation = _load_attenuation(raw["attenuation"], base, fiber, fluorophore)
    detection = _load_detection(raw["detection"], base)

    pair_source = None
    pair_extras = {}
    if "pair_source" in raw:
        pair_source, pair_extras = _load_pair_source(raw["pair_source"])
    te_model = _load_te_model(raw["te_model"], source, fiber) \
        if "te_model" in raw else None
    camera = None
    if "camera" in raw:
        try:
            camera = CameraConfig.from_dict(raw["camera"])
        except TypeError as exc:
            raise ConfigError(f"camera: {exc}") from exc

    measurement = raw.get("measurement")
    if measurement is not None and not isinstance(measurement, dict):
        raise ConfigError("measurement: expected an object")
    if measurement and pair_extras:
        measurement = {**pair_extras, **measurement}
    elif pair_extras and any(v is not None for v in pair_extras.values()):
        measurement = {**(measurement or {}), **pair_extras}

    return RunConfig(
        fiber=fiber,
        source=source,
        attenuation=attenuation,
        fluorophore=fluorophore,
        detection=detection,
        pair_source=pair_source,
        te_model=te_model,
        camera=camera,
        measurement=measurement,
        comparison=raw.get("comparison"),
        seeds=raw.get("seeds"),
        tolerances=raw.get("tolerances"),
    )
