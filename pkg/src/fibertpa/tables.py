"""Wavelength-indexed coefficient tables and small CSV helpers.

Attenuation coefficients, extinction coefficients, detection-chain
transmittances and emission spectra all arrive either as a scalar, an
inline ``{wavelength_nm: value}`` mapping, or a two-column CSV file.
``SpectralTable`` normalizes those forms behind one lookup.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class SpectralTable:
    """Piecewise-linear wavelength table.

    A single-point table evaluates as a constant.  Multi-point tables
    interpolate linearly inside their span and clamp to the end values
    outside it; coefficients of this kind vary smoothly, so clamping is
    preferable to extrapolating a line off the measured span.
    """

    wavelengths_nm: tuple[float, ...]
    values: tuple[float, ...]
    name: str = field(default="table", compare=False)

    def __post_init__(self):
        if len(self.wavelengths_nm) != len(self.values):
            raise DataError(f"{self.name}: wavelength/value length mismatch")
        if len(self.wavelengths_nm) == 0:
            raise DataError(f"{self.name}: empty table")
        w = np.asarray(self.wavelengths_nm, dtype=float)
        if np.any(np.diff(w) <= 0):
            raise DataError(f"{self.name}: wavelengths must be strictly increasing")

    def __call__(self, wavelength_nm):
        w = np.asarray(self.wavelengths_nm, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if w.size == 1:
            return np.full_like(np.asarray(wavelength_nm, dtype=float), v[0])[()] \
                if np.ndim(wavelength_nm) else float(v[0])
        out = np.interp(wavelength_nm, w, v)
        return float(out) if np.ndim(wavelength_nm) == 0 else out

    @classmethod
    def constant(cls, value: float, name: str = "constant") -> "SpectralTable":
        return cls((0.0,), (float(value),), name=name)

    @classmethod
    def from_mapping(cls, mapping: dict, name: str = "table") -> "SpectralTable":
        pairs = sorted((float(k), float(v)) for k, v in mapping.items())
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), name=name)

    @classmethod
    def from_csv(cls, path: str | Path, name: str | None = None) -> "SpectralTable":
        """Read a two-column CSV (wavelength_nm, value); header row optional."""
        path = Path(path)
        if not path.exists():
            raise DataError(f"table file not found: {path}")
        wl, vals = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    w, v = float(row[0]), float(row[1])
                except (ValueError, IndexError):
                    if not wl:  # tolerate a single header line
                        continue
                    raise DataError(f"{path}: malformed row {row!r}")
                wl.append(w)
                vals.append(v)
        if not wl:
            raise DataError(f"{path}: no numeric rows")
        order = np.argsort(wl)
        return cls(
            tuple(np.asarray(wl)[order]),
            tuple(np.asarray(vals)[order]),
            name=name or path.stem,
        )


def coerce_table(spec, name: str) -> SpectralTable:
    """Accept a scalar, mapping, CSV path, or SpectralTable."""
    if isinstance(spec, SpectralTable):
        return spec
    if isinstance(spec, (int, float)):
        return SpectralTable.constant(float(spec), name=name)
    if isinstance(spec, dict):
        return SpectralTable.from_mapping(spec, name=name)
    if isinstance(spec, (str, Path)):
        return SpectralTable.from_csv(spec, name=name)
    raise DataError(f"{name}: cannot interpret {type(spec).__name__} as a spectral table")


def write_csv(path: str | Path, header: list[str], rows) -> None:
    """Write rows with unit-suffixed column headers."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(list(row))


def read_profile_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a (z_cm, intensity) scatter profile CSV; header row optional."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"profile file not found: {path}")
    z, i = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                z.append(float(row[0]))
                i.append(float(row[1]))
            except (ValueError, IndexError):
                if not z:
                    continue
                raise DataError(f"{path}: malformed row {row!r}")
    if not z:
        raise DataError(f"{path}: no numeric rows")
    return np.asarray(z, dtype=float), np.asarray(i, dtype=float)
