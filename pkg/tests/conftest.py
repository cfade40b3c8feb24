"""Shared fixtures: the bundled experiment geometry built in code."""

from pathlib import Path

import pytest

from fibertpa import (AttenuationModel, DetectionChain, FiberSpec,
                      FluorophoreSpec, PairSource, SourceSpec, TOLUENE,
                      FUSED_SILICA, EntanglementTimeModel)

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def fiber2():
    """36 cm fiber used for the high-concentration and pair runs."""
    return FiberSpec.build(
        core_diameter_um=5.0, length_cm=36.0, core=TOLUENE, clad=FUSED_SILICA,
        scatter={451.0: 0.0301, 810.0: 0.0}, mode_fwhm_um=2.42,
        gvd_fs2_per_cm=1034.0,
    )


@pytest.fixture
def fiber1():
    """37 cm fiber used for the low-concentration runs."""
    return FiberSpec.build(
        core_diameter_um=5.0, length_cm=37.0, core=TOLUENE, clad=FUSED_SILICA,
        scatter={451.0: 0.0891, 810.0: 0.0}, mode_fwhm_um=2.42,
        gvd_fs2_per_cm=1034.0,
    )


@pytest.fixture
def laser_source():
    return SourceSpec(
        kind="laser", wavelength_nm=810.0, rep_rate_hz=8.0e7,
        pulse_fwhm_fs=110.0, photon_energy_j=2.45e-19,
        pre_fiber_gdd_fs2=0.0, input_power_w=1.75e-9,
    )


@pytest.fixture
def spdc_source():
    return SourceSpec(
        kind="spdc", wavelength_nm=810.0, rep_rate_hz=8.0e7,
        pulse_fwhm_fs=110.0, photon_energy_j=2.45e-19,
        pre_fiber_gdd_fs2=2100.0, input_rate_per_s=1.49e8,
        effective_pulse_fwhm_fs=342.0,
    )


def make_attenuation(concentration_m=2.30e-3, scatter=None, convention="decadic"):
    return AttenuationModel.build(
        solvent={451.0: 0.0039, 810.0: 0.003},
        extinction={451.0: 4417.0, 810.0: 0.0},
        concentration_m=concentration_m,
        scatter=scatter if scatter is not None else {451.0: 0.0301, 810.0: 0.0},
        extinction_convention=convention,
    )


@pytest.fixture
def attenuation3():
    """Experiment-3 attenuation (fiber 2, 2.30 mM)."""
    return make_attenuation()


@pytest.fixture
def fluorophore3():
    return FluorophoreSpec(quantum_yield=0.67, emission_peak_nm=451.0,
                           concentration_m=2.30e-3)


@pytest.fixture
def detection3():
    from fibertpa.tables import SpectralTable
    return DetectionChain(gamma0=SpectralTable.constant(0.630, name="gamma0"),
                          band_nm=(430.0, 560.0))


@pytest.fixture
def pair_source3():
    return PairSource(
        effective_klyshko=0.94, free_space_transmission=0.565, coupling=0.48,
        single_rate_per_s=1.49e8, spatial_modes=740.0,
        entanglement_area_um2=(2.1, 18.0),
    )


@pytest.fixture
def te_model3():
    return EntanglementTimeModel(te0_fs=260.0, s0=2145.0, gdd_fs2=2100.0,
                                 gvd_fs2_per_cm=1034.0)
