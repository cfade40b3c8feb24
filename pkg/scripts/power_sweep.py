#!/usr/bin/env python3
"""Forward fluorescence power sweeps for the bundled laser experiments.

Writes one CSV per experiment plus a summary of the fitted log-log
slopes (exactly 2 for the quadratic model) and the single-line
cross-section inversions of the bundled fit coefficients.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from fibertpa import forward_c2pef, invert_sigma_c, load_config, SourceSpec
from fibertpa.constants import GM_CM4_S
from fibertpa.tables import write_csv

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma-c-gm", type=float, default=390.0)
    ap.add_argument("--out", default="out/power_sweep")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    grid = np.logspace(np.log10(1.75e-9), np.log10(100e-9), 12)
    for name in ("experiment-1", "experiment-2", "experiment-3"):
        cfg = load_config(ROOT / "configs" / f"{name}.json")
        rows = []
        for w0 in grid:
            src = SourceSpec(
                kind="laser", wavelength_nm=cfg.source.wavelength_nm,
                rep_rate_hz=cfg.source.rep_rate_hz,
                pulse_fwhm_fs=cfg.source.pulse_fwhm_fs,
                photon_energy_j=cfg.source.photon_energy_j,
                pre_fiber_gdd_fs2=cfg.source.pre_fiber_gdd_fs2,
                input_power_w=float(w0))
            fc = forward_c2pef(args.sigma_c_gm * GM_CM4_S, src, cfg.fiber,
                               cfg.attenuation, cfg.fluorophore, cfg.detection)
            rows.append((float(w0), fc))
        path = out / f"{name}_sweep.csv"
        write_csv(path, ["w0_watts", "fc_cnt_s"], rows)
        w = np.array([r[0] for r in rows])
        f = np.array([r[1] for r in rows])
        slope = np.polyfit(np.log(w), np.log(f), 1)[0]
        coeff = cfg.measurement["fc_per_w0sq_cnt_s_uw2"]
        sigma = invert_sigma_c(coeff * 1e12, cfg.source, cfg.fiber,
                               cfg.attenuation, cfg.fluorophore, cfg.detection)
        print(f"{name}: slope = {slope:.6f}, inverted sigma_C = "
              f"{sigma / GM_CM4_S:.1f} GM (single-line), wrote {path}")


if __name__ == "__main__":
    main()
