#!/usr/bin/env python3
"""Entanglement-time broadening along the fiber for a Gaussian joint
spectrum, cross-checked against the closed-form value at every depth."""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from fibertpa import (entanglement_time_profile, fit_te_model, gaussian_jsi,
                      gaussian_te_analytic)
from fibertpa.jsa import write_te_profile_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma-omega-rad-s", type=float, default=5e13)
    ap.add_argument("--gdd-fs2", type=float, default=1000.0)
    ap.add_argument("--gvd-fs2-per-cm", type=float, default=1034.0)
    ap.add_argument("--zmax-cm", type=float, default=4.0)
    ap.add_argument("--grid", type=int, default=256)
    ap.add_argument("--out", default="out/entanglement_time")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    js = gaussian_jsi(args.sigma_omega_rad_s, 2.325e15, n=args.grid)
    z = np.arange(0.0, args.zmax_cm + 0.5, 1.0)
    profile = entanglement_time_profile(js, args.gdd_fs2, args.gvd_fs2_per_cm, z)
    path = out / "te_profile.csv"
    write_te_profile_csv(path, profile)

    print(f"{'z_cm':>6} {'te_dft_fs':>12} {'te_analytic_fs':>15} {'rel_err':>10}")
    for zi, tei in profile:
        ref = gaussian_te_analytic(args.sigma_omega_rad_s,
                                   args.gdd_fs2 + args.gvd_fs2_per_cm * zi)
        print(f"{zi:6.1f} {tei:12.3f} {ref:15.3f} {(tei - ref) / ref:10.2e}")
    model, max_resid = fit_te_model(profile, args.gdd_fs2, args.gvd_fs2_per_cm)
    print(f"fitted te0 = {model.te0_fs:.4f} fs, s0 = {model.s0:.6f} "
          f"(max rel residual {max_resid:.2e}); wrote {path}")


if __name__ == "__main__":
    main()
