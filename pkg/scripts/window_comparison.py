"""Period recovery on quasiperiodic unions under different tapers.

Builds the union for each moduli tuple, samples the normalised profile
over 5 max T in log(1/t) and reports, per window, which periods were
matched, the spurious peaks and the peak-to-floor ratio.

    python scripts/window_comparison.py --samples 2048
"""
import argparse
import math

import numpy as np

from fractal_zeta.quasi import build_quasiperiodic, period_recover
from fractal_zeta.tubes import log_profile, tube_model

WINDOWS = ["hann", "flattop", "blackmanharris", "boxcar"]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--D", type=float, default=math.log(2) / math.log(3))
    ap.add_argument("--samples", type=int, default=2048)
    ap.add_argument("--spans", type=float, nargs="+", default=[5.0, 8.0])
    args = ap.parse_args()

    print(f"{'moduli':<10} {'span':>5} {'window':<15} {'matched':<14} {'spurious':>8} {'peak/floor dB':>13}")
    for moduli in [(2, 3), (2, 3, 5), (3, 5)]:
        union, qc = build_quasiperiodic(args.D, moduli)
        tube = tube_model(union)
        for k in args.spans:
            span = k * max(qc.periods)
            dtau = span / args.samples
            tau = math.log(1e4) + np.arange(args.samples) * dtau
            G = log_profile(tube, qc.D, tau)
            for w in WINDOWS:
                rec = period_recover(G, dtau, qc.periods, window=w)
                hit = "".join("y" if rec.matched[T] else "n" for T in qc.periods)
                print(f"{str(moduli):<10} {k:>5.1f} {w:<15} {hit:<14} {len(rec.spurious):>8d} {rec.peak_to_floor_db:>13.1f}")


if __name__ == "__main__":
    main()
