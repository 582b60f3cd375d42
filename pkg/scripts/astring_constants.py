"""Minkowski constant of the a-string from two neighbourhoods.

Compares |A_t| / t^(1-D) for the full t-neighbourhood and for the inner
neighbourhood inside the gaps, over shrinking windows of t, with the two
candidate closed forms 2^(1-D) a^D/(1-D) and 2^(1-D) a^D/(D(1-D)).
"""
import argparse

from fractal_zeta.sets import make_astring
from fractal_zeta.tubes import TubeModel, minkowski_contents_estimate, tube_inner_1d, tube_model


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--a", type=float, nargs="+", default=[1.0, 0.5, 2.0])
    args = ap.parse_args()
    for a in args.a:
        A = make_astring(a)
        D = A.dim
        c1 = 2 ** (1 - D) * a**D / (1 - D)
        c2 = c1 / D
        full = tube_model(A)
        inner = TubeModel("gapsum", lambda t, A=A: tube_inner_1d(A, t), 1, D)
        print(f"a = {a:g}, D = {D:.4f}: first form {c1:.8f}, second form {c2:.8f}")
        print(f"  {'window':>16} {'full':>12} {'inner':>12}")
        for hi in (1e-4, 1e-6, 1e-8, 1e-10):
            vals = []
            for tube in (full, inner):
                est = minkowski_contents_estimate(tube, D, hi / 100, hi, 256)
                vals.append(0.5 * (est.lower + est.upper))
            print(f"  [{hi / 100:.0e}, {hi:.0e}] {vals[0]:>12.8f} {vals[1]:>12.8f}")


if __name__ == "__main__":
    main()
