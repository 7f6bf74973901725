"""Time the band-moment kernel: compiled extension against the numpy fallback.

    python3 benchmarks/bench_band_moments.py [--repeat 20]
"""
import argparse
import timeit

from quantumlimits import DampedHarmonic, FreeMass, Gaussian, Lorentzian, Rect, band_moments
from quantumlimits import _core

CASES = {
    "gaussian/damped": (Gaussian(1.0, 0.05), DampedHarmonic(1.0, 0.9, 0.01)),
    "lorentzian/damped": (Lorentzian(1.0, 0.01), DampedHarmonic(1.0, 0.5, 0.05)),
    "rect/free": (Rect(1.0, 0.2), FreeMass(1.0)),
    "gaussian/tight-rtol": (Gaussian(1.0, 0.2), DampedHarmonic(1.0, 1.1, 0.001)),
}


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--repeat", type=int, default=20)
    args = p.parse_args()
    if not _core.HAVE_COMPILED:
        print("compiled kernel not available; timing the fallback only")
    print(f"{'case':22s} {'fallback ms':>12s} {'compiled ms':>12s} {'speedup':>8s} "
          f"{'max rel diff':>13s}")
    for name, (f, mech) in CASES.items():
        rtol = 1e-12 if "tight" in name else 1e-8

        def run(compiled):
            return band_moments(f, mech, rtol=rtol, use_compiled=compiled)

        t_py = min(timeit.repeat(lambda: run(False), number=1, repeat=args.repeat)) * 1e3
        line = f"{name:22s} {t_py:12.3f}"
        if _core.HAVE_COMPILED:
            t_c = min(timeit.repeat(lambda: run(True), number=1, repeat=args.repeat)) * 1e3
            a, b = run(True), run(False)
            diff = max(abs(x - y) / max(abs(y), 1e-300)
                       for x, y in zip((a.chi_r, a.chi_r2, a.chi_i2, a.abs_chi_i),
                                       (b.chi_r, b.chi_r2, b.chi_i2, b.abs_chi_i)) if y)
            line += f" {t_c:12.3f} {t_py / t_c:8.1f} {diff:13.2e}"
        print(line)


if __name__ == "__main__":
    main()
