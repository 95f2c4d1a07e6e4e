"""Time each kernel compiled (numba) and interpreted (its ``py_func``).

    python benchmarks/bench_kernels.py [--repeat 5]

With TRIHEUN_NO_NUMBA=1 both columns run the interpreted code.
"""

import argparse
import timeit

import numpy as np

from triheun import _accel


def cases():
    a, b, g = 1.0, 2.0, 3.0
    kk = 40.0 - np.linspace(-4, 4, 4001) ** 4
    coeffs = _accel.t1_coefficients(a, b, g, 400)
    return {
        "t1_coefficients(n=400)": (_accel.t1_coefficients, (a, b, g, 400)),
        "t2_coefficients(n=400)": (_accel.t2_coefficients, (a, b, g, 400)),
        "w_recurrence(n=2000)": (_accel.w_recurrence, (a, b, g, 1.0, g, (g * g - a) / 2, 2000)),
        "series_eval(x=1.4)": (_accel.series_eval, (coeffs, 0, 1.4, 1e-17)),
        "numerov_nodes(4001 pts)": (_accel.numerov_nodes, (kk, 8 / 4000)),
        "numerov_match(4001 pts)": (_accel.numerov_match, (kk, 8 / 4000, 2000)),
    }


def best_of(fn, args, repeat):
    fn(*args)  # compile / warm up
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.05:
        number *= 4
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ns = ap.parse_args()
    print(f"backend: {_accel.BACKEND}")
    print(f"{'kernel':<26}{'compiled [us]':>15}{'python [us]':>15}{'speedup':>10}")
    for name, (fn, args) in cases().items():
        fast = best_of(fn, args, ns.repeat)
        slow = best_of(fn.py_func, args, ns.repeat)
        print(f"{name:<26}{fast * 1e6:>15.2f}{slow * 1e6:>15.2f}{slow / fast:>10.1f}")


if __name__ == "__main__":
    main()
