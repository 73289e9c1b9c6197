"""Independent reference values for the test suite, computed with mpmath.

Nothing here imports lebesguekit.  Run it to regenerate the numbers frozen in
tests/test_*.py:

    python3 scripts/compute_oracles.py
"""
import json

import mpmath as mp

mp.mp.dps = 30
E = mp.e


def series_a(b, theta, j):
    j = mp.mpf(j)
    return (mp.e ** j / (j * mp.log(j) ** b)) ** (mp.mpf(1) / 2 * (j + 1) / (j + 1 + theta * mp.log(j + 2)))


def example_exponent(theta, base, u):
    # base + base(base-1) theta loglog(e/t)/log(e/t) on t <= e^-2, constant above
    u = max(u, mp.mpf(3))
    return base + base * (base - 1) * theta * mp.log(u) / u


def calibration(a, b):
    # int_0^1 t^-a log(e/t)^b dt = e^{1-a} (1-a)^{-(b+1)} Gamma(b+1, 1-a)
    s = 1 - mp.mpf(a)
    return E ** s * s ** (-(b + 1)) * mp.gammainc(b + 1, s)


def example_modular(b, theta, J):
    """Cellwise sum of int f^{p(t)} dt for the step series against its exponent."""
    p = lambda u: example_exponent(theta, 2, u)
    a2 = series_a(b, theta, 2)
    total = a2 ** p(3) * (1 - mp.e ** -2)
    for j in range(2, J + 1):
        la = mp.log(series_a(b, theta, j))
        total += mp.quad(lambda u: mp.e ** (la * p(u) + 1 - u), [j + 1, j + 2])
    la = mp.log(series_a(b, theta, J))
    total += mp.quad(lambda u: mp.e ** (la * p(u) + 1 - u), [J + 2, mp.inf])
    return total


def sup_1d(fn, a, b):
    x = mp.findroot(lambda x: mp.diff(fn, x), (a + b) / 2)
    return x, fn(x)


def main():
    out = {}
    out["a2_b1.5_theta1"] = series_a(1.5, 1, 2)
    out["f_star_p0_2_theta1_at_e-2"] = mp.sqrt(E ** 2 * mp.log(3))
    out["example_exponent_theta1_base2_at_e-2"] = example_exponent(1, 2, 3)
    for a, b in [(0.5, 0), (0.25, 1), (0.75, 0.5), (0.1, -2), (0.3, -0.5), (0.0, 2)]:
        out[f"calibration_a{a}_b{b}"] = calibration(a, b)
    out["small_chi_p2_theta1"] = mp.sqrt(2 * E) * mp.gammainc(0.5, 0.5)
    out["small_t-1/4_p2_theta1"] = 2 * mp.sqrt(2) * E ** 0.25 * mp.gammainc(0.5, 0.25)
    t, v = sup_1d(lambda t: mp.sqrt((1 - t) / mp.log(E / t)), 0.1, 0.6)
    out["grand_rearr_chi_p2_theta1"], out["grand_rearr_chi_argmax_t"] = v, t
    t, v = sup_1d(lambda t: mp.sqrt(2 * (1 - mp.sqrt(t)) / mp.log(E / t)), 0.1, 0.6)
    out["grand_rearr_t-1/4_p2_theta1"] = v
    out["grand_def_t-1/4_p2_theta1"] = max((4 * e / (2 + e)) ** (1 / (2 - e)) for e in mp.linspace(1e-6, 1, 10001))
    out["musielak_norm_c1_p2_sigma1"] = mp.findroot(lambda lam: lam ** -2 * mp.log(E + 1 / lam) - 1, 1.1)
    out["musielak_modular_c_p2_sigma1"] = mp.log(E + 1)
    out["example_modular_b1.5_theta1_J1e4"] = example_modular(1.5, 1, 10 ** 4)
    print(json.dumps({k: mp.nstr(v, 17) for k, v in out.items()}, indent=2))


if __name__ == "__main__":
    main()
