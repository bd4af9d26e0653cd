"""Independent reference values for the unit tests.

Plain numpy/scipy implementations of the textbook formulas, written without
looking at the C++ code paths they check. Run from the repository root:

    python3 tests/oracles/reference_values.py

Writes tests/data/reference_values.json.
"""
import json
import math
import pathlib

import numpy as np
from scipy.integrate import solve_ivp

MU = 398600.4418
RE = 6378.1363
DEG = math.pi / 180.0


def kep_to_cart(a, e, i, raan, argp, ta):
    p = a * (1 - e * e)
    r = p / (1 + e * math.cos(ta))
    r_pf = np.array([r * math.cos(ta), r * math.sin(ta), 0.0])
    v_pf = math.sqrt(MU / p) * np.array([-math.sin(ta), e + math.cos(ta), 0.0])

    def rot3(x):
        c, s = math.cos(x), math.sin(x)
        return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])

    def rot1(x):
        c, s = math.cos(x), math.sin(x)
        return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])

    q = rot3(raan) @ rot1(i) @ rot3(argp)
    return (q @ r_pf).tolist(), (q @ v_pf).tolist()


def equinoctial(a, e, i, raan, argp, ta):
    return {
        "p": a * (1 - e * e),
        "f": e * math.cos(argp + raan),
        "g": e * math.sin(argp + raan),
        "h": math.tan(i / 2) * math.cos(raan),
        "k": math.tan(i / 2) * math.sin(raan),
        "L": (raan + argp + ta) % (2 * math.pi),
    }


def edelbaum_dv(a0, i0, af, i_f):
    v0, vf = math.sqrt(MU / a0), math.sqrt(MU / af)
    return 1e3 * math.sqrt(v0 * v0 + vf * vf - 2 * v0 * vf * math.cos(math.pi / 2 * abs(i_f - i0)))


def gve_transverse_da(a, e, accel, orbits=1.0):
    """Gauss equations for (a, e, argp, M) under a constant transverse push."""
    n0 = math.sqrt(MU / a**3)

    def rhs(t, y):
        a, e, w, m = y
        ea = m
        for _ in range(30):
            ea = ea - (ea - e * math.sin(ea) - m) / (1 - e * math.cos(ea))
        ta = 2 * math.atan2(math.sqrt(1 + e) * math.sin(ea / 2), math.sqrt(1 - e) * math.cos(ea / 2))
        p = a * (1 - e * e)
        h = math.sqrt(MU * p)
        r = p / (1 + e * math.cos(ta))
        da = 2 * a * a / h * (p / r) * accel
        de = ((p + r) * math.cos(ta) + r * e) / h * accel
        dw = (p + r) * math.sin(ta) / (h * e) * accel
        n = math.sqrt(MU / a**3)
        dm = n - math.sqrt(1 - e * e) / (h * e) * (p + r) * math.sin(ta) * accel
        return [da, de, dw, dm]

    t_end = orbits * 2 * math.pi / n0
    sol = solve_ivp(rhs, (0, t_end), [a, e, 0.0, 0.0], method="DOP853", rtol=1e-12, atol=1e-12)
    return sol.y[0, -1] - a, t_end


def plane_change_dv(a, di):
    """Circular orbit, out-of-plane thrust switching sign at u = pi/2, 3pi/2."""
    accel = 1e-7
    v = math.sqrt(MU / a)
    n = v / a

    def rhs(t, y):
        inc, u = y
        s = 1.0 if math.cos(u) >= 0 else -1.0
        return [math.cos(u) / v * accel * s, n]

    def done(t, y):
        return y[0] - di

    done.terminal = True
    sol = solve_ivp(rhs, (0, 1e9), [0.0, 0.0], method="DOP853", rtol=1e-12, atol=1e-14, events=done,
                    max_step=2 * math.pi / n / 200)
    return accel * sol.t_events[0][0] * 1e3


def main():
    out = {}
    r, v = kep_to_cart(6728.1363, 0.004, 98.3 * DEG, 15.3 * DEG, 0.0, 0.0)
    out["upleg_initial_cartesian"] = {"r": r, "v": v}
    out["target_equinoctial"] = equinoctial(6975.0874, 0.0040111, 98.1521 * DEG, 19.9669 * DEG, 0.0, 0.0)
    out["edelbaum_upleg_dv"] = edelbaum_dv(6728.1363, 98.3 * DEG, 6975.0874, 98.1521 * DEG)
    da, t_end = gve_transverse_da(6728.1363, 0.004, 9.33e-8)
    out["gve_transverse_one_orbit"] = {"a": 6728.1363, "e": 0.004, "accel": 9.33e-8, "da": da, "t": t_end}
    out["plane_change_1deg_7000km_dv"] = plane_change_dv(7000.0, 1.0 * DEG)
    a = 6728.1363
    out["dv_a_1km"] = 1e3 * math.sqrt(MU / a) / (2 * a) * 1.0
    path = pathlib.Path(__file__).resolve().parents[1] / "data" / "reference_values.json"
    path.write_text(json.dumps(out, indent=1) + "\n")
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
