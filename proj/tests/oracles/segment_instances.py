"""Small tracking segments solved in uncondensed form with cvxpy/Clarabel.

The states are explicit variables tied by the linearised dynamics, so this
checks the condensation as well as the cone solver. Input is the output of
the export_segments tool:

    ./build/tests/export_segments > /tmp/segs.json
    python3 tests/oracles/segment_instances.py /tmp/segs.json

Writes tests/data/segment_instances.json.
"""
import json
import math
import pathlib
import sys

import cvxpy as cp
import numpy as np


def wrap(x):
    return (x + math.pi) % (2.0 * math.pi) - math.pi


def solve(p):
    n = len(p["dt_s"])
    au = p["accel_unit_kms2"]
    xg = np.array(p["x_guess"])
    ag = np.array(p["a_guess_kms2"]).reshape(n, 3)
    dt = np.array(p["dt_s"])
    bounds = np.array(p["bounds_kms2"])
    jac = np.array(p["dv_jacobian"])
    dvg = np.array(p["dv_guess_ms"])
    w = p["dv_prime_weight"]
    scale = max(bounds.max(), 1e-12)

    dx0 = np.array(p["x0"]) - xg[0]
    dx0[3] = wrap(dx0[3])

    u = cp.Variable((n, 3))  # acceleration / scale
    sx = 1e-5
    z = cp.Variable((n + 1, 6))  # deviation from the guess / sx
    cons = [z[0] == dx0 / sx]
    for k in range(n):
        a_mat = np.array(p["stm"][k]["a"])
        b_mat = np.array(p["stm"][k]["b"])
        cons.append(z[k + 1] == a_mat @ z[k] + b_mat @ (u[k] * scale - ag[k]) / (au * sx))
        cons.append(cp.norm(u[k]) <= bounds[k] / scale)
    term = dvg + (jac * sx) @ z[n]
    obj = 1e3 * scale * cp.sum(cp.multiply(dt, cp.norm(u, axis=1))) + w * cp.norm(term)
    prob = cp.Problem(cp.Minimize(obj), cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    assert prob.status == cp.OPTIMAL, prob.status
    return float(prob.value)


def main():
    problems = json.loads(pathlib.Path(sys.argv[1]).read_text())
    out = []
    for p in problems:
        out.append({"problem": p, "objective": solve(p)})
    path = pathlib.Path(__file__).resolve().parents[1] / "data" / "segment_instances.json"
    path.write_text(json.dumps({"solver": "cvxpy " + cp.__version__ + " / CLARABEL, uncondensed", "instances": out}))
    print(f"wrote {len(out)} instances to {path}")


if __name__ == "__main__":
    main()
