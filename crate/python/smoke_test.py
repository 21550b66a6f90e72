"""Smoke test for the clr_lab extension module.

Build and place the module next to this script first:

    cargo build --release -p clr-lab-py --features extension-module
    cp target/release/libclr_lab_py.so python/clr_lab.so
"""

import json
import math
import pathlib
import sys

HERE = pathlib.Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

import clr_lab  # noqa: E402

DATA = HERE.parent / "data"


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    assert close(clr_lab.c_simple(3.0), 10.8, 1e-12)
    assert close(clr_lab.c_gamma(3.0, 8.0 / 15.0), 10.8, 1e-12)
    assert close(clr_lab.tail_min(4.0), clr_lab.m_simple(4.0), 1e-8)
    assert clr_lab.m_lower(3.0) < clr_lab.m_simple(3.0)

    published = dict(clr_lab.published_params())
    t = published[3]
    print(t)
    obj = t.objective(3.0)
    c = clr_lab.c_gamma(3.0, obj["objective"])
    print(f"C_3 at published parameters: {c:.6f}")
    assert close(c, 7.55151, 1e-3)

    try:
        clr_lab.TrialParams(0, 1, 2.0, 2.0)
    except ValueError as e:
        print(f"rejected bad shape: {e}")
    else:
        raise AssertionError("expected ValueError")

    o = clr_lab.optimize_trial(3.0, cells=[(2, 3)], restarts=4)
    print(f"optimized (2,3) cell: alpha={o['params']['alpha']:.5f} beta={o['params']['beta']:.5f}")

    symbol = (DATA / "laplacian.json").read_text()
    profile = (DATA / "unit_sample.json").read_text()
    b = clr_lab.bound_opt(symbol, profile)
    print(f"bound for the Laplacian: {b['bound']:.8g} (closed form {b['closed_form']:.8g})")
    assert close(b["bound"], b["closed_form"], 1e-6)
    sat = clr_lab.bound_opt((DATA / "saturating.json").read_text(), profile)
    assert sat["unbounded"] and math.isinf(sat["bound"])

    print(clr_lab.render_report([3], format="csv"), end="")
    rows = json.loads(clr_lab.render_report([3, 4], format="json"))
    assert len(rows) == 2

    results = clr_lab.run_checks(["constants", "sandwich"])
    failed = [r for r in results if not r["passed"]]
    print(f"{len(results)} checks, {len(failed)} failed")
    assert not failed
    print("smoke test passed")


if __name__ == "__main__":
    main()
