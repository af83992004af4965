"""Smoke test for the volex Python module. Run after `pip install --no-build-isolation ./crates/python`."""

import math
import pathlib
import sys

import volex

ROOT = pathlib.Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "crates" / "core" / "scenarios"


def main():
    e = volex.Expression("sin(x) * y^2", ["x", "y"])
    assert abs(e.eval([0.5, 2.0]) - 4 * math.sin(0.5)) < 1e-14
    value, grad, hess = e.jet([0.5, 2.0])
    assert abs(grad[0] - 4 * math.cos(0.5)) < 1e-14
    assert abs(hess[0][1] - hess[1][0]) < 1e-14

    try:
        volex.Expression("x + q", ["x"])
    except volex.InputError as err:
        print("rejected:", err)
    else:
        raise AssertionError("unknown symbol accepted")

    s = volex.Scenario.load(str(SCENARIOS / "gaussian_soliton.json"))
    print(s, s.coordinates, s.analyses)
    ricci, scalar = s.curvature([0.1, 0.2])
    assert abs(scalar) < 1e-12
    report = s.run(["soliton"])
    assert report["passed"], report
    print("gaussian soliton:", "PASS" if report["passed"] else "FAIL")

    flrw = volex.Scenario.load(str(SCENARIOS / "flrw_matter.json"))
    assert flrw.dim == 4
    report = flrw.run(grid=8)
    print("flrw_matter:", "PASS" if report["passed"] else "FAIL")
    assert report["passed"]
    print("ok")


if __name__ == "__main__":
    sys.exit(main())
