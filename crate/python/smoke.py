"""Smoke test for the logcy2_py extension module.

    pip install -e crates/python --no-build-isolation
    python python/smoke.py
"""

import json

import logcy2_py as lc


def main():
    assert lc.equal("P^5", "id")
    assert not any(lc.equal(f"P^{k}", "id") for k in range(1, 5))
    assert lc.realize("r2") == ("x", "(x^2 + 2*x + 1)/y")
    assert lc.volume_character("A[0,1;1,0] * E") == -1
    assert lc.tropicalize("E", (-1, 0)) == (-1, 1)
    assert lc.evaluate("r2", "1/2", "-3") == ("1/2", "-3/4")

    pxp = lc.Surface([((1, 0), 0), ((0, 1), 1), ((-1, 0), 0), ((0, -1), 0)])
    f1 = pxp.pushforward("E")
    assert f1 == lc.Surface([((1, 0), 0), ((0, 1), 0), ((-1, 1), 0), ((0, -1), 1)])
    assert lc.Surface.from_json(f1.to_json()) == f1
    try:
        pxp.pushforward("E^2")
    except ValueError as e:
        assert "not regular" in str(e)
    else:
        raise AssertionError("E^2 should be irregular")

    cubic = lc.Surface.cubic()
    s = cubic.resolve("r3")
    assert cubic.leq(s)
    assert lc.apply_to_diagram(s.diagram(), "r3") == s.pushforward("r3").diagram()
    counts = cubic.counts()
    assert counts["pass"] and counts["exceptional"] == counts["chi_y"] == 9
    assert cubic.invariants()["b2"] == 7
    assert lc.Surface([((1, 0), 4), ((0, 1), 3), ((-1, -1), 3)]).negative_definite()
    assert not lc.Surface([((1, 0), 3), ((0, 1), 3), ((-1, -1), 3)]).negative_definite()
    assert cubic.diagram_svg().startswith("<svg")
    assert len(json.loads(cubic.diagram())["nodes"]) == 6
    print("smoke ok")


if __name__ == "__main__":
    main()
