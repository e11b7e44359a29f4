"""Smoke test for the okounkov Python extension.

Build and install the module first:

    pip install maturin
    maturin build --release -m crates/py/Cargo.toml -o dist
    pip install dist/okounkov-*.whl

then run ``python python/smoke_test.py`` from the repository root.
"""

from pathlib import Path

import okounkov

ROOT = Path(__file__).resolve().parent.parent


def polynomials():
    f = okounkov.Polynomial(1, "1 + u1^2")
    g = okounkov.Polynomial(1, "u1 - 1/2")
    assert str(f * g) == "-1/2 + u1 - 1/2*u1^2 + u1^3", str(f * g)
    assert abs((f + g).eval([2.0]) - 6.5) < 1e-12
    try:
        okounkov.Polynomial(1, "u1 +* 2")
    except ValueError as err:
        assert "column" in str(err)
    else:
        raise AssertionError("malformed polynomial accepted")


def cusp():
    val = okounkov.Valuation(1)
    gens = [okounkov.Polynomial(1, s) for s in ("1", "u1^2", "u1^3")]
    assert val.value(gens[1]) == [2]
    assert len(val.value_image(gens)) == 3

    levels = okounkov.semigroup_levels(val, gens, 3)
    assert levels[1] == [[0], [2], [3]], levels
    assert len(levels[2]) == 6

    body = okounkov.newton_okounkov_body(val, gens, d_max=6, d=1)
    assert body["summary"] == "segment [0/1, 3/1]", body
    assert body["lattice_points"] == [[0], [1], [2], [3]]

    report = okounkov.degenerate(val, gens, d=1)
    assert [p for p, _ in report["w0"]] == [[0], [2], [3]]
    assert report["strict_inclusion"]
    statuses = {k: v[0] for k, v in report["hypotheses"].items()}
    assert statuses == {"e": "pass", "f": "assumed", "g": "pass", "h": "pass"}, statuses

    ok, missing = okounkov.khovanskii(val, gens, [(1, gens[0]), (1, gens[1])], 4)
    assert not ok and missing == [[3]]


def concentration():
    tau = okounkov.Polynomial(1, "u1")
    mass0, pair0 = okounkov.concentration([[0], [3]], [1], 0.0, 0.5, tau, resolution=200)
    assert abs(mass0 - 2 / 3) < 1e-12 and abs(pair0 - 1.5) < 1e-12
    mass, pair = okounkov.concentration([[0], [3]], [1], 400.0, 0.5, tau, resolution=200)
    assert mass < 1e-6 and abs(pair - 1.0) < 1e-2
    try:
        okounkov.concentration([[0], [3]], [5], 1.0, 0.5)
    except okounkov.PreconditionError:
        pass
    else:
        raise AssertionError("label outside the polytope accepted")


def commands():
    text = (ROOT / "fixtures" / "cusp.problem").read_text()
    report, code = okounkov.run("body", text)
    assert code == 0 and "segment [0/1, 3/1]" in report
    missing = (ROOT / "fixtures" / "cusp_missing.problem").read_text()
    _, code = okounkov.run("khovanskii", missing)
    assert code == 3
    trace, code = okounkov.run("quantize", text, resolution=50)
    assert code == 0 and trace.startswith("s,t_of_s,m1,mass_outside")


if __name__ == "__main__":
    for check in (polynomials, cusp, concentration, commands):
        check()
        print(f"ok  {check.__name__}")
