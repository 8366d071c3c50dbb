from fractions import Fraction
from pathlib import Path

import pytest

odoforge = pytest.importorskip("odoforge")

FIXTURES = Path(__file__).resolve().parents[2] / "data" / "fixtures"


def dyadic(depth):
    z = odoforge.Group("free_abelian", ["t"])
    return z, odoforge.Chain(z, [[f"t^{2 ** n}"] for n in range(1, depth + 1)])


def test_words():
    f2 = odoforge.Group("free", ["a", "b"])
    assert f2.normalize("a*a^-1*b") == "b"
    assert f2.multiply("a*b", "b^-1") == "a"
    assert f2.abelianize("a*b*a^-1*b") == [0, 2]
    assert len(f2.ball(2)) == 17
    with pytest.raises(odoforge.Error):
        f2.normalize("c")


def test_normal_core():
    f2 = odoforge.Group("free", ["a", "b"])
    stab = odoforge.Subgroup(f2, ["a^-1*b", "b*a", "a^3", "a*b*a^-1"])
    assert stab.index == 3
    assert not stab.is_normal()
    core = stab.normal_core()
    assert core.index == 6
    assert core.is_normal()
    assert stab.contains_subgroup(core)


def test_toeplitz_prefix():
    _, chain = dyadic(6)
    spec = odoforge.ToeplitzSpec(chain)
    bits = "".join(str(spec.evaluate(f"t^{n}")[0]) for n in range(8))
    assert bits == "01000101"
    report = spec.verify([f"t^{n}" for n in range(32)], 20)
    assert report["pass"]
    assert report["contradictions"] == []


def test_eigenvalues_and_haar():
    _, chain = dyadic(3)
    chars, free_rank = odoforge.eigenvalues(chain, 3)
    assert free_rank == 0
    assert sorted(c[0] for c in chars) == [Fraction(k, 8) for k in range(8)]
    assert odoforge.haar_cylinder(chain, 3) == Fraction(1, 8)


def test_factor():
    z, two = dyadic(4)
    three = odoforge.Chain(z, [["t^3"], ["t^9"]])
    res = odoforge.factor_between(two, three)
    assert not res["ok"]
    assert res["failed_level"] == 1
    four = odoforge.Chain(z, [["t^4"], ["t^16"]])
    assert odoforge.factor_between(four, two)["levels"] == [0, 1, 1, 2, 2]


def test_measure():
    _, chain = dyadic(5)
    spec = odoforge.ToeplitzSpec(chain)
    m = spec.measure([f"t^{n}" for n in range(4)], 64)
    assert m["uniquely_ergodic"]
    assert Fraction(*m["diameter"]) == 0
    for n, a in enumerate(m["matrices"]):
        for j in range(len(a[0])):
            assert sum(row[j] for row in a) == 2


def test_run_fixture(tmp_path):
    code, body = odoforge.run(FIXTURES / "dyadic.cfg", "all", tmp_path)
    assert code == 0
    assert body["command"] == "all"
    assert (tmp_path / "report.json").exists()
    again = odoforge.run(FIXTURES / "dyadic.cfg", "all")
    assert again[1] == body
