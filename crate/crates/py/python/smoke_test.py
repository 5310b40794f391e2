"""Smoke test for the schemamap extension module.

Build and install first:  pip install .   (from crates/py)
"""

import schemamap as sm

M = """
source { r1/2; }
target { r2/2; r3/2; }
st { r1(X,Y) -> r2(Y,Z); r1(X,Y) -> r3(Z,Y); }
t  { r2(X,Y) -> r3(Z,X); }
"""
MP = """
source { r1/2; }
target { r2/2; r3/2; }
st { r1(X,Y) -> r2(Y,Z); }
t  { r2(X,Y) -> r3(Z,X); }
"""
MPP = """
source { r1/2; }
target { r2/2; r3/2; }
st { r1(X,Y) -> r2(Y,Z); }
t  { r2(X,Y) -> r3(Y,X); }
"""
EMPLOYEE = """
source { employee/3; }
target { person/2; salary/2; }
st { employee(X,Y,Z) -> person(X,W), salary(X,Y); }
t  { salary(X,Y) -> person(X,Z); }
"""


def main():
    m, mp, mpp = sm.Mapping(M), sm.Mapping(MP), sm.Mapping(MPP)
    assert m.source == [("r1", 2)]
    assert len(m.st_tgds) == 2 and len(m.t_tgds) == 1

    dummies = m.dummies()
    assert [f for d in dummies for f, _ in d.facts()] == ["r1(z1,z1)", "r1(z1,z2)"]

    r = sm.chase(m, m.source_instance("r1(a,b)."))
    assert r.terminated and len(r.instance) == 4 and r.instance.nulls() == 3
    assert ("r3(_3,b)", 2) in r.instance.facts()

    outcome, fwd, bwd = sm.equivalent(m, mp)
    assert outcome == "equivalent" and fwd and bwd

    assert sm.contains(mp, mpp)
    v = sm.contains(mpp, mp)
    assert v.outcome == "not_contained" and v.failing_dummy == "r1(z1,z1)"
    assert v.witnesses[-1]["outcome"] == "failed"
    assert sm.oracle(mpp, mp) == "not_contained"

    e = sm.Mapping(EMPLOYEE)
    i = e.source_instance("employee(john,50,toys).")
    assert sm.certain_answers(e.query("q(X,Y) :- salary(X,Y)."), i, e) == [["john", "50"]]
    assert sm.certain_answers(e.query("q(X,W) :- person(X,W)."), i, e) == []

    a = mp.instance("r2(b,_1). r3(_2,b).")
    b = mp.instance("r2(b,_1). r3(_1,b).")
    assert sm.find_homomorphism(a, b) == [("_1", "_1"), ("_2", "_1")]
    assert sm.find_homomorphism(b, a) is None
    assert sm.is_isomorphic(a, mp.instance("r2(b,_7). r3(_8,b)."))

    try:
        sm.Mapping("source { r1/2; } target { r2/2 }")
    except ValueError as exc:
        assert "1:" in str(exc)
    else:
        raise AssertionError("expected a parse error")

    print("smoke test ok")


if __name__ == "__main__":
    main()
