import pytest

from conftest import algebra, cubic_A, session
from gforge.cli import Session
from gforge.exactla import ScalarMatrix
from gforge.homalg import (TowerError, as_regular_report, bigraded_convolution, build_phi_tower, det_sigma,
                           ext_algebra, frobenius_data, hdet, tau_E_restrictions)
from gforge.problem import load_problem
from gforge.resolution import minimal_resolution
from gforge.twist import MatrixAlgebraHom, TwistData


def diag(*xs):
    return ScalarMatrix.from_rows([[x if i == j else 0 for j in range(len(xs))] for i, x in enumerate(xs)])


def ext_of(names, rels, H=4, D=6):
    A = algebra(names, rels, D)
    return ext_algebra(A, minimal_resolution(A, H, D))


def poly_twist(q1, q2, D=6):
    A = algebra(["x"], [], D)
    B = algebra(["y1", "y2"], ["y2*y1 - y1*y2"], D)
    return TwistData(A, B, MatrixAlgebraHom.from_strings(A, [[[f"{q1}*x", "0"], ["0", f"{q2}*x"]]]))


# ------------------------------------------------------------------ tower

def test_example_tower():
    s = session("example53")
    tw = s.tower()
    assert tw.sizes == [1, 2, 2, 1]
    assert tw.phis[1] == s.prob.data.sigma
    assert tw.phis[2].format()["x1"] == [["-2*x2", "-2*x2"], ["-2*x2", "2*x2"]]
    assert tw.notes["unique"]
    assert all(tw.check_right_linearity(i) == [] for i in range(1, 4))
    assert det_sigma(tw).format() == {"x1": "4*x1", "x2": "4*x2"}


def test_example_tower_scales_with_parameter():
    tw = session("example53", p=2).tower()
    assert tw.phis[2].format()["x1"] == [["-16*x2", "-16*x2"], ["-16*x2", "16*x2"]]
    assert det_sigma(tw).format() == {"x1": "64*x1", "x2": "64*x2"}


def test_flip_tower_is_identity():
    tw = session("flip").tower()
    assert all(p == MatrixAlgebraHom.diagonal(p.algebra, p.size) for p in tw.phis)


def test_diagonal_over_polynomial_ring():
    data = poly_twist(3, 7)
    Q = minimal_resolution(data.B, 3, 6)
    tw = build_phi_tower(data, Q)
    assert tw.phis[2].format() == {"x": [["21*x"]]}
    assert det_sigma(tw).format() == {"x": "21*x"}


def test_ore_det_is_sigma():
    for q in (2, 3):
        s = session("ore", q=q)
        assert s.det().format() == {"x": f"{q}*x"}


def test_double_ore_det_formula():
    for p12, p11, M in [(2, 0, [[3, 0], [0, 5]]), (2, 3, [[2, 0], [3, 3]]), (2, 3, [[1, 0], [3, 2]])]:
        s = session("double_ore", p12=p12, p11=p11, a=M[0][0], b=M[1][1])
        if M[1][0]:
            doc = dict(s.prob.source)
            doc["sigma"] = {"x": [[f"{M[0][0]}*x", "0"], [f"{M[1][0]}*x", f"{M[1][1]}*x"]]}
            s = Session(load_problem(doc, {"p12": str(p12), "p11": str(p11)}))
        (s11, s12), (s21, s22) = M
        want = -p11 * s12 * s11 + s22 * s11 - p12 * s12 * s21
        assert s.det().format() == {"x": f"{want}*x"}


def test_tower_refuses_impure_B():
    A = algebra(["x"], [], 6)
    B = algebra(["y1", "y2"], ["y1*y1", "y2*y2*y1 - y1*y2*y2"], 6)
    data = TwistData(A, B, MatrixAlgebraHom.diagonal(A, 2))
    with pytest.raises((TowerError, ValueError)):
        build_phi_tower(data, minimal_resolution(B, 3, 6))


# ------------------------------------------------------------------- hdet

def test_hdet_examples():
    assert hdet(*_hdet_args("example53")) == diag(4, 4)
    assert hdet(*_hdet_args("example53", p=2)) == diag(64, 64)
    assert hdet(*_hdet_args("ore", q=3)) == diag(3)
    A = cubic_A(6)
    P = minimal_resolution(A, 3, 6)
    assert hdet(A, MatrixAlgebraHom.diagonal(A, 2), P).is_identity()


def test_hdet_classical_transpose():
    s = session("classical")
    assert s.hdet() == ScalarMatrix.from_rows([[3, -2], [1, 5]])


def _hdet_args(name, **kw):
    s = session(name, **kw)
    return s.prob.A, s.prob.data.sigma, s.res("A")


# -------------------------------------------------------------------- Ext

def test_exterior_algebra_of_plane():
    E = ext_of(["x", "y"], ["y*x - x*y"])
    assert E.total_dims() == [1, 2, 1]
    a, b = E.classes(1)
    assert E.product(a, a) == {} and E.product(b, b) == {}
    ab, ba = E.product(a, b), E.product(b, a)
    assert len(ab) == 1 and {k: -v for k, v in ab.items()} == ba


def test_ext_of_polynomial_ring():
    E = ext_of(["x"], [])
    (a,) = E.classes(1)
    assert E.total_dims() == [1, 1] and E.product(a, a) == {}


def test_ext_of_cubic_algebra():
    E = session("example53").ext("A")
    assert E.total_dims() == [1, 2, 2, 1]
    assert E.dims() == {(0, 0): 1, (1, 1): 2, (2, 3): 2, (3, 4): 1}
    assert all(v == {} for (a, b), v in E.table().items() if a[0] == b[0] == 1)


@pytest.mark.parametrize("name", ["example53", "ore", "double_ore", "classical"])
def test_yoneda_structure(name):
    s = session(name)
    for which in ("A", "B"):
        E = s.ext(which)
        assert E.check_associativity() == []
        assert E.check_lift_independence() == []


def test_unit_acts_trivially():
    E = session("example53").ext("A")
    one = (0, 0)
    for c in E.basis:
        assert E.product(one, c) == {c: 1} == E.product(c, one)


# -------------------------------------------------------------- Frobenius

def test_frobenius_nakayama_examples():
    F = frobenius_data(ext_of(["x", "y"], ["y*x - x*y"]))
    assert all(N.is_identity() for _, N in F.nakayama.values())
    F = frobenius_data(ext_of(["x"], []))
    assert all(N.is_identity() for _, N in F.nakayama.values())
    F = session("example53").frob("A")
    assert (F.h, F.l) == (3, 4)
    assert F.nakayama[(1, 1)][1] == diag(-1, -1)
    assert session("example53").mu("A").format() == {"x1": "-x1", "x2": "-x2"}


@pytest.mark.parametrize("name, which", [("example53", "A"), ("example53", "C"), ("double_ore", "B"),
                                         ("classical", "C"), ("ore", "C")])
def test_frobenius_relation(name, which):
    F = session(name).frob(which)
    E = F.ext
    assert F.check_relation() == []
    for a in E.basis:
        partners = [b for b in E.basis if F.pairing(a, b)]
        assert partners, a
    n = len(E.res.shifts)

    def mu_lin(x):
        out = {}
        for c, k in x.items():
            for d, v in F.mu(c).items():
                out[d] = out.get(d, 0) + k * v
        return {d: v for d, v in out.items() if v}

    for a in E.basis:
        for b in E.basis:
            if a[0] + b[0] < n:
                assert mu_lin(E.product(a, b)) == E.mul(F.mu(a), F.mu(b))


def test_as_reports():
    assert session("example53").as_report("A")["type"] == [3, 4]
    assert session("example53").as_report("C")["type"] == [6, 8]
    P = algebra(["x", "y"], ["y*x - x*y"], 6)
    assert as_regular_report(P, minimal_resolution(P, 3, 6))["type"] == [2, 2]
    N = algebra(["x", "y"], ["x*y"], 6)
    assert as_regular_report(N, minimal_resolution(N, 4, 6))["status"] == "not AS-regular"
    U = algebra(["x", "y"], ["x*x", "y*x"], 6)
    assert as_regular_report(U, minimal_resolution(U, 3, 6))["status"] == "undetermined at bound"


# ------------------------------------------------------------------ tau_E

def test_bigraded_convolution():
    e = {(0, 0): 1, (1, 1): 2}
    assert bigraded_convolution(e, e) == {(0, 0): 1, (1, 1): 4, (2, 2): 4}


@pytest.mark.parametrize("name", ["example53", "flip", "ore", "quantum_plane", "double_ore", "classical"])
def test_tau_E_checks(name):
    s = session(name)
    rep = tau_E_restrictions(s.tower(), s.res("A"), s.det(), s.hdet(), s.res("C"))
    assert rep["ok"], rep["violations"]
    if name == "example53":
        totals = {}
        for (n, _), k in rep["ext_dims_C"].items():
            totals[n] = totals.get(n, 0) + k
        assert [totals[n] for n in range(7)] == [1, 4, 8, 10, 8, 4, 1]


def test_tau_E_factorization_with_derivation():
    s = session("ore", c=1)
    assert s.prob.data.has_delta()
    rep = tau_E_restrictions(s.tower(), s.res("A"), s.det(), s.hdet(), s.res("C"))
    assert rep["ok"] and rep["factorization"]
