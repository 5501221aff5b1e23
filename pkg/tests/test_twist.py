import pytest

from conftest import algebra, cubic_A, session
from gforge.twist import (GradedAutomorphism, MatrixAlgebraHom, NotTwisting, SigmaDerivation, TwistData,
                          Violation, build_twisted_tensor, check_twist, convolution, invert_sigma, invert_twist,
                          validate_sigma)


def kx(bound=8, name="x"):
    return algebra([name], [], bound)


def ex53(p=1):
    return session("example53", p=p)


def test_example_sigma_is_a_homomorphism():
    cert = validate_sigma(ex53().prob.data.sigma)
    assert cert == {"relations_checked": 2, "size": 2}


def test_diagonal_embedding():
    A = cubic_A()
    d = MatrixAlgebraHom.diagonal(A, 3)
    validate_sigma(d)
    assert invert_sigma(d) == d


def test_violation_names_relation():
    P = algebra(["x", "y"], ["y*x - x*y"], 5)
    sig = MatrixAlgebraHom.from_strings(P, [[["x", "x"], ["0", "x"]], [["0", "y"], ["y", "0"]]])
    with pytest.raises(Violation) as e:
        validate_sigma(sig)
    assert str(e.value.relation) == "y*x - x*y"


def test_inverse_of_diagonal_scaling():
    A = kx()
    phi = invert_sigma(MatrixAlgebraHom.from_strings(A, [[["2*x", "0"], ["0", "3*x"]]]))
    assert phi.format() == {"x": [["1/2*x", "0"], ["0", "1/3*x"]]}


def compose_identity(A, outer, inner, transpose):
    """sum_k outer_jk(inner_ik(x)) for every generator, or the transposed system."""
    m = outer.size
    for g in range(A.ngens):
        x = A.gen(g)
        S = inner.apply(x)
        for i in range(m):
            for j in range(m):
                acc = {}
                for k in range(m):
                    src = S[k][i] if transpose else S[i][k]
                    img = outer.apply(src)[k][j] if transpose else outer.apply(src)[j][k]
                    for w, c in img.items():
                        acc[w] = acc.get(w, 0) + c
                acc = {w: c for w, c in acc.items() if c}
                assert acc == (x if i == j else {}), (g, i, j)


def test_example_sigma_inverse_satisfies_both_identities():
    data = ex53().prob.data
    phi = invert_sigma(data.sigma)
    assert phi is not None
    compose_identity(data.A, phi, data.sigma, transpose=False)
    compose_identity(data.A, data.sigma, phi, transpose=True)


def test_non_invertible_sigma():
    A = kx()
    assert invert_sigma(MatrixAlgebraHom.from_strings(A, [[["x", "x"], ["x", "x"]]])) is None


def test_example_twisted_tensor_dimensions():
    s = session("example53", D=5)
    T = s.twisted()
    assert T.hilbert == [1, 4, 12, 28, 58, 108]
    assert T.hilbert[2] == 4 + 2 * 2 + 4
    assert convolution([1, 2, 4], [1, 2, 4], 2) == [1, 4, 12]


def test_flip_gives_polynomial_ring():
    cert = check_twist(session("flip").prob.data)
    assert cert["hilbert_C"] == list(range(1, 10)) == cert["convolution"]


def test_quasitriangularity_failure():
    A = kx(6)
    B = algebra(["y1", "y2"], ["y2*y1 - 2*y1*y2"], 6)
    data = TwistData(A, B, MatrixAlgebraHom.from_strings(A, [[["0", "x"], ["x", "0"]]]))
    with pytest.raises(NotTwisting) as e:
        build_twisted_tensor(data)
    assert (e.value.degree, e.value.expected, e.value.actual) == (3, 10, 9)


def test_delta_must_respect_relations():
    Q = algebra(["x1", "x2"], ["x2*x1 - 2*x1*x2"], 5)
    bad = SigmaDerivation(MatrixAlgebraHom.diagonal(Q, 1), [[Q.parse("x1*x1")], [Q.parse("0", degree=2)]], [1])
    with pytest.raises(Violation):
        bad.validate()
    A = algebra(["x1", "x2"], ["x2*x1 - x1*x2"], 5)
    B = kx(5, "z")
    sig = MatrixAlgebraHom.diagonal(A, 1)
    good = SigmaDerivation(sig, [[A.parse("x1*x1")], [A.parse("x1*x2")]], [1])
    good.validate()
    assert build_twisted_tensor(TwistData(A, B, sig, good)).hilbert == [1, 3, 6, 10, 15, 21]


def test_inverse_flip_is_flip():
    data = session("flip").prob.data
    inv = invert_twist(data)
    assert inv.sigma == data.sigma and inv.delta.is_zero()


def test_inverse_ore_data():
    A, B = kx(6), kx(6, "z")
    sig = MatrixAlgebraHom.from_strings(A, [[["3*x"]]])
    data = TwistData(A, B, sig, SigmaDerivation(sig, [[A.parse("x*x")]], [1]))
    inv = invert_twist(data)
    assert inv.sigma.format() == {"x": [["1/3*x"]]}
    assert inv.delta.format() == {"x": ["-1/3*x*x"]}
    back = invert_twist(inv)
    assert back.sigma == sig and back.delta.format() == {"x": ["x*x"]}
    assert build_twisted_tensor(inv).hilbert == build_twisted_tensor(data).hilbert


def test_inverse_example_presentations_agree():
    data = session("example53", D=5).prob.data
    inv = invert_twist(data)
    assert build_twisted_tensor(inv).hilbert == build_twisted_tensor(data).hilbert


def test_graded_automorphism_algebra():
    A = cubic_A(6)
    neg = GradedAutomorphism.from_matrix(A, GradedAutomorphism.identity(A).matrix().scale(-1))
    neg.validate()
    assert neg.compose(neg) == GradedAutomorphism.identity(A)
    assert neg.inverse() == neg
    f1 = A.parse("x1*x1*x2 - x2*x1*x1")
    assert neg.apply(A.parse("x1*x2")) == A.parse("x1*x2")
    assert neg.apply(f1) == {}
    swap = GradedAutomorphism(A, [A.gen(1), A.gen(0)])
    swap.validate()
    GradedAutomorphism(A, [A.gen(0), A.parse("x1 + x2")]).validate()
    Q = algebra(["x", "y"], ["y*x - 2*x*y"], 4)
    with pytest.raises(Violation):
        GradedAutomorphism(Q, [Q.gen(1), Q.gen(0)]).validate()
