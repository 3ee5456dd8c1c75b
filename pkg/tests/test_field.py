import random

import numpy as np
import pytest

from graphcodes.errors import (
    FieldMismatchError,
    InconsistentSystemError,
    UnderdeterminedSystemError,
    ZeroInversionError,
)
from graphcodes.field import GF, Matrix, field, parse_field, vandermonde

FIELDS = [field(2), field(3), field(11), field(8), field(9), field(16), field(25), field(256)]


def test_scalar_examples():
    assert field(2).add(1, 1) == 0
    assert field(11).add(7, 8) == 4
    assert field(11).mul(2, 6) == 1
    assert field(8).mul(2, 2) == 4  # x * x = x^2 under x^3 + x + 1
    assert field(11).inv(2) == 6
    assert field(2).inv(1) == 1
    assert field(7).inv(3) == 5


def test_identities_all_fields():
    rng = random.Random(0)
    for gf in FIELDS:
        for _ in range(50):
            a = rng.randrange(gf.q)
            assert gf.add(a, 0) == a
            assert gf.mul(a, 1) == a


def test_inverse_of_zero():
    with pytest.raises(ZeroInversionError):
        field(11).inv(0)


def test_element_field_mismatch():
    a = field(11).element(3)
    b = field(7).element(3)
    with pytest.raises(FieldMismatchError):
        _ = a + b


def test_element_arithmetic():
    gf = field(13)
    a, b = gf.element(5), gf.element(9)
    assert (a + b).code == gf.add(5, 9)
    assert (a * b).code == gf.mul(5, 9)
    assert (a - a).code == 0
    assert (a / a).code == 1
    assert (-a + a).code == 0
    assert (a**3).code == gf.mul(5, gf.mul(5, 5))


def test_enumeration_is_bijection():
    for gf in FIELDS:
        codes = [e.code for e in gf.elements()]
        assert codes == list(range(gf.q))
        assert codes[0] == 0 and codes[1] == 1


@pytest.mark.parametrize("gf", FIELDS, ids=lambda g: g.name)
def test_field_axioms_random(gf):
    rng = random.Random(gf.q)
    for _ in range(10_000):
        a, b, c = (rng.randrange(gf.q) for _ in range(3))
        assert gf.add(a, b) == gf.add(b, a)
        assert gf.mul(a, b) == gf.mul(b, a)
        assert gf.add(gf.add(a, b), c) == gf.add(a, gf.add(b, c))
        assert gf.mul(gf.mul(a, b), c) == gf.mul(a, gf.mul(b, c))
        assert gf.mul(a, gf.add(b, c)) == gf.add(gf.mul(a, b), gf.mul(a, c))
        assert gf.add(a, gf.neg(a)) == 0
        if a:
            assert gf.mul(a, gf.inv(a)) == 1


@pytest.mark.parametrize("q", [3, 4, 5, 8, 9, 16, 25, 27, 64, 121, 256])
def test_multiplicative_group_is_cyclic(q):
    gf = field(q)
    orders = []
    for a in range(1, q):
        x, k = a, 1
        while x != 1:
            x = gf.mul(x, a)
            k += 1
        orders.append(k)
    assert all((q - 1) % k == 0 for k in orders)
    assert max(orders) == q - 1  # a generator exists


def test_array_kernels_match_scalars():
    rng = random.Random(1)
    for gf in FIELDS:
        a = np.array([rng.randrange(gf.q) for _ in range(64)], dtype=np.int64)
        b = np.array([rng.randrange(gf.q) for _ in range(64)], dtype=np.int64)
        assert all(int(v) == gf.add(int(x), int(y)) for v, x, y in zip(gf.add_arr(a, b), a, b))
        assert all(int(v) == gf.sub(int(x), int(y)) for v, x, y in zip(gf.sub_arr(a, b), a, b))
        assert all(int(v) == gf.mul(int(x), int(y)) for v, x, y in zip(gf.mul_arr(a, b), a, b))
        assert all(int(v) == gf.neg(int(x)) for v, x in zip(gf.neg_arr(a), a))
        want = 0
        for x, y in zip(a, b):
            want = gf.add(want, gf.mul(int(x), int(y)))
        assert int(gf.dot(a[None, :], b)[0]) == want


def test_rank_examples():
    gf = field(2)
    assert Matrix(gf, np.eye(3, dtype=int)).rank() == 3
    assert Matrix(gf, np.zeros((2, 5), dtype=int)).rank() == 0
    assert Matrix(gf, [[1, 1, 0], [0, 1, 1], [1, 0, 1]]).rank() == 2


def test_solve_identity():
    gf = field(7)
    m = Matrix.identity(gf, 4)
    b = np.array([1, 6, 0, 3])
    assert np.array_equal(m.solve(b), b)


def test_solve_vandermonde_multiply_back():
    gf = field(11)
    m = Matrix(gf, [[1, 1, 1], [1, 2, 3], [1, 4, 9]])
    b = np.array([3, 6, 11 % 11])
    x = m.solve(b)
    assert np.array_equal(m.matvec(x), b)


def test_solve_underdetermined():
    gf = field(2)
    m = Matrix(gf, [[1, 1], [1, 1]])
    with pytest.raises(UnderdeterminedSystemError):
        m.solve(np.array([1, 1]))


def test_solve_inconsistent():
    gf = field(5)
    m = Matrix(gf, [[1, 0], [1, 0], [0, 1]])
    with pytest.raises(InconsistentSystemError):
        m.solve(np.array([1, 2, 0]))


def test_solve_roundtrip_random():
    rng = random.Random(9)
    for gf in (field(2), field(11), field(8), field(9)):
        for _ in range(25):
            rows = rng.randrange(3, 7)
            cols = rng.randrange(1, rows + 1)
            a = np.array([[rng.randrange(gf.q) for _ in range(cols)] for _ in range(rows)])
            m = Matrix(gf, a)
            if m.rank() < cols:
                continue
            x = np.array([rng.randrange(gf.q) for _ in range(cols)])
            assert np.array_equal(m.solve(m.matvec(x)), x)


def test_nullspace():
    gf = field(3)
    m = Matrix(gf, [[1, 2, 0, 1], [0, 0, 1, 2]])
    ns = m.nullspace()
    assert ns.shape[0] == 2
    for v in ns:
        assert not m.matvec(v).any()


def test_vandermonde_examples():
    gf = field(11)
    assert vandermonde(gf, [4, 7, 9], 1).a.tolist() == [[1, 1, 1]]
    v = vandermonde(gf, [1, 2, 3], 3)
    assert v.a.tolist() == [[1, 1, 1], [1, 2, 3], [1, 4, 9]]
    assert v.rank() == 3


def test_vandermonde_column_triples_full_rank():
    import itertools

    gf = field(11)
    v = vandermonde(gf, list(range(1, 9)), 3)
    for cols in itertools.combinations(range(8), 3):
        assert Matrix(gf, v.a[:, cols]).rank() == 3


def test_vandermonde_square_invertible():
    for gf in (field(7), field(8), field(13)):
        for d in (1, 2, 3, 4):
            pts = list(range(1, d + 1))
            assert vandermonde(gf, pts, d).rank() == d


def test_vandermonde_rejects_bad_points():
    gf = field(7)
    with pytest.raises(ValueError):
        vandermonde(gf, [0, 1], 2)
    with pytest.raises(ValueError):
        vandermonde(gf, [3, 3], 2)


def test_serialization():
    assert str(field(11)) == "gf(11)"
    assert str(field(8)) == "gf(8):0b1011"
    assert parse_field("gf(8):0b1011") is field(8)
    assert parse_field("gf(11)") is field(11)
    g9 = field(9)
    assert parse_field(str(g9)) is g9
    with pytest.raises(ValueError):
        parse_field("gf[7]")


def test_order_bounds():
    with pytest.raises(ValueError):
        GF(1)
    with pytest.raises(ValueError):
        GF(6)
    with pytest.raises(ValueError):
        GF(2**17)
    assert GF(65536).q == 65536


def test_pickle_roundtrip():
    import pickle

    for gf in (field(11), field(8)):
        clone = pickle.loads(pickle.dumps(gf))
        assert clone is gf  # cached factory gives back the shared instance
