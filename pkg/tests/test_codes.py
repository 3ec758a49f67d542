import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import min_weight, projection, span
from pirlab.codes import (
    CodeError,
    GrsSpec,
    LinearCode,
    dual,
    full_rank_on,
    grs_code,
    is_mds,
    min_distance,
    puncture,
    rank_masked_product,
    repetition,
    restrict,
    star_product,
)
from pirlab.field import PrimeField
from pirlab.matrix import Matrix

F5 = PrimeField(5)
F7 = PrimeField(7)
F11 = PrimeField(11)
G_C = [[1, 0, 4, 3, 2], [0, 1, 2, 3, 4]]
G_D = [[1, 1, 1, 1, 1], [0, 1, 2, 3, 4]]


def words(code):
    return span([list(r) for r in code.gen.data], code.field.p, code.n)


@pytest.fixture
def example_c():
    return LinearCode.from_generator(F5, G_C)


@pytest.fixture
def example_d():
    return grs_code(GrsSpec(F5, 5, 2))


# -- rref ---------------------------------------------------------------------

def test_rref_identity():
    red, rank, pivots = Matrix.identity(F5, 2).rref()
    assert red.data == ((1, 0), (0, 1)) and rank == 2 and pivots == [0, 1]


def test_rref_dependent_rows():
    red, rank, pivots = Matrix.from_rows(F5, [[1, 1], [2, 2]]).rref()
    assert red.data == ((1, 1),) and rank == 1 and pivots == [0]


def test_rref_example_retrieval_generator():
    assert Matrix.from_rows(F5, G_D).rank == 2


def test_solve_and_nullspace():
    a = Matrix.from_rows(F7, [[1, 2, 3], [0, 1, 4]])
    null = a.nullspace()
    assert null.nrows == 1
    assert (a @ null.T).data == ((0,), (0,))
    sq = Matrix.from_rows(F7, [[2, 1], [1, 3]])
    x = sq.solve([4, 5])
    assert sq.vecmul(x) != () and (sq @ Matrix.from_rows(F7, [[v] for v in x])).data == ((4,), (5,))


# -- constructions ------------------------------------------------------------

def test_grs_generator_matches_example():
    assert grs_code(GrsSpec(F5, 5, 2)).gen.data == tuple(map(tuple, G_D))


def test_grs_k1_is_repetition():
    assert grs_code(GrsSpec(F5, 5, 1)) == repetition(F5, 5)


def test_grs_same_row_space_as_example_storage_code(example_c, example_d):
    # row (1,0,4,3,2) evaluates 1 - x at 0..4
    assert example_c == example_d
    assert words(example_c) == words(example_d)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n=3, k=2, eval_points=(1, 1, 2)),
        dict(n=3, k=2, multipliers=(1, 0, 1)),
        dict(n=3, k=4),
        dict(n=6, k=2),
    ],
)
def test_grs_invalid_specs(kwargs):
    with pytest.raises(CodeError):
        GrsSpec(F5, **kwargs)


def test_repetition():
    assert repetition(F5, 5).gen.data == ((1, 1, 1, 1, 1),)
    assert repetition(PrimeField(2), 3).gen.data == ((1, 1, 1),)
    with pytest.raises(CodeError):
        repetition(F5, 0)


def test_rank_deficient_generator_rejected():
    with pytest.raises(CodeError):
        LinearCode.from_generator(F5, [[1, 1], [2, 2]])


# -- dual ---------------------------------------------------------------------

def test_dual_of_repetition_is_sum_zero_code():
    d = dual(repetition(F5, 5))
    assert d.k == 4
    assert words(d) == {w for w in itertools.product(range(5), repeat=5) if sum(w) % 5 == 0}


def test_biduality(example_c):
    assert dual(dual(example_c)) == example_c


def test_dual_of_systematic_mds_code():
    c = LinearCode.from_generator(F5, G_C)  # already [I | M]
    m = [row[2:] for row in G_C]
    k, n = 2, 5
    # [M^T | -I]
    h = [[m[r][i] for r in range(k)] + [(-1 if j == i else 0) % 5 for j in range(n - k)] for i in range(n - k)]
    assert (c.gen @ Matrix.from_rows(F5, h).T).data == ((0, 0, 0), (0, 0, 0))
    assert dual(c) == LinearCode.from_generator(F5, h)


def test_dual_edge_cases():
    full = LinearCode.full(F5, 3)
    assert dual(full).k == 0
    assert dual(LinearCode.zero(F5, 3)) == full


# -- star product -------------------------------------------------------------

def test_star_product_of_example_codes(example_c, example_d):
    prod = star_product(example_c, example_d)
    products = [[a * b % 5 for a, b in zip(r1, r2)] for r1 in G_C for r2 in G_D]
    assert words(prod) == span(products, 5, 5)
    assert prod == grs_code(GrsSpec(F5, 5, 3))


def test_star_with_repetition_is_identity(example_c):
    assert star_product(example_c, repetition(F5, 5)) == example_c
    rep = repetition(F5, 5)
    assert star_product(rep, rep) == rep


def test_star_product_mismatch():
    with pytest.raises(CodeError):
        star_product(repetition(F5, 4), repetition(F5, 5))
    with pytest.raises(CodeError):
        star_product(repetition(F5, 3), repetition(F7, 3))


# -- minimum distance ---------------------------------------------------------

def test_min_distance_examples(example_c, example_d):
    assert min_distance(repetition(F5, 5)) == 5
    assert min_distance(example_c) == 4 == min_weight(words(example_c))
    prod = star_product(example_c, example_d)
    assert min_distance(prod) == 3 == min_weight(words(prod))


def test_min_distance_cap_and_zero_code():
    with pytest.raises(CodeError, match="cap"):
        min_distance(grs_code(GrsSpec(F11, 10, 6)), cap=1000)
    with pytest.raises(CodeError):
        min_distance(LinearCode.zero(F5, 3))


@pytest.mark.parametrize("field", [F7, F11])
def test_grs_codes_are_mds(field):
    for n in range(3, 8):
        for k in range(2, n):
            code = grs_code(GrsSpec(field, n, k))
            assert min_distance(code, cap=2 * 10**6) == n - k + 1


def test_min_distance_matches_enumeration_on_random_codes():
    rng = random.Random(3)
    for _ in range(30):
        n, k = rng.randint(2, 6), rng.randint(1, 3)
        if k > n:
            continue
        rows = [[rng.randrange(3) for _ in range(n)] for _ in range(k)]
        if Matrix.from_rows(PrimeField(3), rows).rank < k:
            continue
        code = LinearCode.from_generator(PrimeField(3), rows)
        assert min_distance(code) == min_weight(span(rows, 3, n))


# -- restriction and puncturing -----------------------------------------------

def test_restrict_examples(example_c, example_d):
    assert restrict(repetition(F5, 5), {1, 2}) == repetition(F5, 2)
    assert restrict(example_d, {0, 1}) == LinearCode.full(F5, 2)
    assert restrict(example_c, range(5)) == example_c
    with pytest.raises(CodeError):
        restrict(example_c, [])
    with pytest.raises(CodeError):
        restrict(example_c, [5])


def test_puncture_examples(example_c):
    p4 = puncture(example_c, {4})
    assert (p4.n, p4.k) == (4, 2) and min_distance(p4) == 3
    assert puncture(example_c, set()) == example_c
    with pytest.raises(CodeError):
        puncture(example_c, range(5))


def test_puncture_six_two_grs_drops_sixth_node():
    c = grs_code(GrsSpec(F7, 6, 2))
    c5 = puncture(c, {5})
    assert (c5.n, c5.k) == (5, 2) and min_distance(c5) == 4


def test_restrict_equals_codeword_projections():
    rng = random.Random(11)
    for _ in range(25):
        p = rng.choice([2, 3, 5])
        n = rng.randint(2, 6)
        k = rng.randint(1, min(n, 3))
        rows = [[rng.randrange(p) for _ in range(n)] for _ in range(k)]
        if Matrix.from_rows(PrimeField(p), rows).rank < k:
            continue
        code = LinearCode.from_generator(PrimeField(p), rows)
        coords = sorted(rng.sample(range(n), rng.randint(1, n)))
        sub = restrict(code, coords)
        assert words(sub) == projection(span(rows, p, n), coords)


# -- masked product rank and full rank ---------------------------------------

def test_rank_masked_product_examples():
    c6 = grs_code(GrsSpec(F7, 6, 3))
    assert rank_masked_product(c6, (1, 1, 1, 0, 0, 0)) == 3
    assert rank_masked_product(c6, (1,) * 6) == 0
    c9 = grs_code(GrsSpec(F11, 9, 3))
    assert rank_masked_product(c9, (1,) * 6 + (0,) * 3) == 3


def test_full_rank_on():
    c = grs_code(GrsSpec(F7, 6, 2))
    assert full_rank_on(c, {0, 1})
    assert not full_rank_on(c, {0})
    assert full_rank_on(c, range(6))
    assert full_rank_on(repetition(F7, 4), {2})


def test_is_mds():
    assert is_mds(LinearCode.from_generator(F5, G_C))
    assert not is_mds(LinearCode.from_generator(F5, [[1, 0, 1], [0, 1, 0]]))


# -- properties ----------------------------------------------------------------

@st.composite
def random_codes(draw, p=5, max_n=6):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(0, n))
    rows = draw(st.lists(st.lists(st.integers(0, p - 1), min_size=n, max_size=n), min_size=k, max_size=k))
    field = PrimeField(p)
    return LinearCode.from_spanning(field, rows, n)


@given(random_codes())
@settings(max_examples=80, deadline=None)
def test_dual_orthogonality_and_dimension(code):
    h = dual(code)
    assert code.k + h.k == code.n
    if code.k and h.k:
        assert all(v == 0 for row in (code.gen @ h.gen.T).data for v in row)


@given(random_codes(), random_codes())
@settings(max_examples=60, deadline=None)
def test_star_dimension_bound(c, d):
    if c.n != d.n:
        return
    assert star_product(c, d).k <= min(c.n, c.k * d.k)


def test_grs_star_dimension_exact():
    for n in range(2, 8):
        for kc in range(1, n + 1):
            for kd in range(1, n + 1):
                c = grs_code(GrsSpec(F7, n, kc))
                d = grs_code(GrsSpec(F7, n, kd))
                assert star_product(c, d).k == min(n, kc + kd - 1)


def test_rank_formula_small_mds_codes():
    for n in range(2, 7):
        for k in range(1, n):
            code = grs_code(GrsSpec(F7, n, k, multipliers=tuple(range(1, n + 1))))
            for e in itertools.product((0, 1), repeat=n):
                w = sum(e)
                if n - w <= k <= w:
                    assert rank_masked_product(code, e) == n - w
