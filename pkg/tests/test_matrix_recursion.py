from fractions import Fraction

import pytest
from pydantic import ValidationError

from src.config import Settings, set_settings
from src.errors import MalformedInputError, PreconditionError, ResourceCapError
from src.grig_core import random_word
from src.matrix_recursion import (
    AlgebraElement,
    BlockMatrix,
    LevelMatrix,
    commutant_dimension,
    commutator_identity_holds,
    delta_square_generator,
    find_scalar_entry,
    group_reduce,
    is_nonzero_in_group_algebra,
    is_zero_in_B,
    nucleus_rank_at_level,
    nucleus_relations_at_level,
    pi_level,
    psi_expand,
    psi_iterate,
    random_algebra_element,
    realize_block,
    reduce_to_nucleus,
    rigid_kernel_element,
    scan_scalar_entry,
)
from src.models import AlgebraElementModel

KERNEL_ELEMENT = "(1 - d) a (1 - d)"
RELATION = "1 + b - c - d"


def el(text):
    return AlgebraElement.parse(text)


def test_parse_and_print():
    x = el(KERNEL_ELEMENT)
    assert x == el("a - da - ad + dad")
    assert str(x) == "a - ad - da + dad"
    assert el("1/2 b").coeff("b") == Fraction(1, 2)
    assert el("2a - 2a").is_zero()
    assert str(AlgebraElement.zero()) == "0"


@pytest.mark.parametrize("text", ["", "a +", "a x", "(a - b", "a)"])
def test_parse_rejects_malformed(text):
    with pytest.raises(MalformedInputError):
        el(text)


def test_json_model_round_trip():
    x = el("3/2 ab - dad + 1")
    model = x.to_model()
    again = AlgebraElement.from_model(AlgebraElementModel.model_validate_json(model.model_dump_json()))
    assert again == x


def test_ring_operations():
    a, b = el("a"), el("b")
    assert a * a == AlgebraElement.scalar(1)
    assert (a + b) * (a - b) == el("ba - ab")
    assert el("ab").star() == el("ba")
    assert 2 * a == a + a


def test_group_reduce():
    x = el("1 - adadadad")
    assert not x.is_zero()
    assert group_reduce(x).is_zero()
    assert not is_nonzero_in_group_algebra(x)
    assert is_nonzero_in_group_algebra(el(KERNEL_ELEMENT))


def test_psi_expand_generators():
    assert psi_expand(el("a")) == BlockMatrix(1, {(0, 1): el("1"), (1, 0): el("1")})
    assert psi_expand(el("b")) == BlockMatrix(1, {(0, 0): el("a"), (1, 1): el("c")})
    assert psi_expand(el("d")) == BlockMatrix(1, {(0, 0): el("1"), (1, 1): el("b")})


def test_psi_expand_is_multiplicative(rng):
    for _ in range(30):
        x, y = random_algebra_element(rng), random_algebra_element(rng)
        lhs = psi_expand(x * y)
        rhs = psi_expand(x) * psi_expand(y)
        for i in range(2):
            for j in range(2):
                assert group_reduce(lhs.get(i, j) - rhs.get(i, j)).is_zero()


def test_psi_iterate():
    m = psi_iterate(el(RELATION), 3)
    assert m.depth == 3
    assert m.get(6, 6) == el("2 - 2a")
    assert psi_iterate(el("a"), 0) == BlockMatrix(0, {(0, 0): el("a")})


def test_psi_iterate_depth_cap():
    set_settings(Settings(depth_cap=2))
    with pytest.raises(ResourceCapError):
        psi_iterate(el("a"), 3)


def test_reduce_to_nucleus():
    depth, m = reduce_to_nucleus(el(KERNEL_ELEMENT))
    assert depth == 1
    assert m.is_zero()
    depth, m = reduce_to_nucleus(el("abadac"))
    assert all(v.in_nucleus_span() for _, v in m.items())


def test_kernel_element():
    cert = is_zero_in_B(el(KERNEL_ELEMENT))
    assert cert.in_kernel
    assert cert.depth == 1
    assert cert.position is None


def test_nucleus_relation_survives():
    cert = is_zero_in_B(el(RELATION))
    assert not cert.in_kernel
    assert cert.depth == 0
    assert cert.position == (0, 0)
    assert cert.coefficients == [1, 0, 1, -1, -1]


def test_scalar_entry_cases():
    assert find_scalar_entry(el("3")).depth == 0
    hit = find_scalar_entry(el("a"))
    assert (hit.depth, hit.row, hit.col, hit.value) == (1, 0, 1, 1)
    hit = find_scalar_entry(el("d - 1"))
    assert (hit.depth, hit.row, hit.col, hit.value) == (3, 4, 4, -1)
    hit = find_scalar_entry(el(RELATION))
    assert (hit.depth, hit.row, hit.col, hit.value) == (4, 12, 12, 2)


def test_scalar_entry_rejects_kernel():
    with pytest.raises(PreconditionError) as info:
        find_scalar_entry(el(KERNEL_ELEMENT))
    assert info.value.kind == "in_kernel"
    with pytest.raises(PreconditionError):
        scan_scalar_entry(el(KERNEL_ELEMENT))


def test_scalar_search_matches_scan(rng):
    tested = 0
    while tested < 20:
        x = random_algebra_element(rng)
        if is_zero_in_B(x).in_kernel:
            continue
        fast, slow = find_scalar_entry(x), scan_scalar_entry(x)
        assert fast == slow
        assert psi_iterate(x, fast.depth).get(fast.row, fast.col).scalar_value() == fast.value
        tested += 1


def test_pi_level_small():
    assert pi_level(el("a"), 1).to_rows() == [[0, 1], [1, 0]]
    assert pi_level(el("b"), 1) == LevelMatrix.identity(1)
    assert pi_level(el("2 + a"), 0).to_rows() == [[3]]


def test_pi_level_is_multiplicative(rng):
    for _ in range(30):
        x, y = random_algebra_element(rng), random_algebra_element(rng)
        n = rng.randint(0, 4)
        assert pi_level(x * y, n) == pi_level(x, n) * pi_level(y, n)


def test_pi_level_matches_recursion(rng):
    for _ in range(30):
        x = random_algebra_element(rng)
        n = rng.randint(1, 4)
        assert pi_level(x, n) == realize_block(psi_expand(x), n - 1)
        if n >= 2:
            assert pi_level(x, n) == realize_block(psi_iterate(x, 2), n - 2)


def test_kernel_element_vanishes_at_every_level():
    for n in range(6):
        assert pi_level(el(KERNEL_ELEMENT), n).is_zero()


def test_star_is_transpose(rng):
    for _ in range(10):
        x = random_algebra_element(rng)
        assert pi_level(x.star(), 3) == pi_level(x, 3).transpose()


def test_commutant_dimension():
    assert [commutant_dimension(n) for n in range(1, 6)] == [2, 3, 4, 5, 6]


def test_nucleus_rank():
    assert nucleus_rank_at_level(1) == 2
    assert nucleus_rank_at_level(2) == 3
    assert nucleus_rank_at_level(3) == 4
    assert nucleus_rank_at_level(4) == 5
    assert nucleus_relations_at_level(3) == [el(RELATION)]
    assert nucleus_relations_at_level(4) == []


def test_rigid_kernel_element(rng):
    x = rigid_kernel_element("ada", "d")
    assert x == el("(1 - ada)(1 - d)")
    assert is_nonzero_in_group_algebra(x)
    assert is_zero_in_B(x).in_kernel
    for _ in range(10):
        g = AlgebraElement.of(random_word(rng, rng.randint(0, 6)))
        h = AlgebraElement.of(random_word(rng, rng.randint(0, 6)))
        assert is_zero_in_B(g * x * h).in_kernel


@pytest.mark.parametrize("g1,g2", [("a", "d"), ("b", "d"), ("ada", "b"), ("", "d")])
def test_rigid_kernel_element_rejects(g1, g2):
    with pytest.raises(PreconditionError) as info:
        rigid_kernel_element(g1, g2)
    assert info.value.kind == "not_rigid"


def test_commutator_identity():
    assert commutator_identity_holds("ab", "ad")
    assert commutator_identity_holds("abab", "adac")
    assert delta_square_generator("a", "a") == el("(a - 1)(a - 1)")


def test_zero_denominator_is_malformed():
    with pytest.raises(MalformedInputError):
        el("1/0 a")
    with pytest.raises(ValidationError):
        AlgebraElementModel.model_validate_json('[{"word": "a", "coeff": "1/0"}]')


@pytest.mark.parametrize("n,m", [(1, 1), (1, 2), (2, 1)])
def test_iterates_compose(rng, n, m):
    for _ in range(10):
        x = random_algebra_element(rng)
        outer = psi_iterate(x, n + m)
        step = 1 << m
        for (i, j), entry in psi_iterate(x, n).items():
            inner = psi_iterate(entry, m)
            for r in range(step):
                for c in range(step):
                    diff = outer.get(i * step + r, j * step + c) - inner.get(r, c)
                    assert group_reduce(diff).is_zero()


def test_vanishing_expansion_means_kernel(rng):
    samples = [el(KERNEL_ELEMENT), el("1 - adadadad"), el(RELATION)]
    samples += [random_algebra_element(rng) for _ in range(50)]
    for x in samples:
        expansion = psi_expand(x)
        if all(group_reduce(v).is_zero() for _, v in expansion.items()):
            assert is_zero_in_B(x).in_kernel


def test_single_word_never_expands_to_zero(rng):
    for _ in range(50):
        w = random_word(rng, rng.randint(0, 10))
        assert not psi_expand(AlgebraElement.of(w, 1)).is_zero()
