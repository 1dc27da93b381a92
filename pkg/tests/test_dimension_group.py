import pytest

from src.bratteli import build_strictly_rfd, build_y_infty
from src.dimension_group import (
    K0Element,
    ModelSequence,
    check_subdirect,
    diagram_positivity,
    equal,
    is_positive,
    is_positive_by_pushforward,
    order_unit,
    push,
    random_element,
    rho_model,
    subdirect_preimage,
    zero,
)
from src.errors import MalformedInputError, PreconditionError
from src.models import K0ElementModel


def test_push_order_unit():
    assert push(order_unit(), 5).vector == [1, 1, 2, 4, 8]
    assert push(K0Element.of([1, -1]), 4).vector == [1, -1, 0, 0]


def test_push_down_rejected():
    with pytest.raises(PreconditionError):
        push(K0Element.of([1, 2, 3]), 2)


def test_unit_matches_diagram_dimensions():
    d = build_y_infty(7)
    for n in range(1, 8):
        assert push(order_unit(), n).vector == d.levels[n - 1]


def test_canonical_form():
    x = K0Element.of([2, 2, 4, 8])
    assert x.canonical().vector == [2]
    assert K0Element.of([1, 2, 3]).canonical().vector == [1, 2]
    assert zero().canonical().vector == [0]


def test_equal_across_levels():
    assert equal(order_unit(), K0Element.of([1, 1, 2, 4]))
    assert not equal(order_unit(), K0Element.of([1, 2]))
    x = K0Element.of([3, -1])
    assert equal(x - x, zero())
    assert equal(x + order_unit(), K0Element.of([4, 0, 4]))


def test_rho_model_of_unit():
    seq = rho_model(order_unit())
    assert seq == ModelSequence(prefix=[1], recurrent_from=1)
    assert seq.terms(6) == [1, 1, 2, 4, 8, 16]


def test_positivity_examples():
    assert is_positive(order_unit())
    assert is_positive(zero())
    assert is_positive(K0Element.of([0, 0, 1]))
    assert not is_positive(K0Element.of([1, -1]))
    assert not is_positive(-order_unit())


def test_positivity_matches_pushforward(rng):
    for _ in range(200):
        x = random_element(rng)
        assert is_positive(x) == is_positive_by_pushforward(x)


def test_malformed_level():
    with pytest.raises(MalformedInputError):
        K0Element.from_model(K0ElementModel(level=3, vector=[1, 2]))
    with pytest.raises(ValueError):
        K0Element(level=0, vector=[])


def test_model_round_trip():
    x = K0Element.of([1, 0, -2])
    assert K0Element.from_model(x.to_model()) == x


def test_subdirect_preimage():
    x = subdirect_preimage([2, 5], [3, -1])
    assert x.vector == [0, 3, 0, 0, -1]
    terms = rho_model(x).terms(6)
    assert (terms[1], terms[4]) == (3, -1)
    with pytest.raises(MalformedInputError):
        subdirect_preimage([2, 5], [1])
    with pytest.raises(MalformedInputError):
        subdirect_preimage([0], [1])


@pytest.mark.parametrize("points", [[1], [3], [1, 2], [2, 4], [1, 3, 6]])
def test_check_subdirect(points):
    assert check_subdirect(points)


def test_diagram_positivity_agrees_on_y_infty(rng):
    d = build_y_infty(6)
    for _ in range(50):
        x = random_element(rng, max_level=4)
        verdict = diagram_positivity(d, x.level, x.vector, horizon=10)
        if verdict == "positive":
            assert is_positive(x)
        else:
            assert not is_positive(x)


def test_diagram_positivity_other_family():
    d = build_strictly_rfd(4)
    assert diagram_positivity(d, 1, [1, 1]) == "positive"
    assert diagram_positivity(d, 1, [1, -1]) == "undetermined"
    with pytest.raises(MalformedInputError):
        diagram_positivity(d, 2, [1, 1])
    with pytest.raises(PreconditionError):
        diagram_positivity(d, 5, [1] * 8)


def test_group_laws(rng):
    for _ in range(100):
        x, y, z = (random_element(rng) for _ in range(3))
        assert equal(x + y, y + x)
        assert equal((x + y) + z, x + (y + z))
        assert equal(x + zero(), x)
        assert equal(x + (-x), zero())


def test_positive_cone_is_proper(rng):
    samples = [random_element(rng) for _ in range(200)] + [zero(), K0Element.of([0, 0, 0]), order_unit()]
    for x in samples:
        assert (is_positive(x) and is_positive(-x)) == equal(x, zero())
