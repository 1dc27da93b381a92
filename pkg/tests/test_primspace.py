import itertools

import pytest

from src.bratteli import DiagramIdeal, build_y_infty, ideal_from_open_set
from src.errors import MalformedInputError, PreconditionError
from src.models import SpaceModel
from src.primspace import (
    FiniteSpace,
    FiniteT0Space,
    build_two_copies,
    build_Yn,
    classify_Yn,
    finite_subcover,
    is_lattice,
    is_prime_closed,
    is_spectral,
    is_t0,
    load_space,
    prime_closed_sets,
)


def space(points, closed):
    return FiniteSpace(points=points, closed_sets=frozenset(frozenset(c) for c in closed))


@pytest.mark.parametrize("n", range(0, 9))
def test_yn_properties(n):
    y = build_Yn(n)
    assert len(y.closed_sets) == 2 ** n + 1
    assert is_lattice(y.points, y.closed_sets)
    assert is_t0(y)
    assert is_spectral(y)
    assert classify_Yn(y) == n


def test_yn_closures():
    y = build_Yn(3)
    assert y.closure(["0"]) == y.full
    assert y.closure(["1", "3"]) == frozenset({"1", "3"})
    assert y.specialization()[1, 0]
    assert not y.specialization()[0, 1]


def test_prime_closed_sets_of_yn():
    y = build_Yn(2)
    assert is_prime_closed(y, y.full)
    assert is_prime_closed(y, {"1"})
    assert not is_prime_closed(y, {"1", "2"})
    assert not is_prime_closed(y, set())
    assert sorted(sorted(c) for c in prime_closed_sets(y)) == [["0", "1", "2"], ["1"], ["2"]]


def test_prime_closed_rejects_open_input():
    with pytest.raises(PreconditionError) as info:
        is_prime_closed(build_Yn(2), {"0"})
    assert info.value.kind == "not_closed"


def test_non_t0_space_is_not_spectral():
    s = space(["1", "2", "3"], [[], ["1", "2"], ["3"], ["1", "2", "3"]])
    assert not is_t0(s)
    assert not is_spectral(s)
    assert not isinstance(load_space(s.to_model()), FiniteT0Space)
    with pytest.raises(ValueError):
        FiniteT0Space(points=s.points, closed_sets=s.closed_sets)


def test_non_lattice_rejected():
    with pytest.raises(MalformedInputError):
        FiniteSpace.from_model(SpaceModel(points=["1", "2"], closed=[["1"], ["1", "2"]]))
    with pytest.raises(MalformedInputError):
        FiniteSpace.from_model(SpaceModel(points=["1", "2"], closed=[[], ["3"], ["1", "2"]]))


def test_classify_rejects_other_spaces():
    discrete = space(["1", "2", "3"], [[], ["1"], ["2"], ["3"], ["1", "2"], ["1", "3"], ["2", "3"], ["1", "2", "3"]])
    assert is_spectral(discrete)
    assert classify_Yn(discrete) is None
    relabelled = space(["x", "y"], [[], ["y"], ["x", "y"]])
    assert classify_Yn(relabelled) == 1


def test_two_copies():
    s = build_two_copies(2)
    assert is_t0(s)
    assert classify_Yn(s) is None
    second = frozenset(f"2:{p}" for p in ["0", "1", "2"])
    assert s.is_closed(second)
    assert not s.is_closed(frozenset(f"1:{p}" for p in ["0", "1", "2"]))


def test_finite_subcover():
    y = build_Yn(3)
    cover = [{"0"}, {"0", "1"}, {"0", "1", "2"}, {"0", "1", "2", "3"}]
    assert finite_subcover(y, cover) == [frozenset({"0", "1", "2", "3"})]
    opens = [{"0", "1", "2"}, {"0", "3"}]
    assert finite_subcover(y, opens) == [frozenset(u) for u in opens]


def test_finite_subcover_rejections():
    y = build_Yn(2)
    with pytest.raises(PreconditionError) as info:
        finite_subcover(y, [{"1"}])
    assert info.value.kind == "not_open"
    with pytest.raises(PreconditionError):
        finite_subcover(y, [{"0", "1"}])


def test_model_round_trip():
    y = build_Yn(3)
    model = SpaceModel.model_validate_json(y.to_model().model_dump_json())
    again = load_space(model)
    assert isinstance(again, FiniteT0Space)
    assert again == y
    assert model.closed[0] == []


def _subsets_of(points):
    return [frozenset(c) for r in range(len(points) + 1) for c in itertools.combinations(points, r)]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_every_subset_has_finite_subcover(n):
    y = build_Yn(n)
    cover = [u for u in y.open_sets() if u != y.full]
    for target in _subsets_of(y.points):
        chosen = finite_subcover(y, cover, target=target)
        assert set(chosen) <= set(cover)
        assert target <= frozenset().union(*chosen)
        for u in chosen:
            rest = [v for v in chosen if v is not u]
            assert not target <= frozenset().union(*rest)


def test_open_sets_match_diagram_ideals():
    # open sets of Y_n are the empty set and Y minus F for F within {1..n}
    n = 3
    y = build_Yn(n)
    d = build_y_infty(n + 1)
    ideals = {}
    for u in y.open_sets():
        if u:
            omitted = [int(p) for p in y.points if p not in u]
            ideals[u] = ideal_from_open_set(d, omitted)
        else:
            ideals[u] = DiagramIdeal.empty(d)
    assert len(set(ideals.values())) == len(ideals) == 2 ** n + 1
    for u, iu in ideals.items():
        for v, iv in ideals.items():
            assert (u <= v) == (iu.members <= iv.members)
