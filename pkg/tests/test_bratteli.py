import numpy as np
import pytest

from src.bratteli import (
    BratteliDiagram,
    DiagramIdeal,
    build_strictly_rfd,
    build_y_infty,
    column_ideal,
    compare_with_formula,
    enumerate_ideals,
    export_dot,
    ideal_from_open_set,
    is_essential,
    is_ideal,
    largest_ideal_avoiding,
    left_half_ideal,
    limit_dimension,
    materialize,
    primitive_quotient_sizes,
    quotient,
    two_chain_diagram,
)
from src.config import Settings, set_settings
from src.errors import MalformedInputError, PreconditionError, ResourceCapError
from src.models import DiagramModel, IdealModel


def test_y_infty_levels():
    d = build_y_infty(5)
    assert d.levels == [[1], [1, 1], [1, 1, 2], [1, 1, 2, 4], [1, 1, 2, 4, 8]]
    assert d.rule == "y_infty"
    np.testing.assert_array_equal(d.connecting_matrix(2), [[1, 0], [0, 1], [1, 1]])


def test_y_infty_multiplicity():
    d = build_y_infty(3, multiplicity=2)
    assert d.levels == [[1], [1, 2], [1, 2, 6]]


def test_strictly_rfd_levels():
    d = build_strictly_rfd(3)
    assert d.levels == [[1, 1], [1, 2, 1, 1], [1, 2, 4, 1, 1, 2]]
    assert d.label((3, 3)) == "L3,3"
    assert d.label((3, 4)) == "R3,1"


def test_validation_rejects_bad_dimensions():
    with pytest.raises(MalformedInputError):
        BratteliDiagram([[1], [2]], [[(1, 1, 1)]])
    with pytest.raises(MalformedInputError):
        BratteliDiagram([[1, 1], [1]], [[(1, 1, 1)]])


def test_model_round_trip():
    d = build_strictly_rfd(4)
    text = d.to_model().model_dump_json(by_alias=True)
    again = BratteliDiagram.from_model(DiagramModel.model_validate_json(text))
    assert again.same_shape(d)
    assert again.rule == "strictly_rfd"


def test_is_ideal_witness():
    d = build_y_infty(4)
    ok, witness = is_ideal(d, [(2, 2)])
    assert not ok
    assert witness == "heredity fails on edge (2,2)->(3,2)"
    assert is_ideal(d, ideal_from_open_set(d, [2]).members) == (True, None)


def test_open_set_ideal_members():
    d = build_y_infty(4)
    u = ideal_from_open_set(d, [2])
    assert u.members == {(2, 1), (3, 1), (3, 3), (4, 1), (4, 3), (4, 4)}


def test_quotient_is_c():
    d = build_y_infty(6)
    q = quotient(d, ideal_from_open_set(d, [2]))
    assert q.levels == [[1]] * 6
    result = limit_dimension(q)
    assert result.status == "finite"
    assert result.dims == [1]
    assert result.exact


def test_quotient_is_c_plus_m2():
    d = build_y_infty(6)
    result = limit_dimension(quotient(d, ideal_from_open_set(d, [1, 3])))
    assert result.status == "finite"
    assert result.dims == [1, 2]


def test_quotient_rejects_non_ideal():
    d = build_y_infty(4)
    with pytest.raises(PreconditionError) as info:
        quotient(d, DiagramIdeal([(1, 1)], d.depth))
    assert info.value.kind == "not_an_ideal"


def test_quotient_materializes_deeper():
    d = build_y_infty(4)
    q = quotient(d, ideal_from_open_set(d, [1, 3]))
    deep = materialize(q, 8)
    assert deep.depth == 8
    assert deep.levels[-1] == [1, 2]
    assert limit_dimension(q, 8).dims == [1, 2]


def test_y_infty_is_infinite():
    result = limit_dimension(build_y_infty(6))
    assert result.status == "infinite"
    assert result.exact


def test_limit_without_rule():
    result = limit_dimension(two_chain_diagram(4))
    assert result.status == "finite"
    assert result.dims == [1, 1]
    assert not result.exact
    with pytest.raises(PreconditionError) as info:
        limit_dimension(two_chain_diagram(3), 5)
    assert info.value.kind == "depth_insufficient"


def test_limit_depth_cap():
    set_settings(Settings(depth_cap=5))
    with pytest.raises(ResourceCapError):
        limit_dimension(build_y_infty(3), 8)


def test_primitive_quotient_sizes():
    sizes = primitive_quotient_sizes(build_y_infty(9), 8)
    assert sizes == [1, 1, 2, 4, 8, 16, 32, 64]
    with pytest.raises(PreconditionError) as info:
        primitive_quotient_sizes(build_y_infty(5), 5)
    assert info.value.kind == "depth_insufficient"


def test_strictly_rfd_quotient_by_column_three():
    d = build_strictly_rfd(6)
    u = column_ideal(d, 3)
    assert not any(v in u for v in [(n, 3) for n in range(3, 7)])
    result = limit_dimension(quotient(d, u))
    assert result.status == "finite"
    assert result.dims == [4]


def test_strictly_rfd_column_quotients_are_matrix_algebras():
    d = build_strictly_rfd(6)
    dims = [limit_dimension(quotient(d, column_ideal(d, k))).dims for k in range(1, 5)]
    # L(k,k) = L(1,1) + ... + L(k-1,k-1) + R(k-1,k-1)
    assert dims == [[1], [2], [4], [9]]


def test_left_half_quotient_is_y_infty():
    d = build_strictly_rfd(4)
    q = quotient(d, left_half_ideal(d))
    assert q.same_shape(build_y_infty(4))


def test_left_half_is_essential():
    d = build_strictly_rfd(3)
    assert is_essential(d, left_half_ideal(d), 3)


def test_non_essential_ideal():
    d = two_chain_diagram(4)
    chain = DiagramIdeal([(n, 1) for n in range(1, 5)], d.depth)
    assert is_ideal(d, chain.members)[0]
    assert not is_essential(d, chain)
    assert not is_essential(build_y_infty(3), DiagramIdeal.empty(build_y_infty(3)), 3)


def test_family_checks():
    with pytest.raises(PreconditionError):
        left_half_ideal(build_y_infty(3))
    with pytest.raises(PreconditionError):
        ideal_from_open_set(build_strictly_rfd(3), [1])


def test_largest_ideal_avoiding():
    d = build_y_infty(4)
    u = largest_ideal_avoiding(d, [(4, 2)])
    assert (4, 2) not in u
    assert (2, 2) not in u
    assert (4, 1) in u
    assert is_ideal(d, u.members)[0]


def test_ideal_enumeration_matches_formula():
    report = compare_with_formula(build_y_infty(3), 3)
    assert report.enumerated == 8
    assert report.formula_ideals == 8
    assert report.matched == 8
    assert report.discrepancies == 0
    assert report.missing == []
    assert report.artifacts == []


def test_enumerated_ideals_are_ideals():
    d = build_strictly_rfd(2)
    ideals = enumerate_ideals(d)
    assert DiagramIdeal.empty(d) in ideals
    assert DiagramIdeal.full(d) in ideals
    assert all(is_ideal(d, u.members)[0] for u in ideals)


def test_enumeration_vertex_cap():
    set_settings(Settings(enumerate_vertex_cap=5))
    with pytest.raises(ResourceCapError):
        enumerate_ideals(build_y_infty(3))


def test_ideal_model_round_trip():
    d = build_y_infty(4)
    u = ideal_from_open_set(d, [1, 3])
    model = IdealModel.model_validate_json(u.to_model(d).model_dump_json())
    assert DiagramIdeal.from_model(d, model) == u
    assert model.members == [[], [], [2], [2, 4]]


def test_export_dot():
    d = build_y_infty(3)
    source = export_dot(d, ideal_from_open_set(d, [1]))
    assert source.startswith("digraph Bratteli")
    assert "v1_1 -> v2_1" in source
    assert "fillcolor" in source


@pytest.mark.parametrize(
    "build, ideal, dims",
    [
        (lambda: build_y_infty(3), lambda d: ideal_from_open_set(d, [3]), [2]),
        (lambda: build_y_infty(3), lambda d: ideal_from_open_set(d, [1, 3]), [1, 2]),
        (lambda: build_y_infty(2), lambda d: ideal_from_open_set(d, [2]), [1]),
        (lambda: build_strictly_rfd(3), lambda d: column_ideal(d, 3), [4]),
    ],
)
def test_limit_of_quotient_built_at_its_last_column(build, ideal, dims):
    d = build()
    result = limit_dimension(quotient(d, ideal(d)))
    assert result.status == "finite"
    assert result.dims == dims
    assert result.exact


def test_left_half_quotient_stays_infinite():
    d = build_strictly_rfd(4)
    assert limit_dimension(quotient(d, left_half_ideal(d))).status == "infinite"


@pytest.mark.parametrize("multiplicity", [1, 2])
def test_total_dimension_grows(multiplicity):
    d = build_y_infty(9, multiplicity)
    totals = [d.total_dimension(n) for n in range(1, 10)]
    assert all(a < b for a, b in zip(totals, totals[1:]))


def test_primitive_quotient_sizes_to_ten():
    assert primitive_quotient_sizes(build_y_infty(11), 10) == [1, 1, 2, 4, 8, 16, 32, 64, 128, 256]


@pytest.mark.parametrize("build", [lambda: build_y_infty(3), lambda: build_strictly_rfd(2)])
def test_quotient_keeps_the_complement(build):
    d = build()
    everything = d.vertices()
    for u in enumerate_ideals(d):
        if len(u) == len(everything):
            continue
        q = quotient(d, u)
        kept = [v for v in everything if v not in u]
        assert [label for level in q.labels for label in level] == [d.labels[n - 1][k - 1] for n, k in kept]
        assert sum(len(level) for level in q.levels) == len(kept)
