"""
Bratteli diagrams, their ideals and quotients.

Vertices are ``(level, position)`` pairs, both 1-based.  Two rule-defined
families are built in:

* ``y_infty``: n vertices at level n, edges ``(n, k) -> (n+1, k)`` and
  ``(n, k) -> (n+1, n+1)`` (the latter with multiplicity mu).
* ``strictly_rfd``: a left half and a right half, each with the ``y_infty``
  pattern, plus the edge from the last right vertex of level n to the new
  left vertex of level n+1.  Left vertices sit at positions 1..n, right
  vertices at n+1..2n.

Truncated diagrams check saturation on every level but the deepest.
"""
import logging
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np
from graphviz import Digraph

from src.config import get_settings
from src.errors import MalformedInputError, PreconditionError, check_cap
from src.models import (
    DiagramModel,
    EdgeModel,
    IdealComparison,
    IdealDescription,
    IdealModel,
    LimitDimension,
)

logger = logging.getLogger(__name__)

Vertex = Tuple[int, int]
Edge = Tuple[int, int, int]  # (source position, target position, multiplicity)

RULES = ("y_infty", "strictly_rfd")


class BratteliDiagram:
    """
    A truncated Bratteli diagram.

    Args:
        levels: Vertex dimensions per level (levels[0] is level 1)
        edges: edges[n-1] lists (source, target, mult) from level n to n+1
        rule: Name of the generating rule, if the diagram is one of the built-in families
        multiplicity: Edge multiplicity parameter of the rule
        quotient_of: Description of the ideal removed from the rule diagram, if any
        labels: Optional display labels per level
    """

    def __init__(
        self,
        levels: List[List[int]],
        edges: List[List[Edge]],
        rule: Optional[str] = None,
        multiplicity: int = 1,
        quotient_of: Optional[IdealDescription] = None,
        labels: Optional[List[List[str]]] = None,
    ):
        self.levels = [list(level) for level in levels]
        self.edges = [sorted(level) for level in edges]
        self.rule = rule
        self.multiplicity = multiplicity
        self.quotient_of = quotient_of
        self.labels = labels or [[f"({n},{k})" for k in range(1, len(lv) + 1)] for n, lv in enumerate(self.levels, 1)]
        self.validate()

    @property
    def depth(self) -> int:
        return len(self.levels)

    def validate(self) -> None:
        """Check positions, dimension compatibility and the absence of dead vertices."""
        if not self.levels:
            raise MalformedInputError("A diagram needs at least one level")
        if self.rule is not None and self.rule not in RULES:
            raise MalformedInputError(f"Unknown rule {self.rule!r}")
        if len(self.edges) != self.depth - 1:
            raise MalformedInputError(f"Expected {self.depth - 1} edge levels, got {len(self.edges)}")
        for n, dims in enumerate(self.levels, 1):
            if not dims or any(k < 1 for k in dims):
                raise MalformedInputError(f"Level {n} needs at least one vertex and positive dimensions")
        for n, level_edges in enumerate(self.edges, 1):
            sources, targets = len(self.levels[n - 1]), len(self.levels[n])
            incoming = [0] * targets
            has_out = [False] * sources
            for s, t, mult in level_edges:
                if not (1 <= s <= sources and 1 <= t <= targets) or mult < 1:
                    raise MalformedInputError(f"Bad edge ({n},{s}) -> ({n + 1},{t}) x{mult}")
                incoming[t - 1] += mult * self.levels[n - 1][s - 1]
                has_out[s - 1] = True
            for t, total in enumerate(incoming, 1):
                if total == 0:
                    raise MalformedInputError(f"Vertex ({n + 1},{t}) has no incoming edge")
                if total != self.levels[n][t - 1]:
                    raise MalformedInputError(
                        f"Vertex ({n + 1},{t}) has dimension {self.levels[n][t - 1]}, incoming edges give {total}"
                    )
            for s, ok in enumerate(has_out, 1):
                if not ok:
                    raise MalformedInputError(f"Vertex ({n},{s}) has no outgoing edge")

    def vertices(self) -> List[Vertex]:
        return [(n, k) for n, dims in enumerate(self.levels, 1) for k in range(1, len(dims) + 1)]

    def dim(self, v: Vertex) -> int:
        return self.levels[v[0] - 1][v[1] - 1]

    def label(self, v: Vertex) -> str:
        return self.labels[v[0] - 1][v[1] - 1]

    def has_vertex(self, v: Vertex) -> bool:
        n, k = v
        return 1 <= n <= self.depth and 1 <= k <= len(self.levels[n - 1])

    def out_edges(self, v: Vertex) -> List[Tuple[Vertex, int]]:
        n, k = v
        if n >= self.depth:
            return []
        return [((n + 1, t), m) for s, t, m in self.edges[n - 1] if s == k]

    def in_edges(self, v: Vertex) -> List[Tuple[Vertex, int]]:
        n, k = v
        if n <= 1:
            return []
        return [((n - 1, s), m) for s, t, m in self.edges[n - 2] if t == k]

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.vertices())
        for n, level_edges in enumerate(self.edges, 1):
            for s, t, m in level_edges:
                g.add_edge((n, s), (n + 1, t), mult=m)
        return g

    def total_dimension(self, n: int) -> int:
        """Sum of k_v**2 over level n."""
        return sum(k * k for k in self.levels[n - 1])

    def connecting_matrix(self, n: int) -> np.ndarray:
        """Integer matrix M with dims(level n+1) = M @ dims(level n)."""
        if not 1 <= n < self.depth:
            raise PreconditionError(f"No connecting map out of level {n} in a depth-{self.depth} diagram")
        m = np.zeros((len(self.levels[n]), len(self.levels[n - 1])), dtype=np.int64)
        for s, t, mult in self.edges[n - 1]:
            m[t - 1, s - 1] += mult
        return m

    def truncate(self, depth: int) -> "BratteliDiagram":
        if not 1 <= depth <= self.depth:
            raise PreconditionError(f"Cannot truncate a depth-{self.depth} diagram to depth {depth}")
        return BratteliDiagram(
            self.levels[:depth],
            self.edges[: depth - 1],
            rule=self.rule,
            multiplicity=self.multiplicity,
            quotient_of=self.quotient_of,
            labels=self.labels[:depth],
        )

    def same_shape(self, other: "BratteliDiagram") -> bool:
        """Equal dimensions and edges (labels and rules ignored)."""
        return self.levels == other.levels and self.edges == other.edges

    def to_model(self) -> DiagramModel:
        return DiagramModel(
            levels=self.levels,
            edges=[[EdgeModel(source=s, target=t, mult=m) for s, t, m in lv] for lv in self.edges],
            rule=self.rule,
            multiplicity=self.multiplicity,
            quotient_of=self.quotient_of,
        )

    @classmethod
    def from_model(cls, model: DiagramModel) -> "BratteliDiagram":
        return cls(
            model.levels,
            [[(e.source, e.target, e.mult) for e in lv] for lv in model.edges],
            rule=model.rule,
            multiplicity=model.multiplicity,
            quotient_of=model.quotient_of,
        )

    def __repr__(self) -> str:
        return f"BratteliDiagram(depth={self.depth}, rule={self.rule!r}, levels={self.levels})"


class DiagramIdeal:
    """A set of vertices of a truncated diagram, optionally with a symbolic description."""

    def __init__(self, members: Iterable[Vertex], depth: int, description: Optional[IdealDescription] = None):
        self.members: FrozenSet[Vertex] = frozenset(members)
        self.depth = depth
        self.description = description

    def __contains__(self, v: Vertex) -> bool:
        return v in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DiagramIdeal) and self.members == other.members

    def __hash__(self) -> int:
        return hash(self.members)

    def __repr__(self) -> str:
        return f"DiagramIdeal({sorted(self.members)})"

    def is_empty(self) -> bool:
        return not self.members

    def restrict(self, depth: int) -> "DiagramIdeal":
        return DiagramIdeal((v for v in self.members if v[0] <= depth), depth, self.description)

    @classmethod
    def empty(cls, d: BratteliDiagram) -> "DiagramIdeal":
        return cls((), d.depth, IdealDescription(kind="empty"))

    @classmethod
    def full(cls, d: BratteliDiagram) -> "DiagramIdeal":
        return cls(d.vertices(), d.depth, IdealDescription(kind="open_set", omitted=[]) if d.rule == "y_infty" else None)

    def to_model(self, d: BratteliDiagram) -> IdealModel:
        members = [[k for k in range(1, len(dims) + 1) if (n, k) in self.members] for n, dims in enumerate(d.levels, 1)]
        return IdealModel(members=members, description=self.description)

    @classmethod
    def from_model(cls, d: BratteliDiagram, model: IdealModel) -> "DiagramIdeal":
        if model.description is not None and model.description.kind != "explicit" and d.rule is not None:
            return ideal_from_description(d, model.description)
        members = [(n, k) for n, ks in enumerate(model.members, 1) for k in ks]
        for v in members:
            if not d.has_vertex(v):
                raise MalformedInputError(f"Ideal member {v} is not a vertex of the diagram")
        return cls(members, d.depth, model.description or IdealDescription(kind="explicit"))


# ---------------------------------------------------------------------------
# Built-in diagrams
# ---------------------------------------------------------------------------

def build_y_infty(depth: int, multiplicity: int = 1) -> BratteliDiagram:
    """The diagram with n vertices at level n whose quotients realise the closed sets of Y_infinity."""
    if depth < 1:
        raise MalformedInputError("depth must be at least 1")
    if multiplicity < 1:
        raise MalformedInputError("multiplicity must be at least 1")
    levels = [[1]]
    edges: List[List[Edge]] = []
    for n in range(1, depth):
        prev = levels[-1]
        level_edges = []
        for k in range(1, n + 1):
            level_edges.append((k, k, 1))
            level_edges.append((k, n + 1, multiplicity))
        edges.append(level_edges)
        levels.append(prev + [multiplicity * sum(prev)])
    return BratteliDiagram(levels, edges, rule="y_infty", multiplicity=multiplicity)


def build_strictly_rfd(depth: int) -> BratteliDiagram:
    """The two-halves diagram; the left half is an essential ideal and the right half is y_infty."""
    if depth < 1:
        raise MalformedInputError("depth must be at least 1")
    left, right = [1], [1]
    levels = [left + right]
    labels = [["L1,1", "R1,1"]]
    edges: List[List[Edge]] = []
    for n in range(1, depth):
        level_edges = []
        for k in range(1, n + 1):
            # left half: L(n,k) at position k, L(n+1,k) at k, L(n+1,n+1) at n+1
            level_edges.append((k, k, 1))
            level_edges.append((k, n + 1, 1))
            # right half: R(n,k) at n+k, R(n+1,k) at n+1+k, R(n+1,n+1) at 2n+2
            level_edges.append((n + k, n + 1 + k, 1))
            level_edges.append((n + k, 2 * n + 2, 1))
        # R(n,n) also feeds the new left column
        level_edges.append((2 * n, n + 1, 1))
        edges.append(level_edges)
        new_left = left + [sum(left) + right[-1]]
        new_right = right + [sum(right)]
        left, right = new_left, new_right
        levels.append(left + right)
        labels.append([f"L{n + 1},{k}" for k in range(1, n + 2)] + [f"R{n + 1},{k}" for k in range(1, n + 2)])
    return BratteliDiagram(levels, edges, rule="strictly_rfd", labels=labels)


def materialize(d: BratteliDiagram, depth: int) -> BratteliDiagram:
    """Regenerate a rule-defined diagram (or a quotient of one) at another depth."""
    if d.rule is None:
        if depth <= d.depth:
            return d.truncate(depth)
        raise PreconditionError(
            f"Diagram has no generating rule and only {d.depth} levels (asked for {depth})",
            kind="depth_insufficient",
        )
    base = build_y_infty(depth, d.multiplicity) if d.rule == "y_infty" else build_strictly_rfd(depth)
    if d.quotient_of is None:
        return base
    return quotient(base, ideal_from_description(base, d.quotient_of))


# ---------------------------------------------------------------------------
# Ideals
# ---------------------------------------------------------------------------

def is_ideal(d: BratteliDiagram, members: Iterable[Vertex]) -> Tuple[bool, Optional[str]]:
    """
    Check heredity and saturation.

    Returns:
        (True, None) or (False, description of the first violating edge or vertex)
    """
    u: Set[Vertex] = set(members)
    for v in u:
        if not d.has_vertex(v):
            raise MalformedInputError(f"{v} is not a vertex of the diagram")
    for n in range(1, d.depth):
        for s, t, _ in d.edges[n - 1]:
            if (n, s) in u and (n + 1, t) not in u:
                return False, f"heredity fails on edge ({n},{s})->({n + 1},{t})"
        for k in range(1, len(d.levels[n - 1]) + 1):
            v = (n, k)
            if v not in u and all(w in u for w, _ in d.out_edges(v)):
                return False, f"saturation fails at vertex ({n},{k})"
    return True, None


def _require_family(d: BratteliDiagram, rule: str) -> None:
    if d.rule != rule or d.quotient_of is not None:
        raise PreconditionError(f"Operation needs a {rule} diagram, got rule={d.rule!r}")


def ideal_from_open_set(d: BratteliDiagram, omitted: Iterable[int]) -> DiagramIdeal:
    """The ideal {(n, k) : k not in F, n >= max F} of the open set Y_infinity minus F."""
    _require_family(d, "y_infty")
    f = sorted(set(omitted))
    if any(j < 1 for j in f):
        raise MalformedInputError("Omitted points must be positive integers")
    floor = max(f) if f else 1
    members = [(n, k) for n, k in d.vertices() if n >= floor and k not in f]
    return DiagramIdeal(members, d.depth, IdealDescription(kind="open_set", omitted=f))


def largest_ideal_avoiding(d: BratteliDiagram, avoid: Iterable[Vertex]) -> DiagramIdeal:
    """Complement of everything that can reach the avoided vertices."""
    g = d.graph()
    blocked: Set[Vertex] = set()
    for v in avoid:
        if not d.has_vertex(v):
            raise MalformedInputError(f"{v} is not a vertex of the diagram")
        blocked.add(v)
        blocked |= nx.ancestors(g, v)
    return DiagramIdeal((v for v in d.vertices() if v not in blocked), d.depth, IdealDescription(kind="explicit"))


def left_half_ideal(d: BratteliDiagram) -> DiagramIdeal:
    """The essential ideal formed by the left half of a strictly_rfd diagram."""
    _require_family(d, "strictly_rfd")
    members = [(n, k) for n, k in d.vertices() if k <= n]
    return DiagramIdeal(members, d.depth, IdealDescription(kind="left_half"))


def column_ideal(d: BratteliDiagram, k: int) -> DiagramIdeal:
    """U_k: the largest ideal with no vertex in the k-th column of the left half."""
    _require_family(d, "strictly_rfd")
    if k < 1:
        raise MalformedInputError("Column index must be positive")
    column = [(n, k) for n in range(k, d.depth + 1)]
    if not column:
        raise PreconditionError(f"Column {k} starts below depth {d.depth}", kind="depth_insufficient")
    ideal = largest_ideal_avoiding(d, column)
    return DiagramIdeal(ideal.members, d.depth, IdealDescription(kind="avoid_column", column=k))


def ideal_from_description(d: BratteliDiagram, description: IdealDescription) -> DiagramIdeal:
    """Rebuild a symbolically described ideal on d (explicit ideals cannot be rebuilt)."""
    if description.kind == "empty":
        return DiagramIdeal.empty(d)
    if description.kind == "open_set":
        return ideal_from_open_set(d, description.omitted)
    if description.kind == "left_half":
        return left_half_ideal(d)
    if description.kind == "avoid_column":
        if d.rule == "y_infty":
            return ideal_from_open_set(d, [description.column])
        return column_ideal(d, description.column)
    raise PreconditionError("Explicit ideals cannot be rebuilt at another depth")


def quotient(d: BratteliDiagram, u: DiagramIdeal) -> BratteliDiagram:
    """The diagram on the complement of an ideal, positions renumbered within each level."""
    ok, witness = is_ideal(d, u.members)
    if not ok:
        raise PreconditionError(f"Not an ideal: {witness}", kind="not_an_ideal")
    kept: List[List[int]] = []
    for n, dims in enumerate(d.levels, 1):
        kept.append([k for k in range(1, len(dims) + 1) if (n, k) not in u])
    if not kept[-1]:
        raise PreconditionError("Quotient by the whole diagram is empty", kind="not_an_ideal")
    renumber = [{k: i for i, k in enumerate(ks, 1)} for ks in kept]
    levels = [[d.levels[n][k - 1] for k in ks] for n, ks in enumerate(kept)]
    labels = [[d.labels[n][k - 1] for k in ks] for n, ks in enumerate(kept)]
    edges = []
    for n, level_edges in enumerate(d.edges):
        edges.append(
            [(renumber[n][s], renumber[n + 1][t], m) for s, t, m in level_edges if s in renumber[n] and t in renumber[n + 1]]
        )
    if u.is_empty():
        rule, description = d.rule, d.quotient_of
    elif d.rule is not None and d.quotient_of is None and u.description is not None and u.description.kind not in ("explicit", "empty"):
        rule, description = d.rule, u.description
    else:
        rule, description = None, None
    return BratteliDiagram(
        levels,
        edges,
        rule=rule,
        multiplicity=d.multiplicity,
        quotient_of=description,
        labels=labels,
    )


# ---------------------------------------------------------------------------
# Limits
# ---------------------------------------------------------------------------

def _is_isomorphic_step(d: BratteliDiagram, n: int) -> bool:
    """Level n maps onto level n+1 by single multiplicity-1 edges preserving dimensions."""
    if len(d.levels[n - 1]) != len(d.levels[n]):
        return False
    outs: Dict[int, int] = {}
    ins: Dict[int, int] = {}
    for s, t, m in d.edges[n - 1]:
        if m != 1:
            return False
        outs[s] = outs.get(s, 0) + 1
        ins[t] = ins.get(t, 0) + 1
    if any(c != 1 for c in outs.values()) or any(c != 1 for c in ins.values()):
        return False
    return all(d.levels[n - 1][s - 1] == d.levels[n][t - 1] for s, t, _ in d.edges[n - 1])


def _stabilisation_depth(d: BratteliDiagram) -> int:
    """Depth from which a quotient of a rule diagram by a described ideal has an isomorphic step."""
    q = d.quotient_of
    if d.rule is None or q is None:
        return 1
    if q.kind == "open_set" and q.omitted:
        return max(q.omitted) + 1
    if q.kind == "avoid_column" and q.column is not None:
        return q.column + 1
    return 1


def _grows_forever(d: BratteliDiagram) -> bool:
    """Rule diagrams whose level dimensions increase at every step."""
    # the left-half quotient of strictly_rfd is y_infty again
    return d.quotient_of is None or d.quotient_of.kind in ("left_half", "empty")


def limit_dimension(d: BratteliDiagram, horizon: Optional[int] = None) -> LimitDimension:
    """
    Semi-decide whether the inductive limit is finite dimensional.

    Finite if the connecting maps are isomorphisms from some level up to the
    horizon; infinite if a rule-defined diagram is still growing at the
    horizon; undetermined otherwise.  Answers for rule-defined diagrams are exact.
    """
    horizon = max(horizon or d.depth, _stabilisation_depth(d))
    check_cap("depth_cap", get_settings().depth_cap, horizon)
    if horizon > d.depth:
        d = materialize(d, horizon)
    exact = d.rule is not None
    start = horizon
    while start > 1 and _is_isomorphic_step(d, start - 1):
        start -= 1
    if start < horizon:
        return LimitDimension(status="finite", dims=list(d.levels[start - 1]), exact=exact, stabilized_from=start)
    if horizon >= 2 and exact and _grows_forever(d) and d.total_dimension(horizon) > d.total_dimension(horizon - 1):
        return LimitDimension(status="infinite", exact=True)
    return LimitDimension(status="undetermined")


def primitive_quotient_sizes(d: BratteliDiagram, j_max: int) -> List[int]:
    """
    Matrix sizes k(1), ..., k(j_max) of the quotients by the primitive ideals U(Y_infinity minus {j}).

    k(j) is the dimension of vertex (j, j): 1, 1, 2, 4, 8, ..., i.e. 2**(j - 2) for j >= 2,
    the j-th coordinate of the order unit. A closed form 2**(j - 1) would contradict k(2) = 1.

    Args:
        d: A y_infty diagram of depth at least j_max + 1
        j_max: Largest j to report

    Returns:
        [k(1), ..., k(j_max)]
    """
    _require_family(d, "y_infty")
    if d.depth < j_max + 1:
        raise PreconditionError(
            f"Depth {d.depth} cannot show stabilisation for j = {j_max}; need depth {j_max + 1}",
            kind="depth_insufficient",
        )
    sizes = []
    for j in range(1, j_max + 1):
        result = limit_dimension(quotient(d, ideal_from_open_set(d, [j])), d.depth)
        if result.status != "finite" or len(result.dims) != 1:
            raise RuntimeError(f"quotient for j={j} is not a full matrix algebra: {result}")
        sizes.append(result.dims[0])
    return sizes


# ---------------------------------------------------------------------------
# Brute-force ideal lattice
# ---------------------------------------------------------------------------

def enumerate_ideals(d: BratteliDiagram, depth: Optional[int] = None, cap: Optional[int] = None) -> List[DiagramIdeal]:
    """Every hereditary, saturated vertex set of the diagram truncated at depth, by bitmask scan."""
    depth = depth or d.depth
    t = materialize(d, depth)
    verts = t.vertices()
    limit = cap if cap is not None else get_settings().enumerate_vertex_cap
    check_cap("enumerate_vertex_cap", limit, len(verts))
    index = {v: i for i, v in enumerate(verts)}
    masks = np.arange(1 << len(verts), dtype=np.uint64)
    valid = np.ones(masks.shape, dtype=bool)

    def bit(i: int) -> np.ndarray:
        return (masks >> np.uint64(i)) & np.uint64(1)

    for n in range(1, t.depth):
        for s, tgt, _ in t.edges[n - 1]:
            valid &= ~((bit(index[(n, s)]) == 1) & (bit(index[(n + 1, tgt)]) == 0))
        for k in range(1, len(t.levels[n - 1]) + 1):
            v = (n, k)
            children = np.uint64(sum(1 << index[w] for w, _ in t.out_edges(v)))
            valid &= ~(((masks & children) == children) & (bit(index[v]) == 0))
    ideals = []
    for m in masks[valid]:
        m = int(m)
        ideals.append(DiagramIdeal([v for v in verts if m >> index[v] & 1], t.depth, IdealDescription(kind="explicit")))
    logger.debug("Found %d ideals among %d subsets at depth %d", len(ideals), 1 << len(verts), depth)
    return ideals


def compare_with_formula(d: BratteliDiagram, depth: int) -> IdealComparison:
    """Match brute-force ideals against the open-set formula; leftovers are truncation artifacts."""
    _require_family(d, "y_infty")
    t = materialize(d, depth)
    enumerated = enumerate_ideals(t, depth)
    found = {ideal.members for ideal in enumerated}

    formula: Set[FrozenSet[Vertex]] = {frozenset()}
    missing: List[List[int]] = []
    for size in range(depth + 1):
        for f in combinations(range(1, depth + 1), size):
            ideal = ideal_from_open_set(t, f)
            formula.add(ideal.members)
            if ideal.members not in found:
                missing.append(list(f))
    matched = sum(1 for members in formula if members in found)
    artifacts = [ideal.to_model(t) for ideal in enumerated if ideal.members not in formula]
    return IdealComparison(
        depth=depth,
        enumerated=len(enumerated),
        formula_ideals=len(formula),
        matched=matched,
        missing=missing,
        artifacts=artifacts,
        discrepancies=len(missing),
    )


def is_essential(d: BratteliDiagram, u: DiagramIdeal, depth: Optional[int] = None) -> bool:
    """
    True iff u meets every nonempty ideal enumerated at the given depth.

    Meeting is decided in a copy of the diagram two levels deeper, so ideals
    that only reach u just below the horizon still count.
    """
    depth = depth or d.depth
    candidates = [v for v in enumerate_ideals(d, depth) if not v.is_empty()]
    deep_depth = depth + 2 if d.rule is not None else min(depth + 2, d.depth)
    deep = materialize(d, deep_depth)
    if u.description is not None and u.description.kind != "explicit" and d.rule is not None:
        target = ideal_from_description(deep, u.description).members
    else:
        target = u.members
    if not target:
        return not candidates
    g = deep.graph()
    for v in candidates:
        reach: Set[Vertex] = set(v.members)
        for w in v.members:
            reach |= nx.descendants(g, w)
        if reach.isdisjoint(target):
            return False
    return True


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

def export_dot(d: BratteliDiagram, mark: Optional[DiagramIdeal] = None) -> str:
    """DOT source for the diagram; marked vertices are filled."""
    dot = Digraph("Bratteli", graph_attr={"rankdir": "TB"})
    marked = mark.members if mark is not None else frozenset()
    for n, dims in enumerate(d.levels, 1):
        with dot.subgraph() as level:
            level.attr(rank="same")
            for k, dim in enumerate(dims, 1):
                attrs = {"style": "filled", "fillcolor": "lightblue"} if (n, k) in marked else {}
                level.node(f"v{n}_{k}", label=f"{d.label((n, k))}\\n{dim}", **attrs)
    for n, level_edges in enumerate(d.edges, 1):
        for s, t, m in level_edges:
            extra = {"label": str(m)} if m > 1 else {}
            dot.edge(f"v{n}_{s}", f"v{n + 1}_{t}", **extra)
    return dot.source


def two_chain_diagram(depth: int) -> BratteliDiagram:
    """Two disjoint one-dimensional chains; neither chain ideal is essential."""
    levels = [[1, 1] for _ in range(depth)]
    edges = [[(1, 1, 1), (2, 2, 1)] for _ in range(depth - 1)]
    return BratteliDiagram(levels, edges)
