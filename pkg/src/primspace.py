"""
Finite topological spaces given by their closed sets.

Used to model truncations of the primitive ideal spaces Y_n and to check the
combinatorial conditions that characterise them.
"""
import logging
from itertools import chain, combinations
from typing import FrozenSet, Iterable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from src.errors import MalformedInputError, PreconditionError
from src.models import SpaceModel

logger = logging.getLogger(__name__)

PointSet = FrozenSet[str]


def is_lattice(points: Iterable[str], closed_sets: Iterable[PointSet]) -> bool:
    """Contains the empty set and the whole space, closed under pairwise union and intersection."""
    full = frozenset(points)
    family = set(closed_sets)
    if frozenset() not in family or full not in family:
        return False
    return all(a | b in family and a & b in family for a, b in combinations(family, 2))


class FiniteSpace(BaseModel):
    """A finite space; the closed sets must form a lattice."""
    model_config = ConfigDict(frozen=True)

    points: List[str]
    closed_sets: FrozenSet[PointSet]

    @model_validator(mode="after")
    def _check_lattice(self) -> "FiniteSpace":
        if len(set(self.points)) != len(self.points):
            raise ValueError("duplicate points")
        full = frozenset(self.points)
        stray = [sorted(c) for c in self.closed_sets if not c <= full]
        if stray:
            raise ValueError(f"closed sets mention unknown points: {stray}")
        if not is_lattice(self.points, self.closed_sets):
            raise ValueError("closed sets must contain the empty set and the whole space and be closed under union and intersection")
        return self

    @property
    def full(self) -> PointSet:
        return frozenset(self.points)

    def is_closed(self, subset: Iterable[str]) -> bool:
        return frozenset(subset) in self.closed_sets

    def closure(self, subset: Iterable[str]) -> PointSet:
        """Smallest closed set containing the subset."""
        target = frozenset(subset)
        unknown = target - self.full
        if unknown:
            raise MalformedInputError(f"Unknown points: {sorted(unknown)}")
        out = self.full
        for c in self.closed_sets:
            if target <= c:
                out &= c
        return out

    def open_sets(self) -> List[PointSet]:
        return sorted((self.full - c for c in self.closed_sets), key=lambda s: (len(s), sorted(s)))

    def specialization(self) -> np.ndarray:
        """Boolean matrix with [i, j] set iff point i lies in the closure of point j."""
        index = {p: i for i, p in enumerate(self.points)}
        leq = np.zeros((len(self.points), len(self.points)), dtype=bool)
        for j, p in enumerate(self.points):
            for q in self.closure([p]):
                leq[index[q], j] = True
        return leq

    def to_model(self) -> SpaceModel:
        closed = sorted((sorted(c) for c in self.closed_sets), key=lambda c: (len(c), c))
        return SpaceModel(points=list(self.points), closed=closed)

    @classmethod
    def from_model(cls, model: SpaceModel) -> "FiniteSpace":
        try:
            return cls(points=model.points, closed_sets=frozenset(frozenset(c) for c in model.closed))
        except ValueError as e:
            raise MalformedInputError(str(e)) from e


class FiniteT0Space(FiniteSpace):
    """A finite space in which distinct points have distinct closures."""

    @model_validator(mode="after")
    def _check_t0(self) -> "FiniteT0Space":
        if not is_t0(self):
            raise ValueError("space is not T0: two points share a closure")
        return self


def is_t0(s: FiniteSpace) -> bool:
    """Distinct points have distinct closures."""
    leq = s.specialization()
    # T0 iff the specialization preorder is antisymmetric
    both = leq & leq.T
    return not (both & ~np.eye(len(s.points), dtype=bool)).any()


def load_space(model: SpaceModel) -> FiniteSpace:
    """Load a space, keeping the T0 guarantee when it holds."""
    space = FiniteSpace.from_model(model)
    if is_t0(space):
        return FiniteT0Space(points=space.points, closed_sets=space.closed_sets)
    logger.info("Loaded space with %d points is not T0", len(space.points))
    return space


def _subsets(items: Sequence[str]):
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


def build_Yn(n: int) -> FiniteT0Space:
    """
    The space Y_n: points 0..n, closed sets the empty set, the whole space and every subset of {1..n}.

    Args:
        n: Number of closed points

    Returns:
        The space with its closed-set lattice
    """
    if n < 0:
        raise PreconditionError(f"n must be nonnegative, got {n}")
    points = [str(i) for i in range(n + 1)]
    closed = {frozenset(s) for s in _subsets(points[1:])}
    closed.add(frozenset(points))
    return FiniteT0Space(points=points, closed_sets=frozenset(closed))


def build_two_copies(n: int) -> FiniteT0Space:
    """
    Two copies X1, X2 of Y_n glued so that a nonempty set is open iff it meets X1
    in a nonempty open set and meets X2 in an open set.
    """
    y = build_Yn(n)
    opens = y.open_sets()
    first = [frozenset(f"1:{p}" for p in u) for u in opens if u]
    second = [frozenset(f"2:{p}" for p in u) for u in opens]
    points = [f"1:{p}" for p in y.points] + [f"2:{p}" for p in y.points]
    full = frozenset(points)
    closed = {full}
    closed.update(full - (u1 | u2) for u1 in first for u2 in second)
    return FiniteT0Space(points=points, closed_sets=frozenset(closed))


def is_prime_closed(s: FiniteSpace, subset: Iterable[str]) -> bool:
    """
    Whether a closed set is prime: covered by two closed sets, it lies in one of them.

    The empty set is not prime.
    """
    f = frozenset(subset)
    if not s.is_closed(f):
        raise PreconditionError(f"{sorted(f)} is not closed", kind="not_closed")
    if not f:
        return False
    # a cover by c1, c2 restricts to a cover by the closed sets f & c1, f & c2
    proper = [c for c in s.closed_sets if c < f]
    for i, c1 in enumerate(proper):
        for c2 in proper[i:]:
            if c1 | c2 == f:
                return False
    return True


def prime_closed_sets(s: FiniteSpace) -> List[PointSet]:
    """All prime closed sets of s."""
    return [c for c in s.closed_sets if is_prime_closed(s, c)]


def is_spectral(s: FiniteSpace) -> bool:
    """Every prime closed set is the closure of exactly one point."""
    closures = [s.closure([p]) for p in s.points]
    for f in prime_closed_sets(s):
        generic = [p for p, c in zip(s.points, closures) if c == f]
        if len(generic) != 1:
            logger.debug("Prime closed set %s has generic points %s", sorted(f), generic)
            return False
    return True


def classify_Yn(s: FiniteSpace) -> Optional[int]:
    """
    Recognise Y_n up to homeomorphism.

    Returns:
        n when the space has a point with dense closure, all other points are
        closed and the closed sets are exactly the subsets of the closed points
        together with the whole space; None otherwise
    """
    dense = [p for p in s.points if s.closure([p]) == s.full]
    if len(dense) != 1:
        return None
    x0 = dense[0]
    rest = [p for p in s.points if p != x0]
    if any(not s.is_closed([p]) for p in rest):
        return None
    expected = {frozenset(c) for c in _subsets(rest)}
    expected.add(s.full)
    if set(s.closed_sets) != expected:
        return None
    return len(rest)


def finite_subcover(s: FiniteSpace, cover: Iterable[Iterable[str]], target: Optional[Iterable[str]] = None) -> List[PointSet]:
    """
    Extract a finite subcover of an open cover of target (the whole space by default).

    Args:
        s: The space
        cover: Open sets whose union contains target
        target: Subset to cover

    Returns:
        An irredundant subfamily of the cover, in the given order
    """
    goal = s.full if target is None else frozenset(target)
    opens = set(s.open_sets())
    family = [frozenset(u) for u in cover]
    for u in family:
        if u not in opens:
            raise PreconditionError(f"{sorted(u)} is not open", kind="not_open")
    if not goal <= frozenset().union(*family):
        raise PreconditionError("the given sets do not cover the target")
    chosen: List[PointSet] = []
    covered: PointSet = frozenset()
    for u in family:
        if (u & goal) - covered:
            chosen.append(u)
            covered |= u & goal
        if goal <= covered:
            break
    # drop members made redundant by later choices
    for u in list(chosen):
        others = [v for v in chosen if v is not u]
        if goal <= frozenset().union(*others):
            chosen = others
    return chosen
