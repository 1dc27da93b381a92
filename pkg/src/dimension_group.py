"""
Ordered K0 of the y_infty AF-algebra.

The group is the inductive limit of Z^n under
``alpha_n(x_1, ..., x_n) = (x_1, ..., x_n, x_1 + ... + x_n)``.  A class is
modelled by the sequence it pushes forward to, which eventually satisfies
``x_{j+1} = x_1 + ... + x_j``.
"""
import logging
import random
from typing import Iterable, List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.bratteli import BratteliDiagram, materialize
from src.errors import MalformedInputError, PreconditionError
from src.models import K0ElementModel

logger = logging.getLogger(__name__)


class K0Element(BaseModel):
    """A class in the limit, represented at a given level."""
    model_config = ConfigDict(frozen=True)

    level: int = Field(ge=1)
    vector: List[int]

    @model_validator(mode="after")
    def _check_length(self) -> "K0Element":
        if len(self.vector) != self.level:
            raise ValueError(f"level {self.level} needs a vector of length {self.level}, got {len(self.vector)}")
        return self

    @classmethod
    def of(cls, vector: Sequence[int]) -> "K0Element":
        return cls(level=len(vector), vector=[int(v) for v in vector])

    @classmethod
    def from_model(cls, model: K0ElementModel) -> "K0Element":
        try:
            return cls(level=model.level, vector=model.vector)
        except ValueError as e:
            raise MalformedInputError(str(e)) from e

    def to_model(self) -> K0ElementModel:
        return K0ElementModel(level=self.level, vector=list(self.vector))

    def canonical(self) -> "K0Element":
        """Least-level representative: strip trailing coordinates that follow the recurrence."""
        vec = list(self.vector)
        while len(vec) > 1 and vec[-1] == sum(vec[:-1]):
            vec.pop()
        return K0Element.of(vec)

    def __add__(self, other: "K0Element") -> "K0Element":
        return add(self, other)

    def __neg__(self) -> "K0Element":
        return neg(self)

    def __sub__(self, other: "K0Element") -> "K0Element":
        return sub(self, other)


class ModelSequence(BaseModel):
    """An eventually recurrent integer sequence; terms after the prefix follow the recurrence."""
    model_config = ConfigDict(frozen=True)

    prefix: List[int]
    recurrent_from: int = Field(ge=1)

    def terms(self, count: int) -> List[int]:
        out = list(self.prefix[:count])
        total = sum(self.prefix)
        while len(out) < count:
            out.append(total)
            total += total
        return out

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self.prefix) and sum(self.prefix) >= 0


def alpha(vector: Sequence[int]) -> List[int]:
    """The connecting map Z^n -> Z^(n+1)."""
    return list(vector) + [sum(vector)]


def push(x: K0Element, m: int) -> K0Element:
    """Push x forward to level m >= x.level."""
    if m < x.level:
        raise PreconditionError(f"Cannot push a level-{x.level} element down to level {m}")
    vec = list(x.vector)
    while len(vec) < m:
        vec = alpha(vec)
    return K0Element.of(vec)


def order_unit() -> K0Element:
    """The class u of the unit, (1, 1, 2, 4, 8, ...)."""
    return K0Element.of([1])


def zero() -> K0Element:
    """The zero class."""
    return K0Element.of([0])


def _common(x: K0Element, y: K0Element):
    m = max(x.level, y.level)
    return push(x, m).vector, push(y, m).vector


def add(x: K0Element, y: K0Element) -> K0Element:
    """Sum, computed at the larger of the two levels."""
    a, b = _common(x, y)
    return K0Element.of([p + q for p, q in zip(a, b)])


def neg(x: K0Element) -> K0Element:
    """Additive inverse, at the same level."""
    return K0Element.of([-v for v in x.vector])


def sub(x: K0Element, y: K0Element) -> K0Element:
    return add(x, neg(y))


def rho_model(x: K0Element) -> ModelSequence:
    """The sequence model of x, keyed by its canonical representative."""
    c = x.canonical()
    return ModelSequence(prefix=list(c.vector), recurrent_from=c.level)


def equal(x: K0Element, y: K0Element) -> bool:
    """Equality in the limit: the canonical forms agree."""
    return x.canonical().vector == y.canonical().vector


def is_positive(x: K0Element) -> bool:
    """Nonnegativity of every coordinate of the model sequence, read off the prefix."""
    return rho_model(x).is_nonnegative()


def is_positive_by_pushforward(x: K0Element, max_level: int = 12) -> bool:
    """Brute-force check: some pushforward up to max_level is coordinatewise nonnegative."""
    for m in range(x.level, max(max_level, x.level) + 1):
        if all(v >= 0 for v in push(x, m).vector):
            return True
    return False


def random_element(rng: random.Random, max_level: int = 8, bound: int = 3) -> K0Element:
    """Random class with entries in [-bound, bound], for the property suites."""
    level = rng.randint(1, max_level)
    return K0Element.of([rng.randint(-bound, bound) for _ in range(level)])


def subdirect_preimage(points: Iterable[int], targets: Sequence[int]) -> K0Element:
    """
    An element whose model sequence takes the given values at the given coordinates.

    Args:
        points: Finite set F of positive coordinates
        targets: Values, one per element of sorted(F)

    Returns:
        The level-max(F) element with the targets at F and zeros elsewhere
    """
    f = sorted(set(points))
    if not f or f[0] < 1:
        raise MalformedInputError("F must be a nonempty set of positive integers")
    if len(targets) != len(f):
        raise MalformedInputError(f"Expected {len(f)} targets, got {len(targets)}")
    vec = [0] * f[-1]
    for j, t in zip(f, targets):
        vec[j - 1] = int(t)
    return K0Element.of(vec)


def check_subdirect(points: Iterable[int]) -> bool:
    """Spot-check that projection onto the coordinates F hits every standard basis vector and its negative."""
    f = sorted(set(points))
    for i in range(len(f)):
        for sign in (1, -1):
            targets = [sign if j == i else 0 for j in range(len(f))]
            x = subdirect_preimage(f, targets)
            seq = rho_model(x).terms(f[-1])
            if [seq[j - 1] for j in f] != targets:
                logger.warning("Projection onto %s misses %s", f, targets)
                return False
    return True


def diagram_positivity(
    d: BratteliDiagram,
    level: int,
    vector: Sequence[int],
    horizon: Optional[int] = None,
) -> Literal["positive", "undetermined"]:
    """
    Semi-decide positivity of a class in the K0 of an arbitrary diagram.

    The vector is pushed along the connecting matrices; a nonnegative
    pushforward at or before the horizon proves positivity.
    """
    horizon = horizon or d.depth
    if horizon > d.depth:
        d = materialize(d, horizon)
    if not 1 <= level <= horizon:
        raise PreconditionError(f"Level {level} outside 1..{horizon}")
    vec = np.asarray(vector, dtype=np.int64)
    if vec.shape != (len(d.levels[level - 1]),):
        raise MalformedInputError(f"Level {level} has {len(d.levels[level - 1])} vertices, got {len(vector)} entries")
    for n in range(level, horizon + 1):
        if (vec >= 0).all():
            return "positive"
        if n < horizon:
            vec = d.connecting_matrix(n) @ vec
    return "undetermined"
