"""
Pydantic models for the structured data exchanged by justinf.

These are the JSON shapes read and written by the CLI and the result types
returned by the decision procedures.
"""
from fractions import Fraction
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, RootModel


def to_fraction(value: Any) -> Fraction:
    """Accept ints, Fractions and strings such as "3", "-1/2"."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ZeroDivisionError as e:
            raise ValueError(f"zero denominator in {value!r}") from e
    raise ValueError(f"cannot read {value!r} as an exact rational")


def fraction_str(value: Fraction) -> str:
    return str(value)


# exact rational, serialised as "p/q"
Rational = Annotated[Fraction, BeforeValidator(to_fraction), PlainSerializer(fraction_str, return_type=str)]


class AlgebraTerm(BaseModel):
    """One term coeff * word of a group-algebra element."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    word: str = Field(description="Word over 'abcd'; the empty string is the identity")
    coeff: Rational = Field(description="Nonzero rational coefficient, e.g. \"-1/2\"")


class AlgebraElementModel(RootModel[List[AlgebraTerm]]):
    """A group-algebra element as a list of terms."""


class BlockEntry(BaseModel):
    row: int = Field(ge=0)
    col: int = Field(ge=0)
    value: List[AlgebraTerm]


class BlockMatrixModel(BaseModel):
    """Sparse 2**depth x 2**depth matrix over the group algebra."""
    depth: int = Field(ge=0)
    entries: List[BlockEntry] = Field(default_factory=list)


class MatrixEntry(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    row: int = Field(ge=0)
    col: int = Field(ge=0)
    value: Rational


class LevelMatrixModel(BaseModel):
    """Sparse exact rational matrix of a finite-level representation."""
    level: int = Field(ge=0)
    size: int = Field(ge=1)
    entries: List[MatrixEntry] = Field(default_factory=list)


class KernelCertificate(BaseModel):
    """Outcome of the kernel decision procedure."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    in_kernel: bool
    depth: int = Field(ge=0, description="Number of expansions needed to reach the nucleus span")
    position: Optional[Tuple[int, int]] = Field(None, description="A surviving nonzero entry")
    coefficients: Optional[List[Rational]] = Field(
        None, description="Coefficients of the surviving entry over (1, a, b, c, d)"
    )


class ScalarEntry(BaseModel):
    """A nonzero scalar entry of an iterated matrix recursion."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    depth: int = Field(ge=0)
    row: int = Field(ge=0)
    col: int = Field(ge=0)
    value: Rational


class ReplicationWitness(BaseModel):
    word: str
    target: str
    level: int
    in_closure_at_level: bool


class EdgeModel(BaseModel):
    """Edge between 1-based positions of consecutive levels."""
    model_config = ConfigDict(populate_by_name=True)

    source: int = Field(alias="from", ge=1)
    target: int = Field(alias="to", ge=1)
    mult: int = Field(1, ge=1)


class IdealDescription(BaseModel):
    """Symbolic description of an ideal, used to rebuild it at other depths."""
    kind: Literal["open_set", "avoid_column", "left_half", "empty", "explicit"]
    omitted: List[int] = Field(default_factory=list, description="Finite set F for open_set ideals")
    column: Optional[int] = Field(None, description="Column k for avoid_column ideals")


class DiagramModel(BaseModel):
    """JSON form of a truncated Bratteli diagram."""
    levels: List[List[int]] = Field(description="Vertex dimensions per level, level 1 first")
    edges: List[List[EdgeModel]] = Field(default_factory=list, description="edges[n-1] joins level n to n+1")
    rule: Optional[Literal["y_infty", "strictly_rfd"]] = None
    multiplicity: int = Field(1, ge=1)
    quotient_of: Optional[IdealDescription] = None


class IdealModel(BaseModel):
    members: List[List[int]] = Field(description="1-based member positions per level")
    description: Optional[IdealDescription] = None


class LimitDimension(BaseModel):
    """Semi-decision on the dimension of the inductive limit."""
    status: Literal["finite", "infinite", "undetermined"]
    dims: Optional[List[int]] = None
    exact: bool = False
    stabilized_from: Optional[int] = None


class IdealComparison(BaseModel):
    """Brute-force ideal lattice compared with the open-set formula."""
    depth: int
    enumerated: int
    formula_ideals: int
    matched: int
    missing: List[List[int]] = Field(default_factory=list, description="Open sets F whose ideal was not found")
    artifacts: List[IdealModel] = Field(default_factory=list)
    discrepancies: int


class K0ElementModel(BaseModel):
    level: int = Field(ge=1)
    vector: List[int]


class SpaceModel(BaseModel):
    """A finite space given by its family of closed sets."""
    points: List[str]
    closed: List[List[str]]


class CheckResult(BaseModel):
    id: str
    title: str
    passed: bool
    detail: str = ""


class VerificationReport(BaseModel):
    results: List[CheckResult]
    passed: bool

    def summary(self) -> Dict[str, int]:
        ok = sum(1 for r in self.results if r.passed)
        return {"passed": ok, "failed": len(self.results) - ok}
