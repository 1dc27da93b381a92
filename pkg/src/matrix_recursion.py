"""
Group-algebra arithmetic and the matrix recursion of the Koopman representation.

An AlgebraElement is a formal rational combination of reduced words.  The
recursion ``psi_expand`` sends it to a 2 x 2 matrix over the algebra: the
(i, j) entry collects ``coeff * g|_{v_i}`` over terms g with ``v_i . g = v_j``.
Iterating reaches the span of the nucleus {1, a, b, c, d}, where the kernel of
the representation is decided exactly.
"""
import logging
import random
import re
from collections import deque
from fractions import Fraction
from math import gcd
from typing import Dict, Iterator, List, Optional, Tuple, Union

from sympy import Matrix
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from src.config import get_settings
from src.errors import MalformedInputError, PreconditionError, check_cap
from src.grig_core import (
    GENERATORS,
    NUCLEUS_WORDS,
    GroupElement,
    as_element,
    equal,
    generator_tables,
    is_trivial,
    level_permutation,
    random_word,
    reduce_word,
    wreath,
    wreath_word,
)
from src.models import (
    AlgebraElementModel,
    AlgebraTerm,
    BlockEntry,
    BlockMatrixModel,
    KernelCertificate,
    LevelMatrixModel,
    MatrixEntry,
    ScalarEntry,
)

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]
Position = Tuple[int, int]


class AlgebraElement:
    """
    Finite rational combination of reduced words.

    Terms are keyed by normal form, zero coefficients are never stored, and
    ``==`` is formal equality of these maps.  Use :func:`group_reduce` to merge
    distinct words that are equal in the group.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[str, Scalar]] = None):
        merged: Dict[str, Fraction] = {}
        for word, coeff in (terms or {}).items():
            key = reduce_word(word)
            merged[key] = merged.get(key, Fraction(0)) + Fraction(coeff)
        self.terms: Dict[str, Fraction] = {w: c for w, c in merged.items() if c != 0}

    @classmethod
    def zero(cls) -> "AlgebraElement":
        return cls()

    @classmethod
    def scalar(cls, value: Scalar) -> "AlgebraElement":
        return cls({"": value})

    @classmethod
    def of(cls, g: Union[GroupElement, str], coeff: Scalar = 1) -> "AlgebraElement":
        return cls({as_element(g).word: coeff})

    @classmethod
    def parse(cls, text: str) -> "AlgebraElement":
        """Parse expressions like ``"a - da - ad + dad"`` or ``"(1-d)a(1-d)"``."""
        return _Parser(text).parse()

    @classmethod
    def from_model(cls, model: AlgebraElementModel) -> "AlgebraElement":
        acc = cls()
        for term in model.root:
            acc = acc + cls.of(GroupElement.parse(term.word), term.coeff)
        return acc

    def to_model(self) -> AlgebraElementModel:
        return AlgebraElementModel([AlgebraTerm(word=w, coeff=c) for w, c in self.sorted_terms()])

    def sorted_terms(self) -> List[Tuple[str, Fraction]]:
        return sorted(self.terms.items(), key=lambda item: (len(item[0]), item[0]))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, Fraction(0)) + c
        return _from_reduced(out)

    def __neg__(self) -> "AlgebraElement":
        return _from_reduced({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def __mul__(self, other: Union["AlgebraElement", int, Fraction]) -> "AlgebraElement":
        if not isinstance(other, AlgebraElement):
            return self.scale(other)
        out: Dict[str, Fraction] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = reduce_word(w1 + w2)
                out[w] = out.get(w, Fraction(0)) + c1 * c2
        return _from_reduced(out)

    def __rmul__(self, other: Union[int, Fraction]) -> "AlgebraElement":
        return self.scale(other)

    def scale(self, value: Scalar) -> "AlgebraElement":
        value = Fraction(value)
        return _from_reduced({w: c * value for w, c in self.terms.items()})

    def star(self) -> "AlgebraElement":
        # rational coefficients are self-conjugate
        return _from_reduced({reduce_word(w[::-1]): c for w, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, g: Union[GroupElement, str]) -> Fraction:
        return self.terms.get(as_element(g).word, Fraction(0))

    def in_nucleus_span(self) -> bool:
        return all(len(w) <= 1 for w in self.terms)

    def nucleus_coefficients(self) -> List[Fraction]:
        """Coefficients over (1, a, b, c, d); only meaningful inside the nucleus span."""
        return [self.terms.get(w, Fraction(0)) for w in NUCLEUS_WORDS]

    def scalar_value(self) -> Optional[Fraction]:
        """lambda if the element is lambda * 1 with lambda != 0."""
        if len(self.terms) == 1 and "" in self.terms:
            return self.terms[""]
        return None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AlgebraElement) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"AlgebraElement({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, (w, c) in enumerate(self.sorted_terms()):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if w == "":
                body = str(mag)
            elif mag == 1:
                body = w
            else:
                body = f"{mag}*{w}"
            if i == 0:
                parts.append(body if sign == "+" else f"-{body}")
            else:
                parts.append(f"{sign} {body}")
        return " ".join(parts)


def _from_reduced(terms: Dict[str, Fraction]) -> AlgebraElement:
    """Build from keys that are already reduced words."""
    x = AlgebraElement.__new__(AlgebraElement)
    x.terms = {w: c for w, c in terms.items() if c != 0}
    return x


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([abcd]+)|(.))")


class _Parser:
    """expr := term (('+'|'-') term)*, term := factor ('*'? factor)*"""

    def __init__(self, text: str):
        self.text = text
        self.tokens: List[Tuple[str, str]] = []
        for number, word, other in _TOKEN.findall(text):
            if number:
                self.tokens.append(("num", number))
            elif word:
                self.tokens.append(("word", word))
            elif other.strip():
                self.tokens.append(("op", other))
        self.pos = 0

    def _peek(self) -> Optional[Tuple[str, str]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _take(self) -> Tuple[str, str]:
        tok = self._peek()
        if tok is None:
            raise MalformedInputError(f"Unexpected end of expression: {self.text!r}")
        self.pos += 1
        return tok

    def parse(self) -> AlgebraElement:
        if not self.tokens:
            raise MalformedInputError("Empty algebra expression")
        value = self._expr()
        if self._peek() is not None:
            raise MalformedInputError(f"Unexpected token {self._peek()[1]!r} in {self.text!r}")
        return value

    def _expr(self) -> AlgebraElement:
        sign = 1
        if self._peek() in (("op", "-"), ("op", "+")):
            sign = -1 if self._take()[1] == "-" else 1
        value = self._term().scale(sign)
        while self._peek() in (("op", "+"), ("op", "-")):
            op = self._take()[1]
            rhs = self._term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _term(self) -> AlgebraElement:
        value = self._factor()
        while True:
            tok = self._peek()
            if tok == ("op", "*"):
                self._take()
                value = value * self._factor()
            elif tok is not None and (tok[0] in ("num", "word") or tok == ("op", "(")):
                value = value * self._factor()
            else:
                return value

    def _factor(self) -> AlgebraElement:
        kind, text = self._take()
        if kind == "num":
            try:
                return AlgebraElement.scalar(Fraction(text))
            except ZeroDivisionError as e:
                raise MalformedInputError(f"Zero denominator {text!r} in {self.text!r}") from e
        if kind == "word":
            return AlgebraElement.of(text)
        if text == "(":
            inner = self._expr()
            if self._take() != ("op", ")"):
                raise MalformedInputError(f"Unbalanced parentheses in {self.text!r}")
            return inner
        raise MalformedInputError(f"Unexpected token {text!r} in {self.text!r}")


def alg_add(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return x + y


def alg_mul(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return x * y


def alg_star(x: AlgebraElement) -> AlgebraElement:
    return x.star()


def group_reduce(x: AlgebraElement) -> AlgebraElement:
    """Merge terms whose words are equal in the group, keeping the shortest word."""
    classes: List[Tuple[str, Fraction]] = []
    for word, coeff in x.sorted_terms():
        for i, (rep, total) in enumerate(classes):
            if equal(rep, word):
                classes[i] = (rep, total + coeff)
                break
        else:
            classes.append((word, coeff))
    return _from_reduced(dict(classes))


def is_nonzero_in_group_algebra(x: AlgebraElement) -> bool:
    """True iff x survives merging terms that are equal in the group."""
    return not group_reduce(x).is_zero()


def random_algebra_element(rng: random.Random, max_terms: int = 5, max_length: int = 8) -> AlgebraElement:
    """Random element with up to max_terms terms and small integer coefficients."""
    acc = AlgebraElement.zero()
    for _ in range(rng.randint(1, max_terms)):
        coeff = rng.choice([-3, -2, -1, 1, 2, 3])
        acc = acc + AlgebraElement.of(random_word(rng, rng.randint(0, max_length)), coeff)
    return acc


# ---------------------------------------------------------------------------
# Block matrices and the recursion
# ---------------------------------------------------------------------------

class BlockMatrix:
    """Sparse 2**depth x 2**depth matrix with AlgebraElement entries."""

    __slots__ = ("depth", "entries")

    def __init__(self, depth: int, entries: Optional[Dict[Position, AlgebraElement]] = None):
        self.depth = depth
        size = 1 << depth
        self.entries: Dict[Position, AlgebraElement] = {}
        for (i, j), value in (entries or {}).items():
            if not (0 <= i < size and 0 <= j < size):
                raise MalformedInputError(f"Entry ({i}, {j}) outside a {size}x{size} block matrix")
            if not value.is_zero():
                self.entries[(i, j)] = value

    @property
    def size(self) -> int:
        return 1 << self.depth

    def get(self, i: int, j: int) -> AlgebraElement:
        return self.entries.get((i, j), AlgebraElement.zero())

    def items(self) -> Iterator[Tuple[Position, AlgebraElement]]:
        """Nonzero entries in row-major order."""
        for key in sorted(self.entries):
            yield key, self.entries[key]

    def is_zero(self) -> bool:
        return not self.entries

    def __add__(self, other: "BlockMatrix") -> "BlockMatrix":
        self._check_depth(other)
        out = dict(self.entries)
        for key, value in other.entries.items():
            out[key] = out.get(key, AlgebraElement.zero()) + value
        return BlockMatrix(self.depth, out)

    def __mul__(self, other: "BlockMatrix") -> "BlockMatrix":
        self._check_depth(other)
        by_row: Dict[int, List[Tuple[int, AlgebraElement]]] = {}
        for (j, k), value in other.entries.items():
            by_row.setdefault(j, []).append((k, value))
        out: Dict[Position, AlgebraElement] = {}
        for (i, j), left in self.entries.items():
            for k, right in by_row.get(j, []):
                out[(i, k)] = out.get((i, k), AlgebraElement.zero()) + left * right
        return BlockMatrix(self.depth, out)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BlockMatrix) and self.depth == other.depth and self.entries == other.entries

    def __repr__(self) -> str:
        body = ", ".join(f"({i},{j}): {v}" for (i, j), v in self.items())
        return f"BlockMatrix(depth={self.depth}, {{{body}}})"

    def _check_depth(self, other: "BlockMatrix") -> None:
        if self.depth != other.depth:
            raise MalformedInputError("Block matrices have different depths")

    def expand(self) -> "BlockMatrix":
        """Apply psi_expand entrywise; entry (i, j) spreads to rows 2i+r, columns 2j+c."""
        out: Dict[Position, AlgebraElement] = {}
        for (i, j), value in self.entries.items():
            for (r, c), sub in psi_expand(value).entries.items():
                out[(2 * i + r, 2 * j + c)] = sub
        return BlockMatrix(self.depth + 1, out)

    def to_model(self) -> BlockMatrixModel:
        return BlockMatrixModel(
            depth=self.depth,
            entries=[BlockEntry(row=i, col=j, value=v.to_model().root) for (i, j), v in self.items()],
        )

    @classmethod
    def from_model(cls, model: BlockMatrixModel) -> "BlockMatrix":
        return cls(
            model.depth,
            {(e.row, e.col): AlgebraElement.from_model(AlgebraElementModel(e.value)) for e in model.entries},
        )


def psi_expand(x: AlgebraElement) -> BlockMatrix:
    """The depth-1 matrix recursion of x."""
    out: Dict[Position, Dict[str, Fraction]] = {}
    for word, coeff in x.terms.items():
        w0, w1, active = wreath_word(word)
        for i, sec in ((0, w0), (1, w1)):
            cell = out.setdefault((i, i ^ int(active)), {})
            cell[sec] = cell.get(sec, Fraction(0)) + coeff
    return BlockMatrix(1, {key: _from_reduced(cell) for key, cell in out.items()})


def _depth_cap(cap: Optional[int]) -> int:
    return cap if cap is not None else get_settings().depth_cap


def psi_iterate(x: AlgebraElement, n: int, cap: Optional[int] = None) -> BlockMatrix:
    """The n-th iterate of the recursion as a 2**n x 2**n block matrix."""
    if n < 0:
        raise MalformedInputError("Depth must be non-negative")
    check_cap("depth_cap", _depth_cap(cap), n)
    m = BlockMatrix(0, {(0, 0): x})
    for _ in range(n):
        m = m.expand()
    return m


def _iterates_to_nucleus(x: AlgebraElement, cap: Optional[int]) -> List[BlockMatrix]:
    """All iterates psi^0(x), ..., psi^n(x) where n is the nucleus depth."""
    limit = _depth_cap(cap)
    m = BlockMatrix(0, {(0, 0): x})
    iterates = [m]
    while not all(v.in_nucleus_span() for v in m.entries.values()):
        check_cap("depth_cap", limit, m.depth + 1)
        m = m.expand()
        iterates.append(m)
    return iterates


def reduce_to_nucleus(x: AlgebraElement, cap: Optional[int] = None) -> Tuple[int, BlockMatrix]:
    """Least n such that every entry of psi^n(x) lies in the span of {1, a, b, c, d}."""
    final = _iterates_to_nucleus(x, cap)[-1]
    logger.debug("Reduced %s to the nucleus span at depth %d", x, final.depth)
    return final.depth, final


def is_zero_in_B(x: AlgebraElement, cap: Optional[int] = None) -> KernelCertificate:
    """
    Decide whether x lies in the kernel of the Koopman representation.

    The images of 1, a, b, c, d are linearly independent, so x is in the kernel
    exactly when every entry of its nucleus-depth expansion vanishes.

    Args:
        x: Element of the group algebra
        cap: Depth cap (defaults to the configured depth_cap)

    Returns:
        KernelCertificate with the reduction depth and, if x survives, one nonzero entry
    """
    depth, m = reduce_to_nucleus(x, cap)
    survivor = next(m.items(), None)
    if survivor is None:
        return KernelCertificate(in_kernel=True, depth=depth)
    (i, j), value = survivor
    return KernelCertificate(
        in_kernel=False,
        depth=depth,
        position=(i, j),
        coefficients=value.nucleus_coefficients(),
    )


def _first_scalar(m: BlockMatrix) -> Optional[ScalarEntry]:
    for (i, j), value in m.items():
        lam = value.scalar_value()
        if lam is not None:
            return ScalarEntry(depth=m.depth, row=i, col=j, value=lam)
    return None


def _nucleus_scalar_offset(y: AlgebraElement) -> Tuple[int, Position, Fraction]:
    """
    First scalar below a non-scalar nucleus-span entry y.

    Writing y = rho + xi a + beta b + gamma c + delta d, returns the number of
    further expansions r, the row-major first scalar position inside the
    2**r x 2**r block, and its value.
    """
    rho, xi, beta, gamma, delta = y.nucleus_coefficients()
    if beta + gamma == 0 and delta + rho != 0:
        return 1, (0, 0), delta + rho
    if xi != 0:
        return 1, (0, 1), xi
    if beta + gamma != 0:
        if delta + rho != 0:
            return 2, (0, 0), delta + rho
        return 2, (0, 1), beta + gamma
    # here y = beta (1 + b - c - d) + (beta + delta)(d - 1)
    if beta + delta != 0:
        return 3, (4, 4), -(beta + delta)
    return 4, (12, 12), 2 * beta


def find_scalar_entry(x: AlgebraElement, cap: Optional[int] = None) -> ScalarEntry:
    """
    Minimal-depth nonzero scalar entry of an iterate of x (row-major first at that depth).

    The expansions up to the nucleus depth are scanned directly; below that,
    each surviving nucleus-span entry is resolved by a case analysis on its
    coefficients and the shallowest candidate wins.  The witness is checked
    by direct expansion.
    """
    iterates = _iterates_to_nucleus(x, cap)
    final = iterates[-1]
    if final.is_zero():
        raise PreconditionError(f"{x} is in the kernel; no scalar entry exists", kind="in_kernel")

    for m in iterates:
        hit = _first_scalar(m)
        if hit is not None:
            return hit

    best: Optional[Tuple[int, int, int, Fraction]] = None
    for (s, t), y in final.items():
        r, (i, j), lam = _nucleus_scalar_offset(y)
        candidate = (final.depth + r, s * (1 << r) + i, t * (1 << r) + j, lam)
        if best is None or candidate[:3] < best[:3]:
            best = candidate
    depth, row, col, lam = best
    check_cap("depth_cap", _depth_cap(cap), depth)

    # verify on the single block that produced the witness
    r = depth - final.depth
    s, t = row >> r, col >> r
    block = BlockMatrix(0, {(0, 0): final.get(s, t)})
    for _ in range(r):
        block = block.expand()
    mask = (1 << r) - 1
    if block.get(row & mask, col & mask).scalar_value() != lam:
        raise RuntimeError(f"scalar witness for {x} failed verification")
    return ScalarEntry(depth=depth, row=row, col=col, value=lam)


def scan_scalar_entry(x: AlgebraElement, cap: Optional[int] = None) -> ScalarEntry:
    """Reference search: expand depth by depth and return the first scalar entry found."""
    if is_zero_in_B(x, cap).in_kernel:
        raise PreconditionError(f"{x} is in the kernel; no scalar entry exists", kind="in_kernel")
    limit = _depth_cap(cap)
    m = BlockMatrix(0, {(0, 0): x})
    while True:
        hit = _first_scalar(m)
        if hit is not None:
            return hit
        check_cap("depth_cap", limit, m.depth + 1)
        m = m.expand()


# ---------------------------------------------------------------------------
# Finite-level representations
# ---------------------------------------------------------------------------

def _qq(value: Fraction):
    return QQ(value.numerator, value.denominator)


class LevelMatrix:
    """Exact rational 2**n x 2**n matrix of a level-n representation (sympy DomainMatrix over QQ)."""

    __slots__ = ("n", "rep")

    def __init__(self, n: int, rep: DomainMatrix):
        self.n = n
        self.rep = rep.to_sparse()

    @classmethod
    def from_dict(cls, n: int, cells: Dict[Position, Fraction]) -> "LevelMatrix":
        rows: Dict[int, Dict[int, object]] = {}
        for (i, j), value in cells.items():
            if value != 0:
                rows.setdefault(i, {})[j] = _qq(value)
        size = 1 << n
        return cls(n, DomainMatrix(rows, (size, size), QQ))

    @classmethod
    def identity(cls, n: int) -> "LevelMatrix":
        return cls.from_dict(n, {(i, i): Fraction(1) for i in range(1 << n)})

    @property
    def size(self) -> int:
        return 1 << self.n

    def __mul__(self, other: "LevelMatrix") -> "LevelMatrix":
        return LevelMatrix(self.n, self.rep.matmul(other.rep))

    def __add__(self, other: "LevelMatrix") -> "LevelMatrix":
        return LevelMatrix(self.n, self.rep.add(other.rep))

    def transpose(self) -> "LevelMatrix":
        return LevelMatrix(self.n, self.rep.transpose())

    def is_zero(self) -> bool:
        return self.rep.is_zero_matrix

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LevelMatrix) or self.n != other.n:
            return False
        return self.rep.sub(other.rep).is_zero_matrix

    def cells(self) -> Dict[Position, Fraction]:
        out = {}
        for i, row in self.rep.to_dod().items():
            for j, value in row.items():
                out[(i, j)] = Fraction(int(value.numerator), int(value.denominator))
        return out

    def to_rows(self) -> List[List[Fraction]]:
        rows = [[Fraction(0)] * self.size for _ in range(self.size)]
        for (i, j), value in self.cells().items():
            rows[i][j] = value
        return rows

    def to_model(self) -> LevelMatrixModel:
        return LevelMatrixModel(
            level=self.n,
            size=self.size,
            entries=[MatrixEntry(row=i, col=j, value=v) for (i, j), v in sorted(self.cells().items())],
        )

    def __repr__(self) -> str:
        return f"LevelMatrix(n={self.n}, nnz={len(self.cells())})"


def _accumulate_level(cells: Dict[Position, Fraction], x: AlgebraElement, n: int, row0: int, col0: int) -> None:
    tables = generator_tables(n)
    for word, coeff in x.terms.items():
        perm = list(range(1 << n))
        for letter in word:
            t = tables[letter]
            perm = [int(t[p]) for p in perm]
        for i, j in enumerate(perm):
            key = (row0 + i, col0 + j)
            cells[key] = cells.get(key, Fraction(0)) + coeff


def _level_cap(cap: Optional[int]) -> int:
    return cap if cap is not None else get_settings().matrix_level_cap


def pi_level(x: AlgebraElement, n: int, cap: Optional[int] = None) -> LevelMatrix:
    """pi_n(x): entry (i, j) is the total coefficient of words sending v_i to v_j."""
    if n < 0:
        raise MalformedInputError("Level must be non-negative")
    check_cap("matrix_level_cap", _level_cap(cap), n)
    cells: Dict[Position, Fraction] = {}
    _accumulate_level(cells, x, n, 0, 0)
    return LevelMatrix.from_dict(n, cells)


def realize_block(block: BlockMatrix, n: int, cap: Optional[int] = None) -> LevelMatrix:
    """Apply pi_n to every entry of a block matrix and assemble the level-(depth + n) matrix."""
    total = block.depth + n
    check_cap("matrix_level_cap", _level_cap(cap), total)
    size = 1 << n
    cells: Dict[Position, Fraction] = {}
    for (i, j), value in block.entries.items():
        _accumulate_level(cells, value, n, i * size, j * size)
    return LevelMatrix.from_dict(total, cells)


def commutant_dimension(n: int, cap: Optional[int] = None) -> int:
    """Number of orbits of the level-n action on ordered pairs of vertices."""
    if n < 1:
        raise MalformedInputError("Level must be at least 1")
    check_cap("matrix_level_cap", _level_cap(cap), n)
    size = 1 << n
    gens = [[int(v) for v in level_permutation(x, n).perm] for x in GENERATORS]
    seen = bytearray(size * size)
    orbitals = 0
    for start in range(size * size):
        if seen[start]:
            continue
        orbitals += 1
        seen[start] = 1
        queue = deque([start])
        while queue:
            pair = queue.popleft()
            i, j = divmod(pair, size)
            for p in gens:
                nxt = p[i] * size + p[j]
                if not seen[nxt]:
                    seen[nxt] = 1
                    queue.append(nxt)
    logger.debug("Level %d action has %d orbitals", n, orbitals)
    return orbitals


def _nucleus_stack(n: int, cap: Optional[int]) -> DomainMatrix:
    """5 x 4**n matrix whose rows are the flattened images of 1, a, b, c, d."""
    check_cap("matrix_level_cap", _level_cap(cap), n)
    size = 1 << n
    rows: Dict[int, Dict[int, object]] = {}
    for r, word in enumerate(NUCLEUS_WORDS):
        perm = level_permutation(word, n).perm
        rows[r] = {i * size + int(perm[i]): QQ(1) for i in range(size)}
    return DomainMatrix(rows, (len(NUCLEUS_WORDS), size * size), QQ)


def nucleus_rank_at_level(n: int, cap: Optional[int] = None) -> int:
    """Rank of {pi_n(1), pi_n(a), pi_n(b), pi_n(c), pi_n(d)}."""
    return int(_nucleus_stack(n, cap).rank())


def nucleus_relations_at_level(n: int, cap: Optional[int] = None) -> List[AlgebraElement]:
    """Basis of the linear relations among the five nucleus images, as primitive integer combinations."""
    stack = _nucleus_stack(n, cap)
    basis: List[Matrix] = stack.transpose().to_Matrix().nullspace()
    relations = []
    for vec in basis:
        coeffs = [Fraction(int(v.p), int(v.q)) for v in vec]
        relations.append(AlgebraElement(dict(zip(NUCLEUS_WORDS, _primitive(coeffs)))))
    return relations


def _primitive(coeffs: List[Fraction]) -> List[Fraction]:
    """Scale to coprime integers with a positive leading coefficient."""
    lcm = 1
    for c in coeffs:
        lcm = lcm * c.denominator // gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in coeffs]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    g = g or 1
    lead = next((v for v in ints if v != 0), 1)
    sign = 1 if lead > 0 else -1
    return [Fraction(sign * v // g) for v in ints]


# ---------------------------------------------------------------------------
# Kernel constructions
# ---------------------------------------------------------------------------

def rigid_kernel_element(g1: Union[GroupElement, str], g2: Union[GroupElement, str]) -> AlgebraElement:
    """
    (1 - g1)(1 - g2) for rigid-stabiliser elements of the two level-1 vertices.

    Raises:
        PreconditionError: naming the rigid-stabiliser condition that fails
    """
    g1, g2 = as_element(g1), as_element(g2)
    for name, g, own in (("g1", g1, 0), ("g2", g2, 1)):
        if is_trivial(g):
            raise PreconditionError(f"{name} = {g} is trivial", kind="not_rigid")
        image = wreath(g)
        if image.active:
            raise PreconditionError(f"{name} = {g} is active at the root", kind="not_rigid")
        outside = image.second if own == 0 else image.first
        if not is_trivial(outside):
            raise PreconditionError(
                f"{name} = {g} acts nontrivially on the subtree at vertex {1 - own}", kind="not_rigid"
            )

    one = AlgebraElement.scalar(1)
    x = (one - AlgebraElement.of(g1)) * (one - AlgebraElement.of(g2))
    words = [GroupElement(), g1, g2, g1 * g2]
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            if equal(words[i], words[j]):
                raise PreconditionError(f"{words[i]} and {words[j]} coincide in the group", kind="not_rigid")
    return x


def delta_generator(k: Union[GroupElement, str]) -> AlgebraElement:
    """k - 1."""
    return AlgebraElement.of(k) - AlgebraElement.scalar(1)


def delta_square_generator(k1: Union[GroupElement, str], k2: Union[GroupElement, str]) -> AlgebraElement:
    """(k1 - 1)(k2 - 1)."""
    return delta_generator(k1) * delta_generator(k2)


def commutator_identity_holds(k1: Union[GroupElement, str], k2: Union[GroupElement, str]) -> bool:
    """Check [k1, k2] - 1 = k1^-1 k2^-1 ((k1-1)(k2-1) - (k2-1)(k1-1)) in the group algebra."""
    k1, k2 = as_element(k1), as_element(k2)
    commutator = k1.inverse() * k2.inverse() * k1 * k2
    lhs = delta_generator(commutator)
    inner = delta_square_generator(k1, k2) - delta_square_generator(k2, k1)
    rhs = AlgebraElement.of(k1.inverse() * k2.inverse()) * inner
    return group_reduce(lhs - rhs).is_zero()

