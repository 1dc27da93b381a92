"""
The first Grigorchuk group acting on the rooted binary tree.

Elements are reduced words over {a, b, c, d}.  Words act on the tree from the
right: in ``gh`` the element ``g`` acts first, so the wreath recursion
multiplies as ``(g0, g1, s)(h0, h1, t) = (g0 h_{s(0)}, g1 h_{s(1)}, s xor t)``.
Level-n vertices are indexed lexicographically with the first letter most
significant.
"""
import itertools
import logging
import random
import threading
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from sympy.combinatorics import Permutation, PermutationGroup

from src.config import get_settings
from src.errors import MalformedInputError, check_cap

logger = logging.getLogger(__name__)

GENERATORS = ("a", "b", "c", "d")
KLEIN = ("b", "c", "d")
NUCLEUS_WORDS = ("", "a", "b", "c", "d")

# product of two distinct letters of the Klein four-group {1, b, c, d}
_KLEIN_PRODUCT = {
    "bc": "d", "cb": "d",
    "bd": "c", "db": "c",
    "cd": "b", "dc": "b",
}

# psi(x) = (section at 0, section at 1, root swap)
_WREATH_TABLE: Dict[str, Tuple[str, str, bool]] = {
    "a": ("", "", True),
    "b": ("a", "c", False),
    "c": ("a", "d", False),
    "d": ("", "b", False),
}

# substitution a -> aca, b -> d, c -> b, d -> c
_SIGMA = {"a": "aca", "b": "d", "c": "b", "d": "c"}

# g -> element of St(1) whose first section is g
_LIFT_FIRST = {"a": "b", "b": "ada", "c": "aba", "d": "aca"}


def reduce_word(letters: Iterable[str]) -> str:
    """Stack rewrite with xx -> 1 and uv -> Klein product for u, v in {b, c, d}."""
    out: List[str] = []
    for x in letters:
        if x not in _WREATH_TABLE:
            raise MalformedInputError(f"Invalid generator {x!r}; words are over 'abcd'")
        if out and out[-1] == x:
            out.pop()
        elif out and x != "a" and out[-1] != "a":
            out.append(_KLEIN_PRODUCT[out.pop() + x])
        else:
            out.append(x)
    return "".join(out)


class GroupElement:
    """
    An element of the group, stored as its reduced word.

    ``==`` and ``hash`` compare reduced words.  Two different reduced words
    can still be the same group element; use :func:`equal` for that.
    """

    __slots__ = ("word",)

    def __init__(self, word: Union[str, Sequence[str]] = ""):
        self.word = reduce_word(word)

    @classmethod
    def parse(cls, text: str) -> "GroupElement":
        """Parse a word; ``""``, ``"1"`` and ``"e"`` denote the identity."""
        cleaned = "".join(text.split())
        if cleaned in ("1", "e"):
            cleaned = ""
        return cls(cleaned)

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls("")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.word + other.word)

    def __pow__(self, k: int) -> "GroupElement":
        if k < 0:
            return self.inverse() ** (-k)
        return GroupElement(self.word * k)

    def inverse(self) -> "GroupElement":
        # every generator is an involution
        return GroupElement(self.word[::-1])

    def __len__(self) -> int:
        return len(self.word)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GroupElement) and self.word == other.word

    def __hash__(self) -> int:
        return hash(self.word)

    def __repr__(self) -> str:
        return f"GroupElement({self.word!r})"

    def __str__(self) -> str:
        return self.word or "1"

    def is_identity_word(self) -> bool:
        return self.word == ""


class WreathImage(NamedTuple):
    """psi(g) = (first, second, active) in (G x G) semidirect Z/2."""
    first: GroupElement
    second: GroupElement
    active: bool

    def __mul__(self, other: "WreathImage") -> "WreathImage":
        if self.active:
            h0, h1 = other.second, other.first
        else:
            h0, h1 = other.first, other.second
        return WreathImage(self.first * h0, self.second * h1, self.active != other.active)

    def sections(self) -> Tuple[GroupElement, GroupElement]:
        return self.first, self.second


class LevelPermutation:
    """
    Permutation of the 2**n level-n vertices.

    ``perm[i]`` is the index of the image of vertex i.  ``p * q`` applies p
    first, then q.
    """

    __slots__ = ("n", "perm")

    def __init__(self, n: int, perm: Union[Sequence[int], np.ndarray]):
        arr = np.asarray(perm, dtype=np.int64)
        if n < 0 or arr.shape != (1 << n,):
            raise MalformedInputError(f"Level {n} permutation needs {1 << max(n, 0)} entries")
        if not np.array_equal(np.sort(arr), np.arange(1 << n)):
            raise MalformedInputError("Not a bijection of the level vertices")
        self.n = n
        self.perm = arr

    def __mul__(self, other: "LevelPermutation") -> "LevelPermutation":
        if self.n != other.n:
            raise MalformedInputError("Cannot compose permutations of different levels")
        return LevelPermutation(self.n, other.perm[self.perm])

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, LevelPermutation)
            and self.n == other.n
            and bool(np.array_equal(self.perm, other.perm))
        )

    def __hash__(self) -> int:
        return hash((self.n, self.perm.tobytes()))

    def __repr__(self) -> str:
        return f"LevelPermutation({self.n}, {self.to_list()})"

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.perm, np.arange(1 << self.n)))

    def to_list(self) -> List[int]:
        return [int(v) for v in self.perm]

    def to_sympy(self) -> Permutation:
        return Permutation(self.to_list())


def as_element(g: Union[GroupElement, str]) -> GroupElement:
    """Accept either a GroupElement or a word string."""
    if isinstance(g, GroupElement):
        return g
    return GroupElement.parse(g)


def normalize(letters: Union[str, Sequence[str]]) -> GroupElement:
    """Reduced normal form of a letter sequence."""
    return GroupElement(letters)


# ---------------------------------------------------------------------------
# Wreath recursion and sections
# ---------------------------------------------------------------------------

def wreath_word(word: str) -> Tuple[str, str, bool]:
    """Fold the generator table along the word; sections come back reduced."""
    left: List[str] = []
    right: List[str] = []
    active = False
    for x in word:
        h0, h1, swap = _WREATH_TABLE[x]
        if active:
            h0, h1 = h1, h0
        left.append(h0)
        right.append(h1)
        active = active != swap
    return reduce_word("".join(left)), reduce_word("".join(right)), active


def wreath(g: Union[GroupElement, str]) -> WreathImage:
    """psi(g) as (section at 0, section at 1, root activity)."""
    g = as_element(g)
    w0, w1, active = wreath_word(g.word)
    return WreathImage(GroupElement(w0), GroupElement(w1), active)


def section(g: Union[GroupElement, str], v: str) -> GroupElement:
    """The section g|_v for a binary string v (the empty string gives g)."""
    word = as_element(g).word
    for bit in v:
        if bit not in "01":
            raise MalformedInputError(f"Vertex {v!r} is not a binary string")
        w0, w1, _ = wreath_word(word)
        word = w0 if bit == "0" else w1
    return GroupElement(word)


def vertex_image(g: Union[GroupElement, str], v: str) -> str:
    """The image v.g of a vertex."""
    word = as_element(g).word
    out = []
    for bit in v:
        if bit not in "01":
            raise MalformedInputError(f"Vertex {v!r} is not a binary string")
        w0, w1, active = wreath_word(word)
        out.append(str(int(bit) ^ int(active)))
        word = w0 if bit == "0" else w1
    return "".join(out)


def is_in_nucleus(g: Union[GroupElement, str]) -> bool:
    """Whether g is one of 1, a, b, c, d."""
    return len(as_element(g)) <= 1


def nucleus_sections_closed() -> bool:
    """Every first-level section of a nucleus element is again in the nucleus."""
    for word in NUCLEUS_WORDS:
        w0, w1, _ = wreath_word(word)
        if len(w0) > 1 or len(w1) > 1:
            return False
    return True


# ---------------------------------------------------------------------------
# Word problem
# ---------------------------------------------------------------------------

_cache_lock = threading.Lock()
_trivial_fn = None
_trivial_fn_size: Optional[int] = None


def _trivial_word(word: str) -> bool:
    if len(word) <= 1:
        return word == ""
    w0, w1, active = wreath_word(word)
    if active:
        return False
    check = _cached_trivial()
    return check(w0) and check(w1)


def _cached_trivial():
    """The memoized word-problem function, rebuilt when the cache bound changes."""
    global _trivial_fn, _trivial_fn_size
    size = get_settings().trivial_cache_size
    if _trivial_fn is None or _trivial_fn_size != size:
        with _cache_lock:
            if _trivial_fn is None or _trivial_fn_size != size:
                logger.debug("Building word-problem cache with maxsize=%d", size)
                _trivial_fn = lru_cache(maxsize=size)(_trivial_word)
                _trivial_fn_size = size
    return _trivial_fn


def clear_trivial_cache() -> None:
    """Drop the memoised word-problem answers."""
    with _cache_lock:
        if _trivial_fn is not None:
            _trivial_fn.cache_clear()


def is_trivial(g: Union[GroupElement, str]) -> bool:
    """Decide g = 1 by recursing on sections until they fall into the nucleus."""
    return _cached_trivial()(as_element(g).word)


def equal(g: Union[GroupElement, str], h: Union[GroupElement, str]) -> bool:
    """Decide g = h in the group."""
    g, h = as_element(g), as_element(h)
    if g.word == h.word:
        return True
    return is_trivial(g * h.inverse())


def order(g: Union[GroupElement, str], max_exponent: int = 12) -> Optional[int]:
    """
    Order of g by repeated squaring.

    Returns:
        The least 2**k with g**(2**k) = 1, or None when k would exceed max_exponent
    """
    if max_exponent < 1:
        raise MalformedInputError("max_exponent must be at least 1")
    h = as_element(g)
    for k in range(max_exponent + 1):
        if is_trivial(h):
            return 1 << k
        h = h * h
    return None


# ---------------------------------------------------------------------------
# Finite-level actions
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def generator_tables(n: int) -> Dict[str, np.ndarray]:
    """Level-n permutation arrays of 1, a, b, c, d (read-only)."""
    if n == 0:
        ident = np.zeros(1, dtype=np.int64)
        ident.setflags(write=False)
        return {w: ident for w in NUCLEUS_WORDS}
    below = generator_tables(n - 1)
    half = 1 << (n - 1)
    tables: Dict[str, np.ndarray] = {}
    for word in NUCLEUS_WORDS:
        if word == "":
            arr = np.arange(1 << n, dtype=np.int64)
        else:
            h0, h1, swap = _WREATH_TABLE[word]
            arr = np.empty(1 << n, dtype=np.int64)
            for bit, sec in ((0, h0), (1, h1)):
                target = (bit ^ int(swap)) * half
                arr[bit * half:(bit + 1) * half] = target + below[sec]
        arr.setflags(write=False)
        tables[word] = arr
    return tables


def level_permutation(g: Union[GroupElement, str], n: int) -> LevelPermutation:
    """The permutation of the level-n vertices induced by g."""
    if n < 0:
        raise MalformedInputError("Level must be non-negative")
    tables = generator_tables(n)
    perm = np.arange(1 << n, dtype=np.int64)
    for x in as_element(g).word:
        perm = tables[x][perm]
    return LevelPermutation(n, perm)


def level_group(n: int, cap: Optional[int] = None) -> PermutationGroup:
    """The level-n quotient as a sympy permutation group."""
    limit = cap if cap is not None else get_settings().group_level_cap
    check_cap("group_level_cap", limit, n)
    if n < 1:
        raise MalformedInputError("Level must be at least 1")
    gens = [level_permutation(x, n).to_sympy() for x in GENERATORS]
    return PermutationGroup(gens)


def level_quotient_order(n: int, cap: Optional[int] = None) -> int:
    """|G : St_G(n)|, via Schreier-Sims on the four generator permutations."""
    group = level_group(n, cap)
    result = int(group.order())
    logger.info("Level %d quotient has order %d", n, result)
    return result


def enumerate_level_quotient(n: int, max_elements: int = 1 << 16, cap: Optional[int] = None) -> int:
    """
    Order of the level-n quotient by explicit breadth-first closure.

    Args:
        n: Level
        max_elements: Abort with ResourceCapError beyond this many elements
        cap: Level cap (defaults to the configured group_level_cap)

    Returns:
        The number of distinct level-n permutations in the group
    """
    limit = cap if cap is not None else get_settings().group_level_cap
    check_cap("group_level_cap", limit, n)
    if n < 1:
        raise MalformedInputError("Level must be at least 1")
    gens = [generator_tables(n)[x] for x in GENERATORS]
    start = np.arange(1 << n, dtype=np.int64)
    seen = {start.tobytes()}
    frontier = [start]
    while frontier:
        nxt = []
        for p in frontier:
            for t in gens:
                q = t[p]
                key = q.tobytes()
                if key not in seen:
                    seen.add(key)
                    check_cap("max_elements", max_elements, len(seen))
                    nxt.append(q)
        frontier = nxt
    logger.debug("Level %d BFS closure reached %d elements", n, len(seen))
    return len(seen)


def normal_closure_index(g: Union[GroupElement, str], n: int, cap: Optional[int] = None) -> int:
    """Index of the normal closure of the image of g in the level-n quotient."""
    group = level_group(n, cap)
    perm = level_permutation(g, n)
    if perm.is_identity():
        return int(group.order())
    closure = group.normal_closure(perm.to_sympy())
    index = int(group.order()) // int(closure.order())
    logger.info("Normal closure of %s at level %d has index %d", as_element(g), n, index)
    return index


# ---------------------------------------------------------------------------
# Self-replication
# ---------------------------------------------------------------------------

def lift_first(f: Union[GroupElement, str]) -> GroupElement:
    """An element of St(1) whose section at vertex 0 is f."""
    f = as_element(f)
    g = GroupElement("".join(_LIFT_FIRST[x] for x in f.word))
    image = wreath(g)
    if image.active or not equal(image.first, f):
        raise RuntimeError(f"lift of {f} failed its postcondition")
    return g


def lift_second(f: Union[GroupElement, str]) -> GroupElement:
    """An element of St(1) whose section at vertex 1 is f (conjugate of lift_first by a)."""
    a = GroupElement("a")
    return a * lift_first(f) * a


def sigma(g: Union[GroupElement, str, Sequence[str]]) -> GroupElement:
    """The substitution a -> aca, b -> d, c -> b, d -> c applied to the raw letters."""
    letters = g.word if isinstance(g, GroupElement) else "".join(g)
    bad = [x for x in letters if x not in _SIGMA]
    if bad:
        raise MalformedInputError(f"Invalid generator {bad[0]!r}; words are over 'abcd'")
    return GroupElement("".join(_SIGMA[x] for x in letters))


def sigma_power(g: Union[GroupElement, str], k: int) -> GroupElement:
    """Apply the substitution sigma k times."""
    h = as_element(g)
    for _ in range(k):
        h = sigma(h)
    return h


def lysenok_relators(k_max: int = 4) -> List[Tuple[str, GroupElement]]:
    """The relators sigma^k((ad)^4) and sigma^k((adacac)^4) for k = 0..k_max, labelled."""
    relators = []
    for k in range(k_max + 1):
        relators.append((f"sigma^{k}((ad)^4)", sigma_power("ad" * 4, k)))
        relators.append((f"sigma^{k}((adacac)^4)", sigma_power("adacac" * 4, k)))
    return relators


def iter_reduced_words(length: int) -> Iterator[str]:
    """All reduced words of exactly the given length, in lexicographic order."""
    if length == 0:
        yield ""
        return
    words = []
    for start_with_a in (True, False):
        klein_slots = length // 2 if start_with_a else (length + 1) // 2
        for choice in itertools.product(KLEIN, repeat=klein_slots):
            letters = []
            it = iter(choice)
            for i in range(length):
                letters.append("a" if (i % 2 == 0) == start_with_a else next(it))
            words.append("".join(letters))
    yield from sorted(words)


def random_word(rng: random.Random, length: int) -> GroupElement:
    """A uniformly chosen reduced word of exactly the given length."""
    if length <= 0:
        return GroupElement.identity()
    start_with_a = rng.random() < 0.5
    letters = []
    for i in range(length):
        letters.append("a" if (i % 2 == 0) == start_with_a else rng.choice(KLEIN))
    return GroupElement("".join(letters))


def search_replication_witness(
    k: Union[GroupElement, str] = "abab",
    max_length: int = 10,
    level: int = 4,
) -> Optional[Tuple[GroupElement, bool]]:
    """
    Bounded search for w with psi(w) = (k, 1).

    Words are tried by increasing length.  For the first hit the image of w
    at the given level is tested for membership in the normal closure of the
    image of k.

    Returns:
        (w, in_closure_at_level), or None when no word up to max_length works
    """
    k = as_element(k)
    for length in range(max_length + 1):
        for word in iter_reduced_words(length):
            w0, w1, active = wreath_word(word)
            if active or not is_trivial(w1) or not equal(w0, k):
                continue
            w = GroupElement(word)
            group = level_group(level)
            target = level_permutation(k, level)
            if target.is_identity():
                member = level_permutation(w, level).is_identity()
            else:
                closure = group.normal_closure(target.to_sympy())
                member = bool(closure.contains(level_permutation(w, level).to_sympy()))
            logger.info("Replication witness for %s: %s (in closure at level %d: %s)", k, w, level, member)
            return w, member
    return None


def is_rigid_at(g: Union[GroupElement, str], vertex: int) -> bool:
    """True if g is nontrivial and acts trivially outside the subtree at the level-1 vertex."""
    image = wreath(g)
    if image.active:
        return False
    other = image.second if vertex == 0 else image.first
    own = image.first if vertex == 0 else image.second
    return is_trivial(other) and not is_trivial(own)


def find_rigid_elements(vertex: int, max_length: int = 6) -> List[GroupElement]:
    """Pairwise distinct rigid-stabiliser elements of a level-1 vertex, up to a word length."""
    if vertex not in (0, 1):
        raise MalformedInputError("vertex must be 0 or 1")
    found: List[GroupElement] = []
    for length in range(1, max_length + 1):
        for word in iter_reduced_words(length):
            if not is_rigid_at(word, vertex):
                continue
            g = GroupElement(word)
            if not any(equal(g, h) for h in found):
                found.append(g)
    return found
