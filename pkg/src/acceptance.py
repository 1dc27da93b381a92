"""
The acceptance battery run by ``justinf verify-paper``.

Every check is exact and deterministic for a given seed.
"""
import logging
import random
from typing import Callable, List, Optional, Tuple

from src.bratteli import (
    build_strictly_rfd,
    build_y_infty,
    column_ideal,
    compare_with_formula,
    ideal_from_open_set,
    limit_dimension,
    primitive_quotient_sizes,
    quotient,
)
from src.dimension_group import (
    is_positive,
    is_positive_by_pushforward,
    order_unit,
    random_element,
    rho_model,
)
from src.errors import JustInfError
from src.grig_core import equal, is_trivial, lysenok_relators, normal_closure_index, random_word
from src.matrix_recursion import (
    AlgebraElement,
    commutant_dimension,
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
    rigid_kernel_element,
    scan_scalar_entry,
)
from src.models import CheckResult, VerificationReport
from src.primspace import FiniteSpace, build_Yn, build_two_copies, classify_Yn, is_lattice, is_spectral, is_t0

logger = logging.getLogger(__name__)

Check = Callable[[random.Random], Tuple[bool, str]]

CHECKS: List[Tuple[str, str, Check]] = []


def check(check_id: str, title: str):
    """Register a function as acceptance check check_id."""
    def register(fn: Check) -> Check:
        CHECKS.append((check_id, title, fn))
        return fn
    return register


@check("AC1", "kernel element (1-d)a(1-d)")
def _kernel_element(rng: random.Random) -> Tuple[bool, str]:
    x = AlgebraElement.parse("(1 - d) a (1 - d)")
    cert = is_zero_in_B(x)
    words = ["a", "da", "ad", "dad"]
    distinct = all(not equal(u, v) for i, u in enumerate(words) for v in words[i + 1:])
    return cert.in_kernel and cert.depth == 1 and distinct, f"in_kernel={cert.in_kernel} depth={cert.depth} distinct={distinct}"


@check("AC2", "presentation relators and nontrivial generators")
def _presentation(rng: random.Random) -> Tuple[bool, str]:
    failing = [label for label, g in lysenok_relators(4) if not is_trivial(g)]
    nontrivial = all(not is_trivial(w) for w in ("a", "b", "c", "d", "ab", "ad"))
    klein = equal("d", "bc")
    return not failing and nontrivial and klein, f"failing relators={failing} nontrivial={nontrivial} d=bc={klein}"


@check("AC3", "pi_level is multiplicative and agrees with the matrix recursion")
def _representation_laws(rng: random.Random) -> Tuple[bool, str]:
    for trial in range(200):
        x = random_algebra_element(rng)
        y = random_algebra_element(rng)
        n = rng.randint(0, 5)
        if pi_level(x * y, n) != pi_level(x, n) * pi_level(y, n):
            return False, f"multiplicativity fails at trial {trial}, level {n}: x={x}, y={y}"
        if n >= 1 and pi_level(x, n) != realize_block(psi_expand(x), n - 1):
            return False, f"recursion mismatch at trial {trial}, level {n}: x={x}"
    return True, "200 random pairs"


@check("AC4", "commutant dimension n+1")
def _commutant(rng: random.Random) -> Tuple[bool, str]:
    dims = [commutant_dimension(n) for n in range(1, 7)]
    return dims == [n + 1 for n in range(1, 7)], f"dims={dims}"


@check("AC5", "nucleus independence and the surviving scalar of 1+b-c-d")
def _nucleus(rng: random.Random) -> Tuple[bool, str]:
    r3, r4 = nucleus_rank_at_level(3), nucleus_rank_at_level(4)
    relation = AlgebraElement.parse("1 + b - c - d")
    relations = nucleus_relations_at_level(3)
    cert = is_zero_in_B(relation)
    hit = find_scalar_entry(relation)
    ok = (
        r3 == 4 and r4 == 5
        and relations == [relation]
        and not cert.in_kernel
        and hit.value == 2
        and psi_iterate(relation, 3).get(6, 6) == AlgebraElement.parse("2 - 2a")
    )
    return ok, f"rank3={r3} rank4={r4} scalar={hit.value} at depth {hit.depth} ({hit.row},{hit.col})"


@check("AC6", "case-analysis scalar search agrees with the depth scan")
def _scalar_search(rng: random.Random) -> Tuple[bool, str]:
    tested = 0
    while tested < 50:
        x = random_algebra_element(rng)
        if not is_nonzero_in_group_algebra(x) or is_zero_in_B(x).in_kernel:
            continue
        fast, slow = find_scalar_entry(x), scan_scalar_entry(x)
        for hit in (fast, slow):
            if psi_iterate(x, hit.depth).get(hit.row, hit.col).scalar_value() != hit.value:
                return False, f"witness {hit} for {x} fails direct expansion"
        if fast.depth != slow.depth:
            return False, f"depth mismatch for {x}: search {fast.depth}, scan {slow.depth}"
        tested += 1
    return True, "50 random elements"


@check("AC7", "Bratteli quotients and primitive quotient sizes")
def _quotients(rng: random.Random) -> Tuple[bool, str]:
    d = build_y_infty(9)
    q2 = limit_dimension(quotient(d, ideal_from_open_set(d, [2])))
    q13 = limit_dimension(quotient(d, ideal_from_open_set(d, [1, 3])))
    rfd = build_strictly_rfd(6)
    q3 = limit_dimension(quotient(rfd, column_ideal(rfd, 3)))
    sizes = primitive_quotient_sizes(d, 8)
    expected = [1, 1] + [1 << (j - 2) for j in range(3, 9)]
    ok = q2.dims == [1] and q13.dims == [1, 2] and q3.dims == [4] and sizes == expected
    return ok, f"B/U(Y-{{2}})={q2.dims} B/U(Y-{{1,3}})={q13.dims} B/I_3={q3.dims} k={sizes}"


@check("AC8", "brute-force ideal lattice matches the open-set formula")
def _ideal_lattice(rng: random.Random) -> Tuple[bool, str]:
    report = compare_with_formula(build_y_infty(3), 3)
    ok = report.discrepancies == 0 and report.matched == report.formula_ideals
    return ok, f"enumerated={report.enumerated} formula={report.formula_ideals} artifacts={len(report.artifacts)}"


@check("AC9", "order unit and positivity oracle")
def _dimension_group(rng: random.Random) -> Tuple[bool, str]:
    unit = rho_model(order_unit()).terms(6)
    if unit != [1, 1, 2, 4, 8, 16]:
        return False, f"order unit model {unit}"
    for trial in range(200):
        x = random_element(rng)
        if is_positive(x) != is_positive_by_pushforward(x, 12):
            return False, f"positivity disagrees at trial {trial}: {x.vector}"
    return True, "200 random elements"


@check("AC10", "normal closure of (ab)^2 has index 16")
def _index_sixteen(rng: random.Random) -> Tuple[bool, str]:
    indices = [normal_closure_index("abab", n) for n in (4, 5)]
    return indices == [16, 16], f"indices={indices}"


@check("AC11", "rigid-stabiliser kernel element")
def _rigid_kernel(rng: random.Random) -> Tuple[bool, str]:
    x = rigid_kernel_element("ada", "d")
    if not is_nonzero_in_group_algebra(x) or not is_zero_in_B(x).in_kernel:
        return False, f"{x} is zero or not in the kernel"
    for trial in range(20):
        g = AlgebraElement.of(random_word(rng, rng.randint(0, 8)))
        h = AlgebraElement.of(random_word(rng, rng.randint(0, 8)))
        if not is_zero_in_B(g * x * h).in_kernel:
            return False, f"g x h leaves the kernel at trial {trial}"
    return True, f"{group_reduce(x)}"


@check("AC12", "Y_n spaces")
def _spaces(rng: random.Random) -> Tuple[bool, str]:
    for n in range(9):
        y = build_Yn(n)
        if not (is_lattice(y.points, y.closed_sets) and is_t0(y) and is_spectral(y) and classify_Yn(y) == n):
            return False, f"Y_{n} fails"
    discrete = FiniteSpace(
        points=["1", "2", "3"],
        closed_sets=frozenset(frozenset(s) for s in ([], ["1"], ["2"], ["3"], ["1", "2"], ["1", "3"], ["2", "3"], ["1", "2", "3"])),
    )
    rejected = classify_Yn(discrete) is None and classify_Yn(build_two_copies(2)) is None
    return rejected, f"counterexamples rejected={rejected}"


def run_checks(seed: int, only: Optional[List[str]] = None) -> VerificationReport:
    """
    Run the battery.

    Args:
        seed: Seed for the randomised checks; each check gets its own generator
        only: Restrict to these identifiers

    Returns:
        VerificationReport with one result per check
    """
    results = []
    for check_id, title, fn in CHECKS:
        if only and check_id not in only:
            continue
        rng = random.Random(f"{seed}:{check_id}")
        try:
            passed, detail = fn(rng)
        except JustInfError as e:
            passed, detail = False, f"{e.kind}: {e.message}"
        logger.info("%s %s", check_id, "passed" if passed else "failed")
        results.append(CheckResult(id=check_id, title=title, passed=passed, detail=detail))
    return VerificationReport(results=results, passed=all(r.passed for r in results))


def format_report(report: VerificationReport) -> str:
    """One ✓ / ❌ line per check followed by the pass/fail counts."""
    lines = []
    for r in report.results:
        mark = "✓" if r.passed else "❌"
        lines.append(f"{mark} {r.id:<5} {r.title}: {r.detail}")
    counts = report.summary()
    lines.append(f"{counts['passed']} passed, {counts['failed']} failed")
    return "\n".join(lines)
