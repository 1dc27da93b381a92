"""
Command-line front end: ``justinf <group> <command> [options]``.

Results go to standard output as JSON (or DOT / plain text); logs go to
standard error.  Exit status 0 on success, 1 on precondition failures,
2 when a resource cap is hit and 3 on malformed input.
"""
import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from pydantic import BaseModel, ValidationError

from src import acceptance
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
    left_half_ideal,
    limit_dimension,
    materialize,
    primitive_quotient_sizes,
    quotient,
)
from src.config import ENV_OVERRIDES, Settings, get_settings, load_settings, set_settings
from src.dimension_group import K0Element, equal as k0_equal, is_positive, order_unit, push, rho_model
from src.errors import JustInfError, MalformedInputError, check_cap
from src.grig_core import (
    GroupElement,
    enumerate_level_quotient,
    equal,
    is_trivial,
    level_permutation,
    level_quotient_order,
    lift_first,
    lift_second,
    normal_closure_index,
    order,
    search_replication_witness,
    section,
    wreath,
)
from src.matrix_recursion import (
    AlgebraElement,
    commutant_dimension,
    find_scalar_entry,
    is_zero_in_B,
    nucleus_rank_at_level,
    nucleus_relations_at_level,
    pi_level,
    psi_iterate,
    rigid_kernel_element,
    scan_scalar_entry,
)
from src.models import (
    AlgebraElementModel,
    DiagramModel,
    IdealModel,
    K0ElementModel,
    ReplicationWitness,
    SpaceModel,
)
from src.primspace import (
    build_Yn,
    build_two_copies,
    classify_Yn,
    is_lattice,
    is_spectral,
    is_t0,
    load_space,
    prime_closed_sets,
)

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as malformed input."""

    def error(self, message: str):
        raise MalformedInputError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------

def _read_source(source: str) -> str:
    """'-' reads stdin, an existing path reads the file, anything else is taken literally."""
    if source == "-":
        return sys.stdin.read()
    # os.path.isfile swallows the OSError a long literal would raise as a path
    if os.path.isfile(source):
        return Path(source).read_text()
    return source


def _load_json(source: str) -> Any:
    return json.loads(_read_source(source))


def _element(source: str) -> AlgebraElement:
    """An algebra element given as text ("(1-d)a(1-d)") or as the JSON term list."""
    text = _read_source(source).strip()
    if text.startswith("["):
        return AlgebraElement.from_model(AlgebraElementModel.model_validate_json(text))
    return AlgebraElement.parse(text)


def _int_list(text: str) -> List[int]:
    text = text.strip()
    if text.startswith("["):
        return [int(v) for v in json.loads(text)]
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise MalformedInputError(f"Expected a comma-separated list of integers, got {text!r}") from e


def _k0(source: str) -> K0Element:
    text = _read_source(source).strip()
    if text.startswith("{"):
        return K0Element.from_model(K0ElementModel.model_validate_json(text))
    return K0Element.of(_int_list(text))


def _required(args: argparse.Namespace, name: str) -> int:
    value = getattr(args, name, None)
    if value is None:
        raise MalformedInputError(f"--{name} is required for this command")
    return value


def _diagram(args: argparse.Namespace) -> BratteliDiagram:
    if args.diagram:
        return BratteliDiagram.from_model(DiagramModel.model_validate(_load_json(args.diagram)))
    depth = getattr(args, "depth", None) or 6
    if args.rule == "strictly_rfd":
        return build_strictly_rfd(depth)
    return build_y_infty(depth, args.multiplicity)


def _ideal(args: argparse.Namespace, d: BratteliDiagram) -> Optional[DiagramIdeal]:
    if args.omit is not None:
        return ideal_from_open_set(d, _int_list(args.omit))
    if args.column is not None:
        if d.rule == "y_infty":
            return ideal_from_open_set(d, [args.column])
        return column_ideal(d, args.column)
    if args.left_half:
        return left_half_ideal(d)
    source = args.ideal or getattr(args, "mark", None)
    if source:
        return DiagramIdeal.from_model(d, IdealModel.model_validate(_load_json(source)))
    return None


def _space(source: str):
    return load_space(SpaceModel.model_validate(_load_json(source)))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_grig_normalize(args):
    return {"word": GroupElement(args.word).word}


def cmd_grig_wreath(args):
    image = wreath(GroupElement.parse(args.word))
    return {"first": image.first.word, "second": image.second.word, "active": image.active}


def cmd_grig_section(args):
    return {"section": section(GroupElement.parse(args.word), args.vertex).word}


def cmd_grig_trivial(args):
    return {"trivial": is_trivial(GroupElement.parse(args.word))}


def cmd_grig_equal(args):
    return {"equal": equal(GroupElement.parse(args.g), GroupElement.parse(args.h))}


def cmd_grig_order(args):
    result = order(GroupElement.parse(args.word), args.max_exponent)
    return {"order": result, "overflow": result is None}


def cmd_grig_perm(args):
    level = _required(args, "level")
    check_cap("matrix_level_cap", get_settings().matrix_level_cap, level)
    return {"level": level, "perm": level_permutation(GroupElement.parse(args.word), level).to_list()}


def cmd_grig_lift(args):
    lift = lift_first if args.vertex == 0 else lift_second
    return {"lift": lift(GroupElement.parse(args.word)).word, "vertex": args.vertex}


def cmd_grig_quotient_order(args):
    level = _required(args, "level")
    size = enumerate_level_quotient(level) if args.enumerate else level_quotient_order(level)
    return {"level": level, "order": size}


def cmd_grig_closure_index(args):
    level = _required(args, "level")
    return {"level": level, "index": normal_closure_index(GroupElement.parse(args.word), level)}


def cmd_grig_witness(args):
    level = getattr(args, "level", None) or 4
    found = search_replication_witness(args.target, args.max_length, level)
    if found is None:
        return {"witness": None}
    w, member = found
    return ReplicationWitness(word=w.word, target=GroupElement.parse(args.target).word, level=level, in_closure_at_level=member)


def cmd_algebra_kernel_test(args):
    return is_zero_in_B(_element(args.element))


def cmd_algebra_scalar_entry(args):
    x = _element(args.element)
    return scan_scalar_entry(x) if args.scan else find_scalar_entry(x)


def cmd_algebra_psi(args):
    return psi_iterate(_element(args.element), getattr(args, "depth", None) or 1).to_model()


def cmd_algebra_pi_matrix(args):
    return pi_level(_element(args.element), _required(args, "level")).to_model()


def cmd_algebra_commutant(args):
    level = _required(args, "level")
    return {"level": level, "dimension": commutant_dimension(level)}


def cmd_algebra_nucleus_rank(args):
    level = _required(args, "level")
    return {
        "level": level,
        "rank": nucleus_rank_at_level(level),
        "relations": [str(r) for r in nucleus_relations_at_level(level)],
    }


def cmd_algebra_rigid_kernel(args):
    x = rigid_kernel_element(GroupElement.parse(args.g1), GroupElement.parse(args.g2))
    cert = is_zero_in_B(x)
    return {"element": x.to_model().model_dump(mode="json"), "text": str(x), "in_kernel": cert.in_kernel, "depth": cert.depth}


def cmd_bratteli_build(args):
    d = _diagram(args)
    if args.resolved_format == "dot":
        return export_dot(d)
    return d.to_model()


def cmd_bratteli_ideals(args):
    d = _diagram(args)
    depth = getattr(args, "depth", None) or d.depth
    if args.compare:
        return compare_with_formula(d, depth)
    t = materialize(d, depth)
    return [ideal.to_model(t) for ideal in enumerate_ideals(t, depth)]


def cmd_bratteli_quotient(args):
    d = _diagram(args)
    u = _ideal(args, d)
    if u is None:
        raise MalformedInputError("quotient needs an ideal: --omit, --column, --left-half or --ideal")
    q = quotient(d, u)
    if args.resolved_format == "dot":
        return export_dot(q)
    return q.to_model()


def cmd_bratteli_essential(args):
    d = _diagram(args)
    u = _ideal(args, d)
    if u is None:
        raise MalformedInputError("essential needs an ideal: --omit, --column, --left-half or --ideal")
    depth = min(getattr(args, "depth", None) or d.depth, d.depth)
    return {"essential": is_essential(d, u, depth), "depth": depth}


def cmd_bratteli_limit_dim(args):
    return limit_dimension(_diagram(args), args.horizon)


def cmd_bratteli_export_dot(args):
    d = _diagram(args)
    return export_dot(d, _ideal(args, d))


def cmd_bratteli_prim_sizes(args):
    d = build_y_infty(args.j_max + 1)
    sizes = primitive_quotient_sizes(d, args.j_max)
    return {"sizes": {str(j): k for j, k in enumerate(sizes, 1)}}


def cmd_k0_push(args):
    check_cap("depth_cap", get_settings().depth_cap, args.to)
    return push(_k0(args.element), args.to).to_model()


def cmd_k0_positive(args):
    x = _k0(args.element)
    return {"positive": is_positive(x), "model": rho_model(x).model_dump()}


def cmd_k0_equal(args):
    return {"equal": k0_equal(_k0(args.x), _k0(args.y))}


def cmd_k0_unit(args):
    check_cap("depth_cap", get_settings().depth_cap, args.terms)
    model = rho_model(order_unit())
    return {"unit": order_unit().to_model().model_dump(), "terms": model.terms(args.terms)}


def cmd_space_build_yn(args):
    space = build_two_copies(args.n) if args.two_copies else build_Yn(args.n)
    return space.to_model()


def cmd_space_check(args):
    s = _space(args.space)
    t0 = is_t0(s)
    return {
        "lattice": is_lattice(s.points, s.closed_sets),
        "t0": t0,
        "spectral": is_spectral(s),
        "prime_closed": sorted((sorted(f) for f in prime_closed_sets(s)), key=lambda f: (len(f), f)),
    }


def cmd_space_classify(args):
    n = classify_Yn(_space(args.space))
    return {"n": n, "is_yn": n is not None}


def cmd_verify_paper(args):
    only = [c.strip() for c in args.only.split(",")] if args.only else None
    report = acceptance.run_checks(get_settings().seed, only)
    args.exit_status = 0 if report.passed else 1
    if args.resolved_format == "plain":
        return acceptance.format_report(report)
    return report


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _common_options() -> argparse.ArgumentParser:
    """Options accepted both before and after the subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="Path to the yaml configuration file")
    common.add_argument("--depth", type=int, default=argparse.SUPPRESS, help="Depth operand (psi iterations, diagram depth)")
    common.add_argument("--level", type=int, default=argparse.SUPPRESS, help="Level operand (tree level n)")
    common.add_argument("--format", choices=["json", "dot", "plain"], default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--cap-override", action="append", metavar="KEY=VALUE", default=argparse.SUPPRESS,
                        help="Override a cap, e.g. depth_cap=16")
    common.add_argument("--log-level", default=argparse.SUPPRESS)
    return common


def _diagram_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--diagram", help="Diagram JSON (file path, '-' or literal)")
    p.add_argument("--rule", choices=["y_infty", "strictly_rfd"], default="y_infty")
    p.add_argument("--multiplicity", type=int, default=1)


def _ideal_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--omit", help="Finite set F for the open-set ideal U(Y minus F), e.g. 1,3")
    p.add_argument("--column", type=int, help="The ideal avoiding column k")
    p.add_argument("--left-half", action="store_true")
    p.add_argument("--ideal", help="Ideal JSON (file path, '-' or literal)")


def build_parser() -> argparse.ArgumentParser:
    """Parser for `justinf <group> <command>`; common options go before or after the command."""
    common = _common_options()
    env_help = "environment overrides: " + ", ".join(sorted(ENV_OVERRIDES)) + ", JUSTINF_CONFIG"
    parser = _Parser(
        prog="justinf",
        description="Exact computations for the Grigorchuk group algebra and just-infinite AF-algebras",
        epilog=env_help,
        parents=[common],
    )
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def add(sub, name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    grig = groups.add_parser("grig", help="Group elements, sections and level quotients").add_subparsers(dest="command", required=True)
    add(grig, "normalize", cmd_grig_normalize, "Reduced normal form").add_argument("word")
    add(grig, "wreath", cmd_grig_wreath, "Wreath recursion psi(g)").add_argument("word")
    p = add(grig, "section", cmd_grig_section, "Section g|_v")
    p.add_argument("word")
    p.add_argument("vertex", nargs="?", default="")
    add(grig, "trivial", cmd_grig_trivial, "Word problem").add_argument("word")
    p = add(grig, "equal", cmd_grig_equal, "Equality in the group")
    p.add_argument("g")
    p.add_argument("h")
    p = add(grig, "order", cmd_grig_order, "Order of an element")
    p.add_argument("word")
    p.add_argument("--max-exponent", type=int, default=12)
    add(grig, "perm", cmd_grig_perm, "Level-n permutation (needs --level)").add_argument("word")
    p = add(grig, "lift", cmd_grig_lift, "Stabiliser element with a prescribed section")
    p.add_argument("word")
    p.add_argument("--vertex", type=int, choices=[0, 1], default=0)
    p = add(grig, "quotient-order", cmd_grig_quotient_order, "|G : St(n)| (needs --level)")
    p.add_argument("--enumerate", action="store_true", help="Use explicit BFS instead of Schreier-Sims")
    add(grig, "closure-index", cmd_grig_closure_index, "Index of a normal closure at level n").add_argument("word")
    p = add(grig, "witness", cmd_grig_witness, "Search w with psi(w) = (k, 1)")
    p.add_argument("target", nargs="?", default="abab")
    p.add_argument("--max-length", type=int, default=10)

    algebra = groups.add_parser("algebra", help="Group algebra and the Koopman representation").add_subparsers(dest="command", required=True)
    add(algebra, "kernel-test", cmd_algebra_kernel_test, "Decide x = 0 in B").add_argument("element")
    p = add(algebra, "scalar-entry", cmd_algebra_scalar_entry, "Nonzero scalar entry of an iterate")
    p.add_argument("element")
    p.add_argument("--scan", action="store_true", help="Use the brute-force depth scan")
    add(algebra, "psi", cmd_algebra_psi, "Iterated matrix recursion (--depth, default 1)").add_argument("element")
    add(algebra, "pi-matrix", cmd_algebra_pi_matrix, "Level-n matrix (needs --level)").add_argument("element")
    add(algebra, "commutant", cmd_algebra_commutant, "Commutant dimension at level n (needs --level)")
    add(algebra, "nucleus-rank", cmd_algebra_nucleus_rank, "Rank of the nucleus images (needs --level)")
    p = add(algebra, "rigid-kernel", cmd_algebra_rigid_kernel, "(1 - g1)(1 - g2) for rigid elements")
    p.add_argument("g1")
    p.add_argument("g2")

    bratteli = groups.add_parser("bratteli", help="Bratteli diagrams and their ideals").add_subparsers(dest="command", required=True)
    _diagram_options(add(bratteli, "build", cmd_bratteli_build, "Build a rule-defined diagram"))
    p = add(bratteli, "ideals", cmd_bratteli_ideals, "Enumerate ideals of the truncation")
    _diagram_options(p)
    p.add_argument("--compare", action="store_true", help="Compare with the open-set formula")
    p = add(bratteli, "quotient", cmd_bratteli_quotient, "Quotient diagram")
    _diagram_options(p)
    _ideal_options(p)
    p = add(bratteli, "essential", cmd_bratteli_essential, "Is the ideal essential")
    _diagram_options(p)
    _ideal_options(p)
    p = add(bratteli, "limit-dim", cmd_bratteli_limit_dim, "Dimension of the inductive limit")
    _diagram_options(p)
    p.add_argument("--horizon", type=int)
    p = add(bratteli, "export-dot", cmd_bratteli_export_dot, "DOT source, optionally marking an ideal")
    _diagram_options(p)
    _ideal_options(p)
    p.add_argument("--mark", help="Ideal JSON whose vertices are highlighted (file path, '-' or literal)")
    add(bratteli, "prim-sizes", cmd_bratteli_prim_sizes, "Characteristic sequence k(1..j)").add_argument("--j-max", type=int, default=8)

    k0 = groups.add_parser("k0", help="Ordered K0 of the y_infty algebra").add_subparsers(dest="command", required=True)
    p = add(k0, "push", cmd_k0_push, "Push a class to a higher level")
    p.add_argument("element", help="Vector such as 1,0,2 or K0 JSON")
    p.add_argument("--to", type=int, required=True)
    add(k0, "positive", cmd_k0_positive, "Positivity of a class").add_argument("element")
    p = add(k0, "equal", cmd_k0_equal, "Equality of classes")
    p.add_argument("x")
    p.add_argument("y")
    add(k0, "unit", cmd_k0_unit, "The order unit").add_argument("--terms", type=int, default=8)

    space = groups.add_parser("space", help="Finite T0 spaces").add_subparsers(dest="command", required=True)
    p = add(space, "build-yn", cmd_space_build_yn, "The space Y_n")
    p.add_argument("n", type=int)
    p.add_argument("--two-copies", action="store_true", help="Two glued copies of Y_n instead")
    add(space, "check", cmd_space_check, "Lattice, T0, primality and spectral checks").add_argument("space")
    add(space, "classify", cmd_space_classify, "Recognise Y_n").add_argument("space")

    p = groups.add_parser("verify-paper", parents=[common], help="Run the acceptance battery")
    p.set_defaults(handler=cmd_verify_paper)
    p.add_argument("--only", help="Comma-separated check identifiers, e.g. AC1,AC7")
    return parser


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _jsonable(payload: Any) -> Any:
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode="json", by_alias=True)
    if isinstance(payload, list):
        return [_jsonable(p) for p in payload]
    if isinstance(payload, dict):
        return {k: _jsonable(v) for k, v in payload.items()}
    return payload


def _plain(data: Any) -> str:
    if isinstance(data, dict):
        return "\n".join(f"{k}: {json.dumps(v)}" for k, v in data.items())
    if isinstance(data, list):
        return "\n".join(json.dumps(v) for v in data)
    return json.dumps(data)


def emit(payload: Any, fmt: str) -> None:
    """Print a result: strings verbatim, everything else as JSON or plain key/value lines."""
    if isinstance(payload, str):
        print(payload)
        return
    data = _jsonable(payload)
    if fmt == "plain":
        print(_plain(data))
    else:
        if fmt == "dot":
            logger.warning("DOT output is only available for diagrams; writing JSON")
        print(json.dumps(data, indent=2))


def _cap_overrides(items: Optional[List[str]]) -> Dict[str, str]:
    overrides: Dict[str, str] = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in Settings.model_fields or key in ("output_format", "log_level", "seed"):
            raise MalformedInputError(f"Bad --cap-override {item!r}; expected CAP=VALUE with CAP one of the *_cap / cache settings")
        overrides[key] = value.strip()
    return overrides


def _configure(args: argparse.Namespace) -> Settings:
    settings = load_settings(
        getattr(args, "config", None),
        seed=getattr(args, "seed", None),
        output_format=getattr(args, "format", None),
        log_level=getattr(args, "log_level", None),
        **_cap_overrides(getattr(args, "cap_override", None)),
    )
    set_settings(settings)
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, settings.log_level.upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    return settings


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit status."""
    try:
        args = build_parser().parse_args(argv)
        settings = _configure(args)
        explicit = getattr(args, "format", None)
        if args.handler is cmd_verify_paper:
            args.resolved_format = explicit or "plain"
        else:
            args.resolved_format = explicit or settings.output_format
        args.exit_status = 0
        payload = args.handler(args)
        emit(payload, args.resolved_format)
        return args.exit_status
    except JustInfError as e:
        error = e
    except ValidationError as e:
        error = MalformedInputError(f"Invalid input: {e}")
    except json.JSONDecodeError as e:
        error = MalformedInputError(f"Invalid JSON: {e}")
    print(json.dumps({"error": error.to_dict()}))
    return error.exit_code


def main_exit() -> None:
    """Console-script wrapper around main."""
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
