"""
Command-line front-end `dr`.

    dr field      -m M
    dr ideals     -m M --bound B
    dr classgroup -m M
    dr rayclass   -m M --conductor F
    dr dr {build,show,audit} -m M --conductor F
    dr verify     [--select GLOB ...]
    dr export {dr-json,dot,zeta-csv,ideals-csv} [--out PATH]

Exit status is 0 without fatal results, 1 with any fatal result and 2 on
usage or input errors.
"""

import argparse
import fnmatch
import json
import logging
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from ..classgroups.classgroups import class_group, narrow_class_group
from ..classgroups.rayclass import strict_ray_class_group
from ..classgroups.totient import verify_totient_identity
from ..core.bcalgebra import (
    galois_orbit_structure,
    level_ideals,
    operator_words,
    relation_grid,
    transition_compat,
)
from ..core.bimodule import bimodule_build
from ..core.checks import Report, check, set_strict
from ..core.drmonoid import (
    cardinality_audit,
    check_monoid_laws,
    classify_residue,
    dr_direct,
    dr_level,
    iota,
    triple_agreement,
    verify_level_maps,
)
from ..core.equivariant import equivariant_function_module, symmetry_compat
from ..core.functor import (
    component_restriction_check,
    dr_norm_map,
    dr_ver_map,
    extension_laws,
    functor_diagrams,
    make_extension,
    omega_map,
)
from ..core.kms import (
    check_scaling,
    check_uniformity,
    gibbs_kms_check,
    kms_infinity_simplex,
    partition_check,
    zeta_series,
)
from ..core.monomials import crossed_monomial_calculus
from ..exceptions import BoundExhaustedError, DeviationWarning, FieldError, IdealError, VerificationError
from ..nfield.fields import NumberField, make_field
from ..nfield.ideals import IntegralIdeal, ideal_mul, ideals_up_to, is_coprime, parse_ideal, rational_ideal
from ..nfield.units import unit_group
from ..reporting.report_builder import (
    element_label,
    ideals_frame,
    render_cayley_dot,
    render_frame,
    render_report,
    write_artifact,
)
from .cache import load_level, save_level
from .config import FORMATS, RunConfig, resolve_config

logger = logging.getLogger(__name__)

# Norm caps inside the verification grid
RELATION_NORM = 6
WORD_NORM = 4
MONOMIAL_NORM = 4
BIMODULE_BOUND = 16

EXPORTS = ("dr-json", "dot", "zeta-csv", "ideals-csv")


# =============================
# Parser
# =============================

def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-m", "--field", help="'Q' or a squarefree integer m for Q(sqrt(m))")
    common.add_argument("--conductor", help="integer n or HNF triple 'a,c,d'")
    common.add_argument("--bound", type=int, help="ideal-norm bound B")
    common.add_argument("--beta", dest="betas", action="append", help="inverse temperature (repeatable)")
    common.add_argument("--ext", dest="extensions", action="append", type=int,
                        help="squarefree m of an extension Q(sqrt(m)) (repeatable)")
    common.add_argument("--cache-dir", dest="cache_dir")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--seed", type=int)
    common.add_argument("--select", action="append", help="check-id glob (repeatable)")
    common.add_argument("--max-conductor-norm", dest="max_conductor_norm", type=int)
    common.add_argument("--strict", action="store_const", const=True,
                        help="raise on the first fatal check")
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("-v", "--verbose", action="count", default=0)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="dr", description="Deligne-Ribet monoids and Bost-Connes systems at finite level")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("field", parents=[common], help="discriminant, signature, units, class numbers")
    sub.add_parser("ideals", parents=[common], help="integral ideals of norm <= bound")
    sub.add_parser("classgroup", parents=[common], help="class group and narrow class group")
    sub.add_parser("rayclass", parents=[common], help="strict ray class group of the conductor")
    dr = sub.add_parser("dr", parents=[common], help="build, show or audit DR_f")
    dr.add_argument("action", choices=("build", "show", "audit"))
    verify = sub.add_parser("verify", parents=[common], help="run the verification grid")
    verify.add_argument("--jobs", type=int, default=1, help="worker processes for grid cells")
    export = sub.add_parser("export", parents=[common], help="write an artifact")
    export.add_argument("what", choices=EXPORTS)
    export.add_argument("--out", help="output path (stdout when omitted)")
    return parser


_CONFIG_KEYS = ("field", "conductor", "bound", "betas", "extensions", "cache_dir", "format",
                "select", "seed", "max_conductor_norm", "strict")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {key: getattr(args, key, None) for key in _CONFIG_KEYS}
    if overrides["select"] is not None:
        overrides["select"] = [s for s in overrides["select"] if s]
    return resolve_config(overrides, args.config)


def _level(cfg: RunConfig) -> Tuple[NumberField, IntegralIdeal]:
    K = make_field(cfg.field)
    return K, parse_ideal(K, cfg.conductor)


def _emit(text: str, out: Optional[str] = None) -> None:
    if out:
        write_artifact(text, out)
    else:
        sys.stdout.write(text)


# =============================
# Information commands
# =============================

def cmd_field(cfg: RunConfig) -> int:
    K = make_field(cfg.field)
    rows = [
        {"property": "field", "value": K.tag},
        {"property": "degree", "value": K.degree},
        {"property": "discriminant", "value": int(K.discriminant)},
        {"property": "signature", "value": f"({K.signature[0]},{K.signature[1]})"},
        {"property": "units", "value": unit_group(K).describe()},
        {"property": "class number", "value": class_group(K).order},
        {"property": "narrow class number", "value": narrow_class_group(K).order},
    ]
    _emit(render_frame(pd.DataFrame(rows, columns=["property", "value"]), cfg.format))
    return 0


def cmd_ideals(cfg: RunConfig) -> int:
    K = make_field(cfg.field)
    _emit(render_frame(ideals_frame(ideals_up_to(K, cfg.bound)), cfg.format))
    return 0


def cmd_classgroup(cfg: RunConfig) -> int:
    K = make_field(cfg.field)
    rows = []
    for G in (class_group(K), narrow_class_group(K)):
        rows.append({
            "group": "narrow" if G.narrow else "wide",
            "order": G.order,
            "invariants": list(G.group.invariants),
            "representatives": ", ".join(str(r) for r in G.reps),
        })
    _emit(render_frame(pd.DataFrame(rows, columns=["group", "order", "invariants", "representatives"]),
                       cfg.format))
    return 0


def cmd_rayclass(cfg: RunConfig) -> int:
    K, f = _level(cfg)
    G = strict_ray_class_group(K, f)
    if cfg.format == "json":
        payload = G.to_dict()
        payload["order_report"] = G.order_report().as_dict()
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return 0
    rows = [{"quantity": "invariant factors", "value": list(G.invariants)},
            {"quantity": "order", "value": G.order}]
    rows += [{"quantity": k, "value": v} for k, v in G.order_report().as_dict().items()]
    _emit(render_frame(pd.DataFrame(rows, columns=["quantity", "value"]), cfg.format))
    return 0


# =============================
# DR monoids
# =============================

def _build_or_load(cfg: RunConfig, K: NumberField, f: IntegralIdeal):
    cached = load_level(cfg.cache_dir, K, f)
    if cached is not None:
        M, report = cached
        logger.info("reloaded %s from %s", M, cfg.cache_dir)
        return M, report
    report = triple_agreement(K, f)
    M = dr_level(K, f)
    if report.passed:
        save_level(cfg.cache_dir, M)
    return M, report


def cmd_dr(cfg: RunConfig, action: str) -> int:
    K, f = _level(cfg)
    if action == "audit":
        report = cardinality_audit(K, f)
        data = report.results[0].data
        if cfg.format in ("json", "csv"):
            _emit(render_report(report, cfg.format))
        else:
            rows = [{"quantity": k, "value": data[k]} for k in
                    ("computed", "closed_form", "closed_form_agrees", "narrow_form", "narrow_form_agrees")]
            _emit(render_frame(pd.DataFrame(rows, columns=["quantity", "value"]), "text"))
            if not data["closed_form_agrees"]:
                print(f"flagged: |DR_f| = {data['computed']} differs from 2^r1*h*N(f) = {data['closed_form']}")
        return 0

    M, report = _build_or_load(cfg, K, f)
    if action == "build":
        if cfg.format == "json":
            _emit(json.dumps({"monoid": M.to_dict(), "report": report.to_dict()}, indent=2, sort_keys=True) + "\n")
        else:
            units = sorted(element_label(M, i) for i in M.coprime_indices())
            print(f"{M}")
            print(f"elements: {M.size}")
            print(f"units: {{{', '.join(units)}}}")
            print(f"constructions agree: {'yes' if report.passed else 'no'}")
    else:
        labels = [element_label(M, i) for i in range(M.size)]
        table = pd.DataFrame([[labels[M.mul(i, j)] for j in range(M.size)] for i in range(M.size)],
                             index=labels, columns=labels)
        _emit(table.to_csv() if cfg.format == "csv" else table.to_string() + "\n")
    return 0 if report.passed else 1


# =============================
# Verification grid
# =============================

Stage = Tuple[str, Callable[[], Report]]


def _totient_report(f: IntegralIdeal) -> Report:
    report = Report(f"totient {f}")
    try:
        t = verify_totient_identity(f)
        report.add(check("classgroups.totient_identity", t.holds, f"sum over {len(t.rows)} divisors is {t.total}"))
    except VerificationError as exc:
        report.add(check("classgroups.totient_identity", False, str(exc), witness=exc.witness))
    return report


def _order_report(K: NumberField, f: IntegralIdeal) -> Report:
    G = strict_ray_class_group(K, f)
    orders = G.order_report()
    report = Report(f"ray class order {K.tag} f={f}")
    report.add(check("classgroups.rayclass.order", orders.agrees,
                     f"exact sequence gives {orders.structural_order}, enumeration {orders.enumerated_order}",
                     witness=orders.as_dict()))
    return report


def _first_prime_coprime(K: NumberField, f: IntegralIdeal) -> IntegralIdeal:
    return next(a for a in ideals_up_to(K, 4 * f.norm + 8) if a.norm > 1 and is_coprime(a, f)
                and all(a.norm % p for p in range(2, int(a.norm ** 0.5) + 1)))


def level_stages(cfg: RunConfig, K: NumberField, f: IntegralIdeal) -> List[Stage]:
    """Checks attached to one grid cell (K, f)."""
    two = rational_ideal(K, 2)
    small = level_ideals(K, WORD_NORM)
    stages: List[Stage] = [
        ("drmonoid.triple", lambda: triple_agreement(K, f)),
        ("drmonoid", lambda: check_monoid_laws(dr_direct(K, f), cfg.seed)),
        ("drmonoid.iota", lambda: iota(K, f)[1]),
        ("drmonoid.sigma", lambda: classify_residue(K, f)[1]),
        ("drmonoid.embed", lambda: verify_level_maps(K, f, two, rational_ideal(K, 3))),
        ("classgroups.totient_identity", lambda: _totient_report(f)),
        ("classgroups.rayclass", lambda: _order_report(K, f)),
        ("bcalgebra.orbits", lambda: galois_orbit_structure(K, f)[1]),
        ("bcalgebra.relations", lambda: relation_grid(K, f, min(cfg.bound, RELATION_NORM))),
        ("bcalgebra.transition", lambda: transition_compat(K, f, ideal_mul(f, two), two)),
        ("bcalgebra.words", lambda: operator_words(K, f, small, seed=cfg.seed)),
        ("bcalgebra.equivariant", lambda: equivariant_function_module(K, f)[1]),
        ("bcalgebra.symmetry", lambda: symmetry_compat(K, f, _first_prime_coprime(K, f))),
        ("bcalgebra.monomials", lambda: crossed_monomial_calculus(K, f, MONOMIAL_NORM, seed=cfg.seed)),
        ("kms.measure", lambda: check_uniformity(K, f, ideal_mul(f, two))),
        ("kms.measure", lambda: check_scaling(K, f, two, seed=cfg.seed)),
        ("kms.kms_inf", lambda: kms_infinity_simplex(K, f, seed=cfg.seed)),
    ]
    if K.is_rational:
        for m in cfg.extensions:
            ctx = make_extension(m)
            stages += [
                ("functor.ver", lambda ctx=ctx: dr_ver_map(ctx, f)[1]),
                ("functor.norm", lambda ctx=ctx: dr_norm_map(ctx, f)[1]),
                ("functor.diagram", lambda ctx=ctx: functor_diagrams(ctx, f)),
                ("functor.omega", lambda ctx=ctx: omega_map(ctx, f)[1]),
                ("functor.component", lambda ctx=ctx: component_restriction_check(ctx, f)),
            ]
    return stages


def field_stages(cfg: RunConfig, K: NumberField) -> List[Stage]:
    """Checks run once per field."""
    stages: List[Stage] = []
    for beta in cfg.betas:
        stages.append(("kms.partition", lambda beta=beta: partition_check(K, beta)))
        stages.append(("kms.gibbs", lambda beta=beta: gibbs_kms_check(K, beta, cfg.bound, seed=cfg.seed)))
    if K.is_rational:
        for m in cfg.extensions:
            ctx = make_extension(m)
            stages.append(("functor.extension", lambda ctx=ctx: extension_laws(ctx, cfg.bound)))
            stages.append(("functor.bimodule", lambda ctx=ctx: bimodule_build(ctx, BIMODULE_BOUND, seed=cfg.seed)[1]))
    return stages


def _wanted(prefix: str, patterns: Sequence[str]) -> bool:
    """Whether a stage emitting ids under prefix can match any pattern."""
    for p in patterns:
        literal = p.split("*", 1)[0].split("?", 1)[0].split("[", 1)[0]
        if prefix.startswith(literal) or literal.startswith(prefix) or fnmatch.fnmatch(prefix, p):
            return True
    return False


def _run_stages(stages: Sequence[Stage], patterns: Sequence[str], report: Report) -> None:
    for prefix, run in stages:
        if _wanted(prefix, patterns):
            report.extend(run())


def conductors(K: NumberField, cfg: RunConfig) -> List[IntegralIdeal]:
    return list(ideals_up_to(K, cfg.max_conductor_norm))


def _verify_cell(payload: Tuple[Dict[str, Any], str]) -> Report:
    values, conductor = payload
    cfg = RunConfig.from_dict(values)
    set_strict(cfg.strict)
    K = make_field(cfg.field)
    f = parse_ideal(K, conductor)
    report = Report(f"{K.tag} f={f}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeviationWarning)
        _run_stages(level_stages(cfg, K, f), cfg.select, report)
    return report


def _conductor_spec(f: IntegralIdeal) -> str:
    return str(f.norm) if f.field.is_rational else ",".join(str(v) for v in f.key)


def verify_grid(cfg: RunConfig, jobs: int = 1) -> Report:
    """Every selected check over the conductors with N(f) <= max_conductor_norm, merged in order."""
    K = make_field(cfg.field)
    report = Report(f"verification {K.tag} N(f) <= {cfg.max_conductor_norm} seed={cfg.seed}")
    if not cfg.select:
        return report
    payloads = [(cfg.to_dict(), _conductor_spec(f)) for f in conductors(K, cfg)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            cells = list(executor.map(_verify_cell, payloads))
    else:
        cells = [_verify_cell(p) for p in payloads]
    for cell in cells:
        report.extend(cell)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeviationWarning)
        _run_stages(field_stages(cfg, K), cfg.select, report)
    return report.select(cfg.select)


def cmd_verify(cfg: RunConfig, jobs: int = 1) -> int:
    report = verify_grid(cfg, jobs)
    _emit(render_report(report, "text" if cfg.format == "dot" else cfg.format))
    return 0 if report.passed else 1


# =============================
# Exports
# =============================

def cmd_export(cfg: RunConfig, what: str, out: Optional[str] = None) -> int:
    K = make_field(cfg.field)
    if what == "dr-json":
        M, report = _build_or_load(cfg, K, parse_ideal(K, cfg.conductor))
        _emit(json.dumps(M.to_dict(), indent=1, sort_keys=True) + "\n", out)
        return 0 if report.passed else 1
    if what == "dot":
        M = dr_level(K, parse_ideal(K, cfg.conductor))
        _emit(render_cayley_dot(M), out)
    elif what == "zeta-csv":
        frames = [zeta_series(K, beta) for beta in cfg.betas]
        _emit(pd.concat(frames, ignore_index=True).to_csv(index=False), out)
    else:
        _emit(ideals_frame(ideals_up_to(K, cfg.bound)).to_csv(index=False), out)
    return 0


# =============================
# Entry point
# =============================

def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        cfg = config_from_args(args)
        set_strict(cfg.strict)
        if args.command == "field":
            return cmd_field(cfg)
        if args.command == "ideals":
            return cmd_ideals(cfg)
        if args.command == "classgroup":
            return cmd_classgroup(cfg)
        if args.command == "rayclass":
            return cmd_rayclass(cfg)
        if args.command == "dr":
            return cmd_dr(cfg, args.action)
        if args.command == "verify":
            return cmd_verify(cfg, args.jobs)
        return cmd_export(cfg, args.what, args.out)
    except (FieldError, IdealError, BoundExhaustedError, ValueError) as exc:
        print(f"dr: error: {exc}", file=sys.stderr)
        return 2
    except VerificationError as exc:
        print(f"dr: fatal check {exc.check_id}: {exc}", file=sys.stderr)
        return 1
    finally:
        set_strict(False)


if __name__ == "__main__":
    sys.exit(main())
