"""Scenario-driven command line front end.

One scenario file per invocation: a JSON object naming a model, a verb,
and parameters. The run emits a report (fixed-layout text or JSON with
identical content) and sets the exit code by verdict class: 0 for a
holding verdict or plain result, 10 for an exact failure, 20 for an
inconclusive verdict, 2 for an error. Reports are byte-identical across
runs for equal (scenario, seed); wall clock is reported as 0 unless
--timings is passed, precisely to keep that guarantee.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from fractions import Fraction

from .errors import TreecloseError, ValidationError
from .kclosure import (
    axis_fibers,
    check_k_legal,
    discreteness_certificate,
    first_stab_germ_difference,
    germ_closure,
    germ_from_json,
    germ_to_json,
    ipk_check,
    kclosure_equal,
    local_action,
    nondiscreteness_certificate,
    pk_check,
    plusk_generator_germs,
    random_fiber_auto,
    solve_commutator,
)
from .models import build_model
from .tree_core import ROOT, VertexAddr

SCENARIO_SCHEMA = "treeclose.scenario/v1"
REPORT_SCHEMA = "treeclose.report/v1"

EXIT_OK = 0
EXIT_ERROR = 2
EXIT_FAILS = 10
EXIT_INCONCLUSIVE = 20

_OUTCOME_EXIT = {"holds": EXIT_OK, "fails": EXIT_FAILS, "inconclusive": EXIT_INCONCLUSIVE}

GERM_LIST_CAP = 200


def _vertex(scenario, key="vertex", default=None):
    if key not in scenario:
        if default is not None:
            return default
        raise ValidationError(f"scenario is missing {key!r}")
    return VertexAddr.parse(scenario[key])


def _int(scenario, key, default=None):
    if key not in scenario:
        if default is None:
            raise ValidationError(f"scenario is missing {key!r}")
        return default
    try:
        return int(scenario[key])
    except (TypeError, ValueError):
        raise ValidationError(f"{key!r} must be an integer") from None


def _germ_listing(germs):
    out = {"count": len(germs)}
    if len(germs) <= GERM_LIST_CAP:
        out["germs"] = [germ_to_json(g) for g in germs]
    else:
        out["germs_truncated_to"] = GERM_LIST_CAP
        out["germs"] = [germ_to_json(g) for g in germs[:GERM_LIST_CAP]]
    return out


def _verb_stab_germs(model, scenario, budget, seed, cap):
    v = _vertex(scenario, default=ROOT)
    k = _int(scenario, "k")
    germs = model.stab_germ_group(v, k)
    result = {"vertex": v.render(), "k": k}
    result.update(_germ_listing(germs))
    return result, EXIT_OK, [], 0


def _verb_local_action(model, scenario, budget, seed, cap):
    v = _vertex(scenario, default=ROOT)
    fp = local_action(model, v)
    fp["element_orders"] = list(fp["element_orders"])
    fp["vertex"] = v.render()
    return fp, EXIT_OK, [], 0


def _verb_legality(model, scenario, budget, seed, cap):
    if "germ" not in scenario:
        raise ValidationError("scenario is missing 'germ'")
    germ = germ_from_json(scenario["germ"])
    germ.validate(model.degree)
    k = _int(scenario, "k")
    ok, bad = check_k_legal(model, germ, k, explain=True)
    result = {
        "legal": ok,
        "k": k,
        "offending_vertex": None if bad is None else bad.render(),
    }
    return result, EXIT_OK if ok else EXIT_FAILS, [], 0


def _verb_discreteness(model, scenario, budget, seed, cap):
    k = _int(scenario, "k")
    nd = nondiscreteness_certificate(model, k, budget)
    dc = discreteness_certificate(model, k)
    result = {
        "k": k,
        "nondiscreteness": nd.to_json(),
        "exact_discreteness": dc.to_json(),
    }
    witnesses = [nd.witness] if nd.witness is not None else []
    return result, _OUTCOME_EXIT[nd.outcome], witnesses, nd.budget_used


def _verb_kclosure_compare(model, scenario, budget, seed, cap):
    if "other" not in scenario:
        raise ValidationError("scenario is missing 'other' model descriptor")
    other = build_model(scenario["other"])
    k = _int(scenario, "k")
    probe = scenario.get("probe_radius")
    verdict = kclosure_equal(model, other, k, None if probe is None else int(probe))
    result = {"k": k, "comparison": verdict.to_json()}
    kmax = scenario.get("first_difference_kmax")
    if kmax is not None:
        found = first_stab_germ_difference(model, other, ROOT, int(kmax))
        result["first_stab_germ_difference"] = (
            None
            if found is None
            else {"k": found[0], "germ": germ_to_json(found[1])}
        )
    witnesses = [verdict.witness] if verdict.witness is not None else []
    return result, _OUTCOME_EXIT[verdict.outcome], witnesses, verdict.budget_used


def _edge(scenario):
    edge = scenario.get("edge")
    if not (isinstance(edge, (list, tuple)) and len(edge) == 2):
        raise ValidationError("scenario needs 'edge': [v, w]")
    return VertexAddr.parse(edge[0]), VertexAddr.parse(edge[1])


def _verb_ipk(model, scenario, budget, seed, cap):
    v, w = _edge(scenario)
    k = _int(scenario, "k")
    radius = _int(scenario, "R")
    verdict = ipk_check(model, v, w, k, radius)
    witnesses = [verdict.witness] if verdict.witness is not None else []
    return verdict.to_json(), _OUTCOME_EXIT[verdict.outcome], witnesses, 0


def _verb_pk(model, scenario, budget, seed, cap):
    path = scenario.get("path")
    if not (isinstance(path, list) and len(path) >= 2):
        raise ValidationError("scenario needs 'path': [v0, v1, ...]")
    path = [VertexAddr.parse(x) for x in path]
    k = _int(scenario, "k")
    radius = _int(scenario, "R")
    verdict = pk_check(model, path, k, radius)
    witnesses = [verdict.witness] if verdict.witness is not None else []
    return verdict.to_json(), _OUTCOME_EXIT[verdict.outcome], witnesses, 0


def _verb_plusk_generators(model, scenario, budget, seed, cap):
    v = _vertex(scenario, default=ROOT)
    k = _int(scenario, "k")
    radius = scenario.get("radius")
    samples = _int(scenario, "samples", 0)
    germs = plusk_generator_germs(
        model,
        v,
        k,
        None if radius is None else int(radius),
        samples=samples,
        rng_seed=seed,
    )
    closed = germ_closure(germs, guard=cap)
    legal = all(check_k_legal(model, g, k) for g in closed)
    result = {"vertex": v.render(), "k": k, "closure_count": len(closed),
              "closure_all_k_legal": legal}
    result.update(_germ_listing(germs))
    return result, EXIT_OK if legal else EXIT_FAILS, [], 0


def _verb_commutator(model, scenario, budget, seed, cap):
    if model.name != "full_aut":
        raise ValidationError("the commutator verb runs on the full_aut model")
    amplitude = _int(scenario, "amplitude")
    radius = _int(scenario, "R", 2)
    z_lo = _int(scenario, "z_lo", -4)
    z_hi = _int(scenario, "z_hi", 4)
    if "f" in scenario:
        f_maps = {
            int(z): {
                VertexAddr.parse(a): VertexAddr.parse(b)
                for a, b in mapping.items()
            }
            for z, mapping in scenario["f"].items()
        }
    else:
        rng = random.Random(seed)
        core, fibers = axis_fibers(model, amplitude, radius, z_lo, z_hi)
        f_maps = {
            z: random_fiber_auto(model.degree, fibers[z], core[z], rng)
            for z in core
        }
    solved = solve_commutator(model, amplitude, f_maps, radius, z_lo, z_hi)
    result = {
        "amplitude": amplitude,
        "R": radius,
        "verified_fibers": list(solved["verified"]),
        "free_fibers": list(solved["free"]),
        "g": {
            str(z): {
                a.render(): b.render()
                for a, b in sorted(m.items(), key=lambda kv: kv[0].word)
            }
            for z, m in solved["g"].items()
        },
    }
    return result, EXIT_OK, [], 0


def _parse_matrix_entry(raw, p):
    if isinstance(raw, str):
        return Fraction(raw)
    if isinstance(raw, (list, tuple)) and len(raw) == 2:
        unit, power = raw
        if not (isinstance(power, str) and power.startswith("p^")):
            raise ValidationError(f"bad matrix entry {raw!r}")
        return Fraction(unit) * Fraction(p) ** int(power[2:])
    if isinstance(raw, int):
        return Fraction(raw)
    raise ValidationError(f"bad matrix entry {raw!r}")


def _verb_lattice(model, scenario, budget, seed, cap):
    if model.name != "psl2":
        raise ValidationError("the lattice verb runs on the psl2 model")
    matrix = scenario.get("matrix")
    if not (isinstance(matrix, list) and len(matrix) == 2):
        raise ValidationError("scenario needs 'matrix': 2x2 entries")
    (a, b), (c, d) = (
        (_parse_matrix_entry(e, model.p) for e in row) for row in matrix
    )
    el = model.element(a, b, c, d)
    r = _int(scenario, "r")
    fixes = model.fix_ball_test(el, r)
    germ_fixes = model.germ_of(el, ROOT, r).is_identity_map
    if fixes != germ_fixes:
        raise ValidationError("congruence test disagrees with the germ")
    result = {
        "fixes_ball": fixes,
        "r": r,
        "cross_check": "direct germ computation agrees",
    }
    return result, EXIT_OK if fixes else EXIT_FAILS, [], 0


def _verb_normal_form(model, scenario, budget, seed, cap):
    if model.name != "bs":
        raise ValidationError("the normal-form verb runs on the bs model")
    word = scenario.get("word")
    if not isinstance(word, str):
        raise ValidationError("scenario needs 'word': a generator word")
    el = model.from_britton(word)
    from .models.bass_serre import render_britton

    result = {
        "input": word,
        "normal_form": render_britton(el),
        "segs": [[r, e] for r, e in el.segs],
        "tail": el.tail,
    }
    return result, EXIT_OK, [], 0


VERBS = {
    "stab-germs": _verb_stab_germs,
    "local-action": _verb_local_action,
    "legality": _verb_legality,
    "discreteness": _verb_discreteness,
    "kclosure-compare": _verb_kclosure_compare,
    "ipk": _verb_ipk,
    "pk": _verb_pk,
    "plusk-generators": _verb_plusk_generators,
    "commutator": _verb_commutator,
    "lattice": _verb_lattice,
    "normal-form": _verb_normal_form,
}


def parse_scenario(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"scenario is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError("scenario must be a JSON object")
    schema = data.get("schema", SCENARIO_SCHEMA)
    if schema != SCENARIO_SCHEMA:
        raise ValidationError(f"unsupported scenario schema {schema!r}")
    for required in ("model", "verb"):
        if required not in data:
            raise ValidationError(f"scenario is missing {required!r}")
    if data["verb"] not in VERBS:
        raise ValidationError(
            f"unknown verb {data['verb']!r}; expected one of "
            + ", ".join(sorted(VERBS))
        )
    return data


def run_scenario(scenario, budget_override=None, seed_override=None):
    model = build_model(scenario["model"])
    cap = int(os.environ.get("TREECLOSE_MAX_ELEMENTS", "1000000"))
    budget = _int(scenario, "budget", 2000)
    if budget_override is not None:
        budget = budget_override
    budget = min(budget, cap)
    seed = seed_override if seed_override is not None else _int(scenario, "seed", 0)
    result, exit_code, witnesses, budget_used = VERBS[scenario["verb"]](
        model, scenario, budget, seed, cap
    )
    report = {
        "schema": REPORT_SCHEMA,
        "scenario": scenario,
        "model": model.describe(),
        "seed": seed,
        "result": result,
        "witnesses": witnesses,
        "budget_used": budget_used,
        "wall_clock_ms": 0,
        "exit_code": exit_code,
    }
    return report


def render_text(report):
    lines = ["treeclose report"]
    width = max(len(k) for k in report)
    for key in sorted(report):
        value = json.dumps(report[key], sort_keys=True)
        lines.append(f"{key.ljust(width)}  {value}")
    return "\n".join(lines) + "\n"


def render_json(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="treeclose",
        description="exact k-closure laboratory for groups on regular trees",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one scenario file")
    run.add_argument("scenario", help="path to a scenario JSON file")
    run.add_argument("--format", choices=("text", "json"), default="text")
    run.add_argument("--budget-override", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument(
        "--timings",
        action="store_true",
        help="report real wall clock (breaks byte-for-byte determinism)",
    )
    args = parser.parse_args(argv)

    started = time.monotonic()
    try:
        with open(args.scenario, encoding="utf-8") as fh:
            scenario = parse_scenario(fh.read())
        report = run_scenario(
            scenario,
            budget_override=args.budget_override,
            seed_override=args.seed,
        )
    except (TreecloseError, OSError) as exc:
        error = {
            "schema": REPORT_SCHEMA,
            "error": {"type": type(exc).__name__, "message": str(exc)},
            "exit_code": EXIT_ERROR,
        }
        if args.format == "json":
            sys.stdout.write(render_json(error))
        else:
            sys.stdout.write(render_text(error))
        return EXIT_ERROR
    if args.timings:
        report["wall_clock_ms"] = int((time.monotonic() - started) * 1000)
    if args.format == "json":
        sys.stdout.write(render_json(report))
    else:
        sys.stdout.write(render_text(report))
    return report["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
