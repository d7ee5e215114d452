"""Command-line front end: ``blowtower <subcommand> --config FILE``.

Exit status is 0 for a clean run, 2 for a malformed configuration and 3 for
a mathematical error (inconsistent tower, degenerate probe, ...).
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from typing import Any, Callable, Mapping

from . import __version__, algebra, conditions, dynamics
from .algebra import CohClass, Tower
from .config import RunConfig, SCHEMA_VERSION, build_tower, dumps, load_config
from .conditions import ConditionId
from .errors import ConfigError, MathError
from .exact import as_rational, format_rational

EXIT_OK, EXIT_CONFIG, EXIT_MATH = 0, 2, 3

SUBCOMMAND_QUERIES = {
    "check": {"check"},
    "probe": {"probe", "lemma_p4"},
    "integrate": {"integrate"},
    "dynamics": {"dynamics", "multiproj_nef_power"},
    "report": None,
}


def _monomial(tower: Tower, spec: Mapping[str, int], where: str) -> CohClass:
    unknown = [g for g in spec if g not in tower.generators]
    if unknown:
        raise ConfigError(f"unknown generator(s) {unknown}; tower has {list(tower.generators)}", where)
    return tower.monomial(spec)


def _query_integrate(tower: Tower, q: Mapping, where: str) -> dict:
    if "monomial" in q:
        cls = _monomial(tower, q["monomial"], where + "/monomial")
    else:
        cls = CohClass()
        for j, term in enumerate(q["class"]):
            cls = cls + _monomial(tower, term["monomial"], f"{where}/class/{j}/monomial") * as_rational(term.get("coeff", 1))
    return {"class": tower.pretty(cls), "value": format_rational(algebra.integrate(tower, cls))}


def _step(tower: Tower, ref, where: str) -> int:
    try:
        return tower.step_index(ref)
    except MathError:
        raise ConfigError(f"no blowup step {ref!r}", where + "/step") from None


def _query_check(tower: Tower, q: Mapping, where: str) -> dict:
    cond = ConditionId.parse(q["condition"])
    variants = q.get("variants", conditions.AUTO)
    if isinstance(variants, str):
        variants = [variants] * tower.level
    elif len(variants) != tower.level:
        raise ConfigError(f"expected {tower.level} variant choices, got {len(variants)}", where + "/variants")
    certs = conditions.propagate_conditions(tower, cond, variants)
    top = certs[-1]
    return {"condition": str(cond), "verdict": top.verdict, "assumptions": list(top.assumptions),
            "certificates": [c.to_dict() for c in certs]}


def _query_probe(tower: Tower, q: Mapping, where: str) -> dict:
    i = _step(tower, q["step"], where)
    system = conditions.build_probe_system(tower, i, q["r"], q.get("q", 0))
    out = system.to_dict()
    if "condition" in q:
        out["certificate"] = conditions.probe_verdict(system, ConditionId.parse(q["condition"])).to_dict()
    return out


def _query_lemma_p4(tower: Tower, q: Mapping, where: str) -> dict:
    i = _step(tower, q["step"], where)
    if tower.k != 4:
        raise MathError("the four-dimensional lemma needs a four-dimensional tower", step=i)
    return conditions.lemma_p4_verdict(tower.steps[i].center).to_dict()


def _query_dynamics(tower: Tower, q: Mapping, where: str) -> dict:
    mode = q["mode"]
    if mode == "rigidity":
        premise = ConditionId.parse(q["premise"]) if "premise" in q else None
        r = q.get("r", premise.r if premise else None)
        qq = q.get("q", premise.q if premise else 0)
        if r is None:
            raise ConfigError("rigidity needs r or a premise", where)
        if premise is not None and (premise.r, premise.q) != (r, qq):
            raise ConfigError(f"premise {premise} does not match r={r}, q={qq}", where + "/premise")
        trace = dynamics.derive_rigidity(q.get("k", tower.k), r, qq,
                                         dynamics.ADDITIVE if q.get("additive") else dynamics.MULTIPLICATIVE)
        out = trace.to_dict()
        if premise is not None:
            # the trace only applies to maps on this tower if the condition is established here
            cert = conditions.propagate_conditions(tower, premise)[-1]
            out["premise"] = {"condition": str(premise), "verdict": cert.verdict,
                              "assumptions": list(cert.assumptions)}
        return out
    if mode == "hyperkahler":
        l = q.get("l")
        if l is None:
            if tower.base.variant != algebra.HYPERKAHLER:
                raise ConfigError("hyperkahler profile needs l on a non-hyper-Kähler base", where)
            l = tower.base.dim // 2
        profile = dynamics.hyperkahler_profile(l, as_rational(q.get("lambda1", 1)))
    else:
        if "values" not in q:
            raise ConfigError("profile mode needs values", where)
        profile = dynamics.DegreeProfile(tuple(as_rational(v) for v in q["values"]),
                                         q.get("profile_mode", dynamics.MULTIPLICATIVE))
    ent = dynamics.entropy_and_hyperbolicity(profile)
    return {"profile": profile.to_dict(), "log_concave": dynamics.check_log_concavity(profile),
            **ent.to_dict()}


def _query_nef_power(tower: Tower, q: Mapping, where: str) -> dict:
    dims = q.get("dims")
    if dims is None:
        if tower.base.variant != algebra.MULTI_PROJECTIVE:
            raise ConfigError("dims are required on a base that is not multi-projective", where)
        dims = tower.base.dims
    if len(dims) != len(q["coeffs"]):
        raise ConfigError("one coefficient per factor is required", where + "/coeffs")
    return conditions.multiproj_nef_power(dims, q["coeffs"], q["exponent"]).to_dict()


HANDLERS: dict[str, Callable[[Tower, Mapping, str], dict]] = {
    "integrate": _query_integrate,
    "check": _query_check,
    "probe": _query_probe,
    "lemma_p4": _query_lemma_p4,
    "dynamics": _query_dynamics,
    "multiproj_nef_power": _query_nef_power,
}


def tower_summary(tower: Tower) -> dict:
    steps = []
    for i, st in enumerate(tower.steps):
        c = st.center
        entry = {
            "index": i, "name": st.name, "host_level": st.host_level, "ring_model": c.ring_model,
            "dim": c.dim_v, "codim": c.codim_s, "top": format_rational(c.top),
            "chern": [format_rational(x) for x in c.chern],
            "segre": [format_rational(x) for x in c.segre()],
            "flags": {"movable": c.movable, "proper_intersection_level": c.proper_intersection_level},
        }
        try:
            entry["c1_restricted"] = str(c.first_chern_restricted())
        except MathError:
            pass
        steps.append(entry)
    out = {"dim": tower.k, "generators": list(tower.generators), "steps": steps}
    try:
        out["canonical_class"] = tower.pretty(algebra.canonical_class(tower))
    except MathError:
        pass
    return out


def run(config: RunConfig, only: set[str] | None = None,
        now: Callable[[], datetime] = lambda: datetime.now(timezone.utc)) -> tuple[dict, int]:
    """Execute the queries of ``config``; returns the report and an exit status.

    A failing query is recorded with its error and turns the status into 3;
    later queries still run.
    """
    tower = build_tower(config)
    results = []
    status = EXIT_OK
    for idx, q in enumerate(config.queries):
        kind = q["type"]
        if only is not None and kind not in only:
            continue
        where = f"/queries/{idx}"
        entry: dict[str, Any] = {"index": idx, "type": kind}
        try:
            entry["result"] = HANDLERS[kind](tower, q, where)
        except MathError as exc:
            entry["error"] = {"kind": "math", "message": str(exc), "step": exc.step}
            status = EXIT_MATH
        results.append(entry)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": "blowtower",
        "version": __version__,
        "generated_at": now().isoformat(timespec="seconds"),
        "config": config.to_dict(),
        "tower": tower_summary(tower),
        "results": results,
    }
    return report, status


# --------------------------------------------------------------------------
# human-readable rendering
# --------------------------------------------------------------------------


def render_text(report: dict, trace: bool = False) -> str:
    lines = []
    t = report["tower"]
    lines.append(f"tower: dim {t['dim']}, generators {' '.join(t['generators'])}")
    for st in t["steps"]:
        lines.append(f"  step {st['index']} {st['name']}: {st['ring_model']} dim {st['dim']} codim {st['codim']}"
                     f" (host level {st['host_level']}), c(N) = {st['chern']}")
    if "canonical_class" in t:
        lines.append(f"  K = {t['canonical_class']}")
    for r in report["results"]:
        head = f"[{r['index']}] {r['type']}"
        if "error" in r:
            step = r["error"]["step"]
            lines.append(f"{head}: ERROR {r['error']['message']}" if step is None or "step" in r["error"]["message"]
                         else f"{head}: ERROR at step {step}: {r['error']['message']}")
            continue
        res = r["result"]
        if r["type"] == "check":
            lines.append(f"{head}: {res['condition']} {res['verdict']}"
                         + (f" assuming {', '.join(res['assumptions'])}" if res["assumptions"] else ""))
            if trace:
                for c in res["certificates"]:
                    lines.append(f"    level {c.get('level')}: {c['verdict']}")
                    lines.extend(f"      {d}" for d in c["derivation"])
        elif r["type"] == "integrate":
            lines.append(f"{head}: ∫ {res['class']} = {res['value']}")
        elif r["type"] == "probe":
            polys = ", ".join(p["pretty"] for p in res["probes"])
            lines.append(f"{head}: step {res['step']} r={res['r']} q={res['q']} n={res['n']}: {polys}")
            if "certificate" in res:
                cert = res["certificate"]
                lines.append(f"    {cert['condition']}: {cert['verdict']}")
                if trace:
                    lines.extend(f"      {d}" for d in cert["derivation"])
        elif r["type"] == "lemma_p4":
            lines.append(f"{head}: {res['case']}, b in {res['b']}, real roots: {res['real_roots']}")
        elif r["type"] == "multiproj_nef_power":
            lines.append(f"{head}: vanishes={res['vanishes']} support={res['support']}")
        elif r["type"] == "dynamics":
            if "verdict" in res:
                premise = res.get("premise")
                note = f" [premise {premise['condition']} {premise['verdict']}]" if premise else ""
                lines.append(f"{head}: k={res['k']} r={res['r']} q={res['q']} ({res['mode']}): {res['verdict']}{note}")
                if trace:
                    lines.extend(f"    [{s['rule']}] {s['relation']}" for s in res["steps"])
            else:
                vals = ", ".join(res["profile"]["values"])
                lines.append(f"{head}: profile ({vals}); entropy {res['entropy']}; "
                             f"hyperbolic={res['cohomologically_hyperbolic']}; log-concave={res['log_concave']}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blowtower", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "build": "construct the tower and print its data",
        "check": "run the condition checks",
        "probe": "run probe-polynomial and four-dimensional lemma queries",
        "integrate": "evaluate top-degree integrals",
        "dynamics": "run dynamical-degree and nef-power queries",
        "report": "run every query",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", default="-", help="config file (default: stdin)")
        p.add_argument("--json", action="store_true", help="emit the machine-readable report")
        p.add_argument("--trace", action="store_true", help="include derivation traces in text output")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error at {exc.location or '/'}: {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "build":
            tower = build_tower(config)
            report = {"schema_version": SCHEMA_VERSION, "tower": tower_summary(tower)}
            status = EXIT_OK
        else:
            report, status = run(config, SUBCOMMAND_QUERIES[args.command])
    except ConfigError as exc:
        print(f"config error at {exc.location or '/'}: {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    except MathError as exc:
        where = "" if exc.step is None else f" at step {exc.step}"
        print(f"math error{where}: {exc.args[0]}", file=sys.stderr)
        return EXIT_MATH
    if args.json:
        print(dumps(report))
    elif args.command == "build":
        print(render_text({"tower": report["tower"], "results": []}))
    else:
        print(render_text(report, args.trace))
    return status
