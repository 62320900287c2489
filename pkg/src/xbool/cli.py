"""Command-line front end: explain, verify, generate, and bench.

Exit codes separate three different kinds of "no": 0 success, 3 a
provable negative answer (no witness exists / witness invalid), 2 a
parse or validation problem with the inputs, 1 an operational failure
(caps, guards, timeouts).  All structured output is JSON or CSV with
sorted keys, so reruns on identical inputs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as _FutureTimeout
from typing import Dict, Optional, Tuple

from . import gadgets
from .dslist import dl_min_lcxp_branch, dle_min_lcxp_branch, ds_to_dl
from .dt import dt_check, dt_ensemble_to_dt, dt_lcxp_check, dt_subset_min, dt_xp_search
from .errors import BudgetExceeded, ModelError, NotOrdered, TooLarge, UndefinedFeature
from .explain import (
    DEFAULT_GUARD,
    ExplanationQuery,
    Witness,
    is_explanation,
    oracle_min,
    query_from_json,
    query_to_json,
    witness_from_json,
    witness_to_json,
)
from .models import (
    Ensemble,
    dumps_canonical,
    dumps_model,
    example_to_json,
    loads_model,
    measure_parameters,
    model_features,
)
from .obdd import (
    obdd_check,
    obdd_ensemble_product,
    obdd_lcxp_check,
    obdd_subset_min,
    obdd_xp_search,
)

DEFAULT_CAP = 10**6
ROUTES = ("auto", "dt", "obdd", "branching", "product", "bruteforce")


class _Timeout(Exception):
    pass


def _load_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _structured(value: str):
    """Inline JSON when the argument looks like it, else a file path."""
    if value.lstrip().startswith(("{", "[")):
        return json.loads(value)
    return json.loads(_load_text(value))


def _load_model(path: str):
    return loads_model(_load_text(path))


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error_payload(err: Exception) -> str:
    return dumps_canonical(
        {"error": {"type": type(err).__name__, "message": str(err)}}
    )


# ---------------------------------------------------------------------------
# Route selection and execution


def _is_branching_query(q: ExplanationQuery) -> bool:
    return q.kind == "lCXp" and q.minimality == "cardinality"


def _pick_route(model, q: ExplanationQuery) -> str:
    if model.kind == "dt":
        return "dt"
    if model.kind == "obdd":
        return "obdd"
    if model.kind in ("ds", "dl"):
        return "branching" if _is_branching_query(q) else "bruteforce"
    inner = model.elements[0].kind
    if inner in ("ds", "dl"):
        return "branching" if _is_branching_query(q) else "bruteforce"
    if inner == "dt":
        return "product"
    if model.shared_order is not None:
        return "product"
    if len({tuple(el.order) for el in model.elements}) == 1:
        return "product"
    return "bruteforce"


def _explain_via(model, q: ExplanationQuery, route: str, cap: int, guard: int):
    if route == "dt":
        if model.kind != "dt":
            raise ModelError("route dt needs a decision tree")
        if q.minimality == "subset":
            return dt_subset_min(model, q)
        return dt_xp_search(model, q)
    if route == "obdd":
        if model.kind != "obdd":
            raise ModelError("route obdd needs an OBDD")
        if q.minimality == "subset":
            return obdd_subset_min(model, q)
        return obdd_xp_search(model, q)
    if route == "branching":
        if not _is_branching_query(q):
            raise ModelError("route branching answers cardinality lCXp queries only")
        if model.kind == "ds":
            return dl_min_lcxp_branch(ds_to_dl(model), q.target, q.k)
        if model.kind == "dl":
            return dl_min_lcxp_branch(model, q.target, q.k)
        if model.kind == "ensemble" and model.elements[0].kind in ("ds", "dl"):
            lists = [
                ds_to_dl(el) if el.kind == "ds" else el for el in model.elements
            ]
            return dle_min_lcxp_branch(Ensemble(lists), q.target, q.k)
        raise ModelError("route branching needs decision sets or lists")
    if route == "product":
        if model.kind != "ensemble":
            raise ModelError("route product needs an ensemble")
        inner = model.elements[0].kind
        if inner == "dt":
            return _explain_via(dt_ensemble_to_dt(model, cap), q, "dt", cap, guard)
        if inner == "obdd":
            return _explain_via(
                obdd_ensemble_product(model, cap), q, "obdd", cap, guard
            )
        raise ModelError("route product needs tree or OBDD elements")
    if route == "bruteforce":
        return oracle_min(model, q, guard)
    raise ModelError(f"unknown route {route!r}")


def run_explain(
    model, q: ExplanationQuery, route: str, cap: int, guard: int
) -> Tuple[Optional[Witness], str]:
    if route != "auto":
        return _explain_via(model, q, route, cap, guard), route
    route = _pick_route(model, q)
    if route == "product":
        try:
            return _explain_via(model, q, "product", cap, guard), "product"
        except (BudgetExceeded, NotOrdered):
            return _explain_via(model, q, "bruteforce", cap, guard), "bruteforce"
    return _explain_via(model, q, route, cap, guard), route


def run_verify(model, q: ExplanationQuery, w: Witness, cap: int, guard: int) -> bool:
    if q.is_local and w.features is None:
        raise ModelError("local queries take a feature-set witness")
    if not q.is_local and w.assignment is None:
        raise ModelError("global queries take an assignment witness")
    known = model_features(model)
    mentioned = w.features if w.features is not None else [f for f, _ in w.assignment]
    for f in mentioned:
        if f not in known:
            raise UndefinedFeature(f"witness mentions unknown feature {f!r}")
    if q.k is not None and w.size > q.k:
        return False
    if model.kind == "dt":
        if q.kind == "lCXp":
            return dt_lcxp_check(model, q.target, w.features)
        return dt_check(model, q, w)
    if model.kind == "obdd":
        if q.kind == "lCXp":
            return obdd_lcxp_check(model, q.target, w.features)
        return obdd_check(model, q, w)
    if model.kind == "ensemble" and model.elements[0].kind in ("dt", "obdd"):
        try:
            if model.elements[0].kind == "dt":
                flat = dt_ensemble_to_dt(model, cap)
            else:
                flat = obdd_ensemble_product(model, cap)
            return run_verify(flat, q, w, cap, guard)
        except (BudgetExceeded, NotOrdered):
            pass
    return is_explanation(model, q, w, guard)


def run_verify_minimal(model, q, w: Witness, cap: int, guard: int) -> bool:
    """Subset minimality by single deletions; validity is monotone for
    all four query kinds, so that check is exact."""
    if not run_verify(model, q, w, cap, guard):
        return False
    if w.features is not None:
        for f in w.features:
            rest = Witness(features=tuple(g for g in w.features if g != f))
            if run_verify(model, q, rest, cap, guard):
                return False
        return True
    for f, _ in w.assignment:
        rest = Witness(assignment=tuple(p for p in w.assignment if p[0] != f))
        if run_verify(model, q, rest, cap, guard):
            return False
    return True


# ---------------------------------------------------------------------------
# Gadget registry for `generate`


def _zero_query(model, k: Optional[int]) -> Dict:
    feats = sorted(model_features(model))
    if k is None:
        k = len(feats)
    return {
        "kind": "lCXp",
        "minimality": "cardinality",
        "target": {f: 0 for f in feats},
        "k": k,
    }


def _gen_hitting_set(params):
    tree, e0, k = gadgets.gen_hitting_set_laxp(
        params["universe"], params["sets"], params.get("k")
    )
    query = {
        "kind": "lAXp",
        "minimality": "cardinality",
        "target": example_to_json(e0),
        "k": k,
    }
    return tree, query


def _gen_mcc_gaxp_dt(params):
    g = gadgets.mcc_from_json(params["graph"])
    tree, target, k = gadgets.gen_mcc_gaxp_dt(
        g,
        params.get("k"),
        params.get("max_k", 10),
        params.get("node_cap", DEFAULT_CAP),
    )
    query = {"kind": "gAXp", "minimality": "cardinality", "target": target, "k": k}
    return tree, query


def _gen_mcc_dt_ensemble(params):
    g = gadgets.mcc_from_json(params["graph"])
    ens = gadgets.gen_mcc_dt_ensemble(g, params.get("k"))
    return ens, _zero_query(ens, g.k)


def _gen_maj_hom(params):
    g = gadgets.mcc_from_json(params["graph"])
    ens = gadgets.gen_maj_hom(g, params.get("k"), params.get("family", "dt"))
    return ens, _zero_query(ens, g.k)


def _gen_taut_ds(params):
    ds = gadgets.gen_taut_ds(params["terms"])
    return ds, _zero_query(ds, None)


def _gen_mcc_ds(params):
    g = gadgets.mcc_from_json(params["graph"])
    return gadgets.gen_mcc_ds(g, params.get("k")), None


def _gen_mcc_ds2(params):
    g = gadgets.mcc_from_json(params["graph"])
    ens = gadgets.gen_mcc_ds_ensemble(g, params.get("k"))
    return ens, _zero_query(ens, g.k)


def _gen_mcc_obdd_maj(params):
    g = gadgets.mcc_from_json(params["graph"])
    ens = gadgets.gen_mcc_obdd_maj(g, params.get("k"))
    return ens, _zero_query(ens, g.k)


def _gen_laxp_to_gaxp(params):
    raw = params["model"]
    model = loads_model(_load_text(raw)) if isinstance(raw, str) else loads_model(
        json.dumps(raw)
    )
    prod, target, k = gadgets.gen_laxp_to_gaxp(
        model, params["example"], params["k"], params.get("node_cap", DEFAULT_CAP)
    )
    query = {"kind": "gAXp", "minimality": "cardinality", "target": target, "k": k}
    return prod, query


GENERATORS = {
    "hitting_set": _gen_hitting_set,
    "mcc_gaxp_dt": _gen_mcc_gaxp_dt,
    "mcc_dt_ensemble": _gen_mcc_dt_ensemble,
    "maj_hom": _gen_maj_hom,
    "taut_ds": _gen_taut_ds,
    "mcc_ds": _gen_mcc_ds,
    "mcc_ds_ensemble": _gen_mcc_ds2,
    "mcc_obdd_maj": _gen_mcc_obdd_maj,
    "laxp_to_gaxp": _gen_laxp_to_gaxp,
}

# ---------------------------------------------------------------------------
# Subcommands


def _with_timeout(fn, timeout_ms: int):
    if not timeout_ms:
        return fn()
    pool = ThreadPoolExecutor(max_workers=1)
    fut = pool.submit(fn)
    try:
        result = fut.result(timeout=timeout_ms / 1000.0)
    except _FutureTimeout:
        pool.shutdown(wait=False, cancel_futures=True)
        raise _Timeout(f"exceeded {timeout_ms} ms") from None
    pool.shutdown(wait=True)
    return result


def cmd_explain(args) -> int:
    model = _load_model(args.model)
    q = query_from_json(_structured(args.query))
    witness, route = _with_timeout(
        lambda: run_explain(model, q, args.route, args.cap_nodes, args.guard_features),
        args.timeout_ms,
    )
    payload = {
        "witness": None if witness is None else witness_to_json(witness),
        "size": None if witness is None else witness.size,
        "algorithm": route,
        "parameters": measure_parameters(model).to_json(),
    }
    _emit(dumps_canonical(payload), args.out)
    return 0 if witness is not None else 3


def cmd_verify(args) -> int:
    model = _load_model(args.model)
    q = query_from_json(_structured(args.query))
    w = witness_from_json(_structured(args.witness))
    valid = run_verify(model, q, w, args.cap_nodes, args.guard_features)
    payload = {"valid": valid}
    ok = valid
    if args.minimal:
        minimal = valid and run_verify_minimal(
            model, q, w, args.cap_nodes, args.guard_features
        )
        payload["minimal"] = minimal
        ok = valid and minimal
    _emit(dumps_canonical(payload), args.out)
    return 0 if ok else 3


def cmd_generate(args) -> int:
    maker = GENERATORS.get(args.gadget)
    if maker is None:
        raise ModelError(
            f"unknown gadget {args.gadget!r}; available: {', '.join(sorted(GENERATORS))}"
        )
    params = _structured(args.params)
    try:
        model, query = maker(params)
    except KeyError as missing:
        raise ModelError(f"params object misses {missing}") from None
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model))
    summary: Dict = {"gadget": args.gadget, "kind": model.kind}
    if query is not None:
        summary["query"] = query
    sys.stdout.write(dumps_canonical(summary))
    return 0


_BENCH_COLUMNS = (
    "instance",
    "ens_size",
    "mnl_size",
    "terms_elem",
    "term_size",
    "width_elem",
    "size_elem",
    "witness_size",
    "route",
    "status",
    "time_ms",
)


def _bench_row(path: str, q: ExplanationQuery, args) -> Dict:
    row: Dict = {"instance": os.path.basename(path)}
    started = time.monotonic()
    try:
        model = _load_model(path)
        row.update(measure_parameters(model).to_json())
        witness, route = run_explain(
            model, q, args.route, args.cap_nodes, args.guard_features
        )
        row["route"] = route
        row["status"] = "ok" if witness is not None else "none"
        if witness is not None:
            row["witness_size"] = witness.size
    except Exception as err:
        row["status"] = "error"
        row["route"] = type(err).__name__
    row["time_ms"] = round((time.monotonic() - started) * 1000.0, 3)
    return row


def cmd_bench(args) -> int:
    q = query_from_json(_structured(args.query))
    files = sorted(
        f for f in os.listdir(args.corpus) if f.endswith(".json")
    )
    paths = [os.path.join(args.corpus, f) for f in files]
    rows = []
    if paths:
        pool = ThreadPoolExecutor(max_workers=min(8, len(paths)))
        clean = True
        try:
            futures = [pool.submit(_bench_row, p, q, args) for p in paths]
            for path, fut in zip(paths, futures):
                timeout = args.timeout_ms / 1000.0 if args.timeout_ms else None
                try:
                    rows.append(fut.result(timeout=timeout))
                except _FutureTimeout:
                    clean = False
                    rows.append(
                        {
                            "instance": os.path.basename(path),
                            "status": "timeout",
                            "time_ms": args.timeout_ms,
                        }
                    )
        finally:
            pool.shutdown(wait=clean, cancel_futures=not clean)
    buffer = io.StringIO()
    writer = csv.DictWriter(
        buffer, fieldnames=_BENCH_COLUMNS, lineterminator="\n", restval=""
    )
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    _emit(buffer.getvalue(), args.out)
    return 0


# ---------------------------------------------------------------------------
# Argument plumbing


def _add_limits(sub, timeout=False):
    sub.add_argument("--route", default="auto", choices=ROUTES)
    sub.add_argument("--cap-nodes", type=int, default=DEFAULT_CAP)
    sub.add_argument("--guard-features", type=int, default=DEFAULT_GUARD)
    if timeout:
        sub.add_argument("--timeout-ms", type=int, default=0)
    sub.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xbool",
        description="Explanations for transparent binary classifiers.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    ex = commands.add_parser("explain", help="compute a minimal explanation")
    ex.add_argument("--model", required=True)
    ex.add_argument("--query", required=True)
    _add_limits(ex, timeout=True)
    ex.set_defaults(handler=cmd_explain)

    ve = commands.add_parser("verify", help="check a witness against a query")
    ve.add_argument("--model", required=True)
    ve.add_argument("--query", required=True)
    ve.add_argument("--witness", required=True)
    ve.add_argument("--minimal", action="store_true")
    _add_limits(ve)
    ve.set_defaults(handler=cmd_verify)

    ge = commands.add_parser("generate", help="write a hard-instance model file")
    ge.add_argument("gadget")
    ge.add_argument("--params", default="{}")
    ge.add_argument("--out", required=True)
    ge.set_defaults(handler=cmd_generate)

    be = commands.add_parser("bench", help="run a query over a corpus directory")
    be.add_argument("--corpus", required=True)
    be.add_argument("--query", required=True)
    _add_limits(be, timeout=True)
    be.set_defaults(handler=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ModelError, json.JSONDecodeError, OSError) as err:
        sys.stdout.write(_error_payload(err))
        return 2
    except (TooLarge, BudgetExceeded, _Timeout) as err:
        sys.stdout.write(_error_payload(err))
        return 1


if __name__ == "__main__":
    sys.exit(main())
