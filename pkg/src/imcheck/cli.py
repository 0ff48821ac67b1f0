"""Command-line front end.

``imcheck verify`` runs the pipeline on local files and prints a per-state
bound table (or JSON).  With ``--server`` it becomes a thin client of a
running service instead of computing locally.  ``imcheck serve`` starts that
service.

Exit codes: 0 success, 1 input error (parsing, validation, I/O), 2 contract
error (for example a multi-pair automaton without a complement automaton).
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.error
import urllib.request

from .automata import load_automaton
from .engine import classified_sets_dump, verify
from .errors import ContractError, ImcheckError
from .model import load_imc
from .product import build_product, dump_product_json

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CONTRACT = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imcheck",
        description="Bound the probability of omega-regular properties in interval Markov chains")
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="compute per-state lower/upper bounds")
    pv.add_argument("--model", required=True, help="IMC file (.json for the JSON mirror)")
    pv.add_argument("--automaton", required=True,
                    help="DRA for the property (HOA subset, .json for native JSON)")
    pv.add_argument("--complement-automaton", default=None,
                    help="DRA for the negated property (required for multi-pair automata)")
    pv.add_argument("--epsilon", type=float, default=1e-6,
                    help="value-iteration convergence threshold (default 1e-6)")
    pv.add_argument("--max-iters", type=int, default=100_000,
                    help="value-iteration sweep cap (default 100000)")
    pv.add_argument("--format", choices=("table", "json"), default="table")
    pv.add_argument("--dump-sets", action="store_true",
                    help="also emit the searched state sets with witnesses as JSON")
    pv.add_argument("--dump-product", action="store_true",
                    help="also emit the product chain as JSON")
    pv.add_argument("--server", default=None,
                    help="base URL of a running imcheck service; verification "
                         "is delegated instead of computed in-process")

    ps = sub.add_parser("serve", help="run the HTTP service")
    ps.add_argument("--host", default="127.0.0.1")
    ps.add_argument("--port", type=int, default=8000)
    return parser


def _render_table(per_state: list[dict]) -> str:
    states = [row["state"] for row in per_state]
    width = max(7, *(len(q) + 2 for q in states))
    head = "state".ljust(12) + "".join(q.rjust(width) for q in states)
    lo = "lower".ljust(12) + "".join(f"{row['lower']:.3f}".rjust(width) for row in per_state)
    hi = "upper".ljust(12) + "".join(f"{row['upper']:.3f}".rjust(width) for row in per_state)
    return "\n".join((head, lo, hi))


def _result_doc(args, per_state: list[dict], meta: dict) -> dict:
    automaton_files = [args.automaton]
    if args.complement_automaton:
        automaton_files.append(args.complement_automaton)
    return {
        "model_file": args.model,
        "property_file": args.automaton,
        "automaton_files": automaton_files,
        "per_state": per_state,
        "meta": meta,
    }


def _verify_local(args) -> dict:
    m = load_imc(args.model)
    a = load_automaton(args.automaton, m.props)
    a_comp = (load_automaton(args.complement_automaton, m.props)
              if args.complement_automaton else None)
    result = verify(m, a, a_comp, eps=args.epsilon, max_iters=args.max_iters)
    doc = _result_doc(args, result.as_dict()["per_state"], result.meta)
    if args.dump_sets:
        doc["sets"] = classified_sets_dump(m, a, a_comp)
    if args.dump_product:
        doc["product"] = dump_product_json(build_product(m, a))
    return doc


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _verify_remote(args) -> dict:
    def payload(path, kind):
        fmt = "json" if path.endswith(".json") else ("text" if kind == "model" else "hoa")
        return {"text": _read_text(path), "format": fmt}

    body = {
        "imc": payload(args.model, "model"),
        "automaton": payload(args.automaton, "automaton"),
        "epsilon": args.epsilon,
        "max_iters": args.max_iters,
        "dump_sets": args.dump_sets,
        "dump_product": args.dump_product,
    }
    if args.complement_automaton:
        body["complement"] = payload(args.complement_automaton, "automaton")

    url = args.server.rstrip("/") + "/verify"
    request = urllib.request.Request(
        url, data=json.dumps(body).encode("utf-8"),
        headers={"Content-Type": "application/json"}, method="POST")
    try:
        with urllib.request.urlopen(request) as resp:
            reply = json.loads(resp.read().decode("utf-8"))
    except urllib.error.HTTPError as exc:
        detail = json.loads(exc.read().decode("utf-8")).get("detail", {})
        kind = detail.get("kind", "input")
        message = detail.get("message", str(exc))
        raise (ContractError if kind == "contract" else ImcheckError)(message) from None

    doc = _result_doc(args, reply["per_state"], reply["meta"])
    for key in ("sets", "product"):
        if reply.get(key) is not None:
            doc[key] = reply[key]
    return doc


def _cmd_verify(args) -> int:
    doc = _verify_remote(args) if args.server else _verify_local(args)
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(_render_table(doc["per_state"]))
        print(f"route: {doc['meta']['route']}, pairs: {doc['meta']['pair_count']}")
        for key in ("sets", "product"):
            if key in doc:
                print(f"{key}:")
                print(json.dumps(doc[key], indent=2))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_serve(args)
    except ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (ImcheckError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
