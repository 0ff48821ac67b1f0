"""HTTP facade over the verification engine.

Documents travel in request bodies as file contents plus a format tag, so
the service stays stateless and side-effect free; one POST runs one full
verification.  Input problems come back as 400, contract problems (for
example a missing complement automaton) as 409, both with a ``kind`` field
mirroring the CLI exit codes.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .automata import parse_dra_json, parse_hoa
from .engine import classified_sets_dump, verify
from .errors import ContractError, ImcheckError
from .model import parse_imc, parse_imc_json
from .product import build_product, dump_product_json


class DocumentPayload(BaseModel):
    """One input file shipped inline: its text and which syntax it uses."""

    text: str
    format: str = "text"  # models: text | json; automata: hoa | json


class VerifyRequest(BaseModel):
    imc: DocumentPayload
    automaton: DocumentPayload
    complement: DocumentPayload | None = None
    epsilon: float = Field(default=1e-6, gt=0.0)
    max_iters: int = Field(default=100_000, ge=1)
    dump_sets: bool = False
    dump_product: bool = False


class StateBound(BaseModel):
    state: str
    lower: float
    upper: float


class VerifyResponse(BaseModel):
    per_state: list[StateBound]
    meta: dict
    sets: dict | None = None
    product: dict | None = None


app = FastAPI(title="imcheck", version=__version__,
              description="Probability bounds for omega-regular properties in "
                          "interval-valued Markov chains")


def _http_error(kind: str, message: str, status: int) -> HTTPException:
    return HTTPException(status_code=status, detail={"kind": kind, "message": message})


def _parse_model(doc: DocumentPayload):
    if doc.format == "json":
        return parse_imc_json(doc.text)
    if doc.format == "text":
        return parse_imc(doc.text)
    raise _http_error("input", f"unknown model format {doc.format!r}", 400)


def _parse_automaton(doc: DocumentPayload, props):
    if doc.format == "json":
        return parse_dra_json(doc.text, props)
    if doc.format in ("hoa", "text"):
        return parse_hoa(doc.text, props)
    raise _http_error("input", f"unknown automaton format {doc.format!r}", 400)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/verify", response_model=VerifyResponse, response_model_exclude_none=True)
def verify_endpoint(req: VerifyRequest) -> VerifyResponse:
    try:
        m = _parse_model(req.imc)
        a = _parse_automaton(req.automaton, m.props)
        a_comp = _parse_automaton(req.complement, m.props) if req.complement else None
    except ContractError as exc:
        raise _http_error("contract", str(exc), 409) from None
    except ImcheckError as exc:
        raise _http_error("input", str(exc), 400) from None

    try:
        result = verify(m, a, a_comp, eps=req.epsilon, max_iters=req.max_iters)
        sets = classified_sets_dump(m, a, a_comp) if req.dump_sets else None
        product = dump_product_json(build_product(m, a)) if req.dump_product else None
    except ContractError as exc:
        raise _http_error("contract", str(exc), 409) from None
    except ImcheckError as exc:
        raise _http_error("input", str(exc), 400) from None

    return VerifyResponse(
        per_state=[StateBound(state=q, lower=result.lower[q], upper=result.upper[q])
                   for q in result.states],
        meta=result.meta,
        sets=sets,
        product=product,
    )
