"""HTTP facade over the library.

The CLI talks to this app in-process by default (no daemon needed), and
`ppl serve` exposes the same routes over a socket.  Handlers are thin:
they parse, call the library, and return plain dicts whose key order the
library already fixed, so clients can write canonical JSON bytes.
"""

from __future__ import annotations

from fractions import Fraction

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .density import Window, run_counting_suite, verify_counting_lemma
from .partitions import (
    build_legendre,
    build_modular,
    build_valuation_parity,
    partition_from_doc,
    partition_to_doc,
)
from .scanner import ScanConfig, scan

app = FastAPI(title="padic-partition-lab", version=__version__)

_BUILDERS = {
    "modular": build_modular,
    "valuation-parity": build_valuation_parity,
    "legendre": build_legendre,
}


@app.exception_handler(ValueError)
async def _value_error(request: Request, exc: ValueError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


class ConstructRequest(BaseModel):
    construction: str
    k: int = Field(ge=1)
    primes: list[int]


class ClassifyRequest(BaseModel):
    partition: dict
    numbers: list[int]


class ScanConfigModel(BaseModel):
    mode: str
    prime_bound: int = 50
    window: int = 100_000
    depth: int = 2
    w: int = 2
    s_lo: int = -2
    s_hi: int = 2


class ScanRequest(BaseModel):
    partition: dict
    config: ScanConfigModel


class LemmaCheckRequest(BaseModel):
    p: int
    w: int = Field(ge=1)
    t: int = Field(ge=0)
    c: str
    m: int
    elements: list[int] | None = None
    full_window: int | None = Field(default=None, ge=1)


class LemmaRandomRequest(BaseModel):
    trials: int = Field(ge=1)
    seed: int
    window: int = Field(default=10_000, ge=1)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/partitions/construct")
def construct(req: ConstructRequest) -> dict:
    builder = _BUILDERS.get(req.construction)
    if builder is None:
        raise ValueError(f"construction must be one of {sorted(_BUILDERS)}, got {req.construction!r}")
    partition = builder(req.k, req.primes)
    return {"summary": partition.describe(), "partition": partition_to_doc(partition)}


@app.post("/partitions/classify")
def classify(req: ClassifyRequest) -> dict:
    partition = partition_from_doc(req.partition)
    return {"parts": [partition.classify(n) for n in req.numbers]}


@app.post("/scan")
def run_scan(req: ScanRequest) -> dict:
    partition = partition_from_doc(req.partition)
    cfg = ScanConfig(**req.config.model_dump())
    report = scan(partition, cfg)
    return {"report": report.to_doc(), "csv": report.csv_lines(), "bound_holds": report.bound_holds}


@app.post("/lemma/check")
def lemma_check(req: LemmaCheckRequest) -> dict:
    if (req.elements is None) == (req.full_window is None):
        raise ValueError("provide exactly one of 'elements' or 'full_window'")
    if req.full_window is not None:
        X = Window.full(req.full_window)
    else:
        X = Window.from_iterable(req.elements)
    verdict = verify_counting_lemma(X, req.p, req.w, req.t, Fraction(req.c), req.m)
    return {"verdict": verdict.to_doc(), "violated": verdict.violated}


@app.post("/lemma/random")
def lemma_random(req: LemmaRandomRequest) -> dict:
    report = run_counting_suite(req.trials, req.seed, req.window)
    return {"suite": report.to_doc(), "clean": report.clean}
