"""HTTP facade over the platform engine.

JSON over HTTP; authentication is a bearer token mapped to a role. All
writes funnel through the single engine writer under a lock; reads are
served from the in-memory state. Review responses for the expert role
never include tallies or label distributions.
"""

from __future__ import annotations

import random
import threading
from typing import Optional

from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from . import exports, reports
from .config import AppConfig, Principal
from .errors import (
    DegenerateInput,
    DuplicateAnnotation,
    EmptyInput,
    FstCrowdError,
    ImageNotOpen,
    ManifestParseError,
    MissingImageFiles,
    NoApplicablePairs,
    NotReviewable,
    PermissionDenied,
    PoolTooSmall,
    UnknownImage,
    UnknownMethod,
)
from .ingest import parse_manifest
from .irr import bootstrap_crowd_curve, confusion_matrix, irr_report
from .labels import FstLabel
from .platform import Platform
from .routing import next_task

_STATUS_CODES = {
    UnknownImage: 404,
    UnknownMethod: 404,
    DuplicateAnnotation: 409,
    ImageNotOpen: 409,
    NotReviewable: 409,
    PermissionDenied: 403,
    ManifestParseError: 400,
    MissingImageFiles: 400,
    DegenerateInput: 400,
    EmptyInput: 400,
    NoApplicablePairs: 400,
    PoolTooSmall: 400,
}

ROLES = ("Annotator", "Expert", "Admin")


class IngestRequest(BaseModel):
    manifest_path: str
    image_root: Optional[str] = None
    require_files: bool = True


class AnnotationRequest(BaseModel):
    image_id: str
    label: str
    annotator_id: Optional[str] = None  # honored only in open mode / Admin


class FlagRequest(BaseModel):
    image_id: str
    kind: str
    text: str = ""
    annotator_id: Optional[str] = None


class AdjudicationRequest(BaseModel):
    label: str


class ReviewItemModel(BaseModel):
    """Review payloads are tally-free by construction."""

    image_id: str
    file_url: str
    reason: str


class AdjudicationResponse(BaseModel):
    image_id: str
    status: str
    label: str


def create_app(config: AppConfig | None = None) -> FastAPI:
    config = config or AppConfig()
    config.data_dir.mkdir(parents=True, exist_ok=True)
    platform = Platform(config.events_path, config.protocol, fsync=config.fsync)
    write_lock = threading.Lock()
    routing_rng = random.Random(config.routing_seed)

    app = FastAPI(title="fstcrowd")
    app.state.platform = platform
    app.state.config = config
    # the browser UI is served separately; auth still rides on bearer tokens
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    def principal(authorization: Optional[str] = Header(default=None),
                  x_role: Optional[str] = Header(default=None),
                  annotator: Optional[str] = Query(default=None)) -> Principal:
        if config.tokens:
            if not authorization or not authorization.startswith("Bearer "):
                raise PermissionDenied("missing bearer token")
            token = authorization.removeprefix("Bearer ")
            if token not in config.tokens:
                raise PermissionDenied("unknown token")
            return config.tokens[token]
        role = x_role if x_role in ROLES else "Admin"
        return Principal(annotator or "anonymous", role)

    def require(p: Principal, *roles: str) -> None:
        if p.role not in roles:
            raise PermissionDenied(f"requires one of {roles}, have {p.role}")

    def annotator_identity(p: Principal, claimed: Optional[str]) -> str:
        # Tokens pin identity for annotators; admins may act on behalf.
        if p.role == "Annotator":
            return p.principal_id
        return claimed or p.principal_id

    @app.exception_handler(FstCrowdError)
    async def domain_error(_request: Request, exc: FstCrowdError):
        status = _STATUS_CODES.get(type(exc), 400)
        return JSONResponse(status_code=status,
                            content={"error": exc.code, "detail": str(exc)})

    # -- ingestion and tasks -------------------------------------------------

    @app.post("/datasets")
    def ingest_dataset(body: IngestRequest, p: Principal = Depends(principal)):
        require(p, "Admin")
        entries = parse_manifest(body.manifest_path, body.image_root,
                                 require_files=body.require_files)
        with write_lock:
            summary = platform.ingest_records(entries)
        return {"n_images": summary.n_images, "n_gold": summary.n_gold}

    @app.get("/tasks/next")
    def get_next_task(p: Principal = Depends(principal),
                      annotator: Optional[str] = None):
        require(p, "Annotator", "Admin")
        annotator_id = annotator_identity(p, annotator)
        task = next_task(platform.state, annotator_id, routing_rng,
                         config.gold_probe_rate)
        if task is None:
            return {"task": None}
        return {"task": {"image_id": task.image_id, "file_url": task.file_url,
                         "assigned_to": task.assigned_to, "reason": task.reason}}

    @app.post("/annotations")
    def post_annotation(body: AnnotationRequest, p: Principal = Depends(principal)):
        require(p, "Annotator", "Admin")
        annotator_id = annotator_identity(p, body.annotator_id)
        label = FstLabel.parse(body.label)
        with write_lock:
            outcome = platform.submit_annotation(annotator_id, body.image_id, label)
        profile = platform.state.profile(annotator_id)
        return {
            "accepted": outcome.accepted,
            "image_id": body.image_id,
            "new_status": outcome.new_status,
            "settled_label": outcome.settled_label.name if outcome.settled_label else None,
            "qualification": {
                "state": outcome.qualification_state,
                "windowed_agreement": profile.window.agreement(),
                "scored_total": profile.window.scored_total,
            },
        }

    @app.post("/flags")
    def post_flag(body: FlagRequest, p: Principal = Depends(principal)):
        require(p, "Annotator", "Admin")
        annotator_id = annotator_identity(p, body.annotator_id)
        with write_lock:
            status = platform.file_failure_report(body.image_id, annotator_id,
                                                  body.kind, body.text)
        return {"image_id": body.image_id, "status": status}

    @app.get("/images/{image_id}")
    def get_image(image_id: str, p: Principal = Depends(principal)):
        require(p, "Admin")
        if image_id not in platform.state.images:
            raise UnknownImage(image_id)
        rec = platform.state.images[image_id]
        c = platform.state.consensus[image_id]
        return {
            "image_id": image_id,
            "file_path": rec.file_path,
            "source": rec.source,
            "is_gold_seed": rec.is_gold_seed,
            "gold_labels": {k: v.name for k, v in rec.gold_labels.items()},
            "status": c.status,
            "settled_label": c.settled_label.name if c.settled_label else None,
            "tally": {lab.name: n for lab, n in c.tally.counts.items()},
            "total_qualified": c.tally.total_qualified,
            "total_all": c.tally.total_all,
            "agreement": c.agreement,
            "difficulty": c.difficulty,
            "incorrect_flags": c.incorrect_flags,
            "inappropriate_flags": c.inappropriate_flags,
        }

    # -- expert review (tally-free by contract) ------------------------------

    @app.get("/review/queue", response_model=list[ReviewItemModel])
    def review_queue(p: Principal = Depends(principal)):
        require(p, "Expert")
        return [ReviewItemModel(image_id=i["image_id"], file_url=i["file_path"],
                                reason=i["reason"])
                for i in platform.review_queue()]

    @app.post("/review/{image_id}/adjudicate", response_model=AdjudicationResponse)
    def adjudicate(image_id: str, body: AdjudicationRequest,
                   p: Principal = Depends(principal)):
        require(p, "Expert")
        label = FstLabel.parse(body.label)
        with write_lock:
            cstate = platform.adjudicate(image_id, p.principal_id, label)
        return AdjudicationResponse(image_id=image_id, status=cstate.status,
                                    label=cstate.settled_label.name)

    # -- reports ---------------------------------------------------------------

    def sources():
        return reports.label_sources(platform.state, config.ita_results_path)

    @app.get("/reports/irr")
    def report_irr(methods: Optional[str] = None, p: Principal = Depends(principal)):
        require(p, "Admin")
        available = sources()
        names = methods.split(",") if methods else sorted(available)
        chosen = reports.resolve_methods(available, names)
        experts = [e for e in reports.EXPERT_METHODS if e in chosen]
        return irr_report(chosen, experts).to_dict()

    @app.get("/reports/confusion")
    def report_confusion(a: str, b: str, p: Principal = Depends(principal)):
        require(p, "Admin")
        chosen = reports.resolve_methods(sources(), [a, b])
        matrix = confusion_matrix(chosen[a], chosen[b])
        return {
            "a": a, "b": b,
            "labels": [l.name for l in matrix.labels],
            "counts": matrix.counts.tolist(),
            "column_percent": matrix.column_percent().round(2).tolist(),
            "row_percent": matrix.row_percent().round(2).tolist(),
            "total": matrix.total,
            "exact_match_rate": matrix.exact_match_rate(),
        }

    @app.get("/reports/crowd-curve")
    def report_crowd_curve(reference: str = "expert1",
                           sizes: str = "3,6,12,24,48,96",
                           draws: int = 25, seed: int = 0,
                           p: Principal = Depends(principal)):
        require(p, "Admin")
        ref = reports.resolve_methods(sources(), [reference])[reference]
        pool = reports.annotation_pools(platform.state)
        pool = {i: anns for i, anns in pool.items() if anns}
        size_list = [int(s) for s in sizes.split(",")]
        points = bootstrap_crowd_curve(pool, ref, size_list, draws, seed)
        return {"reference": reference, "points": [vars(pt) for pt in points]}

    @app.get("/reports/ita")
    def report_ita(p: Principal = Depends(principal)):
        require(p, "Admin")
        path = config.ita_results_path
        if not path.exists():
            raise UnknownMethod("no ITA results computed yet")
        return PlainTextResponse(path.read_text(), media_type="text/csv")

    # -- exports ----------------------------------------------------------------

    @app.get("/exports/consensus.csv")
    def export_consensus(p: Principal = Depends(principal)):
        require(p, "Admin")
        return PlainTextResponse(exports.consensus_csv(platform.state),
                                 media_type="text/csv")

    @app.get("/exports/annotations.csv")
    def export_annotations(p: Principal = Depends(principal)):
        require(p, "Admin")
        return PlainTextResponse(exports.annotations_csv(platform.state),
                                 media_type="text/csv")

    return app
