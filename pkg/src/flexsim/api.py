"""HTTP/JSON projection of the path controller.

Error mapping: 400 for bad input (unknown colors, invalid delay),
404 for unknown algorithms/links/VRFs, 409 when the FlexAlgo ID space
is exhausted.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import services, topology
from .controller import (
    Controller,
    ControllerError,
    FadRequest,
    IdSpaceExhausted,
    UnknownAlgo,
    UnknownTargetColor,
)
from .dataplane import ForwardingError
from .sr_mpls import NoPath


class FadRequestBody(BaseModel):
    metric: str
    op: str
    colors: list[str]
    target_color: int


class DelayBody(BaseModel):
    delay_us: int


class TracerouteBody(BaseModel):
    ingress: int
    vrf: str
    dst_ip: str


class FlowsBody(BaseModel):
    ingress: int
    vrf: str
    src_prefix: str
    dst_prefix: str
    n: int = Field(ge=1)


_BAD_REQUEST = (
    topology.UnknownColor,
    topology.InvalidDelay,
    services.UnknownColor,
    services.NoRoute,
    services.UnboundColor,
    UnknownTargetColor,
    ControllerError,
    NoPath,
    ValueError,
)
_NOT_FOUND = (
    UnknownAlgo,
    topology.UnknownLink,
    topology.UnknownNode,
    services.UnknownVrf,
)


def _http_error(exc: Exception) -> HTTPException:
    code = exc.__class__.__name__
    if isinstance(exc, IdSpaceExhausted):
        status = 409
    elif isinstance(exc, _NOT_FOUND):
        status = 404
    elif isinstance(exc, _BAD_REQUEST):
        status = 400
    else:
        raise exc
    return HTTPException(status_code=status, detail={"code": code, "message": str(exc)})


def create_app(controller: Controller, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="flexsim path controller")

    @app.get("/topology")
    def get_topology():
        return controller.get_topology()

    @app.get("/fads")
    def get_fads():
        return controller.list_fads()

    @app.get("/vrfs")
    def get_vrfs():
        return controller.list_vrfs()

    @app.post("/fads")
    def post_fad(body: FadRequestBody):
        try:
            req = FadRequest.from_names(body.metric, body.op, set(body.colors))
            outcome = controller.request_custom_path(req, body.target_color)
        except Exception as exc:
            raise _http_error(exc)
        return {
            "kind": outcome.kind.value,
            "algo": outcome.algo,
            "bound_color": outcome.bound_color,
        }

    @app.post("/links/{link_id}/delay")
    def post_delay(link_id: str, body: DelayBody):
        try:
            report = controller.set_link_delay(link_id, body.delay_us)
        except Exception as exc:
            raise _http_error(exc)
        return {
            "changed_algos": sorted(report.changed_algos),
            "path_diffs": {
                vrf: {"old": old, "new": new}
                for vrf, (old, new) in sorted(report.path_diffs.items())
            },
        }

    @app.get("/paths/{algo}")
    def get_paths(algo: int, source: int):
        try:
            return controller.get_paths(algo, source)
        except Exception as exc:
            raise _http_error(exc)

    @app.post("/traceroute")
    def post_traceroute(body: TracerouteBody):
        try:
            result = controller.sim.traceroute(body.ingress, body.vrf, body.dst_ip)
        except ForwardingError as exc:
            raise HTTPException(
                status_code=500,
                detail={"code": "ForwardingError", "message": str(exc)},
            )
        except Exception as exc:
            raise _http_error(exc)
        return {
            "hops": [
                {"node": hop.node, "labels": list(hop.labels)} for hop in result.hops
            ]
        }

    @app.post("/flows")
    def post_flows(body: FlowsBody):
        try:
            counters = controller.sim.run_flows(
                body.ingress, body.vrf, body.src_prefix, body.dst_prefix, body.n
            )
        except Exception as exc:
            raise _http_error(exc)
        return {
            "counters": [
                {"link": link, "count": count}
                for link, count in sorted(counters.items())
            ]
        }

    @app.get("/counters")
    def get_counters():
        return {"counters": controller.get_counters()}

    if static_dir is not None and Path(static_dir).is_dir():
        static_path = Path(static_dir)

        @app.get("/")
        def index():
            return FileResponse(static_path / "index.html")

        app.mount("/ui", StaticFiles(directory=static_path), name="ui")

    return app
