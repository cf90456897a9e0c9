"""User-facing path controller over the simulator.

Users request a custom constrained path as (metric, admin-group op,
colors); the controller either reuses a matching existing FlexAlgo or
creates the next free one, then binds it to the requester's ODN color.
FlexAlgo IDs are never user-chosen. All mutating calls are serialized
and atomic: validation happens before any state change.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum

from .core import Simulator
from .igp_flood import Constraint, ConstraintOp, FadAdvert, MetricType
from .scenario import METRIC_LABELS, METRIC_NAMES, OP_LABELS, OP_NAMES
from .topology import FLEXALGO_MAX, FLEXALGO_MIN, UnknownColor


class ControllerError(Exception):
    pass


class IdSpaceExhausted(ControllerError):
    pass


class UnknownAlgo(ControllerError):
    pass


class UnknownTargetColor(ControllerError):
    pass


class OutcomeKind(Enum):
    REUSED = "REUSED"
    CREATED = "CREATED"


@dataclass(frozen=True)
class FadRequest:
    metric_type: MetricType
    op: ConstraintOp
    colors: frozenset[str]

    @classmethod
    def from_names(cls, metric: str, op: str, colors: set[str]) -> "FadRequest":
        if metric not in METRIC_NAMES:
            raise ControllerError(f"unknown metric {metric!r}")
        if op not in OP_NAMES:
            raise ControllerError(f"unknown admin-group op {op!r}")
        return cls(
            metric_type=METRIC_NAMES[metric],
            op=OP_NAMES[op],
            colors=frozenset(colors),
        )

    def dedupe_key(self) -> tuple:
        return (self.metric_type, frozenset({(self.op, self.colors)}))


@dataclass(frozen=True)
class FadOutcome:
    kind: OutcomeKind
    algo: int
    bound_color: int


@dataclass
class EventReport:
    changed_algos: set[int]
    path_diffs: dict[str, tuple[list[int], list[int]]]

    @property
    def empty(self) -> bool:
        return not self.changed_algos and not self.path_diffs


class Controller:
    def __init__(self, sim: Simulator):
        self.sim = sim
        self._write_lock = threading.Lock()

    # --- mutations ----------------------------------------------------------

    def request_custom_path(self, req: FadRequest, target_color: int) -> FadOutcome:
        with self._write_lock:
            sim = self.sim
            if not 1 <= len(req.colors) <= 10:
                raise ControllerError(
                    f"requests take 1-10 colors, got {len(req.colors)}"
                )
            for color in req.colors:
                if color not in sim.topology.affinity.entries:
                    raise UnknownColor(f"color {color!r} not in affinity map")
            if not any(v.color == target_color for v in sim.vrfs.vrfs.values()):
                raise UnknownTargetColor(f"no VRF carries color {target_color}")
            existing = sim.selected_fads()
            for algo, fad in sorted(existing.items()):
                if fad.request_key() == req.dedupe_key():
                    sim.bind_odn(target_color, algo)
                    return FadOutcome(
                        kind=OutcomeKind.REUSED, algo=algo, bound_color=target_color
                    )
            new_algo = max(existing, default=FLEXALGO_MIN - 1) + 1
            if new_algo > FLEXALGO_MAX:
                raise IdSpaceExhausted("all FlexAlgo IDs 128-255 are taken")
            body = FadAdvert(
                algo=new_algo,
                calc_type=0,
                metric_type=req.metric_type,
                constraints=(Constraint(op=req.op, colors=req.colors),),
            )
            # Every node joins the new algorithm; the lowest node id
            # originates the definition.
            for node in sim.topology.nodes.values():
                node.participation.add(new_algo)
            sim.flood(min(sim.topology.nodes), body)
            sim.advertise_all_sids()
            sim.converge()
            sim.bind_odn(target_color, new_algo)
            return FadOutcome(
                kind=OutcomeKind.CREATED, algo=new_algo, bound_color=target_color
            )

    def set_link_delay(self, adj_id: str, delay_us: int) -> EventReport:
        with self._write_lock:
            before = self._vrf_paths()
            changed = self.sim.set_link_delay(adj_id, delay_us)
            after = self._vrf_paths()
            diffs = {
                vrf: (before[vrf], after[vrf])
                for vrf in before
                if before[vrf] != after.get(vrf)
            }
            return EventReport(changed_algos=changed, path_diffs=diffs)

    def _vrf_paths(self) -> dict[str, list[int]]:
        """Current traceroute hop nodes per steerable VRF, ingress to egress."""
        paths: dict[str, list[int]] = {}
        for vrf in self.sim.vrfs.vrfs.values():
            if vrf.color not in self.sim.vrfs.bindings:
                continue
            sides = sorted(vrf.nodes())
            if len(sides) < 2:
                continue
            ingress = sides[0]
            remote = [a for a in vrf.attachments if a.node != ingress]
            if not remote:
                continue
            dst = str(remote[0].prefix.network_address + 4)
            try:
                trace = self.sim.traceroute(ingress, vrf.name, dst)
            except Exception:
                continue
            paths[vrf.name] = [ingress, *(h.node for h in trace.hops)]
        return paths

    # --- read models --------------------------------------------------------

    def list_fads(self) -> list[dict]:
        out = []
        for algo, fad in sorted(self.sim.selected_fads().items()):
            participants = sorted(
                n.id
                for n in self.sim.topology.nodes.values()
                if algo in n.participation
            )
            out.append(
                {
                    "algo": algo,
                    "metric": METRIC_LABELS[fad.metric_type],
                    "calc": fad.calc_type,
                    "constraints": [
                        {"op": OP_LABELS[c.op], "colors": sorted(c.colors)}
                        for c in fad.constraints
                    ],
                    "participants": participants,
                }
            )
        return out

    def list_vrfs(self) -> list[dict]:
        bindings = self.sim.vrfs.bindings
        out = []
        for name in sorted(self.sim.vrfs.vrfs, key=lambda n: self.sim.vrfs.vrfs[n].ordinal):
            vrf = self.sim.vrfs.vrfs[name]
            policy = bindings.get(vrf.color)
            out.append(
                {
                    "name": vrf.name,
                    "rd": vrf.rd,
                    "color": vrf.color,
                    "vpn_label": vrf.vpn_label,
                    "bound_algo": policy.algo if policy else None,
                    "attachments": [
                        {"node": a.node, "prefix": str(a.prefix)}
                        for a in vrf.attachments
                    ],
                }
            )
        return out

    def get_paths(self, algo: int, source: int) -> dict:
        if source not in self.sim.topology.nodes:
            raise UnknownAlgo(f"unknown source node {source}")
        results = self.sim.spf_results.get(source, {})
        if algo not in results:
            raise UnknownAlgo(f"algorithm {algo} not computed on node {source}")
        result = results[algo]
        destinations = []
        for dest in sorted(result.routes):
            if dest == source:
                continue
            route = result.routes[dest]
            destinations.append(
                {
                    "dest": dest,
                    "router_id": self.sim.topology.nodes[dest].router_id,
                    "distance": route.distance,
                    "next_hops": [
                        {"adjacency": adj, "neighbor": neighbor}
                        for adj, neighbor in route.next_hops
                    ],
                }
            )
        return {"algo": algo, "source": source, "destinations": destinations}

    def get_topology(self) -> dict:
        topo = self.sim.topology
        return {
            "nodes": [
                {"id": n.id, "router_id": n.router_id}
                for n in sorted(topo.nodes.values(), key=lambda n: n.id)
            ],
            "links": [
                {
                    "id": a.id,
                    "from": a.src,
                    "to": a.dst,
                    "igp": a.igp_metric,
                    "te": a.te_metric,
                    "delay_us": a.delay_us,
                    "colors": topo.affinity.colors_for_mask(a.admin_group),
                }
                for a in sorted(topo.adjacencies.values(), key=lambda a: a.id)
            ],
            "affinity": dict(sorted(topo.affinity.entries.items())),
        }

    def get_counters(self) -> list[dict]:
        return [
            {"link": link, "count": count}
            for link, count in sorted(self.sim.counters.items())
        ]

    def bound_colors(self) -> dict[int, int]:
        return {c: p.algo for c, p in sorted(self.sim.vrfs.bindings.items())}
