"""FAD selection, constraint pruning, and per-algorithm SPF with ECMP.

SPF runs over a link view assembled from a node's LSDB (advertised
attributes), never over live topology attributes: a delay change only
takes effect after it has been re-flooded. Nodes that do not participate
in an algorithm are removed entirely, so they cannot serve as transit.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .igp_flood import Constraint, ConstraintOp, FadAdvert, Lsdb, MetricType
from .topology import AffinityMap, Topology, resolve_admin_group


@dataclass(frozen=True)
class Fad:
    algo: int
    calc_type: int
    metric_type: MetricType
    constraints: tuple[Constraint, ...]

    @classmethod
    def from_advert(cls, advert: FadAdvert) -> "Fad":
        return cls(
            algo=advert.algo,
            calc_type=advert.calc_type,
            metric_type=advert.metric_type,
            constraints=advert.constraints,
        )

    def request_key(self) -> tuple:
        """Dedupe key: metric plus the (op, colors) constraint set, calc ignored."""
        return (
            self.metric_type,
            frozenset((c.op, c.colors) for c in self.constraints),
        )


@dataclass(frozen=True)
class LinkView:
    """Adjacency attributes as seen by the computing node."""

    id: str
    src: int
    dst: int
    igp_metric: int
    te_metric: int
    delay_us: int
    admin_group: int

    def weight(self, metric_type: MetricType) -> int:
        if metric_type == MetricType.IGP:
            return self.igp_metric
        if metric_type == MetricType.TE_DEFAULT:
            return self.te_metric
        return self.delay_us


@dataclass(frozen=True)
class PrunedTopology:
    algo: int
    links: tuple[LinkView, ...]  # admitted adjacencies only
    participants: frozenset[int]


@dataclass(frozen=True)
class Route:
    dest: int
    distance: int
    # (adjacency id, neighbor node) sorted by neighbor ascending.
    next_hops: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class SpfResult:
    algo: int
    source: int
    routes: dict[int, Route]  # unreachable destinations absent


def link_views_from_topology(topo: Topology) -> list[LinkView]:
    return [
        LinkView(
            id=a.id,
            src=a.src,
            dst=a.dst,
            igp_metric=a.igp_metric,
            te_metric=a.te_metric,
            delay_us=a.delay_us,
            admin_group=a.admin_group,
        )
        for a in topo.adjacencies.values()
    ]


def link_views_from_lsdb(topo: Topology, lsdb: Lsdb) -> list[LinkView]:
    """Adjacencies as advertised; links never flooded are invisible."""
    attrs = lsdb.link_attrs()
    views = []
    for adj in topo.adjacencies.values():
        advert = attrs.get(adj.id)
        if advert is None:
            continue
        views.append(
            LinkView(
                id=adj.id,
                src=adj.src,
                dst=adj.dst,
                igp_metric=advert.igp_metric,
                te_metric=advert.te_metric,
                delay_us=advert.delay_us,
                admin_group=advert.admin_group,
            )
        )
    return views


def select_fad(lsdb: Lsdb, algo: int) -> Fad | None:
    """Pick the winning FAD for an algorithm: highest originating node."""
    adverts = lsdb.fad_adverts(algo)
    if not adverts:
        return None
    winner = max(adverts, key=lambda adv: adv.origin)
    return Fad.from_advert(winner.body)


def constraint_admits(constraint: Constraint, link_mask: int, affinity: AffinityMap) -> bool:
    mask = resolve_admin_group(affinity, set(constraint.colors))
    if constraint.op == ConstraintOp.EXCLUDE_ANY:
        return link_mask & mask == 0
    if constraint.op == ConstraintOp.INCLUDE_ANY:
        return link_mask & mask != 0
    return link_mask & mask == mask


def prune_topology(
    topo: Topology,
    fad: Fad,
    links: list[LinkView] | None = None,
) -> PrunedTopology:
    """Drop adjacencies failing any constraint and non-participating nodes."""
    if links is None:
        links = link_views_from_topology(topo)
    participants = frozenset(
        n.id for n in topo.nodes.values() if n.participates(fad.algo)
    )
    admitted = tuple(
        link
        for link in links
        if link.src in participants
        and link.dst in participants
        and all(
            constraint_admits(c, link.admin_group, topo.affinity)
            for c in fad.constraints
        )
    )
    return PrunedTopology(algo=fad.algo, links=admitted, participants=participants)


def spf(pt: PrunedTopology, metric_type: MetricType, source: int) -> SpfResult:
    """Dijkstra with full ECMP next-hop retention."""
    out_links: dict[int, list[LinkView]] = {}
    for link in pt.links:
        out_links.setdefault(link.src, []).append(link)

    dist: dict[int, int] = {source: 0}
    # dest -> set of (adjacency id, neighbor) first hops from the source.
    first_hops: dict[int, set[tuple[str, int]]] = {source: set()}
    heap: list[tuple[int, int]] = [(0, source)]
    done: set[int] = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done or d > dist.get(u, float("inf")):
            continue
        done.add(u)
        for link in out_links.get(u, ()):
            v = link.dst
            nd = d + link.weight(metric_type)
            if u == source:
                hops = {(link.id, v)}
            else:
                hops = first_hops[u]
            if nd < dist.get(v, float("inf")):
                dist[v] = nd
                first_hops[v] = set(hops)
                heapq.heappush(heap, (nd, v))
            elif nd == dist[v]:
                first_hops[v] |= hops
    routes = {
        dest: Route(
            dest=dest,
            distance=d,
            next_hops=tuple(sorted(first_hops[dest], key=lambda h: h[1])),
        )
        for dest, d in dist.items()
        if dest != source
    }
    routes[source] = Route(dest=source, distance=0, next_hops=())
    return SpfResult(algo=pt.algo, source=source, routes=routes)


def compute_algo(
    topo: Topology,
    lsdb: Lsdb,
    fad: Fad,
    source: int,
) -> SpfResult:
    links = link_views_from_lsdb(topo, lsdb)
    return spf(prune_topology(topo, fad, links), fad.metric_type, source)


ALGO0_FAD = Fad(algo=0, calc_type=0, metric_type=MetricType.IGP, constraints=())


def compute_all(topo: Topology, lsdb: Lsdb, node_id: int) -> dict[int, SpfResult]:
    """All SPF results for one node: algo 0 plus every active FlexAlgo."""
    node = topo.nodes[node_id]
    results: dict[int, SpfResult] = {}
    links = link_views_from_lsdb(topo, lsdb)
    pt0 = prune_topology(topo, ALGO0_FAD, links)
    results[0] = spf(pt0, MetricType.IGP, node_id)
    for algo in sorted(node.participation):
        fad = select_fad(lsdb, algo)
        if fad is None:
            continue
        results[algo] = spf(prune_topology(topo, fad, links), fad.metric_type, node_id)
    return results
