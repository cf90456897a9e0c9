"""The simulator core: owns topology, LSDBs, SIDs, FIBs, and services.

All mutation goes through this class and is single-writer; read paths
work on the structures it exposes. Routing state (SPF results, FIBs) is
derived exclusively from flooded advertisements, so attribute changes
only take effect once re-flooded and converged.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import dataplane, flexalgo, igp_flood, services, sr_mpls
from .dataplane import Flow, LinkCounters, TraceResult
from .flexalgo import Fad, SpfResult
from .igp_flood import Advertisement, AdvertBody, Lsdb, PrefixSidAdvert
from .services import VrfRegistry
from .sr_mpls import FibEntry, LabelStack, Srgb
from .topology import Topology, UnknownNode


@dataclass
class DelayChangeReport:
    changed_algos: set[int]
    # vrf -> (old hop nodes, new hop nodes); only VRFs whose path changed.
    path_diffs: dict[str, tuple[list[int], list[int]]]


class Simulator:
    def __init__(self, srgb: Srgb | None = None) -> None:
        self.topology = Topology()
        self.srgb = srgb or Srgb()
        self.vrfs = VrfRegistry()
        self.lsdbs: dict[int, Lsdb] = {}
        self._seq: dict[tuple, int] = {}
        self.spf_results: dict[int, dict[int, SpfResult]] = {}
        self.fibs: dict[int, dict[int, FibEntry]] = {}
        self.counters: LinkCounters = LinkCounters()

    # --- topology ----------------------------------------------------------

    def add_node(self, node_id: int, router_id: str):
        node = self.topology.add_node(node_id, router_id)
        self.lsdbs[node_id] = Lsdb(owner=node_id)
        return node

    def add_link(self, a: int, b: int, **attrs) -> tuple[str, str]:
        return self.topology.add_link(a, b, **attrs)

    # --- flooding ----------------------------------------------------------

    def flood(self, origin: int, body: AdvertBody) -> int:
        if origin not in self.topology.nodes:
            raise UnknownNode(f"unknown flood origin {origin}")
        probe = Advertisement(origin=origin, seq=0, body=body)
        key = probe.key()
        seq = self._seq.get(key, 0) + 1
        self._seq[key] = seq
        advert = Advertisement(origin=origin, seq=seq, body=body)
        updated = 0
        for lsdb in self.lsdbs.values():
            if lsdb.install(advert):
                updated += 1
        return updated

    def flood_link_attrs(self, adj_id: str) -> None:
        adj = self.topology.adjacencies[adj_id]
        self.flood(
            adj.src,
            igp_flood.LinkAttrAdvert(
                link=adj.id,
                igp_metric=adj.igp_metric,
                te_metric=adj.te_metric,
                delay_us=adj.delay_us,
                admin_group=adj.admin_group,
            ),
        )

    def flood_all_link_attrs(self) -> None:
        for adj_id in self.topology.adjacencies:
            self.flood_link_attrs(adj_id)

    def lsdb_consistent(self) -> bool:
        return igp_flood.lsdbs_consistent(self.lsdbs)

    def reference_lsdb(self) -> Lsdb:
        node = min(self.topology.nodes)
        return self.lsdbs[node]

    # --- FADs and SIDs ------------------------------------------------------

    def select_fad(self, algo: int) -> Fad | None:
        return flexalgo.select_fad(self.reference_lsdb(), algo)

    def selected_fads(self) -> dict[int, Fad]:
        lsdb = self.reference_lsdb()
        algos = {
            adv.body.algo
            for adv in lsdb.records.values()
            if isinstance(adv.body, igp_flood.FadAdvert)
        }
        out = {}
        for algo in sorted(algos):
            fad = flexalgo.select_fad(lsdb, algo)
            if fad is not None:
                out[algo] = fad
        return out

    def advertise_sids(self, node_id: int) -> list[PrefixSidAdvert]:
        node = self.topology.nodes[node_id]
        adverts = []
        for sid in sr_mpls.sid_assignments(node_id, node.participation, self.srgb):
            body = PrefixSidAdvert(
                origin=node_id,
                prefix=node.router_id,
                algo=sid.algo,
                sid_index=sid.sid_index,
            )
            self.flood(node_id, body)
            adverts.append(body)
        return adverts

    def advertise_all_sids(self) -> None:
        for node_id in sorted(self.topology.nodes):
            self.advertise_sids(node_id)

    # --- convergence --------------------------------------------------------

    def converge(self) -> set[int]:
        """Recompute every node's SPF results and FIBs.

        Returns the set of algorithms whose result changed on any node.
        """
        old = self.spf_results
        new: dict[int, dict[int, SpfResult]] = {}
        for node_id in sorted(self.topology.nodes):
            new[node_id] = flexalgo.compute_all(
                self.topology, self.lsdbs[node_id], node_id
            )
        changed: set[int] = set()
        for node_id, results in new.items():
            before = old.get(node_id, {})
            for algo in set(results) | set(before):
                if results.get(algo) != before.get(algo):
                    changed.add(algo)
        self.spf_results = new
        self.install_fibs()
        return changed

    def install_fibs(self) -> None:
        sid_labels: dict[tuple[int, int], int] = {}
        for lsdb in [self.reference_lsdb()]:
            for (origin, algo), advert in lsdb.prefix_sids().items():
                sid_labels[(origin, algo)] = self.srgb.base + advert.sid_index
        self.fibs = {}
        for node_id in sorted(self.topology.nodes):
            vpn_entries = {
                vrf.vpn_label: vrf.name
                for vrf in self.vrfs.vrfs.values()
                if node_id in vrf.nodes()
            }
            self.fibs[node_id] = sr_mpls.build_fib(
                node_id,
                self.topology,
                self.spf_results[node_id],
                sid_labels,
                vpn_entries,
            )

    def set_link_delay(self, adj_id: str, delay_us: int) -> set[int]:
        """Change a unidirectional delay, re-flood, reconverge."""
        self.topology.set_link_delay(adj_id, delay_us)
        self.flood_link_attrs(adj_id)
        return self.converge()

    # --- services / steering ------------------------------------------------

    def bind_odn(self, color: int, algo: int) -> services.OdnPolicy:
        active = set(self.selected_fads())
        return self.vrfs.bind_odn(color, algo, active)

    def ingress_lookup(self, ingress: int, vrf_name: str, dst_ip: str) -> tuple[int, LabelStack]:
        egress, _prefix = self.vrfs.resolve_egress(vrf_name, dst_ip)
        return egress, self.ingress_stack(ingress, vrf_name, egress)

    def ingress_stack(self, ingress: int, vrf_name: str, egress: int) -> LabelStack:
        algo = self.vrfs.bound_algo(vrf_name)
        vpn = self.vrfs.vpn_label(egress, vrf_name)
        return sr_mpls.ingress_stack(
            ingress, egress, algo, vpn, self.spf_results[ingress][algo], self.srgb
        )

    # --- dataplane ----------------------------------------------------------

    def forward_flow(
        self, ingress: int, flow: Flow, count: int = 1
    ) -> tuple[list[int], list[tuple[int, ...]], LinkCounters]:
        egress, stack = self.ingress_lookup(ingress, flow.vrf, flow.dst_ip)
        run_counters: LinkCounters = LinkCounters()
        path, stacks = dataplane.forward_flow(
            ingress, flow, stack, egress, self.fibs, run_counters, count
        )
        self.counters.update(run_counters)
        return path, stacks, run_counters

    def traceroute(self, ingress: int, vrf_name: str, dst_ip: str) -> TraceResult:
        src_ip = self._probe_source(ingress, vrf_name)
        flow = dataplane.trace_flow(vrf_name, src_ip, dst_ip)
        path, stacks, _ = self.forward_flow(ingress, flow, count=0)
        return dataplane.trace_result(path, stacks)

    def _probe_source(self, ingress: int, vrf_name: str) -> str:
        # Probes originate from the attached host on the ingress side (.2).
        vrf = self.vrfs.get(vrf_name)
        for att in vrf.attachments:
            if att.node == ingress:
                return str(att.prefix.network_address + 2)
        return self.topology.nodes[ingress].router_id

    def run_flows(
        self, ingress: int, vrf_name: str, src_prefix: str, dst_prefix: str, n: int
    ) -> LinkCounters:
        if n < 1:
            raise ValueError("flow count must be >= 1")
        run_counters: LinkCounters = LinkCounters()
        for i in range(n):
            flow = dataplane.enumerate_flow(vrf_name, src_prefix, dst_prefix, i)
            egress, stack = self.ingress_lookup(ingress, flow.vrf, flow.dst_ip)
            dataplane.forward_flow(
                ingress, flow, stack, egress, self.fibs, run_counters, 1
            )
        self.counters.update(run_counters)
        return run_counters
