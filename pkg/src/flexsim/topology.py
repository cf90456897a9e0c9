"""Router graph, link attributes, and affinity color-to-bit mapping.

Every physical link is modeled as two directed adjacencies so that
unidirectional attributes (notably link delay) can diverge after creation.
Admin groups are 256-bit masks; colors map to bit positions through the
topology's affinity map.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field, replace

ADMIN_GROUP_BITS = 256

FLEXALGO_MIN = 128
FLEXALGO_MAX = 255


class TopologyError(Exception):
    pass


class DuplicateNode(TopologyError):
    pass


class UnknownNode(TopologyError):
    pass


class SelfLoop(TopologyError):
    pass


class UnknownColor(TopologyError):
    pass


class UnknownLink(TopologyError):
    pass


class InvalidDelay(TopologyError):
    pass


@dataclass
class Node:
    id: int
    router_id: str
    # FlexAlgo IDs (128-255) this node participates in; algo 0 is implicit.
    participation: set[int] = field(default_factory=set)

    def participates(self, algo: int) -> bool:
        return algo == 0 or algo in self.participation


@dataclass
class Adjacency:
    id: str
    src: int
    dst: int
    interface_name: str
    subnet: str
    local_address: str
    peer_address: str
    igp_metric: int
    te_metric: int
    delay_us: int
    admin_group: int  # 256-bit mask held as a Python int


@dataclass
class AffinityMap:
    entries: dict[str, int] = field(default_factory=dict)

    def define(self, color: str, bit: int) -> None:
        if color in self.entries:
            raise TopologyError(f"color {color!r} already defined")
        if bit in self.entries.values():
            raise TopologyError(f"bit position {bit} already in use")
        if not 0 <= bit < ADMIN_GROUP_BITS:
            raise TopologyError(f"bit position {bit} out of range")
        self.entries[color] = bit

    def colors_for_mask(self, mask: int) -> list[str]:
        return sorted(c for c, b in self.entries.items() if mask >> b & 1)


def resolve_admin_group(affinity: AffinityMap, colors: set[str]) -> int:
    """Return the 256-bit mask with exactly the bits of the given colors set."""
    mask = 0
    for color in colors:
        if color not in affinity.entries:
            raise UnknownColor(f"color {color!r} not in affinity map")
        mask |= 1 << affinity.entries[color]
    return mask


def adjacency_id(src: int, dst: int) -> str:
    return f"{src}-{dst}"


class Topology:
    def __init__(self) -> None:
        self.nodes: dict[int, Node] = {}
        self.adjacencies: dict[str, Adjacency] = {}
        self.affinity = AffinityMap()

    def add_node(self, node_id: int, router_id: str) -> Node:
        if node_id in self.nodes:
            raise DuplicateNode(f"node {node_id} already exists")
        if any(n.router_id == router_id for n in self.nodes.values()):
            raise DuplicateNode(f"router id {router_id} already exists")
        node = Node(id=node_id, router_id=router_id)
        self.nodes[node_id] = node
        return node

    def add_link(
        self,
        a: int,
        b: int,
        subnet: str,
        igp_metric: int = 1,
        te_metric: int = 1,
        delay_us: int = 100,
        colors: set[str] | None = None,
    ) -> tuple[str, str]:
        """Create the two directed adjacencies of one physical link.

        The lower node id takes host .1 of the subnet, the higher .2.
        Interface names are assigned per node in link-creation order.
        """
        if a not in self.nodes or b not in self.nodes:
            raise UnknownNode(f"unknown endpoint in link {a}-{b}")
        if a == b:
            raise SelfLoop(f"self loop on node {a}")
        if delay_us < 1:
            raise InvalidDelay(f"delay must be >= 1 us, got {delay_us}")
        net = ipaddress.ip_network(subnet)
        hosts = {min(a, b): str(net.network_address + 1),
                 max(a, b): str(net.network_address + 2)}
        mask = resolve_admin_group(self.affinity, colors or set())
        pair = [
            Adjacency(
                id=adjacency_id(src, dst),
                src=src,
                dst=dst,
                interface_name=f"Gi0/0/0/{self._link_count(src)}",
                subnet=str(net),
                local_address=hosts[src],
                peer_address=hosts[dst],
                igp_metric=igp_metric,
                te_metric=te_metric,
                delay_us=delay_us,
                admin_group=mask,
            )
            for src, dst in ((a, b), (b, a))
        ]
        for adj in pair:
            if adj.id in self.adjacencies:
                raise TopologyError(f"adjacency {adj.id} already exists")
        for adj in pair:
            self.adjacencies[adj.id] = adj
        return pair[0].id, pair[1].id

    def _link_count(self, node_id: int) -> int:
        return sum(1 for adj in self.adjacencies.values() if adj.src == node_id)

    def set_link_delay(self, adj_id: str, delay_us: int) -> Adjacency:
        if adj_id not in self.adjacencies:
            raise UnknownLink(f"unknown adjacency {adj_id!r}")
        if delay_us < 1:
            raise InvalidDelay(f"delay must be >= 1 us, got {delay_us}")
        adj = self.adjacencies[adj_id]
        self.adjacencies[adj_id] = replace(adj, delay_us=delay_us)
        return self.adjacencies[adj_id]

    def neighbors(self, node_id: int) -> list[Adjacency]:
        return [a for a in self.adjacencies.values() if a.src == node_id]

    def node_by_router_id(self, router_id: str) -> Node:
        for node in self.nodes.values():
            if node.router_id == router_id:
                return node
        raise UnknownNode(f"no node with router id {router_id}")
