"""Prefix-SID allocation, MPLS FIB construction, and ingress label stacks.

Labels come from one SRGB shared by every node, so transit swaps keep
the label value. The allocation scheme is:

    algo 0:        16000 + node id
    algo >= 128:   20000 + 10 * (algo - 127) + node id

which keeps all labels inside the default SRGB for node ids up to 9.
PHP is always on: the penultimate node pops the transport label, the
ingress nevertheless imposes the full transport+VPN stack.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .flexalgo import SpfResult
from .topology import FLEXALGO_MIN, Topology


class SidSpaceExceeded(Exception):
    pass


class NoPath(Exception):
    pass


@dataclass(frozen=True)
class Srgb:
    base: int = 16000
    size: int = 8000

    def __post_init__(self):
        if self.base + self.size > 1 << 20:
            raise ValueError("SRGB exceeds 20-bit label space")

    def contains(self, label: int) -> bool:
        return self.base <= label < self.base + self.size


@dataclass(frozen=True)
class SidAssignment:
    node: int
    algo: int
    sid_index: int
    label: int


class ActionKind(Enum):
    SWAP = "SWAP"
    PHP_POP = "PHP_POP"
    POP_AND_DELIVER = "POP_AND_DELIVER"


@dataclass(frozen=True)
class FibAction:
    kind: ActionKind
    out_label: int | None = None
    adjacency: str | None = None
    next_hop: str | None = None  # peer IP, display only
    vrf: str | None = None


@dataclass(frozen=True)
class FibEntry:
    owner: int
    in_label: int
    actions: tuple[FibAction, ...]  # ECMP list, ordered by neighbor id


LabelStack = list[int]


def sid_label(node_id: int, algo: int, srgb: Srgb = Srgb()) -> int:
    if algo == 0:
        label = srgb.base + node_id
    else:
        if node_id > 9:
            raise SidSpaceExceeded(f"label scheme limited to node ids <= 9, got {node_id}")
        label = 20000 + 10 * (algo - 127) + node_id
    if not srgb.contains(label):
        raise SidSpaceExceeded(f"label {label} outside SRGB [{srgb.base}, {srgb.base + srgb.size})")
    return label


def sid_assignments(node_id: int, participation: set[int], srgb: Srgb) -> list[SidAssignment]:
    """One assignment per algorithm: implicit algo 0 plus each FlexAlgo."""
    out = []
    for algo in [0, *sorted(a for a in participation if a >= FLEXALGO_MIN)]:
        label = sid_label(node_id, algo, srgb)
        out.append(
            SidAssignment(node=node_id, algo=algo, sid_index=label - srgb.base, label=label)
        )
    return out


def build_fib(
    owner: int,
    topo: Topology,
    spf_results: dict[int, SpfResult],
    sid_labels: dict[tuple[int, int], int],
    vpn_entries: dict[int, str],
) -> dict[int, FibEntry]:
    """Forwarding entries for one node.

    sid_labels maps (dest node, algo) to the advertised transport label;
    vpn_entries maps a VPN label to the VRF delivered locally.
    """
    entries: dict[int, FibEntry] = {}
    for algo, result in spf_results.items():
        for dest, route in result.routes.items():
            if dest == owner or not route.next_hops:
                continue
            in_label = sid_labels.get((dest, algo))
            if in_label is None:
                continue
            actions = []
            for adj_id, neighbor in route.next_hops:
                adj = topo.adjacencies[adj_id]
                if neighbor == dest:
                    actions.append(
                        FibAction(
                            kind=ActionKind.PHP_POP,
                            adjacency=adj_id,
                            next_hop=adj.peer_address,
                        )
                    )
                else:
                    actions.append(
                        FibAction(
                            kind=ActionKind.SWAP,
                            out_label=in_label,
                            adjacency=adj_id,
                            next_hop=adj.peer_address,
                        )
                    )
            if in_label in entries:
                # Same (dest, algo) label seen twice cannot happen; same
                # label for two dests would be a scheme collision.
                raise SidSpaceExceeded(f"label collision on {in_label} at node {owner}")
            entries[in_label] = FibEntry(owner=owner, in_label=in_label, actions=tuple(actions))
    for vpn_label, vrf_name in vpn_entries.items():
        if vpn_label in entries:
            raise SidSpaceExceeded(f"VPN label {vpn_label} collides at node {owner}")
        entries[vpn_label] = FibEntry(
            owner=owner,
            in_label=vpn_label,
            actions=(FibAction(kind=ActionKind.POP_AND_DELIVER, vrf=vrf_name),),
        )
    return entries


def ingress_stack(
    ingress: int,
    egress: int,
    algo: int,
    vpn_label: int,
    spf_result: SpfResult,
    srgb: Srgb,
) -> LabelStack:
    """Transport + VPN stack imposed at the ingress; empty for local delivery."""
    if ingress == egress:
        return []
    route = spf_result.routes.get(egress)
    if route is None or not route.next_hops:
        raise NoPath(f"algo {algo} disconnects {ingress} from {egress}")
    return [sid_label(egress, algo, srgb), vpn_label]
