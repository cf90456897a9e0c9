"""Packet forwarding over installed FIBs: ECMP hashing, traceroute, flows.

No queuing or loss is modeled; delay is purely a routing metric. The
ECMP hash is FNV-1a 64 over the canonical flow tuple, so the same flow
always takes the same path.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .sr_mpls import ActionKind, FibEntry

TRACEROUTE_PROTOCOL = 1  # ICMP-style probe flow


class ForwardingError(Exception):
    pass


class ForwardingLoop(ForwardingError):
    pass


@dataclass(frozen=True)
class Flow:
    vrf: str
    src_ip: str
    dst_ip: str
    protocol: int
    src_port: int
    dst_port: int

    def canonical(self) -> bytes:
        return (
            f"{self.vrf}|{self.src_ip}|{self.dst_ip}|"
            f"{self.protocol}|{self.src_port}|{self.dst_port}"
        ).encode()


@dataclass(frozen=True)
class TraceHop:
    node: int
    labels: tuple[int, ...]  # stack on the wire arriving at this node


@dataclass(frozen=True)
class TraceResult:
    hops: tuple[TraceHop, ...]


LinkCounters = Counter  # adjacency id -> packet count

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def ecmp_select(flow: Flow, n_next_hops: int) -> int:
    if n_next_hops < 1:
        raise ValueError("next-hop list must be non-empty")
    return fnv1a64(flow.canonical()) % n_next_hops


def forward_flow(
    ingress: int,
    flow: Flow,
    stack: list[int],
    egress: int,
    fibs: dict[int, dict[int, FibEntry]],
    counters: LinkCounters,
    count: int = 1,
) -> tuple[list[int], list[tuple[int, ...]]]:
    """Walk the FIBs from ingress, applying label actions hop by hop.

    Returns the traversed node list and the per-hop on-wire stacks (the
    stack as sent by each node, i.e. after its label operation). Link
    counters are incremented by `count` on every traversed adjacency.
    """
    path = [ingress]
    wire_stacks: list[tuple[int, ...]] = []
    if not stack:
        return path, wire_stacks  # local delivery
    current = ingress
    labels = list(stack)
    visited = {ingress}
    while True:
        entry = fibs[current].get(labels[0])
        if entry is None:
            raise ForwardingError(
                f"node {current} has no FIB entry for label {labels[0]}"
            )
        action = entry.actions[ecmp_select(flow, len(entry.actions))]
        if action.kind == ActionKind.POP_AND_DELIVER:
            labels.pop(0)
            break
        if action.kind == ActionKind.PHP_POP:
            labels.pop(0)
        else:  # SWAP
            labels[0] = action.out_label
        adj = action.adjacency
        if count:
            counters[adj] += count
        current = int(adj.split("-")[1])
        if current in visited:
            raise ForwardingLoop(f"node {current} repeated on path {path}")
        visited.add(current)
        path.append(current)
        wire_stacks.append(tuple(labels))
        if current == egress:
            # Egress consumes the remaining VPN label locally.
            break
    return path, wire_stacks


def trace_flow(vrf: str, src_ip: str, dst_ip: str) -> Flow:
    return Flow(
        vrf=vrf,
        src_ip=src_ip,
        dst_ip=dst_ip,
        protocol=TRACEROUTE_PROTOCOL,
        src_port=0,
        dst_port=0,
    )


def trace_result(path: list[int], wire_stacks: list[tuple[int, ...]]) -> TraceResult:
    hops = tuple(
        TraceHop(node=node, labels=labels)
        for node, labels in zip(path[1:], wire_stacks)
    )
    return TraceResult(hops=hops)


def enumerate_flow(vrf: str, src_prefix: str, dst_prefix: str, i: int) -> Flow:
    """Deterministic flow i of a bulk run: host part 1 + (i mod 254)."""
    import ipaddress

    src_net = ipaddress.ip_network(src_prefix)
    dst_net = ipaddress.ip_network(dst_prefix)
    host = 1 + (i % 254)
    return Flow(
        vrf=vrf,
        src_ip=str(src_net.network_address + host),
        dst_ip=str(dst_net.network_address + host),
        protocol=6,
        src_port=1024 + i,
        dst_port=80,
    )
