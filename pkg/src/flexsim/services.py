"""VRFs, route distinguishers, colors, and ODN color-to-algorithm bindings.

BGP is abstracted away: a VRF carries static prefix attachments per node
and a plain integer color. Steering happens by binding a color to a
FlexAlgo; ingress lookups resolve the egress by longest-prefix match
over the VRF's attachments.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field

VPN_LABEL_BASE = 24001  # 24000/24001 reserved, first VRF lands on 24002


class ServiceError(Exception):
    pass


class DuplicateVrf(ServiceError):
    pass


class DuplicateColor(ServiceError):
    pass


class DuplicateRd(ServiceError):
    pass


class UnknownVrf(ServiceError):
    pass


class UnknownColor(ServiceError):
    pass


class InactiveAlgo(ServiceError):
    pass


class NotAttached(ServiceError):
    pass


class NoRoute(ServiceError):
    pass


class UnboundColor(ServiceError):
    pass


@dataclass
class Attachment:
    node: int
    prefix: ipaddress.IPv4Network
    interface: str


@dataclass
class Vrf:
    name: str
    rd: str
    color: int
    ordinal: int  # 1-based creation index, drives the VPN label
    attachments: list[Attachment] = field(default_factory=list)

    @property
    def vpn_label(self) -> int:
        return VPN_LABEL_BASE + self.ordinal

    def nodes(self) -> set[int]:
        return {a.node for a in self.attachments}


@dataclass(frozen=True)
class OdnPolicy:
    color: int
    algo: int


class VrfRegistry:
    def __init__(self) -> None:
        self.vrfs: dict[str, Vrf] = {}
        self.bindings: dict[int, OdnPolicy] = {}  # color -> policy

    def create_vrf(self, name: str, rd: str, color: int, ordinal: int) -> Vrf:
        if name in self.vrfs:
            raise DuplicateVrf(f"VRF {name} already exists")
        for vrf in self.vrfs.values():
            if vrf.rd == rd:
                raise DuplicateRd(f"RD {rd} already in use by {vrf.name}")
            if vrf.color == color:
                raise DuplicateColor(f"color {color} already in use by {vrf.name}")
            if vrf.ordinal == ordinal:
                raise ServiceError(f"ordinal {ordinal} already in use by {vrf.name}")
        vrf = Vrf(name=name, rd=rd, color=color, ordinal=ordinal)
        self.vrfs[name] = vrf
        return vrf

    def get(self, name: str) -> Vrf:
        if name not in self.vrfs:
            raise UnknownVrf(f"unknown VRF {name}")
        return self.vrfs[name]

    def by_color(self, color: int) -> Vrf:
        for vrf in self.vrfs.values():
            if vrf.color == color:
                return vrf
        raise UnknownColor(f"no VRF with color {color}")

    def attach(self, name: str, node: int, prefix: str, interface: str = "") -> None:
        vrf = self.get(name)
        net = ipaddress.ip_network(prefix)
        if any(a.prefix == net for a in vrf.attachments):
            raise ServiceError(f"prefix {prefix} already attached in {name}")
        vrf.attachments.append(Attachment(node=node, prefix=net, interface=interface))

    def vpn_label(self, node: int, name: str) -> int:
        vrf = self.get(name)
        if node not in vrf.nodes():
            raise NotAttached(f"VRF {name} not attached at node {node}")
        return vrf.vpn_label

    def bind_odn(self, color: int, algo: int, active_algos: set[int]) -> OdnPolicy:
        self.by_color(color)  # color must belong to some VRF
        if algo not in active_algos:
            raise InactiveAlgo(f"no selected FAD for algorithm {algo}")
        policy = OdnPolicy(color=color, algo=algo)
        self.bindings[color] = policy
        return policy

    def bound_algo(self, name: str) -> int:
        vrf = self.get(name)
        policy = self.bindings.get(vrf.color)
        if policy is None:
            raise UnboundColor(f"color {vrf.color} (VRF {name}) has no ODN binding")
        return policy.algo

    def resolve_egress(self, name: str, dst_ip: str) -> tuple[int, ipaddress.IPv4Network]:
        """Longest-prefix match over the VRF's attachments."""
        vrf = self.get(name)
        addr = ipaddress.ip_address(dst_ip)
        best: Attachment | None = None
        for att in vrf.attachments:
            if addr in att.prefix:
                if best is None or att.prefix.prefixlen > best.prefix.prefixlen:
                    best = att
        if best is None:
            raise NoRoute(f"no attachment in VRF {name} covers {dst_ip}")
        return best.node, best.prefix
