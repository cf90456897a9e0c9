"""Link-state advertisements, per-node LSDBs, and the byte codec.

Flooding here is synchronous and loss-free: every flood lands in every
node's LSDB with a fresh sequence number before the call returns. The
wire format is a simple self-describing TLV scheme:

    [type u8][length u16 BE][origin u16 BE][seq u32 BE][body]

    type 1 (FAD):        [algo u8][metric u8][calc u8][n u8]
                         then n constraint sub-TLVs, each
                         [subtype u8][mask 32 bytes]
                         subtype 1=exclude-any, 2=include-any, 3=include-all
                         mask bit i of the admin group = bit (i mod 8)
                         of byte (i // 8)
    type 2 (link attrs): [link-id len u8][link-id utf8]
                         [igp u32][te u32][delay u32][mask 32 bytes]
    type 3 (prefix SID): [prefix 4 bytes][algo u8][sid_index u32]

Constraint colors are resolved to masks at encode time; decode recovers
the color names from the affinity map it is given.
"""

from __future__ import annotations

import enum
import ipaddress
import struct
from dataclasses import dataclass, field

from .topology import (
    ADMIN_GROUP_BITS,
    FLEXALGO_MAX,
    FLEXALGO_MIN,
    AffinityMap,
    resolve_admin_group,
)

MAX_CONSTRAINT_COLORS = 10
MASK_BYTES = ADMIN_GROUP_BITS // 8


class MalformedTlv(Exception):
    pass


class MetricType(enum.IntEnum):
    IGP = 0
    TE_DEFAULT = 1
    MIN_DELAY = 2


class ConstraintOp(enum.IntEnum):
    EXCLUDE_ANY = 1
    INCLUDE_ANY = 2
    INCLUDE_ALL = 3


@dataclass(frozen=True)
class Constraint:
    op: ConstraintOp
    colors: frozenset[str]

    def __post_init__(self):
        if not 1 <= len(self.colors) <= MAX_CONSTRAINT_COLORS:
            raise ValueError(
                f"constraint takes 1-{MAX_CONSTRAINT_COLORS} colors, "
                f"got {len(self.colors)}"
            )


@dataclass(frozen=True)
class FadAdvert:
    algo: int
    calc_type: int
    metric_type: MetricType
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        if not FLEXALGO_MIN <= self.algo <= FLEXALGO_MAX:
            raise ValueError(f"FlexAlgo id {self.algo} outside 128-255")
        if self.calc_type not in (0, 1):
            raise ValueError(f"calc type must be 0 or 1, got {self.calc_type}")

    def key(self) -> tuple:
        return ("fad", self.algo)


@dataclass(frozen=True)
class LinkAttrAdvert:
    link: str
    igp_metric: int
    te_metric: int
    delay_us: int
    admin_group: int

    def key(self) -> tuple:
        return ("link", self.link)


@dataclass(frozen=True)
class PrefixSidAdvert:
    origin: int
    prefix: str
    algo: int
    sid_index: int

    def key(self) -> tuple:
        return ("sid", self.origin, self.algo)


AdvertBody = FadAdvert | LinkAttrAdvert | PrefixSidAdvert


@dataclass(frozen=True)
class Advertisement:
    origin: int
    seq: int
    body: AdvertBody

    def key(self) -> tuple:
        # FADs and link attributes are keyed per originator; Prefix-SID
        # bodies already carry their originator in the key.
        body_key = self.body.key()
        if isinstance(self.body, PrefixSidAdvert):
            return body_key
        return (self.origin, *body_key)


@dataclass
class Lsdb:
    owner: int
    records: dict[tuple, Advertisement] = field(default_factory=dict)

    def install(self, adv: Advertisement) -> bool:
        """Install unless an equal-or-newer record for the key exists."""
        key = adv.key()
        current = self.records.get(key)
        if current is not None and current.seq >= adv.seq:
            return False
        self.records[key] = adv
        return True

    def fad_adverts(self, algo: int) -> list[Advertisement]:
        return [
            adv
            for adv in self.records.values()
            if isinstance(adv.body, FadAdvert) and adv.body.algo == algo
        ]

    def link_attrs(self) -> dict[str, LinkAttrAdvert]:
        out: dict[str, LinkAttrAdvert] = {}
        for adv in self.records.values():
            if isinstance(adv.body, LinkAttrAdvert):
                out[adv.body.link] = adv.body
        return out

    def prefix_sids(self) -> dict[tuple[int, int], PrefixSidAdvert]:
        out: dict[tuple[int, int], PrefixSidAdvert] = {}
        for adv in self.records.values():
            if isinstance(adv.body, PrefixSidAdvert):
                out[(adv.body.origin, adv.body.algo)] = adv.body
        return out


def lsdbs_consistent(lsdbs: dict[int, Lsdb]) -> bool:
    """True iff every node's LSDB is key-by-key identical."""
    views = [
        {k: (a.origin, a.seq, a.body) for k, a in db.records.items()}
        for db in lsdbs.values()
    ]
    return all(v == views[0] for v in views[1:]) if views else True


# --- codec -----------------------------------------------------------------

_TYPE_FAD = 1
_TYPE_LINK = 2
_TYPE_SID = 3

_SUBTYPE_FOR_OP = {
    ConstraintOp.EXCLUDE_ANY: 1,
    ConstraintOp.INCLUDE_ANY: 2,
    ConstraintOp.INCLUDE_ALL: 3,
}
_OP_FOR_SUBTYPE = {v: k for k, v in _SUBTYPE_FOR_OP.items()}


def _mask_bytes(mask: int) -> bytes:
    return mask.to_bytes(MASK_BYTES, "little")


def encode_advert(adv: Advertisement, affinity: AffinityMap) -> bytes:
    body = adv.body
    if isinstance(body, FadAdvert):
        tlv_type = _TYPE_FAD
        payload = bytes(
            [body.algo, int(body.metric_type), body.calc_type, len(body.constraints)]
        )
        for constraint in body.constraints:
            mask = resolve_admin_group(affinity, set(constraint.colors))
            payload += bytes([_SUBTYPE_FOR_OP[constraint.op]]) + _mask_bytes(mask)
    elif isinstance(body, LinkAttrAdvert):
        tlv_type = _TYPE_LINK
        link = body.link.encode()
        if len(link) > 255:
            raise MalformedTlv("link id too long")
        payload = (
            bytes([len(link)])
            + link
            + struct.pack(">III", body.igp_metric, body.te_metric, body.delay_us)
            + _mask_bytes(body.admin_group)
        )
    elif isinstance(body, PrefixSidAdvert):
        tlv_type = _TYPE_SID
        if body.origin != adv.origin:
            raise MalformedTlv("Prefix-SID adverts are flooded by their originator")
        payload = (
            ipaddress.IPv4Address(body.prefix).packed
            + bytes([body.algo])
            + struct.pack(">I", body.sid_index)
        )
    else:
        raise MalformedTlv(f"unknown advertisement body {type(body).__name__}")
    inner = struct.pack(">HI", adv.origin, adv.seq) + payload
    return bytes([tlv_type]) + struct.pack(">H", len(inner)) + inner


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise MalformedTlv("truncated advertisement")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return struct.unpack(">H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]


def decode_advert(data: bytes, affinity: AffinityMap) -> Advertisement:
    reader = _Reader(data)
    tlv_type = reader.u8()
    length = reader.u16()
    if len(data) - reader.pos != length:
        raise MalformedTlv(
            f"declared length {length} != payload length {len(data) - reader.pos}"
        )
    origin = reader.u16()
    seq = reader.u32()
    body: AdvertBody
    if tlv_type == _TYPE_FAD:
        algo = reader.u8()
        metric = reader.u8()
        calc = reader.u8()
        n_constraints = reader.u8()
        if not FLEXALGO_MIN <= algo <= FLEXALGO_MAX:
            raise MalformedTlv(f"FlexAlgo id {algo} outside 128-255")
        if metric not in (0, 1, 2):
            raise MalformedTlv(f"unknown metric type {metric}")
        if calc not in (0, 1):
            raise MalformedTlv(f"unknown calc type {calc}")
        if n_constraints > MAX_CONSTRAINT_COLORS:
            raise MalformedTlv(f"{n_constraints} constraints exceeds cap")
        constraints = []
        for _ in range(n_constraints):
            subtype = reader.u8()
            if subtype not in _OP_FOR_SUBTYPE:
                raise MalformedTlv(f"unknown constraint subtype {subtype}")
            mask = int.from_bytes(reader.take(MASK_BYTES), "little")
            colors = affinity.colors_for_mask(mask)
            remainder = mask & ~resolve_admin_group(affinity, set(colors))
            if remainder:
                raise MalformedTlv("constraint mask has bits with no mapped color")
            if not 1 <= len(colors) <= MAX_CONSTRAINT_COLORS:
                raise MalformedTlv(f"constraint resolves to {len(colors)} colors")
            constraints.append(
                Constraint(op=_OP_FOR_SUBTYPE[subtype], colors=frozenset(colors))
            )
        body = FadAdvert(
            algo=algo,
            calc_type=calc,
            metric_type=MetricType(metric),
            constraints=tuple(constraints),
        )
    elif tlv_type == _TYPE_LINK:
        link_len = reader.u8()
        link = reader.take(link_len).decode()
        igp, te, delay = struct.unpack(">III", reader.take(12))
        mask = int.from_bytes(reader.take(MASK_BYTES), "little")
        body = LinkAttrAdvert(
            link=link, igp_metric=igp, te_metric=te, delay_us=delay, admin_group=mask
        )
    elif tlv_type == _TYPE_SID:
        prefix = str(ipaddress.IPv4Address(reader.take(4)))
        algo = reader.u8()
        sid_index = reader.u32()
        if algo != 0 and not FLEXALGO_MIN <= algo <= FLEXALGO_MAX:
            raise MalformedTlv(f"Prefix-SID algo {algo} outside 0/128-255")
        body = PrefixSidAdvert(origin=origin, prefix=prefix, algo=algo, sid_index=sid_index)
    else:
        raise MalformedTlv(f"unknown advertisement type {tlv_type}")
    if reader.pos != len(data):
        raise MalformedTlv("trailing bytes after payload")
    return Advertisement(origin=origin, seq=seq, body=body)
