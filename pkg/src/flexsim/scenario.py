"""Declarative scenario files and the built-in four-router scenario.

The format is line-oriented, one statement per line:

    section: key = value        # comment

Sections:
    node: <id> = <router-id>
    affinity: <color> = <bit>
    link: <a>-<b> = subnet=<net> igp=<n> te=<n> delay=<us> [colors=c1,c2]
    srgb: base|size = <n>
    fad: <algo> = metric=igp|te|delay calc=0|1 [constraint=<op>:<c1,c2>]... participants=<id,id,...>
    vrf: <name> = rd=<A:B> color=<n>
    attach: <name> = <node> <prefix> [if=<name>]
    bind: <color> = <algo>

Loading builds a fully converged simulator: links and FADs flooded from
every relevant node, SIDs advertised, FIBs installed, bindings applied.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field

from .core import Simulator
from .flexalgo import Fad
from .igp_flood import Constraint, ConstraintOp, FadAdvert, MetricType
from .sr_mpls import Srgb
from .topology import FLEXALGO_MAX, FLEXALGO_MIN


class ParseError(Exception):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(Exception):
    pass


METRIC_NAMES = {
    "igp": MetricType.IGP,
    "te": MetricType.TE_DEFAULT,
    "te-metric": MetricType.TE_DEFAULT,
    "delay": MetricType.MIN_DELAY,
}
METRIC_LABELS = {
    MetricType.IGP: "igp",
    MetricType.TE_DEFAULT: "te-metric",
    MetricType.MIN_DELAY: "delay",
}
OP_NAMES = {
    "exclude-any": ConstraintOp.EXCLUDE_ANY,
    "include-any": ConstraintOp.INCLUDE_ANY,
    "include-all": ConstraintOp.INCLUDE_ALL,
}
OP_LABELS = {v: k for k, v in OP_NAMES.items()}


@dataclass
class LinkDecl:
    a: int
    b: int
    subnet: str
    igp: int = 1
    te: int = 1
    delay: int = 100
    colors: list[str] = field(default_factory=list)


@dataclass
class FadDecl:
    algo: int
    metric: MetricType
    calc: int
    constraints: list[tuple[ConstraintOp, list[str]]]
    participants: list[int]


@dataclass
class VrfDecl:
    name: str
    rd: str
    color: int
    attachments: list[tuple[int, str, str]] = field(default_factory=list)


@dataclass
class ScenarioSpec:
    nodes: dict[int, str] = field(default_factory=dict)
    affinity: dict[str, int] = field(default_factory=dict)
    links: list[LinkDecl] = field(default_factory=list)
    srgb_base: int = 16000
    srgb_size: int = 8000
    fads: list[FadDecl] = field(default_factory=list)
    vrfs: list[VrfDecl] = field(default_factory=list)
    bindings: list[tuple[int, int]] = field(default_factory=list)


def _kv_tokens(value: str, lineno: int) -> list[tuple[str, str]]:
    pairs = []
    for token in value.split():
        if "=" not in token:
            raise ParseError(f"expected key=value token, got {token!r}", lineno)
        k, _, v = token.partition("=")
        pairs.append((k, v))
    return pairs


def parse_scenario(text: str) -> ScenarioSpec:
    spec = ScenarioSpec()
    saw_statement = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        saw_statement = True
        if ":" not in line:
            raise ParseError("expected 'section: key = value'", lineno)
        section, _, rest = line.partition(":")
        section = section.strip()
        if "=" not in rest:
            raise ParseError("missing '=' in statement", lineno, len(section) + 2)
        key, _, value = rest.partition("=")
        key = key.strip()
        value = value.strip()
        try:
            _parse_statement(spec, section, key, value, lineno)
        except (ValueError, KeyError) as exc:
            raise ParseError(str(exc), lineno) from exc
    if not saw_statement:
        raise ParseError("empty scenario", 1)
    return spec


def _parse_statement(spec: ScenarioSpec, section: str, key: str, value: str, lineno: int) -> None:
    if section == "node":
        spec.nodes[int(key)] = value
    elif section == "affinity":
        spec.affinity[key] = int(value)
    elif section == "link":
        a, _, b = key.partition("-")
        decl = LinkDecl(a=int(a), b=int(b), subnet="")
        for k, v in _kv_tokens(value, lineno):
            if k == "subnet":
                decl.subnet = v
            elif k == "igp":
                decl.igp = int(v)
            elif k == "te":
                decl.te = int(v)
            elif k == "delay":
                decl.delay = int(v)
            elif k == "colors":
                decl.colors = v.split(",")
            else:
                raise ParseError(f"unknown link attribute {k!r}", lineno)
        if not decl.subnet:
            raise ParseError("link requires subnet=", lineno)
        spec.links.append(decl)
    elif section == "srgb":
        if key == "base":
            spec.srgb_base = int(value)
        elif key == "size":
            spec.srgb_size = int(value)
        else:
            raise ParseError(f"unknown srgb field {key!r}", lineno)
    elif section == "fad":
        algo = int(key)
        metric: MetricType | None = None
        calc = 0
        constraints: list[tuple[ConstraintOp, list[str]]] = []
        participants: list[int] = []
        for k, v in _kv_tokens(value, lineno):
            if k == "metric":
                if v not in METRIC_NAMES:
                    raise ParseError(f"unknown metric {v!r}", lineno)
                metric = METRIC_NAMES[v]
            elif k == "calc":
                calc = int(v)
            elif k == "constraint":
                op_name, _, colors = v.partition(":")
                if op_name not in OP_NAMES:
                    raise ParseError(f"unknown constraint op {op_name!r}", lineno)
                constraints.append((OP_NAMES[op_name], colors.split(",")))
            elif k == "participants":
                participants = [int(p) for p in v.split(",")]
            else:
                raise ParseError(f"unknown fad attribute {k!r}", lineno)
        if metric is None:
            raise ParseError("fad requires metric=", lineno)
        spec.fads.append(
            FadDecl(algo=algo, metric=metric, calc=calc, constraints=constraints,
                    participants=participants)
        )
    elif section == "vrf":
        rd = ""
        color = -1
        for k, v in _kv_tokens(value, lineno):
            if k == "rd":
                rd = v
            elif k == "color":
                color = int(v)
            else:
                raise ParseError(f"unknown vrf attribute {k!r}", lineno)
        if not rd or color < 0:
            raise ParseError("vrf requires rd= and color=", lineno)
        spec.vrfs.append(VrfDecl(name=key, rd=rd, color=color))
    elif section == "attach":
        parts = value.split()
        if len(parts) < 2:
            raise ParseError("attach requires '<node> <prefix>'", lineno)
        node = int(parts[0])
        prefix = parts[1]
        interface = ""
        for k, v in _kv_tokens(" ".join(parts[2:]), lineno):
            if k == "if":
                interface = v
            else:
                raise ParseError(f"unknown attach attribute {k!r}", lineno)
        for vrf in spec.vrfs:
            if vrf.name == key:
                vrf.attachments.append((node, prefix, interface))
                return
        raise ParseError(f"attach before vrf declaration of {key!r}", lineno)
    elif section == "bind":
        spec.bindings.append((int(key), int(value)))
    else:
        raise ParseError(f"unknown section {section!r}", lineno)


def validate_spec(spec: ScenarioSpec) -> None:
    if not spec.nodes:
        raise ValidationError("scenario has no nodes")
    for decl in spec.links:
        for end in (decl.a, decl.b):
            if end not in spec.nodes:
                raise ValidationError(f"link {decl.a}-{decl.b} references unknown node {end}")
        for color in decl.colors:
            if color not in spec.affinity:
                raise ValidationError(f"link {decl.a}-{decl.b} uses unknown color {color!r}")
    seen_algos = set()
    for fad in spec.fads:
        if not FLEXALGO_MIN <= fad.algo <= FLEXALGO_MAX:
            raise ValidationError(f"FlexAlgo id {fad.algo} outside 128-255")
        if fad.algo in seen_algos:
            raise ValidationError(f"duplicate FAD for algorithm {fad.algo}")
        seen_algos.add(fad.algo)
        for _, colors in fad.constraints:
            if not 1 <= len(colors) <= 10:
                raise ValidationError(
                    f"FAD {fad.algo} constraint has {len(colors)} colors (1-10 allowed)"
                )
            for color in colors:
                if color not in spec.affinity:
                    raise ValidationError(f"FAD {fad.algo} uses unknown color {color!r}")
        for node in fad.participants:
            if node not in spec.nodes:
                raise ValidationError(f"FAD {fad.algo} participant {node} unknown")
    names = [v.name for v in spec.vrfs]
    if len(names) != len(set(names)):
        raise ValidationError("duplicate VRF name")
    for vrf in spec.vrfs:
        for node, _prefix, _iface in vrf.attachments:
            if node not in spec.nodes:
                raise ValidationError(f"VRF {vrf.name} attached at unknown node {node}")
    colors = {v.color for v in spec.vrfs}
    for color, algo in spec.bindings:
        if color not in colors:
            raise ValidationError(f"binding for color {color} matches no VRF")
        if algo not in seen_algos:
            raise ValidationError(f"binding targets undefined FlexAlgo {algo}")


def build_simulator(spec: ScenarioSpec) -> Simulator:
    validate_spec(spec)
    sim = Simulator(srgb=Srgb(base=spec.srgb_base, size=spec.srgb_size))
    for bit_color, bit in sorted(spec.affinity.items()):
        sim.topology.affinity.define(bit_color, bit)
    for node_id in sorted(spec.nodes):
        sim.add_node(node_id, spec.nodes[node_id])
    for decl in spec.links:
        sim.add_link(
            decl.a,
            decl.b,
            subnet=decl.subnet,
            igp_metric=decl.igp,
            te_metric=decl.te,
            delay_us=decl.delay,
            colors=set(decl.colors),
        )
    for fad in spec.fads:
        for node in fad.participants:
            sim.topology.nodes[node].participation.add(fad.algo)
    sim.flood_all_link_attrs()
    for fad in spec.fads:
        body = FadAdvert(
            algo=fad.algo,
            calc_type=fad.calc,
            metric_type=fad.metric,
            constraints=tuple(
                Constraint(op=op, colors=frozenset(colors))
                for op, colors in fad.constraints
            ),
        )
        for node in sorted(fad.participants):
            sim.flood(node, body)
    sim.advertise_all_sids()
    sim.converge()
    for ordinal, vrf in enumerate(spec.vrfs, start=1):
        sim.vrfs.create_vrf(vrf.name, vrf.rd, vrf.color, ordinal)
        for node, prefix, interface in vrf.attachments:
            sim.vrfs.attach(
                vrf.name, node, prefix, interface or f"Gi0/0/0/{4 + ordinal}"
            )
    for color, algo in spec.bindings:
        sim.bind_odn(color, algo)
    # VRFs arrive after the first convergence; refresh FIBs so the VPN
    # delivery entries are installed.
    sim.install_fibs()
    return sim


def load_scenario(text: str) -> Simulator:
    return build_simulator(parse_scenario(text))


def export_scenario(sim: Simulator) -> str:
    """Emit scenario text reproducing the simulator's configuration."""
    lines = []
    for node_id in sorted(sim.topology.nodes):
        lines.append(f"node: {node_id} = {sim.topology.nodes[node_id].router_id}")
    for color, bit in sorted(sim.topology.affinity.entries.items()):
        lines.append(f"affinity: {color} = {bit}")
    seen = set()
    for adj in sim.topology.adjacencies.values():
        key = tuple(sorted((adj.src, adj.dst)))
        if key in seen:
            continue
        seen.add(key)
        colors = sim.topology.affinity.colors_for_mask(adj.admin_group)
        parts = [
            f"link: {key[0]}-{key[1]} = subnet={adj.subnet}",
            f"igp={adj.igp_metric}",
            f"te={adj.te_metric}",
            f"delay={adj.delay_us}",
        ]
        if colors:
            parts.append("colors=" + ",".join(colors))
        lines.append(" ".join(parts))
    lines.append(f"srgb: base = {sim.srgb.base}")
    lines.append(f"srgb: size = {sim.srgb.size}")
    for algo, fad in sorted(sim.selected_fads().items()):
        participants = sorted(
            n.id for n in sim.topology.nodes.values() if algo in n.participation
        )
        parts = [
            f"fad: {algo} = metric={_scenario_metric(fad)}",
            f"calc={fad.calc_type}",
        ]
        for constraint in fad.constraints:
            parts.append(
                f"constraint={OP_LABELS[constraint.op]}:" + ",".join(sorted(constraint.colors))
            )
        parts.append("participants=" + ",".join(str(p) for p in participants))
        lines.append(" ".join(parts))
    for vrf in sorted(sim.vrfs.vrfs.values(), key=lambda v: v.ordinal):
        lines.append(f"vrf: {vrf.name} = rd={vrf.rd} color={vrf.color}")
    for vrf in sorted(sim.vrfs.vrfs.values(), key=lambda v: v.ordinal):
        for att in vrf.attachments:
            lines.append(
                f"attach: {vrf.name} = {att.node} {att.prefix} if={att.interface}"
            )
    for color in sorted(sim.vrfs.bindings):
        lines.append(f"bind: {color} = {sim.vrfs.bindings[color].algo}")
    return "\n".join(lines) + "\n"


def _scenario_metric(fad: Fad) -> str:
    return {
        MetricType.IGP: "igp",
        MetricType.TE_DEFAULT: "te",
        MetricType.MIN_DELAY: "delay",
    }[fad.metric_type]


def builtin_scenario_text() -> str:
    ref = importlib.resources.files("flexsim") / "scenarios" / "builtin.fsim"
    return ref.read_text()


def load_builtin_scenario() -> Simulator:
    return load_scenario(builtin_scenario_text())
