"""Command-line front end.

Every invocation loads a scenario (the built-in one by default), runs
one command against it, and prints stable-sorted plain text suitable
for golden files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import igp_flood, scenario
from .controller import Controller
from .core import Simulator
from .experiments import run_experiment
from .scenario import METRIC_LABELS, OP_LABELS


def _load(args) -> Simulator:
    if args.scenario:
        text = Path(args.scenario).read_text()
    else:
        text = scenario.builtin_scenario_text()
    return scenario.load_scenario(text)


def render_topology(sim: Simulator) -> str:
    lines = []
    for node in sorted(sim.topology.nodes.values(), key=lambda n: n.id):
        algos = ",".join(str(a) for a in sorted(node.participation))
        lines.append(f"node {node.id} router-id {node.router_id} algos {algos or '-'}")
    for adj in sorted(sim.topology.adjacencies.values(), key=lambda a: a.id):
        colors = ",".join(sim.topology.affinity.colors_for_mask(adj.admin_group)) or "-"
        lines.append(
            f"link {adj.id} {adj.interface_name} subnet {adj.subnet} "
            f"igp {adj.igp_metric} te {adj.te_metric} delay {adj.delay_us}us "
            f"colors {colors}"
        )
    return "\n".join(lines)


def render_fads(sim: Simulator) -> str:
    lines = []
    for algo, fad in sorted(sim.selected_fads().items()):
        constraints = " ".join(
            f"{OP_LABELS[c.op]}:{','.join(sorted(c.colors))}" for c in fad.constraints
        )
        lines.append(
            f"fad {algo} metric {METRIC_LABELS[fad.metric_type]} "
            f"calc {fad.calc_type} constraints {constraints or '-'}"
        )
    return "\n".join(lines)


def render_spf(sim: Simulator, algo: int, node: int) -> str:
    results = sim.spf_results.get(node, {})
    if algo not in results:
        return f"algo {algo} not computed on node {node}"
    lines = []
    result = results[algo]
    for dest in sorted(result.routes):
        if dest == node:
            continue
        route = result.routes[dest]
        hops = " ".join(f"{adj}/{n}" for adj, n in route.next_hops)
        lines.append(f"{node} algo {algo} dest {dest} distance {route.distance} via {hops}")
    return "\n".join(lines)


def render_fib(sim: Simulator, node: int) -> str:
    lines = []
    for in_label in sorted(sim.fibs.get(node, {})):
        entry = sim.fibs[node][in_label]
        for action in entry.actions:
            if action.kind.value == "POP_AND_DELIVER":
                lines.append(f"{node} {in_label} -> POP_AND_DELIVER vrf {action.vrf}")
            elif action.kind.value == "PHP_POP":
                lines.append(
                    f"{node} {in_label} -> PHP_POP via {action.adjacency} nh {action.next_hop}"
                )
            else:
                lines.append(
                    f"{node} {in_label} -> SWAP {action.out_label} "
                    f"via {action.adjacency} nh {action.next_hop}"
                )
    return "\n".join(lines)


def render_lsdb(sim: Simulator, node: int) -> str:
    lsdb = sim.lsdbs[node]
    lines = []
    for key in sorted(lsdb.records, key=str):
        advert = lsdb.records[key]
        data = igp_flood.encode_advert(advert, sim.topology.affinity)
        lines.append(f"{key} {data.hex()}")
    return "\n".join(lines)


def _default_ingress(sim: Simulator, vrf_name: str) -> int:
    return min(sim.vrfs.get(vrf_name).nodes())


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="flexsim")
    parser.add_argument(
        "--scenario", help="scenario file (defaults to the built-in one)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("load", help="validate a scenario file and print a summary")
    p.add_argument("file")

    p = sub.add_parser("show", help="inspect simulator state")
    p.add_argument("what", choices=["topology", "fads", "spf", "fib", "lsdb"])
    p.add_argument("args", nargs="*")

    p = sub.add_parser("traceroute")
    p.add_argument("vrf")
    p.add_argument("dst")
    p.add_argument("--ingress", type=int)

    p = sub.add_parser("flows")
    p.add_argument("vrf")
    p.add_argument("src_prefix")
    p.add_argument("dst_prefix")
    p.add_argument("n", type=int)
    p.add_argument("--ingress", type=int)

    p = sub.add_parser("set-delay")
    p.add_argument("link")
    p.add_argument("delay_us", type=int)

    p = sub.add_parser("run-experiment")
    p.add_argument("id", choices=["1", "2", "3", "controller", "all"])

    p = sub.add_parser("export", help="print the loaded scenario as scenario text")

    p = sub.add_parser("serve", help="serve the controller API and UI")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", help="static UI asset directory")

    args = parser.parse_args(argv)

    if args.command == "load":
        args.scenario = args.file
        sim = _load(args)
        print(
            f"loaded: {len(sim.topology.nodes)} nodes, "
            f"{len(sim.topology.adjacencies) // 2} links, "
            f"{len(sim.vrfs.vrfs)} VRFs, "
            f"{len(sim.selected_fads())} FADs, "
            f"lsdb_consistent={sim.lsdb_consistent()}"
        )
        return 0

    sim = _load(args)

    if args.command == "show":
        if args.what == "topology":
            print(render_topology(sim))
        elif args.what == "fads":
            print(render_fads(sim))
        elif args.what == "spf":
            print(render_spf(sim, int(args.args[0]), int(args.args[1])))
        elif args.what == "fib":
            print(render_fib(sim, int(args.args[0])))
        elif args.what == "lsdb":
            print(render_lsdb(sim, int(args.args[0])))
        return 0

    if args.command == "traceroute":
        ingress = args.ingress or _default_ingress(sim, args.vrf)
        trace = sim.traceroute(ingress, args.vrf, args.dst)
        for hop in trace.hops:
            labels = ",".join(str(l) for l in hop.labels) or "-"
            print(f"{hop.node} [{labels}]")
        return 0

    if args.command == "flows":
        ingress = args.ingress or _default_ingress(sim, args.vrf)
        counters = sim.run_flows(ingress, args.vrf, args.src_prefix, args.dst_prefix, args.n)
        for adj_id in sorted(counters):
            src, _, dst = adj_id.partition("-")
            print(f"{src}->{dst} {counters[adj_id]}")
        return 0

    if args.command == "set-delay":
        changed = sim.set_link_delay(args.link, args.delay_us)
        print(f"changed algos: {','.join(str(a) for a in sorted(changed)) or '-'}")
        return 0

    if args.command == "run-experiment":
        ids = ["1", "2", "3", "controller"] if args.id == "all" else [args.id]
        failed = False
        for experiment_id in ids:
            report = run_experiment(Controller(_load(args)), experiment_id)
            print(report.render())
            failed |= not report.passed
        return 1 if failed else 0

    if args.command == "export":
        print(scenario.export_scenario(sim), end="")
        return 0

    if args.command == "serve":
        import uvicorn

        from .api import create_app

        ui_dir = args.ui_dir or _default_ui_dir()
        app = create_app(Controller(sim), static_dir=ui_dir)
        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    return 2


def _default_ui_dir() -> str | None:
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return str(candidate) if candidate.is_dir() else None


if __name__ == "__main__":
    sys.exit(main())
