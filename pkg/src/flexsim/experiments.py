"""Golden-checked experiment scripts over the built-in scenario.

Each experiment mutates the controller it is given; run each on a
freshly loaded scenario for reproducible results. Expectations live in
the goldens/*.json data files, not in code.
"""

from __future__ import annotations

import importlib.resources
import json
from dataclasses import dataclass, field

from .controller import Controller, FadRequest
from .sr_mpls import ActionKind


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class ExperimentReport:
    experiment: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append(Check(name=name, ok=bool(ok), detail=detail))

    def render(self) -> str:
        lines = []
        for check in self.checks:
            status = "PASS" if check.ok else "FAIL"
            suffix = f"  ({check.detail})" if check.detail and not check.ok else ""
            lines.append(f"[{status}] {self.experiment}: {check.name}{suffix}")
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(f"[{verdict}] {self.experiment}: overall")
        return "\n".join(lines)


def load_golden(name: str) -> dict:
    ref = importlib.resources.files("flexsim") / "goldens" / f"{name}.json"
    return json.loads(ref.read_text())


def _check_traceroute(ctl: Controller, report: ExperimentReport, spec: dict) -> None:
    trace = ctl.sim.traceroute(spec["ingress"], spec["vrf"], spec["dst"])
    hops = [h.node for h in trace.hops]
    stacks = [list(h.labels) for h in trace.hops]
    report.add(
        f"traceroute {spec['vrf']} {spec['dst']} hops",
        hops == spec["hops"],
        f"got {hops}, want {spec['hops']}",
    )
    if "wire_stacks" in spec:
        report.add(
            f"traceroute {spec['vrf']} {spec['dst']} label stacks",
            stacks == spec["wire_stacks"],
            f"got {stacks}, want {spec['wire_stacks']}",
        )


def run_experiment_1(ctl: Controller) -> ExperimentReport:
    golden = load_golden("experiment1")
    report = ExperimentReport("experiment 1")
    for spec in golden["traceroutes"]:
        _check_traceroute(ctl, report, spec)
    for spec in golden["ingress_stacks"]:
        egress, stack = ctl.sim.ingress_lookup(spec["ingress"], spec["vrf"], spec["dst"])
        report.add(
            f"ingress stack {spec['vrf']}",
            stack == spec["stack"] and egress == spec["egress"],
            f"got {stack} egress {egress}",
        )
    for spec in golden["fib_checks"]:
        entry = ctl.sim.fibs[spec["node"]].get(spec["in_label"])
        ok = (
            entry is not None
            and len(entry.actions) == 1
            and entry.actions[0].kind == ActionKind[spec["action"]]
            and entry.actions[0].out_label == spec.get("out_label")
            and entry.actions[0].next_hop == spec.get("next_hop")
        )
        report.add(f"FIB {spec['node']}/{spec['in_label']}", ok, f"got {entry}")
    flows = golden["flows"]
    counters = ctl.sim.run_flows(
        flows["ingress"], flows["vrf"], flows["src_prefix"], flows["dst_prefix"], flows["n"]
    )
    expected = {k: v for k, v in flows["exact_counters"].items()}
    got = {k: counters.get(k, 0) for k in expected}
    extras = {k: v for k, v in counters.items() if k not in expected and v}
    report.add(
        "single-path flow counters",
        got == expected and not extras,
        f"got {dict(counters)}",
    )
    return report


def run_experiment_2(ctl: Controller) -> ExperimentReport:
    golden = load_golden("experiment2")
    report = ExperimentReport("experiment 2")
    algo = golden["algo"]
    pre = golden["pre"]
    route = ctl.sim.spf_results[pre["source"]][algo].routes.get(pre["dest"])
    neighbors = sorted({n for _, n in route.next_hops}) if route else []
    report.add(
        "pre-change ECMP next hops",
        route is not None
        and route.distance == pre["distance"]
        and neighbors == pre["next_hop_neighbors"],
        f"got distance {route and route.distance}, next hops {neighbors}",
    )
    change = golden["delay_change"]
    event = ctl.set_link_delay(change["link"], change["delay_us"])
    report.add(
        "changed algorithm set",
        sorted(event.changed_algos) == golden["expected_changed_algos"],
        f"got {sorted(event.changed_algos)}",
    )
    post = golden["post"]
    route = ctl.sim.spf_results[post["source"]][algo].routes.get(post["dest"])
    neighbors = sorted({n for _, n in route.next_hops}) if route else []
    report.add(
        "post-change single path",
        route is not None
        and route.distance == post["distance"]
        and neighbors == post["next_hop_neighbors"],
        f"got distance {route and route.distance}, next hops {neighbors}",
    )
    _check_traceroute(ctl, report, golden["post_traceroute"])
    return report


def run_experiment_3(ctl: Controller) -> ExperimentReport:
    golden = load_golden("experiment3")
    report = ExperimentReport("experiment 3")
    spf = golden["spf"]
    route = ctl.sim.spf_results[spf["source"]][golden["algo"]].routes.get(spf["dest"])
    neighbors = sorted({n for _, n in route.next_hops}) if route else []
    report.add(
        "two equal-cost paths",
        route is not None
        and route.distance == spf["distance"]
        and neighbors == spf["next_hop_neighbors"],
        f"got distance {route and route.distance}, next hops {neighbors}",
    )
    trace_spec = golden["traceroute"]
    trace = ctl.sim.traceroute(trace_spec["ingress"], trace_spec["vrf"], trace_spec["dst"])
    labels = golden["labels"]
    first_stack = list(trace.hops[0].labels) if trace.hops else []
    last_stack = list(trace.hops[-1].labels) if trace.hops else []
    report.add(
        "observed labels",
        first_stack == [labels["transport"], labels["vpn"]]
        and last_stack == [labels["vpn"]],
        f"got first {first_stack}, last {last_stack}",
    )
    flows = golden["flows"]
    counters = ctl.sim.run_flows(
        flows["ingress"], flows["vrf"], flows["src_prefix"], flows["dst_prefix"], flows["n"]
    )
    branch_counts = [counters.get(b, 0) for b in flows["branches"]]
    report.add(
        "ECMP split",
        sum(branch_counts) == flows["n"]
        and all(c >= flows["min_per_branch"] for c in branch_counts),
        f"got {dict(zip(flows['branches'], branch_counts))}",
    )
    return report


def run_experiment_controller(ctl: Controller) -> ExperimentReport:
    golden = load_golden("controller")
    report = ExperimentReport("controller")
    for spec in golden["requests"]:
        req = FadRequest.from_names(spec["metric"], spec["op"], set(spec["colors"]))
        outcome = ctl.request_custom_path(req, golden["target_color"])
        report.add(
            f"request {spec['metric']}/{spec['op']}/{','.join(spec['colors'])}",
            outcome.kind.value == spec["kind"] and outcome.algo == spec["algo"],
            f"got {outcome.kind.value}({outcome.algo})",
        )
        trace = ctl.sim.traceroute(1, golden["custom_vrf"], golden["custom_dst"])
        transport = trace.hops[0].labels[0] if trace.hops else None
        report.add(
            f"custom transport label after {spec['kind']}",
            transport == spec["transport_label"],
            f"got {transport}, want {spec['transport_label']}",
        )
    return report


_RUNNERS = {
    "1": run_experiment_1,
    "2": run_experiment_2,
    "3": run_experiment_3,
    "controller": run_experiment_controller,
}

EXPERIMENT_IDS = tuple(_RUNNERS)


def run_experiment(ctl: Controller, experiment_id: str) -> ExperimentReport:
    if experiment_id not in _RUNNERS:
        raise ValueError(
            f"unknown experiment {experiment_id!r}; choose from {sorted(_RUNNERS)}"
        )
    return _RUNNERS[experiment_id](ctl)
