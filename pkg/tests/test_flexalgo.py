import random

from flexsim.flexalgo import (
    Fad,
    LinkView,
    PrunedTopology,
    compute_all,
    constraint_admits,
    link_views_from_topology,
    prune_topology,
    select_fad,
    spf,
)
from flexsim.igp_flood import Constraint, ConstraintOp, FadAdvert, MetricType
from flexsim.topology import AffinityMap

from .oracle import admitted_links, best_paths, random_topology

METRICS = {
    "igp": MetricType.IGP,
    "te": MetricType.TE_DEFAULT,
    "delay": MetricType.MIN_DELAY,
}
OPS = ["exclude-any", "include-any", "include-all"]
OP_ENUM = {
    "exclude-any": ConstraintOp.EXCLUDE_ANY,
    "include-any": ConstraintOp.INCLUDE_ANY,
    "include-all": ConstraintOp.INCLUDE_ALL,
}


def to_link_views(links, color_bits):
    return [
        LinkView(
            id=l.id,
            src=l.src,
            dst=l.dst,
            igp_metric=l.weights["igp"],
            te_metric=l.weights["te"],
            delay_us=l.weights["delay"],
            admin_group=sum(1 << color_bits[c] for c in l.colors),
        )
        for l in links
    ]


def affinity_from(color_bits):
    am = AffinityMap()
    for color, bit in color_bits.items():
        am.define(color, bit)
    return am


# --- FAD selection ----------------------------------------------------------


def test_select_fad_singleton(builtin_sim):
    fad = select_fad(builtin_sim.reference_lsdb(), 128)
    assert fad.metric_type == MetricType.IGP
    assert fad.constraints == (
        Constraint(op=ConstraintOp.EXCLUDE_ANY, colors=frozenset({"blue"})),
    )


def test_select_fad_highest_origin_wins(builtin_sim):
    conflicting = FadAdvert(
        algo=129,
        calc_type=0,
        metric_type=MetricType.TE_DEFAULT,
        constraints=(),
    )
    builtin_sim.flood(3, conflicting)
    # R4's original definition still outranks R3's replacement.
    fad = select_fad(builtin_sim.reference_lsdb(), 129)
    assert fad.metric_type == MetricType.IGP
    # With a higher originator the replacement wins.
    builtin_sim.flood(4, conflicting)
    fad = select_fad(builtin_sim.reference_lsdb(), 129)
    assert fad.metric_type == MetricType.TE_DEFAULT


def test_select_fad_absent(builtin_sim):
    assert select_fad(builtin_sim.reference_lsdb(), 200) is None


def test_select_fad_consistent_across_nodes(builtin_sim):
    fads = [select_fad(builtin_sim.lsdbs[n], 128) for n in builtin_sim.topology.nodes]
    assert all(f == fads[0] for f in fads)


# --- pruning ----------------------------------------------------------------


def test_prune_exclude_blue(builtin_sim):
    fad = builtin_sim.select_fad(128)
    pruned = prune_topology(builtin_sim.topology, fad)
    ids = {l.id for l in pruned.links}
    assert ids == {"1-2", "2-1", "2-3", "3-2", "2-4", "4-2"}


def test_prune_empty_constraints_admits_all(builtin_sim):
    fad = builtin_sim.select_fad(131)
    pruned = prune_topology(builtin_sim.topology, fad)
    assert {l.id for l in pruned.links} == set(builtin_sim.topology.adjacencies)


def test_prune_include_all_disjoint_colors(builtin_sim):
    fad = Fad(
        algo=131,
        calc_type=0,
        metric_type=MetricType.IGP,
        constraints=(
            Constraint(
                op=ConstraintOp.INCLUDE_ALL, colors=frozenset({"red", "blue"})
            ),
        ),
    )
    pruned = prune_topology(builtin_sim.topology, fad)
    assert pruned.links == ()


def test_prune_drops_non_participants(builtin_sim):
    builtin_sim.topology.nodes[2].participation.discard(128)
    fad = builtin_sim.select_fad(128)
    pruned = prune_topology(builtin_sim.topology, fad)
    assert all(2 not in (l.src, l.dst) for l in pruned.links)


# --- SPF --------------------------------------------------------------------


def test_spf_te_metric_ecmp(builtin_sim):
    result = builtin_sim.spf_results[1][131]
    route = result.routes[4]
    assert route.distance == 3
    assert [n for _, n in route.next_hops] == [2, 3]


def test_spf_exclude_blue_single_path(builtin_sim):
    route = builtin_sim.spf_results[1][128].routes[4]
    assert route.distance == 2
    assert route.next_hops == (("1-2", 2),)


def test_spf_source_distance_zero(builtin_sim):
    for algo, result in builtin_sim.spf_results[1].items():
        assert result.routes[1].distance == 0


def test_spf_unreachable_absent():
    links = [LinkView(id="1-2", src=1, dst=2, igp_metric=1, te_metric=1,
                      delay_us=1, admin_group=0)]
    pt = PrunedTopology(algo=128, links=tuple(links), participants=frozenset({1, 2, 3}))
    result = spf(pt, MetricType.IGP, 1)
    assert 3 not in result.routes
    assert result.routes[2].distance == 1


def test_compute_all_has_all_active_algos(builtin_sim):
    results = compute_all(builtin_sim.topology, builtin_sim.lsdbs[1], 1)
    assert sorted(results) == [0, 128, 129, 130, 131]


def test_compute_all_skips_participation_without_fad(builtin_sim):
    builtin_sim.topology.nodes[1].participation.add(140)
    results = compute_all(builtin_sim.topology, builtin_sim.lsdbs[1], 1)
    assert 140 not in results


def test_first_hop_interface_for_algo_129(builtin_sim):
    route = builtin_sim.spf_results[1][129].routes[4]
    adj_id, neighbor = route.next_hops[0]
    assert neighbor == 3
    assert builtin_sim.topology.adjacencies[adj_id].interface_name == "Gi0/0/0/1"


# --- recompute --------------------------------------------------------------


def test_delay_change_affects_only_delay_algo(builtin_sim):
    before = {a: builtin_sim.spf_results[1][a] for a in (0, 128, 129, 131)}
    changed = builtin_sim.set_link_delay("2-4", 10)
    assert changed == {130}
    for algo, result in before.items():
        assert builtin_sim.spf_results[1][algo] == result


def test_reflood_identical_attributes_changes_nothing(builtin_sim):
    builtin_sim.flood_all_link_attrs()
    assert builtin_sim.converge() == set()


def test_new_fad_flood_changes_only_new_algo(builtin_sim):
    body = FadAdvert(
        algo=132, calc_type=0, metric_type=MetricType.TE_DEFAULT, constraints=()
    )
    for node in builtin_sim.topology.nodes.values():
        node.participation.add(132)
    builtin_sim.flood(1, body)
    builtin_sim.advertise_all_sids()
    assert builtin_sim.converge() == {132}


def test_determinism_byte_identical_results(builtin_sim):
    import flexsim.scenario as scenario

    other = scenario.load_builtin_scenario()
    assert builtin_sim.spf_results == other.spf_results


# --- brute-force equivalence ------------------------------------------------


def run_random_case(rng: random.Random) -> None:
    topo = random_topology(rng)
    affinity = affinity_from(topo.color_bits)
    op = rng.choice(OPS)
    colors = set(rng.sample(sorted(topo.color_bits), rng.randint(1, len(topo.color_bits))))
    constraint = Constraint(op=OP_ENUM[op], colors=frozenset(colors))

    admitted_ref = admitted_links(topo, op, colors)
    views = to_link_views(topo.links, topo.color_bits)
    admitted_views = [
        v for v in views if constraint_admits(constraint, v.admin_group, affinity)
    ]
    assert {v.id for v in admitted_views} == {l.id for l in admitted_ref}

    pt = PrunedTopology(
        algo=128, links=tuple(admitted_views), participants=frozenset(topo.nodes)
    )
    for metric_name, metric_type in METRICS.items():
        source = rng.choice(topo.nodes)
        result = spf(pt, metric_type, source)
        for dest in topo.nodes:
            if dest == source:
                continue
            cost, first_hops = best_paths(admitted_ref, metric_name, source, dest)
            route = result.routes.get(dest)
            if cost is None:
                assert route is None
            else:
                assert route is not None
                assert route.distance == cost
                assert set(route.next_hops) == first_hops


def test_spf_matches_brute_force_sample():
    rng = random.Random(20240817)
    for _ in range(40):
        run_random_case(rng)
