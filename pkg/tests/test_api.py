import pytest
from fastapi.testclient import TestClient

from flexsim.api import create_app


@pytest.fixture
def client(builtin_controller):
    return TestClient(create_app(builtin_controller))


def test_get_topology(client):
    body = client.get("/topology").json()
    assert [n["id"] for n in body["nodes"]] == [1, 2, 3, 4]
    assert body["affinity"] == {"blue": 10, "red": 20}
    link = next(l for l in body["links"] if l["id"] == "2-4")
    assert link == {
        "id": "2-4", "from": 2, "to": 4, "igp": 1, "te": 2,
        "delay_us": 100, "colors": ["red"],
    }


def test_get_fads(client):
    body = client.get("/fads").json()
    assert [f["algo"] for f in body] == [128, 129, 130, 131]


def test_get_vrfs(client):
    body = client.get("/vrfs").json()
    assert [v["name"] for v in body] == ["GOLD", "SILVER", "BRONZE", "PLATINUM", "CUSTOM"]
    gold = body[0]
    assert gold["rd"] == "1:1"
    assert gold["color"] == 10
    assert gold["vpn_label"] == 24002
    assert gold["bound_algo"] == 128
    assert {"node": 4, "prefix": "20.10.4.0/24"} in gold["attachments"]
    custom = body[4]
    assert custom["bound_algo"] is None
    client.post(
        "/fads",
        json={"metric": "igp", "op": "exclude-any", "colors": ["blue"], "target_color": 50},
    )
    custom = client.get("/vrfs").json()[4]
    assert custom["bound_algo"] == 128


def test_post_fad_reuse_then_create(client):
    resp = client.post(
        "/fads",
        json={"metric": "igp", "op": "exclude-any", "colors": ["blue"], "target_color": 50},
    )
    assert resp.status_code == 200
    assert resp.json() == {"kind": "REUSED", "algo": 128, "bound_color": 50}
    resp = client.post(
        "/fads",
        json={"metric": "te-metric", "op": "include-all", "colors": ["red"], "target_color": 50},
    )
    assert resp.json() == {"kind": "CREATED", "algo": 132, "bound_color": 50}


def test_post_fad_unknown_color_400(client):
    resp = client.post(
        "/fads",
        json={"metric": "igp", "op": "exclude-any", "colors": ["mauve"], "target_color": 50},
    )
    assert resp.status_code == 400
    assert resp.json()["detail"]["code"] == "UnknownColor"


def test_post_fad_exhaustion_409(client, builtin_controller):
    from flexsim.igp_flood import FadAdvert, MetricType

    builtin_controller.sim.flood(
        1, FadAdvert(algo=255, calc_type=0, metric_type=MetricType.IGP, constraints=())
    )
    resp = client.post(
        "/fads",
        json={"metric": "delay", "op": "include-any", "colors": ["red"], "target_color": 50},
    )
    assert resp.status_code == 409
    assert resp.json()["detail"]["code"] == "IdSpaceExhausted"


def test_post_delay_event_report(client):
    resp = client.post("/links/2-4/delay", json={"delay_us": 10})
    assert resp.status_code == 200
    body = resp.json()
    assert body["changed_algos"] == [130]
    assert body["path_diffs"]["BRONZE"] == {"old": [1, 3, 4], "new": [1, 2, 4]}


def test_post_delay_unknown_link_404(client):
    resp = client.post("/links/7-8/delay", json={"delay_us": 10})
    assert resp.status_code == 404
    assert resp.json()["detail"]["code"] == "UnknownLink"


def test_post_delay_invalid_400(client):
    resp = client.post("/links/2-4/delay", json={"delay_us": 0})
    assert resp.status_code == 400
    assert resp.json()["detail"]["code"] == "InvalidDelay"


def test_get_paths(client):
    body = client.get("/paths/131", params={"source": 1}).json()
    dest4 = next(d for d in body["destinations"] if d["dest"] == 4)
    assert dest4["distance"] == 3
    assert [h["neighbor"] for h in dest4["next_hops"]] == [2, 3]


def test_get_paths_unknown_algo_404(client):
    resp = client.get("/paths/200", params={"source": 1})
    assert resp.status_code == 404
    assert resp.json()["detail"]["code"] == "UnknownAlgo"


def test_post_traceroute(client):
    resp = client.post(
        "/traceroute", json={"ingress": 1, "vrf": "GOLD", "dst_ip": "20.10.4.4"}
    )
    assert resp.json() == {
        "hops": [
            {"node": 2, "labels": [20014, 24002]},
            {"node": 4, "labels": [24002]},
        ]
    }


def test_post_traceroute_no_route_400(client):
    resp = client.post(
        "/traceroute", json={"ingress": 1, "vrf": "GOLD", "dst_ip": "99.9.9.9"}
    )
    assert resp.status_code == 400
    assert resp.json()["detail"]["code"] == "NoRoute"


def test_post_flows(client):
    resp = client.post(
        "/flows",
        json={
            "ingress": 1, "vrf": "PLATINUM",
            "src_prefix": "20.40.1.0/24", "dst_prefix": "20.30.4.0/24", "n": 200,
        },
    )
    counters = {c["link"]: c["count"] for c in resp.json()["counters"]}
    assert counters["1-2"] + counters["1-3"] == 200
    assert min(counters["1-2"], counters["1-3"]) >= 70


def test_counters_accumulate(client):
    client.post(
        "/flows",
        json={
            "ingress": 1, "vrf": "GOLD",
            "src_prefix": "20.10.1.0/24", "dst_prefix": "20.10.4.0/24", "n": 5,
        },
    )
    body = client.get("/counters").json()
    counters = {c["link"]: c["count"] for c in body["counters"]}
    assert counters["1-2"] == 5
