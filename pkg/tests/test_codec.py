import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flexsim.igp_flood import (
    Advertisement,
    Constraint,
    ConstraintOp,
    FadAdvert,
    LinkAttrAdvert,
    MalformedTlv,
    MetricType,
    PrefixSidAdvert,
    decode_advert,
    encode_advert,
)
from flexsim.topology import AffinityMap

PALETTE = {"red": 20, "blue": 10, "green": 3, "amber": 200, "cyan": 77}


def affinity() -> AffinityMap:
    am = AffinityMap()
    for color, bit in PALETTE.items():
        am.define(color, bit)
    return am


colors_strategy = st.frozensets(
    st.sampled_from(sorted(PALETTE)), min_size=1, max_size=5
)
constraint_strategy = st.builds(
    Constraint, op=st.sampled_from(ConstraintOp), colors=colors_strategy
)
fad_strategy = st.builds(
    FadAdvert,
    algo=st.integers(128, 255),
    calc_type=st.sampled_from([0, 1]),
    metric_type=st.sampled_from(MetricType),
    constraints=st.lists(constraint_strategy, max_size=4).map(tuple),
)
link_strategy = st.builds(
    LinkAttrAdvert,
    link=st.from_regex(r"[1-9]-[1-9]", fullmatch=True),
    igp_metric=st.integers(1, 2**32 - 1),
    te_metric=st.integers(1, 2**32 - 1),
    delay_us=st.integers(1, 2**32 - 1),
    admin_group=st.integers(0, 2**256 - 1),
)
def sid_strategy(origin: int):
    return st.builds(
        PrefixSidAdvert,
        origin=st.just(origin),
        prefix=st.sampled_from(["1.1.1.1", "4.4.4.4", "10.255.0.7"]),
        algo=st.one_of(st.just(0), st.integers(128, 255)),
        sid_index=st.integers(0, 2**32 - 1),
    )


@st.composite
def advert_strategy(draw):
    origin = draw(st.integers(1, 9))
    body = draw(st.one_of(fad_strategy, link_strategy, sid_strategy(origin)))
    return Advertisement(origin=origin, seq=draw(st.integers(1, 2**32 - 1)), body=body)


def test_fad_golden_byte_layout():
    adv = Advertisement(
        origin=1,
        seq=1,
        body=FadAdvert(
            algo=128,
            calc_type=0,
            metric_type=MetricType.IGP,
            constraints=(
                Constraint(op=ConstraintOp.EXCLUDE_ANY, colors=frozenset({"blue"})),
            ),
        ),
    )
    data = encode_advert(adv, affinity())
    assert data[0] == 0x01  # FAD type
    body = data[9:]  # after length/origin/seq header
    assert body[0] == 0x80  # algo 128
    assert body[1] == 0x00  # IGP metric
    assert body[2] == 0x00  # calc type 0
    assert body[3] == 0x01  # one constraint
    assert body[4] == 0x01  # exclude-any subtype
    mask = body[5 : 5 + 32]
    # bit 10 of the admin group = bit 2 of byte 1
    assert mask[1] == 0x04
    assert all(b == 0 for i, b in enumerate(mask) if i != 1)


def test_prefix_sid_round_trip():
    adv = Advertisement(
        origin=3,
        seq=7,
        body=PrefixSidAdvert(origin=3, prefix="3.3.3.3", algo=128, sid_index=4013),
    )
    assert decode_advert(encode_advert(adv, affinity()), affinity()) == adv


@settings(max_examples=300, deadline=None)
@given(advert_strategy())
def test_round_trip_identity(adv):
    am = affinity()
    assert decode_advert(encode_advert(adv, am), am) == adv


def test_too_many_constraints_rejected():
    am = AffinityMap()
    palette = [f"c{i}" for i in range(11)]
    for i, color in enumerate(palette):
        am.define(color, i)
    # 11 single-color constraint sub-TLVs exceed the cap.
    adv = Advertisement(
        origin=1,
        seq=1,
        body=FadAdvert(
            algo=128,
            calc_type=0,
            metric_type=MetricType.IGP,
            constraints=tuple(
                Constraint(op=ConstraintOp.EXCLUDE_ANY, colors=frozenset({c}))
                for c in palette[:10]
            ),
        ),
    )
    data = bytearray(encode_advert(adv, am))
    count_offset = 12  # constraint count byte
    data[count_offset] = 11
    data += bytes([1]) + bytes(32)  # a forged 11th sub-TLV (color c0 absent: mask 0)
    data[1:3] = (len(data) - 3).to_bytes(2, "big")
    with pytest.raises(MalformedTlv):
        decode_advert(bytes(data), am)


def test_constraint_color_count_cap_at_build_time():
    with pytest.raises(ValueError):
        Constraint(
            op=ConstraintOp.EXCLUDE_ANY,
            colors=frozenset(f"c{i}" for i in range(11)),
        )


def test_bad_type_byte():
    adv = Advertisement(
        origin=1, seq=1,
        body=PrefixSidAdvert(origin=1, prefix="1.1.1.1", algo=0, sid_index=1),
    )
    data = bytearray(encode_advert(adv, affinity()))
    data[0] = 0x09
    with pytest.raises(MalformedTlv):
        decode_advert(bytes(data), affinity())


def test_truncated_payload():
    adv = Advertisement(
        origin=1, seq=1,
        body=PrefixSidAdvert(origin=1, prefix="1.1.1.1", algo=0, sid_index=1),
    )
    data = encode_advert(adv, affinity())
    with pytest.raises(MalformedTlv):
        decode_advert(data[:-2], affinity())


def test_algo_out_of_range_rejected():
    adv = Advertisement(
        origin=1,
        seq=1,
        body=FadAdvert(
            algo=128, calc_type=0, metric_type=MetricType.IGP, constraints=()
        ),
    )
    data = bytearray(encode_advert(adv, affinity()))
    data[9] = 100  # algo byte below 128
    with pytest.raises(MalformedTlv):
        decode_advert(bytes(data), affinity())
