import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zbuscert import (
    NetworkModel,
    NodeSpec,
    BranchSpec,
    SchemaError,
    build_index_map,
    delta_pairing,
    line_to_line_selector,
    random_small_network,
    right_shift,
)

complex_entries = st.complex_numbers(
    max_magnitude=1e6, allow_nan=False, allow_infinity=False
)


def test_right_shift_cycle_values():
    assert right_shift("a") == "b"
    assert right_shift("b") == "c"
    assert right_shift("c") == "a"


@given(st.sampled_from("abc"))
def test_right_shift_is_a_three_cycle(phase):
    assert right_shift(right_shift(right_shift(phase))) == phase
    assert right_shift(phase) != phase


def test_right_shift_rejects_unknown_label():
    with pytest.raises(SchemaError):
        right_shift("d")


def test_selector_structure():
    e = line_to_line_selector(("a", "b", "c"), "b", "c")
    assert sorted(e) == [-1.0, 0.0, 1.0]
    assert np.abs(e).sum() == 2.0
    assert e[1] == 1.0 and e[2] == -1.0


@given(st.tuples(complex_entries, complex_entries, complex_entries))
def test_selector_antisymmetry(v):
    v = np.array(v)
    e_ab = line_to_line_selector(("a", "b", "c"), "a", "b")
    e_ba = line_to_line_selector(("a", "b", "c"), "b", "a")
    assert e_ab @ v == -(e_ba @ v)


def test_selector_rejects_bad_phases():
    with pytest.raises(SchemaError):
        line_to_line_selector(("a", "b"), "a", "a")
    with pytest.raises(SchemaError):
        line_to_line_selector(("a", "b"), "a", "c")


def test_node_spec_validation():
    assert NodeSpec("n", "wye", "a").phases == ("a",)
    assert NodeSpec("n", "wye", "ca").phases == ("a", "c")
    with pytest.raises(SchemaError):
        NodeSpec("n", "delta", "a")
    with pytest.raises(SchemaError):
        NodeSpec("n", "slack", "ab")
    with pytest.raises(SchemaError):
        NodeSpec("n", "wye", "ax")
    with pytest.raises(SchemaError):
        NodeSpec("n", "wye", "aa")
    with pytest.raises(SchemaError):
        NodeSpec("n", "pv", "abc")


def test_index_map_ordering():
    nodes = [
        NodeSpec("S", "slack", "abc"),
        NodeSpec("n1", "wye", "abc"),
        NodeSpec("n2", "wye", "a"),
    ]
    imap = build_index_map(nodes)
    assert imap.size == 4
    assert imap.lin("n2", "a") == 3
    assert imap.pairs == (("n1", "a"), ("n1", "b"), ("n1", "c"), ("n2", "a"))
    assert imap.wye == (0, 1, 2, 3) and imap.delta == ()


def test_index_map_three_node_size(three_node_case):
    feeder, system, _ = three_node_case(0.1)
    assert feeder.network.index_map.size == 6
    assert system.size == 6


def test_index_map_errors():
    slack = NodeSpec("S", "slack", "abc")
    with pytest.raises(SchemaError):
        build_index_map([slack, NodeSpec("x", "wye", "a"), NodeSpec("x", "wye", "b")])
    with pytest.raises(SchemaError):
        build_index_map([NodeSpec("x", "wye", "a")])
    with pytest.raises(SchemaError):
        build_index_map([slack, NodeSpec("T", "slack", "abc"), NodeSpec("x", "wye", "a")])
    with pytest.raises(SchemaError):
        build_index_map([slack])


def test_delta_pairing_full_node():
    node = NodeSpec("d", "delta", "abc")
    pairing = delta_pairing(node, "b")
    assert pairing.paired and pairing.partner == "c"
    assert pairing.selector @ np.array([0, 1.0, 2.0]) == -1.0


def test_delta_pairing_two_phase_node():
    node = NodeSpec("d", "delta", "ac")
    on_c = delta_pairing(node, "c")
    assert on_c.paired and on_c.partner == "a"
    on_a = delta_pairing(node, "a")
    assert not on_a.paired and on_a.partner == "c"
    # The unpaired selector still reads the node's only line-to-line voltage.
    v = np.array([3.0 + 1j, 1.0])
    assert on_a.selector @ v == (3.0 + 1j) - 1.0


def test_delta_pairing_errors():
    with pytest.raises(SchemaError):
        delta_pairing(NodeSpec("w", "wye", "abc"), "a")
    with pytest.raises(SchemaError):
        delta_pairing(NodeSpec("d", "delta", "ab"), "c")


@pytest.mark.parametrize("phases,expected", [("abc", 3), ("ab", 1), ("bc", 1), ("ac", 1)])
def test_paired_count_per_delta_node(phases, expected):
    node = NodeSpec("d", "delta", phases)
    paired = sum(delta_pairing(node, p).paired for p in node.phases)
    assert paired == expected


@pytest.mark.parametrize("seed", range(6))
def test_index_map_round_trip_and_partition(seed):
    feeder = random_small_network(seed, node_count=4, delta_fraction=0.5)
    imap = feeder.network.index_map
    for j in range(imap.size):
        assert imap.lin(imap.node_of(j), imap.phase_of(j)) == j
    assert sorted(imap.wye + imap.delta) == list(range(imap.size))
    assert set(imap.wye) & set(imap.delta) == set()
    # delta order preserves index order
    ordered = sorted(imap.delta_order, key=imap.delta_order.get)
    assert tuple(ordered) == imap.delta


def test_branch_validation():
    nodes = [NodeSpec("S", "slack", "abc"), NodeSpec("1", "wye", "ab")]
    with pytest.raises(SchemaError):
        BranchSpec("S", "1", "ab", np.eye(3))
    with pytest.raises(SchemaError):
        BranchSpec("S", "S", "ab", np.eye(2))
    with pytest.raises(SchemaError):
        NetworkModel(nodes, [BranchSpec("S", "1", "abc", np.eye(3))])
    with pytest.raises(SchemaError):
        NetworkModel(nodes, [BranchSpec("S", "2", "ab", np.eye(2))])
    NetworkModel(nodes, [BranchSpec("S", "1", "ab", np.eye(2))])


def test_node_slice_contiguous():
    feeder = random_small_network(3, node_count=3)
    net = feeder.network
    for node in net.non_slack:
        sl = net.node_slice(node.id)
        assert tuple(range(sl.start, sl.stop)) == net.index_map.node_indices[node.id]
