import pytest
from hypothesis import given, settings

from core.errors import EmptyKeySetError
from core.trie import EPSILON, build_ideal_hpt, is_prefix, msd_label, node_children_count
from core.trie.node import HptNode, NodeKind, is_key2_node, is_leaf
from tests.conftest import EXAMPLE_KEYS, ROOT_SPLIT_KEYS, key_sets


def test_example_trie():
    ideal = build_ideal_hpt(EXAMPLE_KEYS)
    assert ideal.patricia_labels == {EPSILON, '0', '001', '0010', '0011', '0110'}
    assert ideal.msd_labels == {'00'}
    assert ideal.key2_nodes == [EPSILON, '0', '001']
    assert ideal.leaves == ['0010', '0011', '0110']
    assert ideal.msd_edges['00'] == ('0', '001')


def test_example_key2_matching():
    ideal = build_ideal_hpt(EXAMPLE_KEYS)
    assert ideal.key2_assignment == {'001': {'0010'}, '0': {'0011'}, EPSILON: {'0110'}}
    assert ideal.r_of('0010') == '001'
    assert ideal.r_of('0110') == EPSILON


def test_root_with_two_children_holds_two_key2():
    ideal = build_ideal_hpt(ROOT_SPLIT_KEYS)
    assert ideal.patricia_labels == {EPSILON, '0', '00', '01', '1'}
    assert ideal.msd_labels == set()
    assert len(ideal.leaves) == 3
    assert len(ideal.key2_nodes) == 2
    assert ideal.key2_assignment[EPSILON] == {'01', '1'}


def test_single_key():
    ideal = build_ideal_hpt(['0110'])
    assert ideal.patricia_labels == {EPSILON, '0110'}
    assert ideal.key2_assignment == {EPSILON: {'0110'}}
    assert ideal.msd_labels == set()
    assert build_ideal_hpt(['00101']).msd_labels == {'0010'}


def test_empty_key_is_stored_at_root():
    ideal = build_ideal_hpt([EPSILON])
    assert ideal.patricia_labels == {EPSILON}
    assert ideal.leaves == []
    root = next(iter(ideal.nodes()))
    assert root.key == EPSILON and root.key2_slots == []


def test_empty_key_set():
    with pytest.raises(EmptyKeySetError):
        build_ideal_hpt([])


def test_materialized_nodes_have_exact_edges():
    nodes = {n.label: n for n in build_ideal_hpt(EXAMPLE_KEYS).nodes()}
    assert nodes['0'].parent_edge == '0'
    assert (nodes['0'].child0, nodes['0'].child1) == ('01', '110')
    assert nodes['00'].kind == NodeKind.MSD
    assert (nodes['00'].parent_edge, nodes['00'].child0, nodes['00'].child1) == ('0', None, '1')
    assert nodes['0010'].r_ref == '001'
    assert nodes['0010'].key == '0010'
    assert nodes['001'].key is None


def test_node_children_count():
    assert node_children_count(HptNode(label='0', child0='01', child1='11')) == 2
    assert node_children_count(HptNode(label='01')) == 0
    assert node_children_count(HptNode(label='00', kind=NodeKind.MSD, child1='1')) == 1


def test_root_is_never_a_leaf():
    root = HptNode(label=EPSILON)
    assert not is_leaf(root)
    assert is_key2_node(root)


@settings(max_examples=1000)
@given(key_sets)
def test_fact_one(keys):
    ideal = build_ideal_hpt(keys)
    leaves, inner = len(ideal.leaves), len(ideal.key2_nodes)
    root_children = len(ideal.children_of(EPSILON))
    if root_children == 1:
        assert leaves == inner
    elif root_children == 2:
        assert leaves == inner + 1


@given(key_sets)
def test_ideal_size_and_labels(keys):
    ideal = build_ideal_hpt(keys)
    assert len(ideal.patricia_labels) <= 2 * len(keys)
    assert len(ideal.msd_labels) <= len(ideal.patricia_labels) - 1
    for label in ideal.patricia_labels | ideal.msd_labels:
        assert any(is_prefix(label, k) for k in keys)
    for m, (parent, child) in ideal.msd_edges.items():
        assert msd_label(parent, child) == m


@given(key_sets)
def test_every_leaf_is_matched_once(keys):
    ideal = build_ideal_hpt(keys)
    matched = [leaf for leaves in ideal.key2_assignment.values() for leaf in leaves]
    assert sorted(matched) == ideal.leaves
    for holder, leaves in ideal.key2_assignment.items():
        assert len(leaves) <= (2 if holder == EPSILON else 1)
        assert all(holder == EPSILON or leaf.startswith(holder) for leaf in leaves)
