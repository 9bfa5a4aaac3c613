import random
from itertools import product

import pytest
from hypothesis import given

from core.api import SystemState
from core.errors import EmptyKeySetError
from core.engine import SearchEngine
from core.harness import check_legal, random_keys, run_until_legal
from core.services import RoundScheduler
from core.trie import EPSILON, HptNode, build_ideal_hpt, is_proper_prefix, lcp, msd_label
from tests.conftest import EXAMPLE_KEYS, ROOT_SPLIT_KEYS, key_sets, materialized


def all_labels(max_len: int):
    for n in range(max_len + 1):
        for bits in product('01', repeat=n):
            yield ''.join(bits)


def floor_log(n: int) -> int:
    return max(n, 2).bit_length() - 1


def test_binary_prefix_search_example(example_state):
    search = SearchEngine(example_state)
    assert search.binary_prefix_search('0011').label == '001'
    assert search.binary_prefix_search('1').label == EPSILON
    assert search.binary_prefix_search(EPSILON) is None


def test_binary_prefix_search_on_empty_system():
    assert SearchEngine(SystemState()).binary_prefix_search('0110') is None


@pytest.mark.parametrize('keys, x, expected', [
    (EXAMPLE_KEYS, '0111', '0110'),
    (EXAMPLE_KEYS, '0011', '0011'),
    (ROOT_SPLIT_KEYS, '1111', '1'),
])
def test_prefix_search_examples(keys, x, expected):
    result = SearchEngine(materialized(keys)).prefix_search(x)
    assert result.key == expected
    assert result.reads <= floor_log(len(x)) + 5


def test_prefix_search_without_keys():
    state = SystemState()
    with pytest.raises(EmptyKeySetError):
        SearchEngine(state).prefix_search('01')
    state.store_direct(HptNode(label=EPSILON))
    with pytest.raises(EmptyKeySetError):
        SearchEngine(state).prefix_search('01')


@given(key_sets)
def test_prefix_search_matches_brute_force(keys):
    search = SearchEngine(materialized(keys))
    for x in all_labels(6):
        result = search.prefix_search(x)
        assert len(lcp(x, result.key)) == max(len(lcp(x, k)) for k in keys)
        assert result.reads <= floor_log(len(x)) + 5


@given(key_sets)
def test_binary_prefix_search_finds_deepest_proper_prefix(keys):
    state = materialized(keys)
    patricia = build_ideal_hpt(keys).patricia_labels
    search = SearchEngine(state)
    for x in all_labels(6):
        expected = max((p for p in patricia if is_proper_prefix(p, x)), key=len, default=None)
        start = state.metrics.dht_reads
        node = search.binary_prefix_search(x)
        assert (node.label if node is not None else None) == expected
        assert node is None or not node.is_msd
        assert state.metrics.dht_reads - start <= floor_log(len(x)) + 2


def test_insert_key_converges_to_enlarged_trie(example_state):
    keys = EXAMPLE_KEYS + ['0111']
    assert SearchEngine(example_state).insert_key('0111')
    stats = run_until_legal(example_state, keys, 2000)
    assert stats.converged
    assert {'0111', '011'} <= build_ideal_hpt(keys).patricia_labels


def test_double_insert_is_idempotent(example_state):
    search = SearchEngine(example_state)
    assert not search.insert_key('0011')
    assert check_legal(example_state, EXAMPLE_KEYS).legal


def test_insert_into_empty_system():
    state = SystemState()
    assert SearchEngine(state).insert_key('0110')
    assert run_until_legal(state, ['0110'], 200).converged


def test_delete_key_uses_constant_accesses(example_state):
    metrics = example_state.metrics
    assert SearchEngine(example_state).delete_key('0011')
    assert metrics.dht_reads + metrics.dht_writes <= 3
    stats = run_until_legal(example_state, ['0010', '0110'], 2000)
    assert stats.converged
    labels = {node.label for _, node in example_state.all_nodes()}
    assert '001' not in labels


def test_delete_absent_key(example_state):
    before = example_state.snapshot()
    assert not SearchEngine(example_state).delete_key('1111')
    assert example_state.snapshot() == before


def test_delete_only_key_leaves_root():
    state = materialized(['0110'])
    assert SearchEngine(state).delete_key('0110')
    RoundScheduler(state).run_rounds(20)
    labels = {node.label for _, node in state.all_nodes()}
    assert labels == {EPSILON}


@pytest.mark.slow
def test_dynamic_mutations_reconverge():
    rng = random.Random(11)
    keys = set(random_keys(12, 10, 11))
    state = materialized(keys)
    search = SearchEngine(state)
    for _ in range(10):
        if rng.random() < 0.5 and len(keys) > 1:
            k = rng.choice(sorted(keys))
            start = state.metrics.dht_reads + state.metrics.dht_writes
            assert search.delete_key(k)
            assert state.metrics.dht_reads + state.metrics.dht_writes - start <= 3
            keys.discard(k)
        else:
            k = format(rng.getrandbits(10), '010b')
            if k in keys:
                continue
            assert search.insert_key(k)
            keys.add(k)
        assert run_until_legal(state, keys, 2000).converged


@pytest.mark.parametrize('keys', [EXAMPLE_KEYS, ROOT_SPLIT_KEYS, ['0', '1', '00', '0101', '011', '11100110']])
def test_exhaustive_queries_up_to_eight_bits(keys):
    search = SearchEngine(materialized(keys))
    for x in all_labels(8):
        result = search.prefix_search(x)
        assert len(lcp(x, result.key)) == max(len(lcp(x, k)) for k in keys)
        assert result.reads <= floor_log(len(x)) + 5


def read_lengths(state, monkeypatch):
    lengths = []
    search = state.dht_search

    def recording_search(label):
        lengths.append(len(label))
        return search(label)

    monkeypatch.setattr(state, 'dht_search', recording_search)
    return lengths


@given(key_sets)
def test_search_reads_msd_node_first_on_each_edge(keys):
    ideal = build_ideal_hpt(keys)
    for m, (p, c) in ideal.msd_edges.items():
        state = materialized(keys)
        with pytest.MonkeyPatch.context() as monkeypatch:
            lengths = read_lengths(state, monkeypatch)
            SearchEngine(state).prefix_search(c)
        inside = [n for n in lengths if len(p) < n <= len(c)]
        assert inside[0] == len(m) == len(msd_label(p, c))
