import pytest

from core.api import InsertVerdict, Message, MessageKind, Peer, SystemState
from core.errors import HashCollisionError
from core.services import RoundScheduler
from core.trie import EPSILON, HptNode, NodeKind
from tests.conftest import materialized


def test_hash_points_are_deterministic():
    a, b = SystemState(seed=3), SystemState(seed=3)
    assert a.hash_point('0110') == b.hash_point('0110')
    assert [p.id for p in a.peers] == [p.id for p in b.peers]
    assert 0 <= a.hash_point('0110') < 1
    assert SystemState(seed=4).hash_point('0110') != a.hash_point('0110')


@pytest.mark.parametrize('label', [EPSILON, '0', '1', '0110', '111000111'])
def test_responsible_peer_is_the_successor(label):
    state = SystemState(peers=8)
    point = state.hash_point(label)
    successors = [p for p in state.peers if p.id >= point]
    expected = successors[0] if successors else state.peers[0]
    assert state.responsible_peer(label) is expected


def test_hash_collision_is_reported(monkeypatch):
    state = SystemState()
    monkeypatch.setattr(state, '_SystemState__hash_int', lambda text: 42)
    state.hash_point('0')
    with pytest.raises(HashCollisionError):
        state.hash_point('1')


def test_search_counts_reads_and_returns_copies():
    state = SystemState()
    state.store_direct(HptNode(label='01', key='01'))
    node = state.dht_search('01')
    node.key = None
    assert state.responsible_peer('01').store['01'].key == '01'
    assert state.dht_search('10') is None
    assert state.metrics.dht_reads == 2


def test_insert_presents_node_to_its_neighbours():
    state = SystemState()
    verdict = state.dht_insert(HptNode(label='01', parent_edge='1', child0='0'))
    assert verdict == InsertVerdict.STORED
    targets = sorted(m.target for p in state.peers for m in p.channel)
    assert targets == ['0', '010']
    assert all(m.kind == MessageKind.LINEARIZE and m.presented == '01' for p in state.peers for m in p.channel)
    assert state.metrics.messages_sent == 2
    assert state.metrics.dht_writes == 1


def test_insert_of_msd_node_sends_nothing():
    state = SystemState()
    state.dht_insert(HptNode(label='00', kind=NodeKind.MSD, parent_edge='0', child1='1'))
    assert state.pending_messages() == 0


def test_insert_keeps_key_storing_occupant():
    state = SystemState()
    state.store_direct(HptNode(label='01', key='01'))
    assert state.dht_insert(HptNode(label='01', key='01')) == InsertVerdict.KEPT
    assert state.dht_insert(HptNode(label='01')) == InsertVerdict.REJECTED
    assert state.stored_keys() == {'01'}
    assert state.dht_insert(HptNode(label='01', key='011')) == InsertVerdict.REJECTED
    assert state.responsible_peer('01').loose_keys == ['011']
    assert state.stored_keys() == {'01', '011'}


def test_insert_replaces_keyless_occupant():
    state = SystemState()
    state.store_direct(HptNode(label='01', child0='0'))
    assert state.dht_insert(HptNode(label='01', key='01')) == InsertVerdict.STORED
    assert state.responsible_peer('01').store['01'].child0 is None


def test_update_only_over_same_kind():
    state = SystemState()
    assert not state.dht_update(HptNode(label='0'))
    state.store_direct(HptNode(label='00', kind=NodeKind.MSD))
    assert not state.dht_update(HptNode(label='00', key='00'))
    state.store_direct(HptNode(label='0'))
    assert state.dht_update(HptNode(label='0', r_ref=EPSILON))
    assert state.responsible_peer('0').store['0'].r_ref == EPSILON
    assert state.metrics.dht_writes == 3


def test_cursor_cycles_over_stored_labels():
    peer = Peer(id=0.5)
    for label in (EPSILON, '0', '1'):
        peer.store[label] = HptNode(label=label)
    assert [peer.next_label() for _ in range(4)] == [EPSILON, '0', '1', EPSILON]
    del peer.store['0']
    assert peer.next_label() == '1'
    assert Peer(id=0.1).next_label() is None


def test_per_timeout_maxima():
    state = SystemState()
    metrics = state.metrics
    metrics.begin_timeout()
    state.dht_search('0')
    state.dht_search('1')
    metrics.end_timeout()
    metrics.begin_timeout()
    state.dht_search('0')
    state.send(Message.linearize('0', '01'))
    metrics.end_timeout()
    assert metrics.max_reads_per_timeout == 2
    assert metrics.max_msgs_per_timeout == 1
    metrics.reset_window()
    assert metrics.max_reads_per_timeout == 0
    assert metrics.dht_reads == 3


def test_round_delivers_queued_messages_and_runs_timeouts():
    state = materialized(['0010', '0011', '0110'])
    state.responsible_peer('0101').channel.append(Message.linearize('0101', '0'))
    before = state.snapshot()
    RoundScheduler(state).run_round()
    assert state.round == 1
    assert state.snapshot() == before
    assert all(p.timeout_cursor is not None for p in state.peers if p.store)


def test_delete_local_and_find_anywhere():
    state = SystemState()
    wrong = state.peers[0] if state.responsible_peer('0') is not state.peers[0] else state.peers[1]
    state.store_direct(HptNode(label='0'), wrong)
    state.store_direct(HptNode(label='0'))
    assert len(state.find_anywhere('0')) == 2
    SystemState.delete_local(wrong, '0')
    assert [p for p, _ in state.find_anywhere('0')] == [state.responsible_peer('0')]
