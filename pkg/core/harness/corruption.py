import logging
import random
from collections import Counter
from typing import Dict, Iterable, List, Optional

import config
from core.api.dht_api import SystemState
from core.api.messages import Message, MessageKind
from core.errors import EmptyKeySetError, KeyPreservationError, LabelError, ScriptFormatError
from core.parsers.schemas import EDGE_FIELDS, CorruptionOp, CorruptionScript
from core.trie.ideal import IdealHpt, build_ideal_hpt
from core.trie.labels import BitLabel, EPSILON
from core.trie.node import HptNode, NodeKind

logger = logging.getLogger(__name__)


class ScriptGenerator:
    """
Draws a replayable corruption script for a key set from a seed and an intensity vector
    """

    def __init__(self, keys: Iterable[BitLabel], seed: int, peers: int) -> None:
        super().__init__()
        self.keys = sorted(set(keys))
        self.ideal = build_ideal_hpt(self.keys)
        self.labels = sorted(n.label for n in self.ideal.nodes())
        self.rng = random.Random(seed)
        self.seed = seed
        self.peers = peers
        self.max_len = min(max(len(k) for k in self.keys) + 2, config.simulation['max_label_bits'])

    def __bits(self, min_len: int = 0, max_len: Optional[int] = None) -> BitLabel:
        n = self.rng.randint(min_len, max_len if max_len is not None else self.max_len)
        return ''.join(self.rng.choice('01') for _ in range(n))

    def __free_label(self, taken: set) -> BitLabel:
        for _ in range(64):
            label = self.__bits(1)
            if label not in taken:
                return label
        return self.__bits(self.max_len, self.max_len)

    def __edge_value(self, target: BitLabel, edge_field: str) -> BitLabel:
        if edge_field == 'parent_edge' and target and self.rng.random() < 0.5:
            # a well-formed suffix pointing at the wrong parent
            return target[-self.rng.randint(1, len(target)):]
        return self.__bits(1, 6)

    def op(self, name: str, taken: set) -> CorruptionOp:
        rng = self.rng
        target = rng.choice(self.labels)
        if name == 'clear-edge':
            return CorruptionOp(op=name, target=target, field=rng.choice(EDGE_FIELDS))
        if name == 'scramble-edge':
            edge_field = rng.choice(EDGE_FIELDS)
            return CorruptionOp(op=name, target=target, field=edge_field, value=self.__edge_value(target, edge_field))
        if name == 'delete-node':
            return CorruptionOp(op=name, target=target)
        if name in ('add-spurious-patricia', 'add-spurious-msd'):
            label = self.__free_label(taken)
            taken.add(label)
            return CorruptionOp(op=name, target=label, field=rng.choice(EDGE_FIELDS), value=self.__bits(1, 4))
        if name == 'move-key-to-wrong-label':
            label = self.__free_label(taken)
            taken.add(label)
            return CorruptionOp(op=name, target=rng.choice(self.keys), value=label)
        if name == 'misplace-node-at-wrong-peer':
            return CorruptionOp(op=name, target=target, peer=rng.randrange(max(self.peers, 1)))
        if name in ('corrupt-key2-slot', 'corrupt-r'):
            value = rng.choice([None, self.__bits(), rng.choice(self.labels)])
            return CorruptionOp(op=name, target=target, value=value)
        if name == 'inject-stray-message':
            kind = rng.choice([k.value for k in MessageKind])
            return CorruptionOp(op=name, target=rng.choice(self.labels + [self.__bits()]), field=kind,
                                value=rng.choice(self.labels + [self.__bits()]), hops=rng.randint(0, self.max_len))
        raise ScriptFormatError('unknown corruption op %r' % name)

    def generate(self, intensity: Dict[str, int], level: Optional[str] = None) -> CorruptionScript:
        taken = set(self.labels)
        ops = [self.op(name, taken) for name in sorted(intensity) for _ in range(intensity[name])]
        self.rng.shuffle(ops)
        return CorruptionScript(seed=self.seed, level=level, ops=ops)

    def wipe(self) -> CorruptionScript:
        keys = set(self.keys)
        ops = [CorruptionOp(op='delete-node', target=label) for label in self.labels if label not in keys]
        return CorruptionScript(seed=self.seed, level=config.corruption['wipe_level'], ops=ops)


def script_for_level(keys: Iterable[BitLabel], level: str, seed: int,
                     peers: int = config.simulation['peers']) -> CorruptionScript:
    generator = ScriptGenerator(keys, seed, peers)
    if level == config.corruption['wipe_level']:
        return generator.wipe()
    if level not in config.corruption['levels']:
        raise ScriptFormatError('unknown corruption level %r' % level)
    return generator.generate(config.corruption['levels'][level], level)


class ScriptApplier:
    """
Applies a corruption script to a materialized state. Ops naming absent nodes are skipped.
    """

    def __init__(self, state: SystemState) -> None:
        super().__init__()
        self.state = state

    def __locate(self, label: BitLabel):
        found = self.state.find_anywhere(label)
        return found[0] if found else (None, None)

    def apply(self, op: CorruptionOp):
        peer, node = self.__locate(op.target) if op.target is not None else (None, None)
        name = op.op
        if name in ('add-spurious-patricia', 'add-spurious-msd'):
            if node is not None or (name == 'add-spurious-msd' and op.target == EPSILON):
                return
            kind = NodeKind.MSD if name == 'add-spurious-msd' else NodeKind.PATRICIA
            spurious = HptNode(label=op.target, kind=kind)
            if op.field in EDGE_FIELDS:
                setattr(spurious, op.field, op.value)
            self.state.store_direct(spurious)
            return
        if name == 'inject-stray-message':
            kind = MessageKind(op.field or MessageKind.LINEARIZE.value)
            if kind == MessageKind.LINEARIZE:
                message = Message.linearize(op.target, op.value or EPSILON)
            else:
                message = Message(kind, op.target, origin=op.value or EPSILON, hops_left=op.hops)
            self.state.responsible_peer(op.target).channel.append(message)
            return
        if node is None:
            logger.debug('%s skipped: no node %r', name, op.target)
            return
        if name == 'clear-edge':
            setattr(node, op.field, None)
        elif name == 'scramble-edge':
            setattr(node, op.field, op.value)
        elif name == 'delete-node':
            SystemState.delete_local(peer, node.label)
            if node.key is not None:
                peer.loose_keys.append(node.key)
        elif name == 'move-key-to-wrong-label':
            if node.key is None:
                return
            _, dest = self.__locate(op.value)
            if dest is not None and dest.key is not None:
                raise KeyPreservationError('moving key %r onto %r would drop key %r' % (node.key, op.value, dest.key))
            if dest is None or dest.is_msd:
                self.state.store_direct(HptNode(label=op.value))
                dest = self.state.responsible_peer(op.value).store[op.value]
            dest.key, node.key = node.key, None
        elif name == 'misplace-node-at-wrong-peer':
            peers = [p for p in self.state.peers if p is not self.state.responsible_peer(node.label)]
            if not peers:
                return
            wrong = peers[(op.peer or 0) % len(peers)]
            SystemState.delete_local(peer, node.label)
            if node.label not in wrong.store:
                wrong.store[node.label] = node
        elif name == 'corrupt-key2-slot':
            node.key2_slots = [op.value] if op.value is not None else []
        elif name == 'corrupt-r':
            node.r_ref = op.value


def _check_keys(state: SystemState, keys: set):
    stored = state.stored_keys()
    if stored != keys:
        raise KeyPreservationError('keys changed by corruption: lost %r, gained %r'
                                   % (sorted(keys - stored), sorted(stored - keys)))
    occurrences = Counter(node.key for _, node in state.all_nodes() if node.key is not None)
    for peer in state.peers:
        occurrences.update(peer.loose_keys)
    duplicates = sorted(k for k, n in occurrences.items() if n > 1)
    if duplicates:
        raise KeyPreservationError('keys stored more than once: %r' % duplicates)


def generate_initial_state(keys: Iterable[BitLabel], script: Optional[CorruptionScript] = None,
                           peers: int = config.simulation['peers'], ideal: Optional[IdealHpt] = None) -> SystemState:
    """
Materialize the ideal trie across the peers and apply a corruption script
    :param keys: non-empty set of distinct keys
    :param script: mutations to apply, none for a legal state
    :param peers: number of DHT peers
    :param ideal: prebuilt ideal trie of keys
    :return: initial system state
    """
    keys = set(keys)
    if not keys:
        raise EmptyKeySetError('scenarios need at least one key')
    seed = script.seed if script is not None else 0
    state = SystemState(peers=peers, seed=seed)
    state.metrics.d_bits = sum(len(k) for k in keys)
    (ideal or build_ideal_hpt(keys)).materialize(state)
    if script is not None:
        applier = ScriptApplier(state)
        for op in script.ops:
            applier.apply(op)
        _check_keys(state, keys)
        logger.info('applied %d corruption ops (%s)', len(script.ops), script.level or 'script')
    return state


def all_single_mutations(keys: Iterable[BitLabel]) -> List[CorruptionOp]:
    """
One mutation per node and field that makes the ideal trie illegal
    """
    ideal = build_ideal_hpt(keys)
    ops = []
    for node in ideal.nodes():
        for edge_field in EDGE_FIELDS:
            if getattr(node, edge_field) is not None:
                ops.append(CorruptionOp(op='clear-edge', target=node.label, field=edge_field))
        ops.append(CorruptionOp(op='misplace-node-at-wrong-peer', target=node.label, peer=0))
        if node.key is None:
            ops.append(CorruptionOp(op='delete-node', target=node.label))
        ops.append(CorruptionOp(op='corrupt-r', target=node.label, value=node.label + '0'))
    return ops


def random_keys(count: int, key_len: int, seed: int) -> List[BitLabel]:
    """
Draw distinct keys of a fixed length
    :param count: number of keys
    :param key_len: bits per key
    :param seed: random seed
    :return: sorted keys
    """
    if count < 1:
        raise EmptyKeySetError('scenarios need at least one key')
    if not 0 <= key_len <= config.simulation['max_label_bits']:
        raise LabelError('key length %d outside [0, %d]' % (key_len, config.simulation['max_label_bits']))
    if count > 2 ** key_len:
        raise LabelError('only %d distinct keys of %d bits exist' % (2 ** key_len, key_len))
    rng = random.Random(seed)
    values = set()
    while len(values) < count:
        values.add(rng.getrandbits(key_len) if key_len else 0)
    return sorted(format(v, '0%db' % key_len) if key_len else EPSILON for v in values)
