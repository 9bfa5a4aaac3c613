import logging
from typing import Callable, Iterable, List, Optional

from core.api.dht_api import Peer, SystemState
from core.api.messages import Message, MessageKind
from core.engine.search_engine import SearchEngine
from core.trie.labels import BitLabel, EPSILON, edge_between, is_prefix, is_proper_prefix, lcp, msd_label
from core.trie.node import (HptNode, NodeKind, child_label, child_labels, is_key2_node, is_leaf, node_children_count,
                            parent_label, side_of)

logger = logging.getLogger(__name__)


class ShptEngine:
    """
Self-stabilizing repair protocol. A Timeout checks one locally stored node; protocol
messages are handled as they are delivered by the scheduler.
    """
    # node creation reasons reported to the creation hooks
    CREATE_ROOT = 'root'
    CREATE_BRANCH = 'branch'
    CREATE_MSD = 'msd'
    CREATE_KEY = 'key'

    def __init__(self, state: SystemState, search: Optional[SearchEngine] = None) -> None:
        super().__init__()
        self.state = state
        self.search = search or SearchEngine(state)
        self.creation_hooks: List[Callable[[HptNode, str], None]] = []

    # -- node life cycle

    def __create(self, node: HptNode, reason: str):
        for hook in self.creation_hooks:
            hook(node, reason)
        verdict = self.state.dht_insert(node)
        logger.debug('created %s node %r (%s): %s', node.kind.value, node.label, reason, verdict.value)

    @staticmethod
    def __delete(peer: Peer, v: HptNode, reason: str):
        SystemState.delete_local(peer, v.label)
        logger.debug('deleted %s node %r: %s', v.kind.value, v.label, reason)

    def __is_msd_label(self, label: BitLabel) -> bool:
        node = self.state.dht_search(label)
        return node is not None and node.is_msd

    def __may_point_to(self, v: HptNode, u: BitLabel, fresh: bool) -> bool:
        # no edge toward an Msd node; a fresh Msd node is only presented Patricia labels
        return (fresh and v.is_msd) or not self.__is_msd_label(u)

    @staticmethod
    def __bidirectional(p: HptNode, c: HptNode) -> bool:
        return (is_proper_prefix(p.label, c.label)
                and child_label(p, side_of(p.label, c.label)) == c.label
                and parent_label(c) == p.label)

    # -- Timeout

    def timeout(self, peer: Peer):
        """
Check the next node stored at a peer
    :param peer: peer running the action
        """
        self.state.metrics.begin_timeout()
        try:
            self.__integrate_keys(peer)
            label = peer.next_label()
            if label is None:
                return
            if self.state.responsible_peer(label) is not peer:
                node = peer.store.pop(label)
                logger.debug('migrating %r to its responsible peer', label)
                self.state.dht_insert(node)
                return
            for check in (self.check_node_info, self.check_parent_edge_info, self.check_child_edge_info,
                          self.check_validity, self.check_key2_info, self.linearize_timeout):
                v = peer.store.get(label)
                if v is None:
                    break
                check(peer, v)
        finally:
            self.state.metrics.end_timeout()

    def __integrate_keys(self, peer: Peer):
        keys, peer.loose_keys = peer.loose_keys, []
        for k in keys:
            self.__create(HptNode(label=k, key=k), self.CREATE_KEY)

    def check_node_info(self, peer: Peer, v: HptNode):
        if v.parent_edge is not None and parent_label(v) is None:
            v.parent_edge = None
        if v.child0 is not None and not v.child0.startswith('0'):
            v.child0 = None
        if v.child1 is not None and not v.child1.startswith('1'):
            v.child1 = None
        if v.is_msd:
            if v.key is not None:
                # an Msd node holds no key: give the key a node of its own
                k, v.key = v.key, None
                self.__create(HptNode(label=k, key=k), self.CREATE_KEY)
            v.key2_slots = []
            v.r_ref = None
            return
        if v.key is not None and v.key != v.label:
            # wrong label: move the key into a node of its own
            w = HptNode(label=v.key, key=v.key)
            self.__delete(peer, v, 'key %r stored under wrong label' % v.key)
            self.__create(w, self.CREATE_KEY)
            return
        slots = []
        if is_key2_node(v):
            for s in v.key2_slots:
                if is_proper_prefix(v.label, s) and s not in slots:
                    slots.append(s)
        v.key2_slots = slots[:v.key2_capacity]
        if v.r_ref is not None and (not is_proper_prefix(v.r_ref, v.label) or node_children_count(v) > 0):
            v.r_ref = None

    def check_parent_edge_info(self, peer: Peer, v: HptNode):
        if v.is_msd or v.is_root:
            return
        if v.parent_edge is None:
            w = self.search.binary_prefix_search(v.label)
            if w is None:
                self.__create(HptNode(label=EPSILON), self.CREATE_ROOT)
            else:
                v.parent_edge = edge_between(w.label, v.label)
            return
        par = self.state.dht_search(parent_label(v))
        if par is None or par.is_msd:
            v.parent_edge = None
            return
        e_par = par.child(side_of(par.label, v.label))
        if e_par is None:
            return
        if not is_prefix(e_par, v.parent_edge) and not is_prefix(v.parent_edge, e_par):
            # parent points elsewhere on our side: a branching node is needed
            n_label = lcp(v.label, par.label + e_par)
            existing = self.state.dht_search(n_label)
            if existing is not None and not existing.is_msd:
                self.state.send(Message.linearize(n_label, v.label))
            else:
                n = self.multi_linearize(HptNode(label=n_label), [v.label, par.label, par.label + e_par])
                self.__create(n, self.CREATE_BRANCH)
        elif e_par == v.parent_edge:
            m_label = msd_label(par.label, v.label)
            if m_label is None:
                return
            m = self.multi_linearize(HptNode(label=m_label, kind=NodeKind.MSD), [v.label, par.label])
            existing = self.state.dht_search(m_label)
            if existing is None or (existing.is_msd and (existing.parent_edge, existing.child0, existing.child1)
                                    != (m.parent_edge, m.child0, m.child1)):
                self.__create(m, self.CREATE_MSD)

    def check_child_edge_info(self, peer: Peer, v: HptNode):
        if v.is_msd:
            return
        for x in '01':
            c_label = child_label(v, x)
            if c_label is None:
                continue
            c = self.state.dht_search(c_label)
            if c is None or c.is_msd:
                v.set_child(x, None)

    def check_validity(self, peer: Peer, v: HptNode):
        if v.is_msd:
            valid = False
            p_label = parent_label(v)
            kids = child_labels(v)
            if p_label is not None and node_children_count(v) == 1 and len(kids) == 1:
                p = self.state.dht_search(p_label)
                c = self.state.dht_search(kids[0])
                valid = (p is not None and c is not None and not p.is_msd and not c.is_msd
                         and self.__bidirectional(p, c) and v.label == msd_label(p.label, c.label))
            if not valid:
                self.__delete(peer, v, 'incorrect msd node')
        elif v.key is None and node_children_count(v) < 2 and not v.is_root:
            self.__delete(peer, v, 'unnecessary patricia node')

    def check_key2_info(self, peer: Peer, v: HptNode):
        if v.is_msd:
            return
        if is_key2_node(v):
            kept = []
            for s in v.key2_slots:
                k = self.state.dht_search(s)
                if (k is None or not is_leaf(k)
                        or (k.r_ref is not None and is_proper_prefix(v.label, k.r_ref))):
                    continue
                kept.append(s)
                if k.r_ref is None or is_proper_prefix(k.r_ref, v.label):
                    k.r_ref = v.label
                    self.state.dht_update(k)
            v.key2_slots = kept
            parent = parent_label(v)
            if v.has_free_key2_slot() and parent is not None:
                self.state.send(Message.key2_probe(parent, v.label, len(v.label)))
        elif is_leaf(v):
            if v.r_ref is not None:
                k = self.state.dht_search(v.r_ref)
                if k is None or not is_key2_node(k):
                    v.r_ref = None
                elif v.label in k.key2_slots:
                    pass
                elif k.has_free_key2_slot():
                    # repair reference
                    k.key2_slots.append(v.label)
                    self.state.dht_update(k)
                else:
                    v.r_ref = None
            else:
                parent = parent_label(v)
                if parent is not None:
                    self.state.send(Message.leaf_present(parent, v.label, len(v.label)))

    def linearize_timeout(self, peer: Peer, v: HptNode):
        if v.is_msd:
            return
        parent = parent_label(v)
        if parent is not None:
            self.state.send(Message.linearize(parent, v.label))
        for c in child_labels(v):
            self.state.send(Message.linearize(c, v.label))

    # -- linearization

    def linearize(self, v: HptNode, u: BitLabel, fresh: bool = False):
        """
Handle the presentation of label u to node v.
A fresh node is being initialized before insertion and may be an Msd node.
        :param v: local node
        :param u: presented label
        :param fresh: true while initializing a new node
        """
        if u == v.label or (v.is_msd and not fresh):
            return
        if len(lcp(u, v.label)) < len(v.label):
            # u is not below v
            parent = parent_label(v)
            if parent is None:
                if is_proper_prefix(u, v.label) and self.__may_point_to(v, u, fresh):
                    v.parent_edge = edge_between(u, v.label)
            elif parent != u:
                self.state.send(Message.linearize(parent, u))
                if is_proper_prefix(parent, u) and is_proper_prefix(u, v.label) and not self.__is_msd_label(u):
                    v.parent_edge = edge_between(u, v.label)
            return
        # v is above u
        x = u[len(v.label)]
        c = child_label(v, x)
        if c is None:
            if self.__may_point_to(v, u, fresh):
                v.set_child(x, edge_between(v.label, u))
        elif c == u:
            pass
        elif is_proper_prefix(c, u):
            self.state.send(Message.linearize(c, u))
        elif is_proper_prefix(u, c):
            if not self.__is_msd_label(u):
                v.set_child(x, edge_between(v.label, u))
                self.state.send(Message.linearize(c, u))
        else:
            # c and u need a common parent
            self.state.send(Message.linearize(u, v.label))

    def multi_linearize(self, v: HptNode, targets: Iterable[BitLabel]) -> HptNode:
        for u in targets:
            self.linearize(v, u, fresh=True)
        return v

    # -- upward walks

    def __forward_upward(self, v: HptNode, message: Message):
        parent = parent_label(v)
        if parent is None:
            return
        if message.hops_left <= 0:
            logger.warning('%s from %r dropped at hop bound', message.kind.value, message.origin)
            return
        self.state.send(message.delegated(parent))

    def __answer_key2_probe(self, v: HptNode, message: Message):
        if not v.is_msd:
            for s in v.key2_slots:
                if is_proper_prefix(message.origin, s):
                    origin = self.state.dht_search(message.origin)
                    if (origin is not None and is_key2_node(origin) and origin.has_free_key2_slot()
                            and s not in origin.key2_slots):
                        origin.key2_slots.append(s)
                        self.state.dht_update(origin)
                    return
        self.__forward_upward(v, message)

    def __claim_leaf(self, v: HptNode, message: Message):
        leaf_label = message.origin
        if (is_key2_node(v) and is_proper_prefix(v.label, leaf_label)
                and (leaf_label in v.key2_slots or v.has_free_key2_slot())):
            if leaf_label not in v.key2_slots:
                v.key2_slots.append(leaf_label)
            leaf = self.state.dht_search(leaf_label)
            if leaf is not None and not leaf.is_msd and (leaf.r_ref is None or is_proper_prefix(leaf.r_ref, v.label)):
                leaf.r_ref = v.label
                self.state.dht_update(leaf)
            return
        self.__forward_upward(v, message)

    def process_message(self, peer: Peer, message: Message):
        """
Deliver one message to its target node; messages for absent nodes are dropped
        :param peer: receiving peer
        :param message: delivered message
        """
        v = peer.store.get(message.target)
        if v is None:
            return
        if message.kind == MessageKind.LINEARIZE:
            self.linearize(v, message.presented)
        elif message.kind == MessageKind.KEY2_PROBE:
            self.__answer_key2_probe(v, message)
        elif message.kind == MessageKind.LEAF_PRESENT:
            self.__claim_leaf(v, message)
