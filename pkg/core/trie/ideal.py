import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Set

from core.errors import EmptyKeySetError
from core.trie.labels import BitLabel, EPSILON, edge_between, is_proper_prefix, lcp, msd_label
from core.trie.node import HptNode, NodeKind

logger = logging.getLogger(__name__)


@dataclass
class IdealHpt:
    """
The unique correct trie for a key set, plus one valid key2 matching.
    """
    keys: Set[BitLabel]
    patricia_labels: Set[BitLabel]
    msd_labels: Set[BitLabel]
    # child label -> parent label, over closest Patricia pairs
    edges: Dict[BitLabel, BitLabel]
    # Msd label -> (parent label, child label)
    msd_edges: Dict[BitLabel, tuple]
    key2_assignment: Dict[BitLabel, Set[BitLabel]] = field(default_factory=dict)

    def parent_of(self, label: BitLabel) -> Optional[BitLabel]:
        return self.edges.get(label)

    def children_of(self, label: BitLabel) -> Dict[str, BitLabel]:
        return {c[len(label)]: c for c, p in self.edges.items() if p == label}

    @property
    def leaves(self) -> List[BitLabel]:
        parents = set(self.edges.values())
        return sorted(v for v in self.patricia_labels if v != EPSILON and v not in parents)

    @property
    def key2_nodes(self) -> List[BitLabel]:
        return sorted(v for v in self.patricia_labels if v == EPSILON or len(self.children_of(v)) == 2)

    def r_of(self, leaf: BitLabel) -> Optional[BitLabel]:
        for holder, leaves in self.key2_assignment.items():
            if leaf in leaves:
                return holder
        return None

    def nodes(self) -> Iterable[HptNode]:
        """
Materialized nodes of the ideal trie, with exact edges, keys, key2 slots and r references
        """
        for label in sorted(self.patricia_labels):
            node = HptNode(label=label, kind=NodeKind.PATRICIA)
            parent = self.parent_of(label)
            if parent is not None:
                node.parent_edge = edge_between(parent, label)
            for x, child in self.children_of(label).items():
                node.set_child(x, edge_between(label, child))
            if label in self.keys:
                node.key = label
            node.key2_slots = sorted(self.key2_assignment.get(label, ()))
            node.r_ref = self.r_of(label)
            yield node
        for label in sorted(self.msd_labels):
            parent, child = self.msd_edges[label]
            node = HptNode(label=label, kind=NodeKind.MSD, parent_edge=edge_between(parent, label))
            node.set_child(child[len(label)], edge_between(label, child))
            yield node

    def materialize(self, state):
        # store every node at its responsible peer, bypassing presentations
        for node in self.nodes():
            state.store_direct(node)


def _closest_parent(label: BitLabel, candidates: List[BitLabel]) -> Optional[BitLabel]:
    best = None
    for c in candidates:
        if is_proper_prefix(c, label) and (best is None or len(c) > len(best)):
            best = c
    return best


def _assign_key2(ideal: IdealHpt):
    key2_nodes = set(ideal.key2_nodes)
    assignment = {w: set() for w in key2_nodes}
    # longest leaves first, lexicographic tiebreak
    for leaf in sorted(ideal.leaves, key=lambda v: (-len(v), v)):
        holder = ideal.parent_of(leaf)
        while holder is not None:
            capacity = 2 if holder == EPSILON else 1
            if holder in key2_nodes and len(assignment[holder]) < capacity:
                assignment[holder].add(leaf)
                break
            holder = ideal.parent_of(holder)
        else:
            logger.warning('no key2 node left for leaf %r', leaf)
    ideal.key2_assignment = {w: leaves for w, leaves in assignment.items() if leaves}


def build_ideal_hpt(keys: Iterable[BitLabel]) -> IdealHpt:
    """
Build the legal trie of a key set
    :param keys: non-empty set of distinct bit labels
    :return: ideal trie with a deterministic key2 matching
    """
    keys = set(keys)
    if not keys:
        raise EmptyKeySetError('an ideal trie needs at least one key')
    patricia = set(keys) | {EPSILON}
    patricia.update(lcp(a, b) for a, b in combinations(sorted(keys), 2))

    ordered = sorted(patricia, key=len)
    edges = {}
    for label in ordered:
        if label != EPSILON:
            edges[label] = _closest_parent(label, ordered)

    msd_labels = set()
    msd_edges = {}
    for child, parent in edges.items():
        m = msd_label(parent, child)
        if m is not None:
            msd_labels.add(m)
            msd_edges[m] = (parent, child)

    ideal = IdealHpt(keys=keys, patricia_labels=patricia, msd_labels=msd_labels, edges=edges, msd_edges=msd_edges)
    _assign_key2(ideal)
    return ideal
