from copy import deepcopy
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from core.trie.labels import BitLabel, EPSILON, is_proper_prefix


class NodeKind(str, Enum):
    PATRICIA = 'patricia'
    MSD = 'msd'


@dataclass
class HptNode:
    """
One node of the hashed Patricia trie. Edges are stored as bit strings relative to the
node label; fields may hold malformed values in corrupted states.
    """
    label: BitLabel
    kind: NodeKind = NodeKind.PATRICIA
    parent_edge: Optional[BitLabel] = None
    child0: Optional[BitLabel] = None
    child1: Optional[BitLabel] = None
    key: Optional[BitLabel] = None
    key2_slots: List[BitLabel] = field(default_factory=list)
    r_ref: Optional[BitLabel] = None

    @property
    def is_msd(self) -> bool:
        return self.kind == NodeKind.MSD

    @property
    def is_root(self) -> bool:
        return self.label == EPSILON

    @property
    def key2_capacity(self) -> int:
        return 2 if self.is_root else 1

    def has_free_key2_slot(self) -> bool:
        return len(self.key2_slots) < self.key2_capacity

    def child(self, x: str) -> Optional[BitLabel]:
        return self.child0 if x == '0' else self.child1

    def set_child(self, x: str, edge: Optional[BitLabel]):
        if x == '0':
            self.child0 = edge
        else:
            self.child1 = edge

    def copy(self) -> 'HptNode':
        return deepcopy(self)


def node_children_count(v: HptNode) -> int:
    return (v.child0 is not None) + (v.child1 is not None)


def is_key2_node(v: HptNode) -> bool:
    # inner Patricia node with two children, or the root
    return not v.is_msd and (v.is_root or node_children_count(v) == 2)


def is_leaf(v: HptNode) -> bool:
    return not v.is_msd and not v.is_root and node_children_count(v) == 0


def parent_label(v: HptNode) -> Optional[BitLabel]:
    """
Resolve the parent edge into the parent's label
    :param v: node
    :return: parent label or None when the edge is missing or not a proper suffix
    """
    edge = v.parent_edge
    if not edge or not v.label.endswith(edge):
        return None
    return v.label[:len(v.label) - len(edge)]


def child_label(v: HptNode, x: str) -> Optional[BitLabel]:
    edge = v.child(x)
    if not edge or edge[0] != x:
        return None
    return v.label + edge


def child_labels(v: HptNode) -> List[BitLabel]:
    return [c for c in (child_label(v, '0'), child_label(v, '1')) if c is not None]


def neighbour_labels(v: HptNode) -> List[BitLabel]:
    # targets of every well-formed edge
    p = parent_label(v)
    return ([p] if p is not None else []) + child_labels(v)


def side_of(upper: BitLabel, lower: BitLabel) -> str:
    # bit of the lower label right below the upper one
    assert is_proper_prefix(upper, lower)
    return lower[len(upper)]
