from dataclasses import asdict, dataclass, fields
from itertools import combinations
from typing import Dict, Iterable, Optional

from core.api.dht_api import SystemState
from core.trie.labels import BitLabel, is_prefix, is_proper_prefix, lcp, msd_label
from core.trie.node import (HptNode, child_label, child_labels, is_key2_node, is_leaf, node_children_count,
                            parent_label, side_of)


@dataclass
class PhaseInstrumentation:
    """
Progress counters of the repair phases, computed from a global snapshot.
Every counter is zero in a legal state.
    """
    misstored_keys: int = 0
    malformed_fields: int = 0
    empty_subtree_depth: int = 0
    unnecessary_nodes: int = 0
    locally_unnecessary: int = 0
    parentless: int = 0
    incorrect_msd: int = 0
    missing_msd: int = 0
    unmatched_key2: int = 0
    unmatched_r: int = 0

    def as_dict(self) -> Dict[str, int]:
        return asdict(self)

    def is_zero(self) -> bool:
        return all(getattr(self, f.name) == 0 for f in fields(self))


def global_view(state: SystemState) -> Dict[BitLabel, HptNode]:
    # one node per label, preferring the copy at the responsible peer
    view = {}
    for peer, node in state.all_nodes():
        if node.label not in view or state.responsible_peer(node.label) is peer:
            view[node.label] = node
    return view


def _malformed(node: HptNode) -> int:
    count = 0
    if node.parent_edge is not None and parent_label(node) is None:
        count += 1
    for x in '01':
        if node.child(x) is not None and child_label(node, x) is None:
            count += 1
    if node.is_msd:
        count += (node.key is not None) + len(node.key2_slots) + (node.r_ref is not None)
    else:
        count += sum(1 for s in node.key2_slots if not is_proper_prefix(node.label, s))
        if node.r_ref is not None and not is_proper_prefix(node.r_ref, node.label):
            count += 1
    return count


def _valid_msd(m: HptNode, view: Dict[BitLabel, HptNode]) -> bool:
    kids = child_labels(m)
    p_label = parent_label(m)
    if p_label is None or node_children_count(m) != 1 or len(kids) != 1:
        return False
    p, c = view.get(p_label), view.get(kids[0])
    if p is None or c is None or p.is_msd or c.is_msd or not is_proper_prefix(p.label, c.label):
        return False
    return (child_label(p, side_of(p.label, c.label)) == c.label and parent_label(c) == p.label
            and m.label == msd_label(p.label, c.label))


def _closest_patricia_ancestor(label: BitLabel, patricia: Iterable[BitLabel]) -> Optional[BitLabel]:
    best = None
    for p in patricia:
        if is_proper_prefix(p, label) and (best is None or len(p) > len(best)):
            best = p
    return best


def compute_counters(state: SystemState, keys: Iterable[BitLabel]) -> PhaseInstrumentation:
    keys = set(keys)
    view = global_view(state)
    patricia = {label: node for label, node in view.items() if not node.is_msd}
    key_labels = [label for label, node in patricia.items() if node.key is not None]
    lcps = {lcp(a, b) for a, b in combinations(key_labels, 2)}
    counters = PhaseInstrumentation()

    counters.misstored_keys = sum(1 for k in keys if k not in patricia or patricia[k].key != k)
    counters.malformed_fields = sum(_malformed(node) for _, node in state.all_nodes())

    empty = [label for label in view if view[label].key is None
             and not any(is_prefix(label, k) for k in key_labels)]
    counters.empty_subtree_depth = 1 + max(len(label) for label in empty) if empty else 0

    for label, node in patricia.items():
        if node.key is not None or node.is_root:
            continue
        if label not in lcps:
            counters.unnecessary_nodes += 1
        if node_children_count(node) < 2:
            counters.locally_unnecessary += 1

    for label, node in patricia.items():
        if node.is_root:
            continue
        parent = parent_label(node)
        if parent is None or parent not in patricia:
            counters.parentless += 1
        upper = _closest_patricia_ancestor(label, patricia)
        if upper is not None:
            m = msd_label(upper, label)
            if m is not None and (m not in view or not view[m].is_msd):
                counters.missing_msd += 1

    counters.incorrect_msd = sum(1 for node in view.values() if node.is_msd and not _valid_msd(node, view))

    holders = {}
    for label, node in patricia.items():
        for s in node.key2_slots:
            holders.setdefault(s, []).append(label)
    for label, node in patricia.items():
        if not is_key2_node(node) or (node.is_root and node_children_count(node) == 0):
            continue
        shadowed = any(is_proper_prefix(label, other) for s in node.key2_slots for other in holders[s])
        if not node.key2_slots or shadowed or (not node.is_root and len(node.key2_slots) != 1):
            counters.unmatched_key2 += 1
    for label, node in patricia.items():
        if not is_leaf(node):
            continue
        holder = patricia.get(node.r_ref) if node.r_ref is not None else None
        if holder is None or label not in holder.key2_slots:
            counters.unmatched_r += 1
    return counters
