import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

from core.api.dht_api import SystemState
from core.api.messages import MessageKind
from core.harness.instrumentation import PhaseInstrumentation, compute_counters
from core.trie.ideal import IdealHpt, build_ideal_hpt
from core.trie.labels import BitLabel, EPSILON, is_proper_prefix

logger = logging.getLogger(__name__)

# rule identifiers
RULE_NODE_SET = 'node-set'
RULE_KEY = 'key'
RULE_PLACEMENT = 'placement'
RULE_EDGE = 'closest-pair-edge'
RULE_MSD = 'msd-label'
RULE_MSD_EDGE = 'msd-edge'
RULE_KEY2 = 'key2'
RULE_R = 'r-ref'
RULE_QUIESCENCE = 'quiescence'


@dataclass
class Violation:
    rule: str
    label: Optional[BitLabel]
    description: str


@dataclass
class LegalityReport:
    violations: List[Violation] = field(default_factory=list)
    counters: PhaseInstrumentation = field(default_factory=PhaseInstrumentation)

    @property
    def legal(self) -> bool:
        return not self.violations

    def add(self, rule: str, label: Optional[BitLabel], description: str):
        self.violations.append(Violation(rule, label, description))

    def rules(self) -> set:
        return {v.rule for v in self.violations}


def _check_nodes(report: LegalityReport, state: SystemState, ideal: IdealHpt) -> dict:
    expected = {node.label: node for node in ideal.nodes()}
    seen = {}
    for peer, node in state.all_nodes():
        if node.label in seen:
            report.add(RULE_PLACEMENT, node.label, 'stored at more than one peer')
        if state.responsible_peer(node.label) is not peer:
            report.add(RULE_PLACEMENT, node.label, 'stored at a peer not responsible for it')
        seen[node.label] = node
    for peer in state.peers:
        for k in peer.loose_keys:
            report.add(RULE_KEY, k, 'key not stored in a Patricia node')

    for label in sorted(set(expected) - set(seen)):
        rule = RULE_MSD if expected[label].is_msd else RULE_NODE_SET
        report.add(rule, label, 'missing %s node' % expected[label].kind.value)
    for label in sorted(set(seen) - set(expected)):
        rule = RULE_MSD if seen[label].is_msd else RULE_NODE_SET
        report.add(rule, label, 'unexpected %s node' % seen[label].kind.value)

    for label in sorted(set(seen) & set(expected)):
        node, want = seen[label], expected[label]
        if node.kind != want.kind:
            report.add(RULE_MSD if want.is_msd or node.is_msd else RULE_NODE_SET, label,
                       '%s node where a %s node belongs' % (node.kind.value, want.kind.value))
            continue
        edges = (node.parent_edge, node.child0, node.child1)
        if edges != (want.parent_edge, want.child0, want.child1):
            report.add(RULE_MSD_EDGE if node.is_msd else RULE_EDGE, label, 'edges %r, expected %r'
                       % (edges, (want.parent_edge, want.child0, want.child1)))
        if node.key != want.key:
            report.add(RULE_KEY, label, 'key %r, expected %r' % (node.key, want.key))
        if node.is_msd and (node.key2_slots or node.r_ref is not None):
            report.add(RULE_KEY2, label, 'msd node stores key2 data')
    return seen


def _check_key2(report: LegalityReport, seen: dict, ideal: IdealHpt):
    key2_nodes = set(ideal.key2_nodes)
    leaves = set(ideal.leaves)
    held = Counter()
    for label, node in seen.items():
        if node.is_msd:
            continue
        slots = node.key2_slots
        held.update(slots)
        if slots and label not in key2_nodes:
            report.add(RULE_KEY2, label, 'stores key2 without being a key2 node')
            continue
        if len(slots) > node.key2_capacity or len(set(slots)) != len(slots):
            report.add(RULE_KEY2, label, 'key2 slots %r exceed capacity' % (slots,))
        for s in slots:
            if s not in leaves or not is_proper_prefix(label, s):
                report.add(RULE_KEY2, label, 'key2 %r is not a leaf below' % s)
            elif s in seen and seen[s].r_ref != label:
                report.add(RULE_KEY2, label, 'key2 %r does not reference back' % s)
        if label in key2_nodes:
            if label != EPSILON and len(slots) != 1:
                report.add(RULE_KEY2, label, 'key2 node without key2')
            if label == EPSILON and ideal.children_of(EPSILON) and not slots:
                report.add(RULE_KEY2, label, 'root without key2')
        if node.r_ref is not None and label not in leaves:
            report.add(RULE_R, label, 'r stored at a node that is not a leaf')
    for leaf in sorted(leaves):
        node = seen.get(leaf)
        if node is None or node.is_msd:
            continue
        holder = seen.get(node.r_ref) if node.r_ref is not None else None
        if holder is None or leaf not in holder.key2_slots:
            report.add(RULE_R, leaf, 'r %r does not name a key2 node holding the leaf' % node.r_ref)
        if held[leaf] > 1:
            report.add(RULE_KEY2, leaf, 'leaf held by %d key2 slots' % held[leaf])


def _check_quiescence(report: LegalityReport, state: SystemState, ideal: IdealHpt):
    for peer in state.peers:
        for message in peer.channel:
            if message.kind == MessageKind.LINEARIZE:
                t, u = message.target, message.presented
                if t in ideal.patricia_labels and u in ideal.patricia_labels and (
                        ideal.parent_of(t) == u or u in ideal.children_of(t).values()):
                    continue
            report.add(RULE_QUIESCENCE, message.target, 'pending %s message' % message.kind.value)


def check_legal(state: SystemState, keys: Iterable[BitLabel], strict: bool = False,
                ideal: Optional[IdealHpt] = None) -> LegalityReport:
    """
Verify every clause of the legal state
    :param state: system to inspect
    :param keys: current key set
    :param strict: also require channels free of traffic that would change anything
    :param ideal: prebuilt ideal trie of keys
    :return: report, legal when no violation was found
    """
    keys = set(keys)
    ideal = ideal or build_ideal_hpt(keys)
    report = LegalityReport()
    seen = _check_nodes(report, state, ideal)
    _check_key2(report, seen, ideal)
    if strict:
        _check_quiescence(report, state, ideal)
    report.counters = compute_counters(state, keys)
    return report
