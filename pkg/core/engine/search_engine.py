import logging
from dataclasses import dataclass
from typing import List, Optional

from core.api.dht_api import SystemState
from core.errors import EmptyKeySetError
from core.trie.labels import BitLabel, EPSILON, LengthLadder, edge_between, is_prefix, lcp
from core.trie.node import HptNode, child_label, child_labels, parent_label

logger = logging.getLogger(__name__)


@dataclass
class QueryResult:
    query: BitLabel
    key: Optional[BitLabel]
    reads: int
    node: Optional[BitLabel]


class SearchEngine:
    """
Client operations on the trie: binary prefix search over label lengths, longest prefix
match queries, key insertion and deletion.
    """

    def __init__(self, state: SystemState) -> None:
        super().__init__()
        self.state = state

    def __fetch_patricia(self, label: BitLabel) -> Optional[HptNode]:
        node = self.state.dht_search(label)
        return node if node is not None and not node.is_msd else None

    def _binary_phase(self, x: BitLabel, limit: int) -> Optional[HptNode]:
        """
MSB-first search over prefix lengths of x up to limit.
An accepted Msd node reveals the Patricia nodes around it, so lengths up to the deepest
known Patricia prefix are accepted without reading them.
        :param x: query label
        :param limit: largest prefix length considered
        :return: deepest Patricia node whose label is a prefix of x, at most limit long
        """
        if limit < 0:
            return None
        known = None
        best = None
        ladder = LengthLadder(limit)
        for candidate in ladder:
            if known is not None and candidate <= len(known):
                ladder.accept(candidate)
                continue
            node = self.state.dht_search(x[:candidate])
            if node is None:
                continue
            ladder.accept(candidate)
            if node.is_msd:
                around = [parent_label(node)] + child_labels(node)
            else:
                best = node
                around = [node.label]
            for label in around:
                if label is not None and len(label) <= limit and is_prefix(label, x):
                    if known is None or len(label) > len(known):
                        known = label
        if known is not None and (best is None or len(known) > len(best.label)):
            node = self.__fetch_patricia(known)
            if node is not None:
                return node
        if best is not None:
            return best
        return self.__fetch_patricia(EPSILON)

    def binary_prefix_search(self, x: BitLabel) -> Optional[HptNode]:
        # deepest Patricia node whose label is a proper prefix of x
        return self._binary_phase(x, len(x) - 1)

    def prefix_search(self, x: BitLabel) -> QueryResult:
        """
Find a stored key sharing the longest common prefix with x
        :param x: query label
        :return: answer key with the number of reads used
        :raises EmptyKeySetError: when no key is reachable from the search
        """
        start = self.state.metrics.dht_reads
        u = self._binary_phase(x, len(x))
        candidates: List[BitLabel] = []
        if u is not None:
            candidates += [u.key] + list(u.key2_slots)
            if len(u.label) < len(x):
                c_label = child_label(u, x[len(u.label)])
                if c_label is not None:
                    c = self.__fetch_patricia(c_label)
                    if c is not None:
                        candidates += [c.key] + list(c.key2_slots)
        answer = None
        for k in candidates:
            if k is not None and (answer is None or len(lcp(x, k)) > len(lcp(x, answer))):
                answer = k
        if answer is None:
            raise EmptyKeySetError('no key stored for query %r' % x)
        return QueryResult(x, answer, self.state.metrics.dht_reads - start, u.label)

    def insert_key(self, k: BitLabel) -> bool:
        """
Store a new key; the protocol integrates it during the following rounds
        :param k: key label
        :return: false when the key was already stored
        """
        existing = self.state.dht_search(k)
        if existing is not None and not existing.is_msd:
            if existing.key == k:
                return False
            if existing.key is None:
                existing.key = k
                self.state.dht_update(existing)
                logger.debug('key %r added to existing node', k)
                return True
        node = HptNode(label=k, key=k)
        parent = self.binary_prefix_search(k)
        if parent is not None:
            node.parent_edge = edge_between(parent.label, k)
        self.state.dht_insert(node)
        logger.debug('key %r inserted', k)
        return True

    def delete_key(self, k: BitLabel) -> bool:
        # one read and one write; cleanup is left to the protocol
        node = self.state.dht_search(k)
        if node is None or node.is_msd or node.key != k:
            return False
        node.key = None
        self.state.dht_update(node)
        logger.debug('key %r deleted', k)
        return True
