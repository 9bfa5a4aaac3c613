from dataclasses import dataclass
from enum import Enum
from typing import Optional

from core.trie.labels import BitLabel


class MessageKind(str, Enum):
    LINEARIZE = 'linearize'
    KEY2_PROBE = 'key2_probe'
    LEAF_PRESENT = 'leaf_present'


@dataclass(frozen=True)
class Message:
    kind: MessageKind
    target: BitLabel
    # Linearize: the label presented to the target
    presented: Optional[BitLabel] = None
    # Key2Probe / LeafPresent: the node that started the upward walk
    origin: Optional[BitLabel] = None
    hops_left: int = 0

    @staticmethod
    def linearize(target: BitLabel, presented: BitLabel) -> 'Message':
        return Message(MessageKind.LINEARIZE, target, presented=presented)

    @staticmethod
    def key2_probe(target: BitLabel, origin: BitLabel, hops_left: int) -> 'Message':
        return Message(MessageKind.KEY2_PROBE, target, origin=origin, hops_left=hops_left)

    @staticmethod
    def leaf_present(target: BitLabel, origin: BitLabel, hops_left: int) -> 'Message':
        return Message(MessageKind.LEAF_PRESENT, target, origin=origin, hops_left=hops_left)

    def delegated(self, target: BitLabel) -> 'Message':
        # same walk, one hop further up
        return Message(self.kind, target, presented=self.presented, origin=self.origin, hops_left=self.hops_left - 1)
