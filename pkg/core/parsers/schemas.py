from collections import Counter
from typing import Annotated, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

'''
Documents exchanged with the outside world: corruption scripts, state dumps and metrics.
The models validate files on load and render them as JSON on save.
'''

Label = Annotated[str, Field(pattern=r'^[01]*$', max_length=64)]

SCRIPT_FORMAT = 'shpt-script/1'
STATE_FORMAT = 'shpt-state/1'

CORRUPTION_OPS = (
    'clear-edge', 'scramble-edge', 'delete-node', 'add-spurious-patricia', 'add-spurious-msd',
    'move-key-to-wrong-label', 'misplace-node-at-wrong-peer', 'corrupt-key2-slot', 'corrupt-r',
    'inject-stray-message',
)
EDGE_FIELDS = ('parent_edge', 'child0', 'child1')


class CorruptionOp(BaseModel):
    op: Literal[CORRUPTION_OPS]
    target: Optional[Label] = None
    # edge field for clear-edge / scramble-edge, message kind for inject-stray-message
    field: Optional[str] = None
    value: Optional[Label] = None
    peer: Optional[int] = None
    hops: int = 0


class CorruptionScript(BaseModel):
    format: Literal[SCRIPT_FORMAT] = SCRIPT_FORMAT
    seed: int = 0
    level: Optional[str] = None
    ops: List[CorruptionOp] = []

    @property
    def intensity(self) -> Dict[str, int]:
        return dict(Counter(op.op for op in self.ops))


class NodeRecord(BaseModel):
    label: Label
    kind: Literal['patricia', 'msd'] = 'patricia'
    parent_edge: Optional[Label] = None
    child0: Optional[Label] = None
    child1: Optional[Label] = None
    key: Optional[Label] = None
    key2_slots: List[Label] = []
    r_ref: Optional[Label] = None


class MessageRecord(BaseModel):
    kind: Literal['linearize', 'key2_probe', 'leaf_present']
    target: Label
    presented: Optional[Label] = None
    origin: Optional[Label] = None
    hops_left: int = 0


class PeerRecord(BaseModel):
    id: float
    timeout_cursor: Optional[Label] = None
    loose_keys: List[Label] = []
    nodes: List[NodeRecord] = []
    channel: List[MessageRecord] = []


class StateDump(BaseModel):
    format: Literal[STATE_FORMAT] = STATE_FORMAT
    seed: int
    round: int = 0
    keys: List[Label]
    peers: List[PeerRecord]


class MetricsDocument(BaseModel):
    seed: int
    num_keys: int
    d_bits: int
    rounds_to_legal: Optional[int]
    max_reads_per_timeout: int
    max_msgs_per_timeout: int
    total_nodes: int
    patricia_nodes: int
    msd_nodes: int
    sum_label_bits: int
    phase_counters: List[Dict[str, int]]
    converged: bool
