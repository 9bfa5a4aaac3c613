from core.api.common import accepts_json, flag_arg
from core.api.messages import Message, MessageKind
from core.api.dht_api import AccessCounters, InsertVerdict, Peer, SystemState
