from core.parsers.schemas import (CorruptionOp, CorruptionScript, MetricsDocument, StateDump, SCRIPT_FORMAT,
                                  STATE_FORMAT, CORRUPTION_OPS, EDGE_FIELDS)
from core.parsers.keys_parser import KeysParser
from core.parsers.queries_parser import QueriesParser
from core.parsers.script_parser import ScriptParser
from core.parsers.dump_parser import DumpParser
