from core.engine.search_engine import SearchEngine, QueryResult
from core.engine.shpt_engine import ShptEngine
