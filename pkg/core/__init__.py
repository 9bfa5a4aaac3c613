import core.trie
import core.api
import core.parsers
