from pathlib import Path
from typing import List, Union

from core.errors import KeysFileError, LabelError
from core.parsers.keys_parser import COMMENT_CHAR
from core.trie.labels import BitLabel, DEFAULT_LMAX, EPSILON, validate_label

# a line holding only a pair of quotes is the empty query
EMPTY_QUERY = ("''", '""')


class QueriesParser:
    @staticmethod
    def parse(text: str, lmax: int = DEFAULT_LMAX) -> List[BitLabel]:
        """
Read one binary query per line. Repeated queries are kept; '' stands for the empty label.
        :param text: file content
        :param lmax: maximum query length
        :return: queries in file order
        """
        queries = []
        for number, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith(COMMENT_CHAR):
                continue
            if line in EMPTY_QUERY:
                queries.append(EPSILON)
                continue
            try:
                queries.append(validate_label(line, lmax))
            except LabelError as ex:
                raise KeysFileError('line %d: %s' % (number, ex)) from ex
        if not queries:
            raise KeysFileError('no queries found')
        return queries

    @staticmethod
    def load(path: Union[str, Path], lmax: int = DEFAULT_LMAX) -> List[BitLabel]:
        try:
            text = Path(path).read_text(encoding='ascii')
        except (OSError, UnicodeDecodeError) as ex:
            raise KeysFileError('cannot read %s: %s' % (path, ex)) from ex
        return QueriesParser.parse(text, lmax)
