from pathlib import Path
from typing import List, Union

from core.errors import KeysFileError, LabelError
from core.trie.labels import BitLabel, DEFAULT_LMAX, validate_label

COMMENT_CHAR = '#'


class KeysParser:
    @staticmethod
    def parse(text: str, lmax: int = DEFAULT_LMAX) -> List[BitLabel]:
        """
Read one binary key per line. Blank lines and lines starting with '#' are skipped.
        :param text: file content
        :param lmax: maximum key length
        :return: keys in file order
        """
        keys = []
        seen = set()
        for number, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith(COMMENT_CHAR):
                continue
            try:
                key = validate_label(line, lmax)
            except LabelError as ex:
                raise KeysFileError('line %d: %s' % (number, ex)) from ex
            if key in seen:
                raise KeysFileError('line %d: duplicate key %r' % (number, key))
            seen.add(key)
            keys.append(key)
        if not keys:
            raise KeysFileError('no keys found')
        return keys

    @staticmethod
    def load(path: Union[str, Path], lmax: int = DEFAULT_LMAX) -> List[BitLabel]:
        try:
            text = Path(path).read_text(encoding='ascii')
        except (OSError, UnicodeDecodeError) as ex:
            raise KeysFileError('cannot read %s: %s' % (path, ex)) from ex
        return KeysParser.parse(text, lmax)

    @staticmethod
    def dump(keys: List[BitLabel]) -> str:
        return ''.join(k + '\n' for k in keys)
