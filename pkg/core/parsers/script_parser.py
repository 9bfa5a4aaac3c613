from pathlib import Path
from typing import Union

from pydantic import ValidationError

from core.errors import ScriptFormatError
from core.parsers.schemas import CorruptionScript


class ScriptParser:
    @staticmethod
    def parse(text: str) -> CorruptionScript:
        try:
            return CorruptionScript.model_validate_json(text)
        except ValidationError as ex:
            raise ScriptFormatError('invalid corruption script: %s' % ex) from ex

    @staticmethod
    def load(path: Union[str, Path]) -> CorruptionScript:
        try:
            text = Path(path).read_text(encoding='utf-8')
        except OSError as ex:
            raise ScriptFormatError('cannot read %s: %s' % (path, ex)) from ex
        return ScriptParser.parse(text)

    @staticmethod
    def save(script: CorruptionScript, path: Union[str, Path]):
        Path(path).write_text(script.model_dump_json(indent=2), encoding='utf-8')
