class ShptError(Exception):
    """Base class of every error raised by the simulator."""


class LabelError(ShptError, ValueError):
    pass


class MsdIndexError(ShptError, ValueError):
    pass


class EmptyKeySetError(ShptError, ValueError):
    pass


class KeyPreservationError(ShptError):
    pass


class HashCollisionError(ShptError, AssertionError):
    pass


class DumpFormatError(ShptError):
    pass


class ScriptFormatError(ShptError):
    pass


class KeysFileError(ShptError):
    pass
