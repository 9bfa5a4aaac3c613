import re
from typing import Iterator, Optional

from core.errors import LabelError, MsdIndexError

# Labels are plain strings over {'0', '1'}; the empty string is the root label
BitLabel = str

EPSILON: BitLabel = ''
DEFAULT_LMAX = 64
RE_LABEL = re.compile(r'^[01]*$')


def validate_label(bits: str, lmax: int = DEFAULT_LMAX) -> BitLabel:
    """
Check that a string is a bit label no longer than lmax
    :param bits: candidate label
    :param lmax: maximum label length
    :return: the label itself
    """
    if not isinstance(bits, str) or RE_LABEL.match(bits) is None:
        raise LabelError('not a bit label: %r' % (bits,))
    if len(bits) > lmax:
        raise LabelError('label of %d bits exceeds the %d bit bound' % (len(bits), lmax))
    return bits


def is_prefix(p: BitLabel, x: BitLabel) -> bool:
    return x.startswith(p)


def is_proper_prefix(p: BitLabel, x: BitLabel) -> bool:
    return len(p) < len(x) and x.startswith(p)


def lcp(a: BitLabel, b: BitLabel) -> BitLabel:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return a[:i]


def msd_index(a: int, b: int) -> int:
    """
Position of the most significant bit at which two naturals differ
    :param a: first natural
    :param b: second natural, different from a
    :return: bit position, 0 being the least significant bit
    """
    if a == b:
        raise MsdIndexError('no differing bit between %d and %d' % (a, b))
    return (a ^ b).bit_length() - 1


def msd_length(shorter_length: int, longer_length: int) -> int:
    # sum of the bits of the longer length from the msd position upwards
    j = msd_index(shorter_length, longer_length)
    return sum(((longer_length >> i) & 1) << i for i in range(j, longer_length.bit_length() + 1))


def msd_label(shorter: BitLabel, longer: BitLabel) -> Optional[BitLabel]:
    """
Label of the Msd node between two Patricia labels
    :param shorter: upper Patricia label
    :param longer: lower Patricia label, shorter must be a proper prefix of it
    :return: prefix of longer, or None when no distinct label fits in between
    """
    if not is_proper_prefix(shorter, longer):
        raise LabelError('%r is not a proper prefix of %r' % (shorter, longer))
    length = msd_length(len(shorter), len(longer))
    if length == len(shorter) or length == len(longer):
        return None
    return longer[:length]


def msd_missing(parent_label: BitLabel, child_label: BitLabel) -> bool:
    return msd_label(parent_label, child_label) is not None


def edge_between(parent_label: BitLabel, child_label: BitLabel) -> BitLabel:
    if not is_proper_prefix(parent_label, child_label):
        raise LabelError('%r is not a proper prefix of %r' % (parent_label, child_label))
    return child_label[len(parent_label):]


class LengthLadder:
    """
MSB-first sequence over prefix lengths up to a limit. Iterating yields the next
length to try; accepted lengths are reported back through accept().
    """

    def __init__(self, limit: int) -> None:
        super().__init__()
        self.limit = limit
        self.length = 0

    def __iter__(self) -> Iterator[int]:
        for bit in reversed(range(max(self.limit, 0).bit_length())):
            candidate = self.length | (1 << bit)
            if candidate <= self.limit:
                yield candidate

    def accept(self, length: int):
        self.length = length


def first_step_between(shorter_length: int, longer_length: int, limit: int) -> Optional[int]:
    # first length landing in (shorter, longer] for a search settled at the shorter length
    ladder = LengthLadder(limit)
    for candidate in ladder:
        if shorter_length < candidate <= longer_length:
            return candidate
        if candidate <= shorter_length:
            ladder.accept(candidate)
    return None
