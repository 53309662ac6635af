"""Exception hierarchy for hlab."""


class HlabError(Exception):
    """Base class for every error raised by hlab."""


class InvalidInput(HlabError, ValueError):
    """Malformed input data (tables, grids, words, files)."""


class NonSymmetric(InvalidInput):
    pass


class NegativeEntry(InvalidInput):
    pass


class ZeroOffDiagonal(InvalidInput):
    pass


class EmptySubset(InvalidInput):
    pass


class OverlappingSets(InvalidInput):
    pass


class InvalidAlpha(InvalidInput):
    pass


class InvalidDelta(InvalidInput):
    pass


class InvalidExponent(InvalidInput):
    pass


class NegativeWeight(InvalidInput):
    pass


class BadSymbol(InvalidInput):
    pass


class NotACovering(InvalidInput):
    pass


class DegenerateGrid(InvalidInput):
    pass


class TooFewPoints(InvalidInput):
    pass


class DegenerateProfile(InvalidInput):
    pass


class BadPartition(InvalidInput):
    pass


class NotASample(InvalidInput):
    pass


class DomainMismatch(InvalidInput):
    pass


class InadmissibleAtom(InvalidInput):
    """An atom is too large to fit in any block of diameter < delta."""


class NotInjective(HlabError):
    """A map sends two distinct points to the same image."""


class LipschitzViolation(HlabError):
    """A block's image interval is longer than k times its diameter."""


class LimitExceeded(HlabError):
    """A computation would exceed a configured size limit."""


class TooManyAtoms(LimitExceeded):
    pass


class TooManySegments(TooManyAtoms):
    pass


class TooLarge(LimitExceeded):
    pass
