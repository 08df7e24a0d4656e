"""Shared exception types."""


class HyperzetaError(Exception):
    pass


class NotHyperbolic(HyperzetaError):
    pass


class NonPositiveLength(HyperzetaError):
    pass


class SharedEndpoint(HyperzetaError):
    pass


class PoleAtNonPositiveInteger(HyperzetaError):
    pass


class PoleAtOne(HyperzetaError):
    pass


class DomainError(HyperzetaError):
    pass


class PoleAtHalf(HyperzetaError):
    pass


class AtZero(HyperzetaError):
    """Evaluation requested at a zero of the underlying zeta factor."""


class ConstructionFailed(HyperzetaError):
    pass


class Unsupported(HyperzetaError):
    pass


class IncompleteSpectrum(HyperzetaError):
    pass


class OutOfConvergenceRegion(HyperzetaError):
    pass


class ZeroOnBoundary(HyperzetaError):
    pass


class NonIntegerWinding(HyperzetaError):
    pass


class ConvergenceFailure(HyperzetaError):
    def __init__(self, msg, box=None):
        super().__init__(msg)
        self.box = box


class IllConditionedFit(HyperzetaError):
    pass


class EmptyRange(HyperzetaError):
    pass


class SchemaMismatch(HyperzetaError):
    pass


class ParseError(HyperzetaError):
    def __init__(self, msg, offset=None):
        super().__init__(msg)
        self.offset = offset


class ConfigError(HyperzetaError):
    pass
