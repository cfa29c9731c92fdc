"""Domain errors.

Every error below is part of the library contract: the class name is the
stable error code that the CLI prints on stderr before exiting with status 1.
"""


class FqLabError(Exception):
    """Base class for all fqlab domain errors."""


# field construction / arithmetic
class NotPrime(FqLabError):
    pass


class DegreeZero(FqLabError):
    pass


class FieldTooLarge(FqLabError):
    pass


class NoIrreducibleFound(FqLabError):
    """Internal: the modulus search failed, which indicates a construction bug."""


class DivisionByZero(FqLabError, ZeroDivisionError):
    pass


class NotProperSubfield(FqLabError):
    pass


# set algebra
class MixedFields(FqLabError):
    pass


class ZeroDivisorInRatio(FqLabError):
    pass


class ZeroShift(FqLabError):
    pass


class SetTooSmall(FqLabError):
    pass


class ZeroInDenominatorSet(FqLabError):
    pass


class EmptySet(FqLabError):
    pass


class EmptyAfterZeroStrip(FqLabError):
    pass


# decompositions
class SumBelowK(FqLabError):
    pass


class EmptySpectrum(FqLabError):
    pass


class DegenerateSlice(FqLabError):
    pass


class TraceDegenerate(FqLabError):
    pass


class ZeroInSet(FqLabError):
    pass


# lemma oracles
class NotSubsets(FqLabError):
    pass


class NotApplicable(FqLabError):
    pass


class EpsilonOutOfRange(FqLabError):
    pass


# survey
class SizeInfeasible(FqLabError):
    pass


class NoProperSubfield(FqLabError):
    pass


class BudgetExceeded(FqLabError):
    pass


class IoFailure(FqLabError):
    pass
