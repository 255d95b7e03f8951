"""Exception hierarchy shared by every module of the package."""


class EvidenceError(ValueError):
    """Base class for all errors raised by evidencelab."""


class FormatError(EvidenceError):
    """Malformed JSON or CSV input."""


class FrameMismatch(EvidenceError):
    pass


class CapacityError(EvidenceError):
    """A frame or enumeration is larger than the supported bound."""


class CapacityExceeded(CapacityError):
    pass


# mass validation
class EmptyFocal(EvidenceError):
    pass


class NotNormalized(EvidenceError):
    pass


class NegativeMass(EvidenceError):
    pass


class NegativeBelief(EvidenceError):
    pass


# evidence operations
class TotalConflict(EvidenceError):
    """Every pair of focal sets has an empty intersection."""

    def __init__(self, conflict, message=None):
        self.conflict = conflict
        super().__init__(message or f"total conflict (conflict mass {conflict})")


class UnsupportedMode(EvidenceError):
    pass


class EmptyLabel(EvidenceError):
    pass


class NotAProductExtension(EvidenceError):
    pass


class NotABeliefFunction(EvidenceError):
    pass


# tabular data
class UnknownAttribute(EvidenceError):
    pass


class EmptyDataset(EvidenceError):
    pass


class NoSurvivors(EvidenceError):
    pass


class RowMismatch(EvidenceError):
    pass


# populations
class UnknownObject(EvidenceError):
    pass


class DiscardedObject(EvidenceError):
    pass


class EmptyPopulation(EvidenceError):
    """The population under a labeling has zero total weight.

    Under the subpopulation convention every probability over an empty
    population equals 1, which is not a mass function, so it is reported
    as this condition instead.
    """


class InadmissibleLabel(EvidenceError):
    pass


class InvalidProcess(EvidenceError):
    pass


class InvalidParams(EvidenceError):
    pass
