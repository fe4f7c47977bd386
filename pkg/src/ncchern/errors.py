"""Exception types shared across the package."""


class ModeError(TypeError):
    """Arithmetic between incompatible scalar modes."""


class NonAssociative(ValueError):
    def __init__(self, i, j, k):
        super().__init__(f"structure constants not associative on basis triple ({i}, {j}, {k})")
        self.triple = (i, j, k)


class BadUnit(ValueError):
    pass


class BadGrading(ValueError):
    pass


class NotSquare(ValueError):
    pass


class AlgebraMismatch(ValueError):
    pass


class NotHomogeneous(ValueError):
    pass


class NotDegreeOne(ValueError):
    pass


class TruncationOverflow(ValueError):
    pass


class DegreeZeroInput(ValueError):
    pass


class TargetMismatch(ValueError):
    pass


class PreconditionViolated(ValueError):
    pass


class NegativeTime(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class ParityMismatch(ValueError):
    pass


class NotIdempotent(ValueError):
    pass


class NotHomomorphism(ValueError):
    pass


class NotTopDegree(ValueError):
    pass


class NotIntegrable(ValueError):
    pass


class GridTooCoarse(ValueError):
    pass


class SchemaError(ValueError):
    pass


class ResolutionError(ValueError):
    pass
