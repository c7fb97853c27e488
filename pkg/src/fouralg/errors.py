"""Exception hierarchy used across the package."""


class FourAlgError(Exception):
    """Base class for all package errors."""


class FieldMismatch(FourAlgError, TypeError):
    pass


class ShapeError(FourAlgError, ValueError):
    pass


class UnsupportedOverRationals(FourAlgError, ValueError):
    """Raised by operations that need a finite field."""


class UnsupportedDegree(FourAlgError, ValueError):
    pass


class SizeGuard(FourAlgError, RuntimeError):
    """An enumeration would exceed its candidate budget.

    ``cost`` is the estimated number of candidate evaluations and ``budget``
    the allowed maximum; pass ``force=True`` to the operation to proceed anyway.
    """

    def __init__(self, what, cost, budget):
        self.what = what
        self.cost = cost
        self.budget = budget
        super().__init__(f"{what}: {cost:.3g} candidates exceeds budget {budget:.3g} (use force=True)")


class NotSymmetric(FourAlgError, ValueError):
    pass


class InvalidCrossedSystem(FourAlgError, ValueError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"crossed data fails {', '.join(report.failed())}")


class NotAbelianBase(FourAlgError, ValueError):
    pass


class NotSurjective(FourAlgError, ValueError):
    pass


class NotSection(FourAlgError, ValueError):
    pass


class NotMorphism(FourAlgError, ValueError):
    pass


class InvalidPair(FourAlgError, ValueError):
    pass


class DifferentMultV(FourAlgError, ValueError):
    """The two crossed systems carry different multiplications on V.

    No V-stabilizing algebra map can exist between the crossed products.
    """


class NotAModule(FourAlgError, ValueError):
    pass


class InvalidLambda(FourAlgError, ValueError):
    pass


class ParseError(FourAlgError, ValueError):
    def __init__(self, msg, location=None):
        self.location = location
        super().__init__(f"{location}: {msg}" if location else msg)
