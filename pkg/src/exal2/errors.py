"""Exception types shared across the package.

Validation failures raise a subclass of CheckFailed carrying a human-readable
witness of the first broken law. Search routines that come up empty return
None or empty lists instead of raising; exceptions are reserved for malformed
input and violated axioms.
"""


class Exal2Error(Exception):
    pass


class UsageError(Exal2Error):
    """Bad arguments or malformed fixture data."""


class CheckFailed(Exal2Error):
    """An axiom or law does not hold; str(exc) names a witness."""


class AxiomViolation(CheckFailed):
    pass


class TargetMismatch(UsageError):
    """Objects over different rings/modules were combined."""


class ShapeMismatch(UsageError):
    pass


class NotSurjective(CheckFailed):
    pass


class NotAnIdeal(CheckFailed):
    pass


class CrossedViolation(CheckFailed):
    pass


class ExtensionViolation(CheckFailed):
    pass


class TwoExtViolation(CheckFailed):
    pass


class ButterflyViolation(CheckFailed):
    pass


class NotAChainMap(CheckFailed):
    pass


class NotComposable(UsageError):
    pass


class NotInvertible(CheckFailed):
    pass


class NotAnAutomorphism(CheckFailed):
    pass


class NotALift(CheckFailed):
    pass


class NoSection(CheckFailed):
    pass


class NoMatch(CheckFailed):
    pass


class DegreeOverflow(Exal2Error):
    """A free-algebra operation produced a term beyond the degree bound."""


class NotConfluent(CheckFailed):
    pass


class NotFiniteDimensional(CheckFailed):
    pass


class TooLarge(Exal2Error):
    """An enumeration or linear system exceeded the configured guard."""


class FixtureError(UsageError):
    pass
