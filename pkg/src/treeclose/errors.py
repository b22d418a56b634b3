"""Exception types shared across the package.

Everything user-triggerable raises one of these; internal invariant
violations use plain AssertionError.
"""


class TreecloseError(Exception):
    """Base class for all package errors."""


class ValidationError(TreecloseError):
    """A structured object failed its consistency check."""


class CenterMismatch(TreecloseError):
    """Germ composition where the inner image center differs from the outer source center."""


class RadiusMismatch(TreecloseError):
    """Germ composition of unequal radii."""


class NotContained(TreecloseError):
    """Requested restriction ball is not contained in the germ's domain."""


class BadElement(TreecloseError):
    """An element fails the model's membership requirements."""


class BudgetExceeded(TreecloseError):
    """An enumeration ran past its explicit budget."""


class DegreeMismatch(TreecloseError):
    """Two models act on trees of different degree."""


class NotStabilized(TreecloseError):
    """A germ expected to stabilize a point set moves it."""


class TooLarge(TreecloseError):
    """A materialization guard tripped."""


class RadiusTooSmall(TreecloseError):
    """Germ radius is too small for the requested legality level."""


class InconsistentAssignment(TreecloseError):
    """An exponent assignment cannot be glued into a single germ."""


class AmplitudeMismatch(TreecloseError):
    """Translation amplitude does not match the displacement equation."""


class FactorOutsideGroup(TreecloseError):
    """A prescribed factor is not realizable inside the group's fixators."""


class NotRegular(TreecloseError):
    """Tree degree below 3 is rejected."""


class IncompatibleBase(TreecloseError):
    """Cover comparison with mismatched base data."""


class SingularBasis(TreecloseError):
    """Lattice basis with zero determinant."""


class NotIntegral(TreecloseError):
    """Matrix expected to have p-integral entries does not."""
