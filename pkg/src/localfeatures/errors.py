"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class LocalFeaturesError(Exception):
    """Base class for all errors raised by this package."""


# ---------------------------------------------------------------------------
# Feature model construction and use
# ---------------------------------------------------------------------------

class FeatureModelError(LocalFeaturesError):
    """A feature model declaration or query is ill-formed."""


class InvalidFeatureName(FeatureModelError):
    pass


class DuplicateFeatureName(FeatureModelError):
    pass


class DanglingConstraintEndpoint(FeatureModelError):
    pass


class SelfConstraint(FeatureModelError):
    pass


class GroupTooSmall(FeatureModelError):
    pass


class UnknownFeature(FeatureModelError):
    """A selection names a feature the model does not contain."""


class ModelTooLarge(FeatureModelError):
    """Exhaustive enumeration refused beyond the feature-count cap."""


# ---------------------------------------------------------------------------
# Multimodel
# ---------------------------------------------------------------------------

class MultimodelError(LocalFeaturesError):
    pass


class TwinMismatch(MultimodelError):
    """A local feature model and its global copy are not structurally identical."""


class UnknownLocalModel(MultimodelError):
    pass


class UnknownMetaclass(MultimodelError):
    pass


class UnknownElement(MultimodelError):
    pass


class KindMismatch(MultimodelError):
    """No applied-to declaration covers this element kind and local model."""


class InvalidSelection(MultimodelError):
    """A binding's closed selection does not validate against its local model."""


class DuplicateBinding(MultimodelError):
    """The (element, local model) pair is already bound; re-binding requires removal."""


class NotApplicable(MultimodelError):
    """The element is not covered by any applied-to declaration for the model."""


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class ParseError(LocalFeaturesError):
    """A syntax error with a source position and the token kinds expected there."""

    def __init__(self, message: str, line: int, column: int,
                 expected: tuple[str, ...] = ()):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(expected)

    def __str__(self) -> str:
        pos = f"{self.line}:{self.column}"
        if self.expected:
            return f"{pos}: {self.message} (expected {', '.join(self.expected)})"
        return f"{pos}: {self.message}"


class DuplicateFlag(ParseError):
    pass


class MultipleProducts(ParseError):
    pass


class MissingProduct(ParseError):
    def __init__(self, message: str = "specification declares no product"):
        super().__init__(message, 1, 1)


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

class UnresolvedErrors(LocalFeaturesError):
    """Emission refused while error-severity diagnostics are present."""
