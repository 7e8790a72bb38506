"""Exception types shared across the toolkit."""


class PairforgeError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(PairforgeError):
    """Invalid configuration, input file, or parameter combination."""


class FieldError(PairforgeError):
    """Invalid field parameters (characteristic, root-of-unity order)."""


class EvaluationError(PairforgeError):
    """A substitution left the localization (denominator vanished)."""


class NotInvertibleError(PairforgeError):
    """An algebra element has no inverse."""


class SpecializationKernelError(PairforgeError):
    """An inverse node's child specializes into the kernel."""


class AbelianGroupError(PairforgeError):
    """The extraction algorithm was handed an abelian group."""


class InvalidInvolutionError(PairforgeError):
    """Involution data does not define an order-2 anti-automorphism."""


class UnsupportedClassError(PairforgeError):
    """Nilpotency class above the supported bound."""


class InternalConsistencyError(PairforgeError):
    """A condition guaranteed by theory failed; indicates a bug or bad input data."""


class UnsupportedPairError(ConfigError):
    """Requested pair construction is intentionally not shipped."""


class FrontierError(PairforgeError):
    """Requested series frontier cannot be reached."""


class CriterionFormatError(ConfigError):
    """Malformed valuation-criterion descriptor."""
