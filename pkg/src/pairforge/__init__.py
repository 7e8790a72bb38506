"""pairforge: exact construction and verification of free symmetric and
unitary unit pairs in (localizations of) nilpotent group algebras, their
specializations onto symbol and quaternion algebras, and the crossed-product
series machinery that transports such pairs to larger division rings."""

__version__ = "0.1.0"

from .fields import CycloField, FunctionField, RatFunc, cyclo_min_poly, cyclotomic_field

__all__ = [
    "CycloField",
    "FunctionField",
    "RatFunc",
    "cyclo_min_poly",
    "cyclotomic_field",
    "__version__",
]
