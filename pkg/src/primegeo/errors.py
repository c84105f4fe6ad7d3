"""Exception types shared across the package."""


class PrimeGeoError(Exception):
    pass


class DegenerateInput(PrimeGeoError, ValueError):
    """Repeated roots, or root moduli that cannot be separated within the precision cap."""


class ReducibleInput(PrimeGeoError, ValueError):
    pass


class WallDegeneracy(PrimeGeoError, ValueError):
    """Two non-conjugate roots share a modulus (the point lies on a chamber wall)."""


class DimensionMismatch(PrimeGeoError, ValueError):
    pass


class CertificationFailed(PrimeGeoError):
    pass


class BoundTooLarge(PrimeGeoError):
    pass


class ConductorTooLarge(PrimeGeoError):
    pass


class PoleHit(PrimeGeoError, ZeroDivisionError):
    pass


class DivergenceWarning(UserWarning):
    """Raised (not merely emitted) when a series is requested outside Re(s_k) > 1."""


class NotFound(PrimeGeoError, LookupError):
    pass


class NetworkUnavailable(PrimeGeoError):
    pass


class SchemaMismatch(PrimeGeoError, ValueError):
    pass


class ConfigError(PrimeGeoError, ValueError):
    pass
