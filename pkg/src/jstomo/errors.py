"""Exception types shared across modules."""


class JstomoError(Exception):
    """Base class for library errors."""


class EmptySectorError(JstomoError, ValueError):
    """The requested excitation sector carries (numerically) no weight."""


class CutoffError(JstomoError, ValueError):
    """A Fock cutoff or series truncation is too small for the requested accuracy."""


class DomainError(JstomoError, ValueError):
    """A parameter lies outside the domain where the formulas converge."""


class DegenerateFrameError(DomainError):
    """A symplectic frame (mu, nu) = (0, 0) was requested."""


class QuadratureError(JstomoError, ValueError):
    """A quadrature rule is not exact for the integrand it was given."""


class ConsistencyError(JstomoError, ArithmeticError):
    """A numerical invariant failed beyond its tolerance."""
