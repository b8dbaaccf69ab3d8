"""Exception types shared across the package."""


class NonInvertibleDispersionError(ValueError):
    """The requested dispersion is not single-valued / monotone on the window,
    so it cannot be realized by a single waveguide band."""


class NumericalError(RuntimeError):
    """An internal numerical procedure (eigensolve, linear solve) failed."""
