"""Exception types raised across the package."""


class ShapeError(ValueError):
    """Array lengths, ensemble sizes or bin edges do not line up."""


class SpecError(ValueError):
    """A circuit spec is inconsistent or used with the wrong family."""


class NormalizationError(ValueError):
    """A probability vector is negative somewhere or does not sum to one."""


class DivergenceError(ValueError):
    """KL divergence is infinite: p has mass where q has none."""
