"""Exception hierarchy shared by all lemniprint modules."""


class LemniprintError(Exception):
    """Base class; the CLI maps these to exit status 1."""


class NonConvergence(LemniprintError):
    pass


# integral-equation solver failures use the same class
NoConvergence = NonConvergence


class NotProper(LemniprintError):
    def __init__(self, max_abs_value, message=None):
        self.max_abs_value = float(max_abs_value)
        super().__init__(
            message or f"not proper: critical value modulus {self.max_abs_value:.12g}"
        )


class MarginTooSmall(NotProper):
    def __init__(self, max_abs_value, min_margin):
        self.min_margin = float(min_margin)
        super().__init__(
            max_abs_value,
            f"critical value modulus {float(max_abs_value):.12g} is within "
            f"{min_margin:g} of the unit circle",
        )


class ResolutionTooCoarse(LemniprintError):
    pass


class GridTooCoarse(LemniprintError):
    pass


class CountMismatch(LemniprintError):
    pass


class PathJump(LemniprintError):
    pass


class NotInside(LemniprintError):
    pass


class SeedFailure(LemniprintError):
    def __init__(self, target, boundary_distance):
        self.target = complex(target)
        self.boundary_distance = float(boundary_distance)
        super().__init__(
            f"no seed converged for target {self.target:.6g} "
            f"(distance to boundary {self.boundary_distance:.3g})"
        )


class OffCurve(LemniprintError):
    pass


class PhaseMismatch(LemniprintError):
    pass


class NotPositive(LemniprintError):
    pass


class NoCandidateMatches(LemniprintError):
    def __init__(self, best_discrepancy, message=None):
        self.best_discrepancy = float(best_discrepancy)
        super().__init__(
            message
            or f"no candidate lemniscate matches (best C1 discrepancy {self.best_discrepancy:.3g})"
        )


class FingerprintMismatch(LemniprintError):
    pass
