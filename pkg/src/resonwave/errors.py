"""Exception types shared across the library."""


class ResonwaveError(Exception):
    """Base class for library-specific failures."""


class ConfigError(ResonwaveError):
    """Invalid problem configuration; message carries the offending field path."""

    def __init__(self, field_path, message):
        self.field_path = field_path
        self.message = message
        super().__init__(f"{field_path}: {message}")


class PoleProximity(ResonwaveError):
    """Kernel evaluation requested too close to a pole of the resolvent."""

    def __init__(self, lam, detail=""):
        self.lam = lam
        super().__init__(f"lambda={lam} is too close to a resolvent pole {detail}".rstrip())


class QuadratureError(ResonwaveError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class TruncationNotConverged(ResonwaveError):
    """Contour truncation doubling did not converge; carries the last increment."""

    def __init__(self, increment, s_max):
        self.increment = increment
        self.s_max = s_max
        super().__init__(
            f"contour truncation not converged: last increment {increment:.3e} at S_max={s_max:g}"
        )


class BoundaryZero(ResonwaveError):
    """A zero of the Jost function sits on (or too close to) a scan-box boundary."""


class NonConvergence(ResonwaveError):
    """Root refinement failed inside the given box."""

    def __init__(self, box, detail=""):
        self.box = box
        super().__init__(f"root refinement did not converge in box {box} {detail}".rstrip())


class OnCurve(ResonwaveError):
    """A zero lies on the classification curve Re lambda = g0 within margin."""


class NonSimpleDerivative(ResonwaveError):
    """W'(lambda0) is numerically zero although multiplicity was reported as 1."""
