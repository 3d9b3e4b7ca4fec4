"""Exception hierarchy.

Breakdown errors (a recurrence or factorization that cannot continue) carry the
step index where they stopped so the CLI can report it.
"""


class CMVDarbouxError(Exception):
    pass


class ZeroArgument(CMVDarbouxError, ValueError):
    pass


class UnimodularParameter(CMVDarbouxError, ValueError):
    pass


class InvalidSchurParameter(CMVDarbouxError, ValueError):
    pass


class InsufficientParameters(CMVDarbouxError, ValueError):
    pass


class InvalidFactor(CMVDarbouxError, ValueError):
    pass


class DegenerateBasis(CMVDarbouxError, ValueError):
    pass


class NonSymmetricMeasure(CMVDarbouxError, ValueError):
    pass


class InfeasibleTarget(CMVDarbouxError, ValueError):
    pass


class Breakdown(CMVDarbouxError):
    """A step-indexed numerical breakdown."""

    def __init__(self, index, value=None, message=None):
        self.index = int(index)
        self.value = value
        if message is None:
            message = f"{type(self).__name__} at index {self.index}"
            if value is not None:
                message += f" (value {value!r})"
        super().__init__(message)

    def to_dict(self):
        out = {"error": type(self).__name__, "index": self.index}
        if self.value is not None:
            out["value"] = float(self.value)
        return out


class NotPositiveDefinite(Breakdown):
    pass


class NotQuasiDefinite(Breakdown):
    pass


class ReversedFactorizationBreakdown(Breakdown):
    pass


class BlockBreakdown(Breakdown):
    pass


class QuasiDefinitenessFailure(Breakdown):
    pass


class BlowUp(Breakdown):
    pass
