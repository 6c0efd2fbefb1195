"""First-order exponential smoothing for scalar distance measurements."""

import math

from .errors import ConfigError, MeasurementError


class EmaFilter:
    """Exponential moving average: y = alpha * x + (1 - alpha) * y_prev.

    alpha in (0, 1]; alpha = 1 is a passthrough. The first sample seeds the
    state directly, so the output never starts from a biased zero. `last` is
    None until a sample has been accepted and after reset().
    """

    def __init__(self, alpha: float):
        if not (0.0 < alpha <= 1.0):
            raise ConfigError(f"alpha must be in (0, 1], got {alpha}")
        self.alpha = float(alpha)
        self.last: float | None = None

    def update(self, x: float) -> float:
        """Feed one measurement, return the smoothed value.

        Raises MeasurementError for non-finite or negative input; the caller
        is expected to drop such samples without touching the filter.
        """
        if not math.isfinite(x) or x < 0.0:
            raise MeasurementError(f"distance sample must be finite and >= 0, got {x}")
        if self.last is None:
            self.last = float(x)
        else:
            self.last = self.alpha * x + (1.0 - self.alpha) * self.last
        return self.last

    def reset(self) -> None:
        """Forget the smoothed value; alpha is kept. Used when a new user is locked."""
        self.last = None
