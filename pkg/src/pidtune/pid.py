"""Digital position-form PID with saturation, conditional anti-windup and
derivative-on-measurement.

Per sample: ``u = sat(kp * (e + I/tau_i + tau_d * (y_prev - y)/dt))`` where
``I`` is the running error sum (times dt) including the current sample. When
the unsaturated output leaves the actuator bounds the integral sum is left
untouched for that sample (conditional integration), and the derivative acts
on the measurement so setpoint steps cause no kick.
"""

import math
from dataclasses import dataclass

from .validation import check_finite


@dataclass(frozen=True)
class PidParams:
    """The tunable triple: proportional gain, integral time, derivative time."""

    kp: float
    tau_i: float
    tau_d: float

    def __post_init__(self):
        check_finite("kp", self.kp)
        check_finite("tau_i", self.tau_i)
        check_finite("tau_d", self.tau_d)
        if self.kp < 0 or self.tau_i < 0 or self.tau_d < 0:
            raise ValueError(f"PID parameters must be non-negative, got {self}")

    def as_tuple(self):
        return (self.kp, self.tau_i, self.tau_d)


@dataclass(frozen=True)
class ActuatorBounds:
    u_min: float
    u_max: float

    def __post_init__(self):
        check_finite("u_min", self.u_min)
        check_finite("u_max", self.u_max)
        if not self.u_min < self.u_max:
            raise ValueError(f"u_min must be below u_max, got [{self.u_min}, {self.u_max}]")

    def clamp(self, u):
        return min(max(u, self.u_min), self.u_max)


@dataclass(frozen=True)
class PidState:
    """Controller memory between samples."""

    integral_sum: float = 0.0
    prev_y: float = 0.0
    saturated_last_step: bool = False


def reset(y: float = 0.0) -> PidState:
    """Fresh controller state anchored at the current measurement.

    Seeding prev_y with the measurement keeps the first derivative term zero
    (bumpless start).
    """
    return PidState(0.0, check_finite("y", y), False)


def compute_control(
    params: PidParams,
    state: PidState,
    r_sp: float,
    y: float,
    dt: float,
    bounds: ActuatorBounds,
):
    """One controller sample; returns ``(u, new_state)``.

    The integral candidate includes the current error. It is committed only if
    the raw output stayed inside the actuator bounds; otherwise the stored sum
    carries over unchanged while the saturated output is emitted.
    """
    r_sp = check_finite("r_sp", r_sp)
    y = check_finite("y", y)
    if dt <= 0 or not math.isfinite(dt):
        raise ValueError(f"dt must be positive, got {dt!r}")
    if params.tau_i <= 0:
        raise ValueError("tau_i must be positive; the integral term divides by it")

    e = r_sp - y
    candidate = state.integral_sum + e * dt
    deriv = (state.prev_y - y) / dt
    raw = params.kp * (e + candidate / params.tau_i + params.tau_d * deriv)
    u = bounds.clamp(raw)
    saturated = raw != u
    integral = state.integral_sum if saturated else candidate
    return u, PidState(integral, y, saturated)
