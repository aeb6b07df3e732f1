"""Linear second-order plants with dead time, discretized exactly under zero-order hold.

The continuous model is ``G(s) = gain / (a2*s^2 + a1*s + a0) * exp(-dead_time*s)``.
Discretization uses the matrix exponential of the augmented ``[[A, B], [0, 0]]``
block, so the simulated step response agrees with the continuous response at
every sampling instant; dead time becomes an integer-length input delay line.
"""

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import expm

from .validation import check_finite, check_positive


@dataclass(frozen=True)
class SopdtModel:
    """Second-order-plus-dead-time process ``gain / (a2 s^2 + a1 s + a0) e^(-D s)``."""

    gain: float
    a2: float
    a1: float
    a0: float
    dead_time: float = 0.0
    sample_time: float = 1.0

    def __post_init__(self):
        check_finite("gain", self.gain)
        check_positive("a2", self.a2)
        check_finite("a1", self.a1)
        check_positive("a0", self.a0)
        check_positive("dead_time", self.dead_time, allow_zero=True)
        check_positive("sample_time", self.sample_time)

    @property
    def delay_steps(self):
        """Dead time in whole samples, rounded to nearest."""
        ratio = self.dead_time / self.sample_time
        steps = round(ratio)
        if abs(ratio - steps) > 1e-9:
            warnings.warn(
                f"dead_time {self.dead_time} is not an integer multiple of "
                f"sample_time {self.sample_time}; rounding to {steps} steps",
                stacklevel=2,
            )
        return int(steps)

    def time_constant(self):
        """Time constant tau for a repeated-pole denominator (tau*s + 1)^2.

        Requires a1^2 == 4*a2*a0 (up to round-off); other pole layouts have no
        single tau and raise.
        """
        if not math.isclose(self.a1 * self.a1, 4.0 * self.a2 * self.a0, rel_tol=1e-9):
            raise ValueError("denominator does not have a repeated real pole")
        return math.sqrt(self.a2 / self.a0)


def default_plant_model():
    """The 0.3 / (25 s^2 + 10 s + 1) e^(-10 s) process used throughout the experiments."""
    return SopdtModel(gain=0.3, a2=25.0, a1=10.0, a0=1.0, dead_time=10.0, sample_time=1.0)


class DiscretePlant:
    """Steppable state-space plant: exact ZOH discretization plus an input delay line.

    State advances as ``x <- A x + B u_delayed`` once per sample; the output is
    ``C x``. A single instance is mutated sequentially; use :meth:`copy` for
    parallel sweeps.
    """

    def __init__(self, A, B, C, delay_steps, model=None):
        self.A = np.array(A, dtype=float).reshape(2, 2)
        self.B = np.array(B, dtype=float).reshape(2)
        self.C = np.array(C, dtype=float).reshape(2)
        if delay_steps < 0:
            raise ValueError("delay_steps must be non-negative")
        self.delay_steps = int(delay_steps)
        self.model = model
        # hot-loop scalars; step() avoids numpy indexing on purpose
        self._a11, self._a12 = float(self.A[0, 0]), float(self.A[0, 1])
        self._a21, self._a22 = float(self.A[1, 0]), float(self.A[1, 1])
        self._b1, self._b2 = float(self.B[0]), float(self.B[1])
        self._c1, self._c2 = float(self.C[0]), float(self.C[1])
        self.reset()

    def reset(self):
        """Return the plant to rest: zero state and an all-zero input history."""
        self._x1 = 0.0
        self._x2 = 0.0
        self._buf = [0.0] * self.delay_steps
        self._head = 0
        return self

    def copy(self):
        plant = DiscretePlant(self.A, self.B, self.C, self.delay_steps, model=self.model)
        plant._x1, plant._x2 = self._x1, self._x2
        plant._buf = list(self._buf)
        plant._head = self._head
        return plant

    @property
    def state(self):
        return np.array([self._x1, self._x2])

    @property
    def input_history(self):
        """Pending delayed inputs, oldest first."""
        n = self.delay_steps
        return np.array([self._buf[(self._head + i) % n] for i in range(n)]) if n else np.empty(0)

    @property
    def output(self):
        return self._c1 * self._x1 + self._c2 * self._x2

    @property
    def gain(self):
        return self.model.gain if self.model is not None else math.nan

    def step(self, u):
        """Advance one sample with input ``u``; returns the output at the new sample."""
        u = float(u)
        if not math.isfinite(u):
            raise ValueError(f"control input must be finite, got {u!r}")
        if self.delay_steps:
            v = self._buf[self._head]
            self._buf[self._head] = u
            self._head = (self._head + 1) % self.delay_steps
        else:
            v = u
        x1, x2 = self._x1, self._x2
        self._x1 = self._a11 * x1 + self._a12 * x2 + self._b1 * v
        self._x2 = self._a21 * x1 + self._a22 * x2 + self._b2 * v
        return self._c1 * self._x1 + self._c2 * self._x2

    def set_gain(self, new_gain):
        """Rescale the output gain in place; dynamics are untouched.

        Intended to be applied between episodes only (slow process drift).
        """
        new_gain = check_finite("new_gain", new_gain)
        if self.model is None:
            raise ValueError("plant was built without a model; gain is undefined")
        scale = new_gain / self.model.a2
        self.C = np.array([scale, 0.0])
        self._c1, self._c2 = scale, 0.0
        self.model = replace(self.model, gain=new_gain)
        return self


def discretize_zoh(model: SopdtModel) -> DiscretePlant:
    """Build the exact zero-order-hold discretization of ``model``.

    Uses the controllable canonical form
    ``x' = [[0, 1], [-a0/a2, -a1/a2]] x + [0, 1]' u``, ``y = [gain/a2, 0] x``
    and ``expm`` of the augmented block for (A, B).
    """
    a2, a1, a0 = model.a2, model.a1, model.a0
    Ac = np.array([[0.0, 1.0], [-a0 / a2, -a1 / a2]])
    Bc = np.array([[0.0], [1.0]])
    C = np.array([model.gain / a2, 0.0])
    aug = np.zeros((3, 3))
    aug[:2, :2] = Ac
    aug[:2, 2:] = Bc
    E = expm(aug * model.sample_time)
    A = E[:2, :2]
    B = E[:2, 2]
    return DiscretePlant(A, B, C, model.delay_steps, model=model)


def analytic_step_response(model: SopdtModel, times, amplitude=1.0):
    """Closed-form delayed step response for a repeated-pole model.

    For ``gain/(tau s + 1)^2 e^(-D s)`` driven by a step of the given amplitude:
    ``y(t) = gain*amp*(1 - exp(-(t-D)/tau) * (1 + (t-D)/tau))`` for t >= D, else 0.
    Serves as the independent oracle for the ZOH discretization.
    """
    tau = model.time_constant()
    t = np.asarray(times, dtype=float) - model.dead_time
    s = t / tau
    y = model.gain / model.a0 * amplitude * (1.0 - np.exp(-s) * (1.0 + s))
    return np.where(t >= 0.0, y, 0.0)
