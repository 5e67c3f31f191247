r"""
Exponential Runge-Kutta integrators
===================================

Fixed-step integrators for semilinear systems

.. math::

    \mathbf{y}' = \mathbf{L}\mathbf{y} + N(t, \mathbf{y})

with diagonal ``L``.  An s-stage exponential Runge-Kutta (ERK) step is

.. math::

    Y_i &= \varphi_0(c_i h \mathbf{L})\, \mathbf{y}_n
           + h \sum_{j<i} a_{ij}(h\mathbf{L})\, N(t_n + c_j h, Y_j), \\
    \mathbf{y}_{n+1} &= \varphi_0(h \mathbf{L})\, \mathbf{y}_n
           + h \sum_{j} b_{j}(h\mathbf{L})\, N(t_n + c_j h, Y_j),

where the tableau entries ``a_ij`` and ``b_j`` are linear combinations of
phi-functions evaluated at node-scaled arguments.  Four methods of orders
one to four are shipped (``erk_tableau``), stored symbolically as
:class:`PhiCombo` weights so a single tableau serves every step size and
every diagonal operator.  A classical RK4 stepper is included as the
reference-solution generator.

Coefficient vectors are evaluated eagerly when a stepper is constructed and
never mutated afterwards, so steppers may be shared freely across threads.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .phi import phi_diag


class StepOverflow(RuntimeError):
    """A stage or step produced non-finite values.

    Attributes identify where the overflow happened: ``stage`` within the
    step, and (when raised from a time loop) ``step_index`` and ``time``.
    """

    def __init__(self, message, stage=None, step_index=None, time=None):
        super().__init__(message)
        self.stage = stage
        self.step_index = step_index
        self.time = time


@dataclass(frozen=True)
class SemilinearProblem:
    """Discretized semilinear system ``y' = diag(ldiag) y + nonlinear(t, y)``.

    Parameters
    ----------
    ldiag : np.ndarray
        Complex eigenvalues of the diagonal linear operator.
    nonlinear : callable
        ``nonlinear(t, y) -> np.ndarray`` of length ``dim``; pure and
        reentrant.  Dealiased problems return exact zeros on masked modes.
    dim : int
        State dimension.
    dealias_mask : np.ndarray
        Boolean keep-mask over modes (all True when no dealiasing applies).
    wavenumbers : np.ndarray, optional
        Per-mode spatial wavenumber magnitude, required by derivative-power
        repartitioning and vanishing-viscosity operators.
    """

    ldiag: np.ndarray
    nonlinear: Callable[[float, np.ndarray], np.ndarray]
    dim: int
    dealias_mask: np.ndarray
    wavenumbers: Optional[np.ndarray] = None

    def __post_init__(self):
        ldiag = np.asarray(self.ldiag, dtype=np.complex128)
        object.__setattr__(self, "ldiag", ldiag)
        if ldiag.ndim != 1 or ldiag.shape[0] != self.dim:
            raise ValueError("ldiag must be a vector of length dim")
        if not np.all(np.isfinite(ldiag)):
            raise ValueError("ldiag must be finite")
        mask = np.asarray(self.dealias_mask, dtype=bool)
        object.__setattr__(self, "dealias_mask", mask)
        if mask.shape != (self.dim,):
            raise ValueError("dealias_mask must be a boolean vector of length dim")
        if self.wavenumbers is not None:
            wn = np.asarray(self.wavenumbers, dtype=np.float64)
            if wn.shape != (self.dim,):
                raise ValueError("wavenumbers must be a vector of length dim")
            object.__setattr__(self, "wavenumbers", wn)

    def rhs(self, t, y):
        """Full right-hand side ``ldiag * y + nonlinear(t, y)``."""
        return self.ldiag * y + self.nonlinear(t, y)


@dataclass(frozen=True)
class PhiCombo:
    """Linear combination ``sum coeff * phi_index(node_scale * z)``.

    ``terms`` is a sequence of ``(coeff, phi_index, node_scale)`` with
    rational ``coeff`` and ``node_scale`` in ``(0, 1]``.  Evaluated at a
    diagonal operator ``z = h * ldiag`` it yields one diagonal tableau
    coefficient.
    """

    terms: Tuple[Tuple[float, int, float], ...]

    def evaluate(self, z):
        z = np.asarray(z, dtype=np.complex128)
        acc = np.zeros(z.shape, dtype=np.complex128)
        for coeff, index, scale in self.terms:
            acc = acc + coeff * phi_diag(index, scale * z)
        return acc


def _combo(*terms):
    return PhiCombo(tuple((float(c), int(j), float(s)) for (c, j, s) in terms))


@dataclass(frozen=True)
class ExpTableau:
    """Butcher tableau of an explicit exponential Runge-Kutta method.

    ``a`` is strictly lower triangular (row ``i`` holds entries for stages
    ``j < i``; ``None`` marks a zero entry), ``b`` is the output row, and
    stage ``i`` propagates the state by ``phi_0(c_i h L)``.
    """

    name: str
    order: int
    c: Tuple[float, ...]
    a: Tuple[Tuple[Optional[PhiCombo], ...], ...]
    b: Tuple[PhiCombo, ...]

    def __post_init__(self):
        if self.c[0] != 0.0:
            raise ValueError("first node must be 0")
        if len(self.a) != len(self.c) or len(self.b) != len(self.c):
            raise ValueError("tableau rows must match stage count")
        for i, row in enumerate(self.a):
            if len(row) != i:
                raise ValueError("a must be strictly lower triangular")

    @property
    def stages(self):
        return len(self.c)


_HALF = 0.5

_ERK1 = ExpTableau(
    name="ERK1", order=1,
    c=(0.0,),
    a=((),),
    b=(_combo((1, 1, 1)),),
)

_ERK2 = ExpTableau(
    name="ERK2", order=2,
    c=(0.0, 1.0),
    a=((), (_combo((1, 1, 1)),)),
    b=(_combo((1, 1, 1), (-1, 2, 1)), _combo((1, 2, 1))),
)

_ERK3 = ExpTableau(
    name="ERK3", order=3,
    c=(0.0, _HALF, 1.0),
    a=(
        (),
        (_combo((_HALF, 1, _HALF)),),
        (_combo((-1, 1, 1)), _combo((2, 1, 1))),
    ),
    b=(
        _combo((1, 1, 1), (-3, 2, 1), (4, 3, 1)),
        _combo((4, 2, 1), (-8, 3, 1)),
        _combo((-1, 2, 1), (4, 3, 1)),
    ),
)

_ERK4 = ExpTableau(
    name="ERK4", order=4,
    c=(0.0, _HALF, _HALF, 1.0),
    a=(
        (),
        (_combo((_HALF, 1, _HALF)),),
        (_combo((_HALF, 1, _HALF), (-1, 2, _HALF)), _combo((1, 2, _HALF))),
        (_combo((1, 1, 1), (-2, 2, 1)), None, _combo((2, 2, 1))),
    ),
    b=(
        _combo((1, 1, 1), (-3, 2, 1), (4, 3, 1)),
        _combo((2, 2, 1), (-4, 3, 1)),
        _combo((2, 2, 1), (-4, 3, 1)),
        _combo((-1, 2, 1), (4, 3, 1)),
    ),
)

_TABLEAUS = {1: _ERK1, 2: _ERK2, 3: _ERK3, 4: _ERK4}


def erk_tableau(order):
    """Return the shipped exponential Runge-Kutta tableau of a given order.

    Parameters
    ----------
    order : int
        One of 1, 2, 3, 4.
    """
    if order not in _TABLEAUS:
        raise ValueError(f"unsupported ERK order {order!r}; choose 1, 2, 3 or 4")
    return _TABLEAUS[order]


class ERKStepper:
    """One-step ERK integrator bound to a problem and a step size.

    All phi-function coefficient vectors are evaluated once at construction
    (keyed internally by ``(phi index, node scale)`` so repeated entries are
    shared); stepping is then pure elementwise arithmetic plus nonlinear
    evaluations.  Instances are immutable and thread-safe.
    """

    def __init__(self, problem: SemilinearProblem, tableau: ExpTableau, h: float):
        if not (h > 0 and np.isfinite(h)):
            raise ValueError(f"step size must be positive and finite, got {h}")
        self.problem = problem
        self.tableau = tableau
        self.h = float(h)
        z = self.h * problem.ldiag

        cache = {}

        def phi_at(index, scale):
            key = (index, scale)
            if key not in cache:
                cache[key] = phi_diag(index, scale * z)
            return cache[key]

        def evaluate(combo):
            acc = np.zeros(problem.dim, dtype=np.complex128)
            for coeff, index, scale in combo.terms:
                acc = acc + coeff * phi_at(index, scale)
            return acc

        exp_cache = {}
        self._stage_exp = []
        for c in tableau.c:
            if c not in exp_cache:
                exp_cache[c] = np.exp(c * z)
            self._stage_exp.append(exp_cache[c])
        self._out_exp = np.exp(z)
        self._a = [[None if combo is None else evaluate(combo) for combo in row]
                   for row in tableau.a]
        self._b = [evaluate(combo) for combo in tableau.b]

    def step(self, t, y):
        """Advance the state one step from time ``t``."""
        tab = self.tableau
        h = self.h
        n_vals = []
        for i in range(tab.stages):
            yi = self._stage_exp[i] * y
            for j in range(i):
                coeff = self._a[i][j]
                if coeff is not None:
                    yi = yi + h * (coeff * n_vals[j])
            if not np.all(np.isfinite(yi)):
                raise StepOverflow(
                    f"{tab.name} stage {i + 1} overflowed at t={t!r}", stage=i + 1, time=t)
            n_vals.append(self.problem.nonlinear(t + tab.c[i] * h, yi))
        out = self._out_exp * y
        for j in range(tab.stages):
            out = out + h * (self._b[j] * n_vals[j])
        if not np.all(np.isfinite(out)):
            raise StepOverflow(
                f"{tab.name} output overflowed at t={t!r}", stage=tab.stages, time=t)
        return out


def erk_step(problem, tableau, t, y, h):
    """Single ERK step; convenience wrapper constructing a throwaway stepper."""
    return ERKStepper(problem, tableau, h).step(t, np.asarray(y, dtype=np.complex128))


class RK4Stepper:
    """Classical explicit fourth-order Runge-Kutta on a full right-hand side."""

    def __init__(self, rhs: Callable[[float, np.ndarray], np.ndarray], h: float):
        if not (h > 0 and np.isfinite(h)):
            raise ValueError(f"step size must be positive and finite, got {h}")
        self.rhs = rhs
        self.h = float(h)

    def step(self, t, y):
        h = self.h
        k1 = self.rhs(t, y)
        k2 = self.rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = self.rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = self.rhs(t + h, y + h * k3)
        out = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(out)):
            raise StepOverflow(f"RK4 step overflowed at t={t!r}", stage=4, time=t)
        return out


def rk4_step(rhs, t, y, h):
    """Single classical RK4 step on ``y' = rhs(t, y)``."""
    return RK4Stepper(rhs, h).step(t, np.asarray(y, dtype=np.complex128))


@dataclass
class IntegrationResult:
    """Final state plus any requested snapshots as ``(time, state)`` pairs."""

    final: np.ndarray
    snapshots: list = field(default_factory=list)


def integrate(stepper, y0, t0, tfinal, ns, snapshot_times: Optional[Sequence[float]] = None):
    """Run ``ns`` equal steps of a stepper from ``t0`` to ``tfinal``.

    The stepper's step size must equal ``(tfinal - t0) / ns``.  Snapshot
    times are rounded to the nearest step boundary; the returned snapshots
    carry the rounded times.  Stepping is deterministic: identical inputs
    produce bit-identical outputs.
    """
    if not tfinal > t0:
        raise ValueError("tfinal must exceed t0")
    if ns < 1:
        raise ValueError("ns must be positive")
    h = (tfinal - t0) / ns
    if abs(stepper.h - h) > 1e-12 * max(abs(h), 1.0):
        raise ValueError(
            f"stepper step size {stepper.h} does not match (tfinal - t0)/ns = {h}")

    wanted = {}
    if snapshot_times is not None:
        for ts in snapshot_times:
            idx = int(round((ts - t0) / h))
            idx = min(max(idx, 0), ns)
            wanted.setdefault(idx, t0 + idx * h)

    y = np.array(y0, dtype=np.complex128, copy=True)
    result = IntegrationResult(final=y)
    if 0 in wanted:
        result.snapshots.append((wanted[0], y.copy()))
    for i in range(ns):
        try:
            y = stepper.step(t0 + i * h, y)
        except StepOverflow as err:
            raise StepOverflow(
                f"overflow at step {i + 1} of {ns} (t = {t0 + i * h!r}): {err}",
                stage=err.stage, step_index=i + 1, time=err.time) from err
        if (i + 1) in wanted:
            result.snapshots.append((wanted[i + 1], y.copy()))
    result.final = y
    return result
