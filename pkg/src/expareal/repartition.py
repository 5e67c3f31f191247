r"""
Stabilized operator splittings for non-diffusive problems
=========================================================

Exponential integrators treat ``L`` exactly, which pins their amplification
factor on the stability border when the spectrum of ``L`` is purely
imaginary.  Repartitioning rewrites the same ODE as

.. math::

    \mathbf{y}' = \underbrace{(\mathbf{L} + \epsilon \mathbf{D})}_{\hat{L}}
                  \mathbf{y}
                + \underbrace{(N(t, \mathbf{y}) - \epsilon \mathbf{D}\mathbf{y})}_{\hat{N}}

with a diffusive diagonal ``D`` (entrywise ``<= 0``) and strength
``epsilon = tan(rho) >= 0``, moving damping into the exponentiated part
while leaving the right-hand side mathematically unchanged.  For the
spectral-absolute-value choice ``D = -|ldiag|`` every nonzero eigenvalue of
``L_hat`` is rotated ``rho`` radians off the imaginary axis into the left
half-plane.

Vanishing high-order viscosity is the traditional comparator: it adds
``h^(q+1) * gamma * D`` to the linear operator without compensating in the
nonlinearity, so it perturbs the problem being solved.
"""

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .integrators import SemilinearProblem

_KINDS = ("none", "spectral-abs", "power", "hyperviscosity")
_POWERS = (0, 2)
_HYPER_ORDERS = (4, 6, 8)


def epsilon_from_rho(rho):
    """Splitting strength for a requested rotation angle.

    ``rho`` is the angle (radians, in ``[0, pi/2)``) by which repartitioning
    rotates the eigenvalues of the linear operator into the left half-plane;
    the matching strength is ``tan(rho)``.
    """
    if not 0.0 <= rho < math.pi / 2:
        raise ValueError(f"rho must lie in [0, pi/2), got {rho}")
    return math.tan(rho)


@dataclass(frozen=True)
class RepartitionSpec:
    """Choice of diffusive operator and strength.

    kind:
        ``"none"``, ``"spectral-abs"`` (``D = -|ldiag|``), ``"power"``
        (``D = -|k|**power``, needs problem wavenumbers), or
        ``"hyperviscosity"`` (only valid with :func:`apply_hyperviscosity`).
    rho:
        Rotation angle; mutually exclusive with ``eps``.
    eps:
        Raw strength, mainly for the zeroth-derivative kind where integer
        strengths 1, 2, 4, 8 are the usual choices.
    power:
        Derivative order for kind ``"power"``; 0 and 2 are shipped.
    hyper_order, gamma, q:
        Vanishing-viscosity parameters: even derivative order, strength,
        and the order of the integrator whose accuracy must be preserved.
    """

    kind: str = "none"
    rho: Optional[float] = None
    eps: Optional[float] = None
    power: Optional[int] = None
    hyper_order: Optional[int] = None
    gamma: Optional[float] = None
    q: Optional[int] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown repartition kind {self.kind!r}")
        if self.rho is not None and self.eps is not None:
            raise ValueError("give rho or eps, not both")
        if self.rho is not None:
            epsilon_from_rho(self.rho)  # range check
        if self.eps is not None and self.eps < 0:
            raise ValueError("eps must be nonnegative")
        if self.kind == "power":
            if self.power not in _POWERS:
                raise ValueError(f"power must be one of {_POWERS}, got {self.power}")
        if self.kind == "hyperviscosity":
            if self.hyper_order not in _HYPER_ORDERS:
                raise ValueError(
                    f"hyper_order must be one of {_HYPER_ORDERS}, got {self.hyper_order}")
            if self.gamma is None or self.q is None:
                raise ValueError("hyperviscosity needs gamma and q")

    def epsilon(self):
        """Resolved strength: ``eps`` if given, else ``tan(rho)``, else 0."""
        if self.eps is not None:
            return float(self.eps)
        if self.rho is not None:
            return epsilon_from_rho(self.rho)
        return 0.0


def _diffusive_diag(problem, spec):
    if spec.kind == "spectral-abs":
        return -np.abs(problem.ldiag)
    if spec.kind == "power":
        if problem.wavenumbers is None:
            raise ValueError("power repartitioning needs problem wavenumbers")
        return -(problem.wavenumbers ** spec.power)
    raise ValueError(f"no diffusive operator for kind {spec.kind!r}")


def apply_repartition(problem: SemilinearProblem, spec: RepartitionSpec) -> SemilinearProblem:
    """Split ``problem`` as ``L + eps D`` / ``N - eps D y``.

    The returned problem has an identical right-hand side: for any state,
    ``L_hat y + N_hat(t, y) == L y + N(t, y)`` to roundoff.  ``kind="none"``
    or zero strength returns the input unchanged.
    """
    if spec.kind == "hyperviscosity":
        raise ValueError("use apply_hyperviscosity for the hyperviscosity kind")
    if spec.kind == "none":
        return problem
    eps = spec.epsilon()
    if eps == 0.0:
        return problem
    ddiag = _diffusive_diag(problem, spec)
    shift = eps * ddiag
    base = problem.nonlinear

    def nonlinear_hat(t, y, _base=base, _shift=shift):
        return _base(t, y) - _shift * y

    return replace(problem, ldiag=problem.ldiag + shift, nonlinear=nonlinear_hat)


def apply_hyperviscosity(problem: SemilinearProblem, hyper_order, gamma, h, q) -> SemilinearProblem:
    """Add vanishing viscosity ``h**(q+1) * gamma * (-k**hyper_order)`` to ``L``.

    Unlike repartitioning this changes the problem: the nonlinearity is left
    alone, so solutions differ from the original by the damping term.  The
    step size ``h`` the integrator will use must be supplied because the
    strength scales as ``h**(q+1)``.
    """
    if hyper_order is None or hyper_order % 2 != 0:
        raise ValueError(f"hyper_order must be even, got {hyper_order}")
    if hyper_order not in _HYPER_ORDERS:
        raise ValueError(f"hyper_order must be one of {_HYPER_ORDERS}, got {hyper_order}")
    if not h > 0:
        raise ValueError("h must be positive")
    if gamma == 0.0:
        return problem
    if problem.wavenumbers is None:
        raise ValueError("hyperviscosity needs problem wavenumbers")
    ddiag = -(problem.wavenumbers ** hyper_order)
    return replace(problem, ldiag=problem.ldiag + (h ** (q + 1)) * gamma * ddiag)
