r"""
Fourier pseudo-spectral testbed problems
========================================

Five dispersive / hyperbolic PDEs discretized on periodic domains and solved
in transform space where the linear operator is diagonal:

* ``make_zds``  zero-dispersion Schrodinger, ``i u_t + i u_xxx + 2 u|u|^2 = 0``
* ``make_nls``  cubic Schrodinger, ``i u_t + u_xx + 2|u|^2 u = 0``
* ``make_kdv``  Korteweg-de Vries with Zabusky-Kruskal scaling
* ``make_kp``   Kadomtsev-Petviashvili I in evolution form (2-D)
* ``make_vp``   Vlasov-Poisson, Fourier in x and collocation in v

Nonlinear products are dealiased by zeroing the top third of modes (the
effect of the 3/2 rule): for an even grid of size ``N`` the kept indices are
``|k| <= floor(N/3)``.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .integrators import SemilinearProblem


def dft(x):
    """Unnormalized forward transform ``X_m = sum_n x_n exp(-2 pi i m n / N)``."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("dft expects a nonempty vector")
    return np.fft.fft(x)


def idft(X):
    """Inverse of :func:`dft` (includes the 1/N factor)."""
    X = np.asarray(X, dtype=np.complex128)
    if X.ndim != 1 or X.size < 1:
        raise ValueError("idft expects a nonempty vector")
    return np.fft.ifft(X)


def fft_indices(n):
    """Signed mode indices in FFT storage order: 0..n/2-1, -n/2..-1."""
    return np.concatenate([np.arange(0, n // 2), np.arange(-(n // 2), 0)])


def dealias_mask(n):
    """Keep-mask implementing the 2/3 truncation: True iff ``|index| <= n//3``."""
    if n % 2 != 0:
        raise ValueError(f"grid size must be even, got {n}")
    return np.abs(fft_indices(n)) <= n // 3


@dataclass(frozen=True)
class SpectralGrid:
    """Periodic grid(s): sizes, physical lengths and left endpoints per dimension."""

    dims: int
    sizes: Tuple[int, ...]
    lengths: Tuple[float, ...]
    origins: Tuple[float, ...]

    def __post_init__(self):
        if not (len(self.sizes) == len(self.lengths) == len(self.origins) == self.dims):
            raise ValueError("sizes, lengths and origins must all have length dims")
        for n in self.sizes:
            if n % 2 != 0 or n < 2:
                raise ValueError(f"grid sizes must be even and >= 2, got {n}")

    def omega(self, axis=0):
        """Fundamental wavenumber ``2 pi / length``."""
        return 2.0 * np.pi / self.lengths[axis]

    def wavenumbers(self, axis=0):
        """Physical wavenumbers ``omega * [0..N/2-1, -N/2..-1]``."""
        return self.omega(axis) * fft_indices(self.sizes[axis])

    def coords(self, axis=0):
        """Collocation points ``origin + length * [0..N-1] / N``."""
        n = self.sizes[axis]
        return self.origins[axis] + self.lengths[axis] * np.arange(n) / n


@dataclass(frozen=True)
class ProblemInstance:
    """A testbed problem: grid, semilinear system, initial state, defaults."""

    name: str
    grid: SpectralGrid
    problem: SemilinearProblem
    initial_state: np.ndarray
    tfinal: float
    state_shape: Tuple[int, ...]
    to_physical: Callable[[np.ndarray], np.ndarray]
    nonlinear_bound: Optional[float] = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        y0 = np.asarray(self.initial_state, dtype=np.complex128)
        object.__setattr__(self, "initial_state", y0)
        if not np.all(np.isfinite(y0)):
            raise ValueError("initial state must be finite")
        if np.any(np.abs(y0[~self.problem.dealias_mask]) > 0):
            raise ValueError("initial state must be dealiased")


def rel_error(y, yref):
    """Infinity-norm relative error ``max|y - yref| / max|yref|``."""
    y = np.asarray(y)
    yref = np.asarray(yref)
    if y.shape != yref.shape:
        raise ValueError("shapes must match")
    den = np.max(np.abs(yref))
    if den == 0.0:
        raise ValueError("reference has zero norm")
    return float(np.max(np.abs(y - yref)) / den)


def spectral_radius_kept(instance, h=1.0):
    """``max h * |ldiag|`` over modes kept by the dealias mask."""
    lam = np.abs(instance.problem.ldiag[instance.problem.dealias_mask])
    return float(h * lam.max())


def _modes_to_state(grid, amplitudes):
    """Exact spectral assembly of ``sum_m a_m exp(i m omega x)`` on a 1-D grid.

    The left endpoint contributes the phase ``exp(i m omega x0)`` relative to
    index-space modes, so the result equals ``dft`` of the sampled field to
    roundoff while keeping unused modes exactly zero.
    """
    n = grid.sizes[0]
    omega = grid.omega(0)
    x0 = grid.origins[0]
    y = np.zeros(n, dtype=np.complex128)
    for m, a in amplitudes.items():
        y[m % n] += n * a * np.exp(1j * m * omega * x0)
    return y


def _masked(mask):
    def apply(w):
        return np.where(mask, w, 0.0)
    return apply


def make_zds(nx=128):
    """Zero-dispersion Schrodinger on ``x in [-4 pi, 4 pi]``.

    Solved for ``yhat = F(u)`` with ``ldiag = i k^3`` and nonlinearity
    ``2i F(|u|^2 u)``; initial condition ``1 + exp(3 i x / 4) / 100``.
    """
    grid = SpectralGrid(1, (nx,), (8.0 * np.pi,), (-4.0 * np.pi,))
    k = grid.wavenumbers(0)
    mask = dealias_mask(nx)
    keep = _masked(mask)

    def nonlinear(t, yhat):
        u = np.fft.ifft(yhat)
        return keep(2j * np.fft.fft(np.abs(u) ** 2 * u))

    problem = SemilinearProblem(
        ldiag=1j * k ** 3, nonlinear=nonlinear, dim=nx,
        dealias_mask=mask, wavenumbers=np.abs(k))
    y0 = _modes_to_state(grid, {0: 1.0, 3: 0.01})
    return ProblemInstance(
        name="zds", grid=grid, problem=problem, initial_state=y0, tfinal=40.0,
        state_shape=(nx,), to_physical=np.fft.ifft)


_NLS_ICS = ("smooth", "oscillatory", "full-spectrum")


def make_nls(nx=1024, ic="smooth"):
    """Cubic nonlinear Schrodinger on ``x in [-4 pi, 4 pi]``.

    ``ldiag = -i k^2``, nonlinearity ``2i F(|u|^2 u)``.  Initial conditions:
    ``smooth`` adds ``cos(x/4)/100`` to a unit background, ``oscillatory``
    adds ``cos(45 x / 4)/100`` on top, and ``full-spectrum`` sums the first
    45 cosine modes at the same amplitude.
    """
    if ic not in _NLS_ICS:
        raise ValueError(f"ic must be one of {_NLS_ICS}, got {ic!r}")
    grid = SpectralGrid(1, (nx,), (8.0 * np.pi,), (-4.0 * np.pi,))
    k = grid.wavenumbers(0)
    mask = dealias_mask(nx)
    keep = _masked(mask)

    def nonlinear(t, yhat):
        u = np.fft.ifft(yhat)
        return keep(2j * np.fft.fft(np.abs(u) ** 2 * u))

    problem = SemilinearProblem(
        ldiag=-1j * k ** 2, nonlinear=nonlinear, dim=nx,
        dealias_mask=mask, wavenumbers=np.abs(k))

    amplitudes = {0: 1.0 + 0.0j}
    if ic == "smooth":
        cosines = [1]
    elif ic == "oscillatory":
        cosines = [1, 45]
    else:
        cosines = list(range(1, 46))
    for m in cosines:
        amplitudes[m] = amplitudes.get(m, 0.0) + 0.005
        amplitudes[-m] = amplitudes.get(-m, 0.0) + 0.005
    y0 = _modes_to_state(grid, amplitudes)
    return ProblemInstance(
        name=f"nls-{ic}", grid=grid, problem=problem, initial_state=y0, tfinal=14.0,
        state_shape=(nx,), to_physical=np.fft.ifft, nonlinear_bound=2.0)


def make_kdv(nx=512, delta=0.022):
    """Korteweg-de Vries ``u_t + u u_x + delta^2 u_xxx = 0`` on ``x in [0, 2]``.

    Zabusky-Kruskal scaling: the dispersion coefficient is ``delta**2``, so
    ``ldiag = i delta^2 k^3`` and the nonlinearity is ``-(i k / 2) F(u^2)``.
    Initial condition ``cos(pi x)``.
    """
    grid = SpectralGrid(1, (nx,), (2.0,), (0.0,))
    k = grid.wavenumbers(0)
    mask = dealias_mask(nx)
    keep = _masked(mask)

    def nonlinear(t, yhat):
        u = np.fft.ifft(yhat)
        return keep(-(0.5j * k) * np.fft.fft(u * u))

    problem = SemilinearProblem(
        ldiag=1j * (delta ** 2) * k ** 3, nonlinear=nonlinear, dim=nx,
        dealias_mask=mask, wavenumbers=np.abs(k))
    y0 = _modes_to_state(grid, {1: 0.5, -1: 0.5})
    return ProblemInstance(
        name="kdv", grid=grid, problem=problem, initial_state=y0, tfinal=160.0,
        state_shape=(nx,), to_physical=np.fft.ifft, extras={"delta": delta})


def make_kp(nx=96, ny=64, check_constraint=True):
    """Kadomtsev-Petviashvili I on ``x in [-8 pi, 8 pi], y in [0, 8 pi]``.

    Evolution form: ``u_t + 6 u u_x + u_xxx + 3 s^2 d^-1 u_yy = 0`` with
    ``s^2 = -1`` and the antiderivative realized as the Fourier multiplier
    ``-i / kx``, set to zero on the ``kx = 0`` column (valid for data whose
    ``u_yy`` has zero mean in x).  State is the 2-D transform of ``u``,
    flattened from shape ``(nx, ny)``.
    """
    grid = SpectralGrid(2, (nx, ny), (16.0 * np.pi, 8.0 * np.pi), (-8.0 * np.pi, 0.0))
    kx = grid.wavenumbers(0)
    ky = grid.wavenumbers(1)
    KX, KY = np.meshgrid(kx, ky, indexing="ij")
    mask2 = np.outer(dealias_mask(nx), dealias_mask(ny))

    sigma2 = -1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_kx = np.where(KX != 0.0, 1.0 / KX, 0.0)
    ldiag2 = 1j * KX ** 3 - 3.0 * sigma2 * 1j * (KY ** 2) * inv_kx
    ldiag2[KX == 0.0] = 0.0

    shape = (nx, ny)
    dim = nx * ny
    mask = mask2.ravel()
    kxf = KX.ravel()

    def nonlinear(t, yhat):
        u = np.fft.ifft2(yhat.reshape(shape))
        w = -3j * kxf * np.fft.fft2(u * u).ravel()
        return np.where(mask, w, 0.0)

    problem = SemilinearProblem(
        ldiag=ldiag2.ravel(), nonlinear=nonlinear, dim=dim,
        dealias_mask=mask, wavenumbers=np.sqrt(KX ** 2 + KY ** 2).ravel())

    X, Y = np.meshgrid(grid.coords(0), grid.coords(1), indexing="ij")
    u0 = 2.0 / np.cosh((X + 4.0 * np.pi) + 0.2 * np.cos(Y / 4.0)) ** 2
    y0 = np.fft.fft2(u0.astype(np.complex128))
    y0 = np.where(mask2, y0, 0.0)

    if check_constraint:
        # u_yy must have zero x-mean: check the kx = 0, ky != 0 coefficients
        uyy_row = -(ky ** 2) * y0[0, :] / dim
        if np.max(np.abs(uyy_row[1:])) >= 1e-12:
            raise ValueError("initial condition violates the zero x-mean constraint on u_yy")

    return ProblemInstance(
        name="kp", grid=grid, problem=problem, initial_state=y0.ravel(), tfinal=4.0,
        state_shape=shape,
        to_physical=lambda y: np.fft.ifft2(y.reshape(shape)))


def make_vp(nx=1024, nv=1024):
    """Vlasov-Poisson bump-on-tail on ``x in [0, 20 pi], v in [-8, 8]``.

    The state is ``fhat(v_j, kx) = F_x(f)``: Fourier in x, collocation in v,
    flattened from shape ``(nv, nx)``.  The advection term is the diagonal
    ``i kx v``; the electric-field term couples modes through the
    trapezoidal charge integral ``dv * sum_j fhat`` and the inverse-gradient
    multiplier (zero at ``kx = 0``), with ``f_v`` computed by Fourier
    differentiation in v using wavenumbers ``pi / L_v * [0..nv/2-1, -nv/2..-1]``.
    """
    lv = 16.0
    grid = SpectralGrid(2, (nx, nv), (20.0 * np.pi, lv), (0.0, -8.0))
    kx = grid.wavenumbers(0)
    v = grid.coords(1)
    dv = lv / nv
    kv = (np.pi / lv) * fft_indices(nv)

    maskx = dealias_mask(nx)
    mask2 = np.broadcast_to(maskx, (nv, nx))
    with np.errstate(divide="ignore"):
        inv_kx = np.where(kx != 0.0, 1.0 / kx, 0.0)
    background = np.zeros(nx, dtype=np.complex128)
    background[0] = -nx  # F_x of the -1 neutralizing charge

    shape = (nv, nx)
    dim = nv * nx
    ldiag2 = 1j * np.outer(v, kx)

    def nonlinear(t, yhat):
        fhat = yhat.reshape(shape)
        rho_hat = background + dv * fhat.sum(axis=0)
        e_field = np.fft.ifft(inv_kx * rho_hat)
        fv_hat = np.fft.ifft(1j * kv[:, None] * np.fft.fft(fhat, axis=0), axis=0)
        f_v = np.fft.ifft(fv_hat, axis=1)
        w = np.fft.fft(e_field[None, :] * f_v, axis=1)
        return np.where(mask2, w, 0.0).ravel()

    problem = SemilinearProblem(
        ldiag=ldiag2.ravel(), nonlinear=nonlinear, dim=dim,
        dealias_mask=mask2.ravel().copy())

    fv0 = (0.9 / np.sqrt(2.0 * np.pi) * np.exp(-v ** 2 / 2.0)
           + 0.2 / np.sqrt(2.0 * np.pi) * np.exp(-2.0 * (v - 4.5) ** 2))
    x = grid.coords(0)
    f0 = np.outer(fv0, 1.0 + 0.04 * np.cos(0.3 * x))
    y0 = np.fft.fft(f0.astype(np.complex128), axis=1)
    y0 = np.where(mask2, y0, 0.0)

    return ProblemInstance(
        name="vp", grid=grid, problem=problem, initial_state=y0.ravel(), tfinal=50.0,
        state_shape=shape,
        to_physical=lambda y: np.fft.ifft(y.reshape(shape), axis=1),
        extras={"dv": dv})


def write_snapshot_csv(path, instance, t, state):
    """Dump a physical-space snapshot: ``|u|^2`` column for 1-D problems,
    row-major magnitude grid for 2-D ones.  One header line names the
    problem and time."""
    u = instance.to_physical(np.asarray(state))
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# problem={instance.name} t={t!r}\n")
        if u.ndim == 1:
            x = instance.grid.coords(0)
            fh.write("x,abs2\n")
            for xi, ui in zip(x, u):
                fh.write(f"{xi!r},{abs(ui) ** 2!r}\n")
        else:
            fh.write("magnitude-row-major\n")
            for row in np.abs(u):
                fh.write(",".join(repr(float(val)) for val in row) + "\n")
