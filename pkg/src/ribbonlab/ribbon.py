"""Numerical solutions of the elliptic sinh-Gordon equation on a periodic ribbon.

The domain is R x [-T, T], periodic in x with period L, discretised on a
uniform grid.  The PDE in real coordinates is

    Lap(w) + (1/2) sinh(2 w) = 0        (Lap = 4 d_z d_zbar)

with the nonlinear boundary law  w_y = A e^w + B e^{-w}  on each horizontal
boundary component (constants A, B per component; the free-boundary case is
A = eps/r, B = 0 with eps = +1 on the upper and -1 on the lower component).

Two solvers are provided: a shooting method for x-independent profiles, whose
conserved quantity E = w_y^2/2 + cosh(2w)/4 doubles as an accuracy monitor, and
a damped Newton iteration on the full 2-d finite-difference system.  For
x-independent solutions every derivative d_z^a d_zbar^b w has a closed form in
(w, w_y) obtained by repeatedly differentiating the reduced ODE
w_yy = -(1/2) sinh(2w); the derivative oracle below evaluates those chains, so
downstream Killing-field checks are limited only by the ODE solution accuracy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import solve_banded
from scipy.optimize import brentq
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve


class NoSolutionError(RuntimeError):
    """The shooting bracket scan found no sign change."""


class SolverDivergedError(RuntimeError):
    """Newton failed to reduce the residual below tolerance."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history or [])


class ConditioningError(RuntimeError):
    """The Newton Jacobian was singular or produced non-finite corrections."""


class StiffnessError(RuntimeError):
    """The ODE integrator failed to take a step."""


@dataclass(frozen=True)
class RibbonGrid:
    """Uniform grid on the ribbon: periodic in x, boundary rows at y = +-T."""

    period_L: float
    half_width_T: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.period_L <= 0 or self.half_width_T <= 0:
            raise ValueError("period and half-width must be positive")
        if self.nx < 4 or self.ny < 5:
            raise ValueError("grid too small for the stencils: need nx >= 4, ny >= 5")

    @property
    def hx(self) -> float:
        return self.period_L / self.nx

    @property
    def hy(self) -> float:
        return 2 * self.half_width_T / (self.ny - 1)

    def x(self) -> np.ndarray:
        return np.arange(self.nx) * self.hx

    def y(self) -> np.ndarray:
        return np.linspace(-self.half_width_T, self.half_width_T, self.ny)


@dataclass(frozen=True)
class DurhamData:
    """Boundary coefficients, one (A, B) pair per boundary component."""

    A_plus: float
    B_plus: float
    A_minus: float
    B_minus: float

    @classmethod
    def free_boundary(cls, r: float) -> "DurhamData":
        """The free-boundary specialisation A = eps/r, B = 0."""
        return cls(A_plus=1.0 / r, B_plus=0.0, A_minus=-1.0 / r, B_minus=0.0)

    @classmethod
    def zero(cls) -> "DurhamData":
        return cls(0.0, 0.0, 0.0, 0.0)


@dataclass
class RibbonSolution:
    """A discrete w on the ribbon grid plus the boundary data it satisfies.

    ``omega`` has shape (ny, nx), row j at y_j, column i at x_i.  For solutions
    produced by the 1-d solver, ``profile_omega``/``profile_omega_y`` hold the
    x-independent profile and its exact y-derivative on the y grid, which feed
    the closed-form derivative oracle.
    """

    grid: RibbonGrid
    omega: np.ndarray
    durham: DurhamData
    meta: dict = field(default_factory=dict)
    x_independent: bool = False
    profile_omega: np.ndarray | None = None
    profile_omega_y: np.ndarray | None = None


# ------------------------------------------------------------------------------
# 1-d solver: shooting on w(-T)
# ------------------------------------------------------------------------------


def _ode_rhs(_y, state):
    w, wy = state
    return (wy, -0.5 * math.sinh(2 * w))


def _integrate_profile(T, p, wy0, rtol=1e-13, atol=1e-15):
    sol = solve_ivp(
        _ode_rhs,
        (-T, T),
        (p, wy0),
        method="DOP853",
        rtol=rtol,
        atol=atol,
        dense_output=True,
    )
    if not sol.success:
        raise StiffnessError(f"ODE integration failed: {sol.message}")
    return sol


def first_integral(omega, omega_y):
    """E = w_y^2/2 + cosh(2w)/4, constant along exact 1-d solutions."""
    return 0.5 * np.asarray(omega_y) ** 2 + 0.25 * np.cosh(2 * np.asarray(omega))


def solve_1d(
    half_width_T: float,
    durham: DurhamData,
    tol: float = 1e-10,
    nx: int = 64,
    ny: int = 129,
    period_L: float = 2 * math.pi,
    bracket: tuple = (-3.0, 3.0),
    nscan: int = 121,
) -> RibbonSolution:
    """Shooting solution of the x-independent boundary-value problem.

    The initial height p = w(-T) is the only unknown: w_y(-T) is given by the
    lower boundary law, and p is adjusted until the upper defect
    G(p) = w_y(T) - A+ e^{w(T)} - B+ e^{-w(T)} vanishes.  The scan over the
    bracket locates sign changes; Brent's method solves the chosen one and a
    secant polish pushes the defect to integrator accuracy.
    """
    T = half_width_T

    def upper_defect(p):
        wy0 = durham.A_minus * math.exp(p) + durham.B_minus * math.exp(-p)
        s = _integrate_profile(T, p, wy0)
        wT, wyT = s.sol(T)
        return wyT - durham.A_plus * math.exp(wT) - durham.B_plus * math.exp(-wT)

    ps = np.linspace(bracket[0], bracket[1], nscan)
    gs = np.array([upper_defect(p) for p in ps])
    exact = [p for p, g in zip(ps, gs) if g == 0.0]
    if exact:
        p_star = min(exact, key=abs)
    else:
        intervals = [
            (ps[i], ps[i + 1])
            for i in range(len(ps) - 1)
            if gs[i] * gs[i + 1] < 0
        ]
        if not intervals:
            raise NoSolutionError(
                f"no sign change of the upper Durham defect for p in {bracket}: "
                f"defect range [{gs.min():.3e}, {gs.max():.3e}]"
            )
        a, b = min(intervals, key=lambda iv: abs(0.5 * (iv[0] + iv[1])))
        p_star = brentq(upper_defect, a, b, xtol=1e-14, rtol=8.9e-16)
        # Secant polish: brentq stops on the bracket width, not the defect size.
        g0 = upper_defect(p_star)
        for _ in range(3):
            if g0 == 0.0:
                break
            h = 1e-7
            slope = (upper_defect(p_star + h) - g0) / h
            if slope == 0.0:
                break
            p_next = p_star - g0 / slope
            g_next = upper_defect(p_next)
            if abs(g_next) >= abs(g0):
                break
            p_star, g0 = p_next, g_next

    wy0 = durham.A_minus * math.exp(p_star) + durham.B_minus * math.exp(-p_star)
    s = _integrate_profile(T, p_star, wy0)
    grid = RibbonGrid(period_L, T, nx, ny)
    yv = grid.y()
    prof = s.sol(yv)
    omega_prof = prof[0]
    omega_y_prof = prof[1]

    dense_y = np.linspace(-T, T, 2001)
    dense = s.sol(dense_y)
    energies = first_integral(dense[0], dense[1])
    drift = float(np.max(np.abs(energies - energies[0])))

    def boundary_defect(w, wy, A, B):
        return abs(wy - A * math.exp(w) - B * math.exp(-w))

    defect_lower = boundary_defect(omega_prof[0], omega_y_prof[0], durham.A_minus, durham.B_minus)
    defect_upper = boundary_defect(omega_prof[-1], omega_y_prof[-1], durham.A_plus, durham.B_plus)
    if max(defect_lower, defect_upper) > tol:
        raise NoSolutionError(
            f"shooting defect {max(defect_lower, defect_upper):.3e} above tol {tol:.1e}"
        )
    if drift > 10 * tol:
        raise StiffnessError(f"first-integral drift {drift:.3e} exceeds 10*tol")

    omega = np.tile(omega_prof[:, None], (1, nx))
    meta = {
        "solver": "shooting-1d",
        "shoot_parameter": float(p_star),
        "durham_defect_lower": float(defect_lower),
        "durham_defect_upper": float(defect_upper),
        "energy_drift": drift,
        "tol": tol,
    }
    return RibbonSolution(
        grid=grid,
        omega=omega,
        durham=durham,
        meta=meta,
        x_independent=True,
        profile_omega=omega_prof,
        profile_omega_y=omega_y_prof,
    )


def relaxation_oracle_1d(
    half_width_T: float,
    durham: DurhamData,
    n: int = 100001,
    init: np.ndarray | None = None,
    tol: float = 1e-12,
    max_iter: int = 60,
) -> tuple:
    """Independent dense-grid check: banded Newton on the two-point BVP.

    Second-order central differences inside, second-order one-sided w_y at the
    two ends.  Returns (y, w) on n points.  The discretisation and solution
    method share nothing with the shooting integrator.
    """
    T = half_width_T
    y = np.linspace(-T, T, n)
    h = y[1] - y[0]
    w = np.zeros(n) if init is None else np.asarray(init, dtype=float).copy()

    def residual(w):
        F = np.empty(n)
        F[1:-1] = (w[:-2] - 2 * w[1:-1] + w[2:]) / h**2 + 0.5 * np.sinh(2 * w[1:-1])
        F[0] = (-3 * w[0] + 4 * w[1] - w[2]) / (2 * h) - durham.A_minus * np.exp(
            w[0]
        ) - durham.B_minus * np.exp(-w[0])
        F[-1] = (3 * w[-1] - 4 * w[-2] + w[-3]) / (2 * h) - durham.A_plus * np.exp(
            w[-1]
        ) - durham.B_plus * np.exp(-w[-1])
        return F

    # The residual mixes O(1/h^2) terms, so rounding caps how far it can drop;
    # once Newton stalls below the cap the iterate is at the discrete solution.
    stall_accept = max(tol, 1e4 * np.finfo(float).eps / h**2)
    for _ in range(max_iter):
        F = residual(w)
        if np.max(np.abs(F)) < tol:
            return y, w
        # Banded Jacobian, bandwidth 2 because of the one-sided boundary stencils.
        ab = np.zeros((5, n))
        ab[2, 1:-1] = -2 / h**2 + np.cosh(2 * w[1:-1])
        ab[1, 2:] = 1 / h**2
        ab[3, : n - 2] = 1 / h**2
        ab[2, 0] = -3 / (2 * h) - durham.A_minus * np.exp(w[0]) + durham.B_minus * np.exp(-w[0])
        ab[1, 1] = 4 / (2 * h)
        ab[0, 2] = -1 / (2 * h)
        ab[2, -1] = 3 / (2 * h) - durham.A_plus * np.exp(w[-1]) + durham.B_plus * np.exp(-w[-1])
        ab[3, -2] = -4 / (2 * h)
        ab[4, -3] = 1 / (2 * h)
        try:
            delta = solve_banded((2, 2), ab, -F)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise ConditioningError(str(exc))
        base = np.linalg.norm(F)
        step = 1.0
        for _ in range(30):
            trial = w + step * delta
            if np.linalg.norm(residual(trial)) < base:
                w = trial
                break
            step *= 0.5
        else:
            if np.max(np.abs(F)) < stall_accept:
                return y, w
            raise SolverDivergedError("relaxation Newton stalled")
    if np.max(np.abs(residual(w))) < stall_accept:
        return y, w
    raise SolverDivergedError("relaxation Newton did not converge", [])


def manufactured_durham(
    half_width_T: float,
    omega_mid: float,
    B_plus: float = 0.0,
) -> DurhamData:
    """Boundary data guaranteed to admit a y-even 1-d solution.

    Integrates the reduced ODE from rest at w(0) = omega_mid and reads off the
    (A, B) values the resulting profile satisfies at y = +-T; B is prescribed,
    antisymmetrically, and A absorbs the remainder.
    """
    T = half_width_T
    s = solve_ivp(
        _ode_rhs,
        (0.0, T),
        (omega_mid, 0.0),
        method="DOP853",
        rtol=1e-13,
        atol=1e-15,
        dense_output=True,
    )
    if not s.success:
        raise StiffnessError(s.message)
    wT, wyT = s.sol(T)
    A_plus = (wyT - B_plus * math.exp(-wT)) / math.exp(wT)
    return DurhamData(
        A_plus=float(A_plus),
        B_plus=float(B_plus),
        A_minus=float(-A_plus),
        B_minus=float(-B_plus),
    )


# ------------------------------------------------------------------------------
# 2-d solver: damped Newton on the finite-difference system
# ------------------------------------------------------------------------------


def _residual_2d(W, grid: RibbonGrid, durham: DurhamData, mod=None):
    hx, hy = grid.hx, grid.hy
    F = np.empty_like(W)
    lap_x = (np.roll(W, 1, axis=1) + np.roll(W, -1, axis=1) - 2 * W) / hx**2
    F[1:-1] = (
        lap_x[1:-1]
        + (W[:-2] + W[2:] - 2 * W[1:-1]) / hy**2
        + 0.5 * np.sinh(2 * W[1:-1])
    )
    a_minus, a_plus = _modulated_a(grid, durham, mod)
    F[0] = (-3 * W[0] + 4 * W[1] - W[2]) / (2 * hy) - a_minus * np.exp(W[0]) - durham.B_minus * np.exp(-W[0])
    F[-1] = (3 * W[-1] - 4 * W[-2] + W[-3]) / (2 * hy) - a_plus * np.exp(W[-1]) - durham.B_plus * np.exp(-W[-1])
    return F


def _modulated_a(grid, durham, mod):
    """Constant boundary coefficients, optionally x-modulated (robustness tests only)."""
    if mod is None:
        return durham.A_minus, durham.A_plus
    mod_minus, mod_plus = mod
    a_minus = durham.A_minus * (mod_minus if mod_minus is not None else 1.0)
    a_plus = durham.A_plus * (mod_plus if mod_plus is not None else 1.0)
    return a_minus, a_plus


def _jacobian_2d(W, grid: RibbonGrid, durham: DurhamData, mod=None):
    ny, nx = W.shape
    hx, hy = grid.hx, grid.hy
    n = ny * nx

    def idx(j, i):
        return j * nx + i

    rows, cols, vals = [], [], []
    jj, ii = np.meshgrid(np.arange(1, ny - 1), np.arange(nx), indexing="ij")
    jj = jj.ravel()
    ii = ii.ravel()
    centre = idx(jj, ii)
    rows.extend(centre)
    cols.extend(centre)
    vals.extend((-2 / hx**2 - 2 / hy**2 + np.cosh(2 * W[1:-1]).ravel()))
    for di in (-1, 1):
        rows.extend(centre)
        cols.extend(idx(jj, (ii + di) % nx))
        vals.extend(np.full(centre.shape, 1 / hx**2))
    for dj in (-1, 1):
        rows.extend(centre)
        cols.extend(idx(jj + dj, ii))
        vals.extend(np.full(centre.shape, 1 / hy**2))

    a_minus, a_plus = _modulated_a(grid, durham, mod)
    i_arr = np.arange(nx)
    rows.extend(idx(0, i_arr))
    cols.extend(idx(0, i_arr))
    vals.extend(-3 / (2 * hy) - a_minus * np.exp(W[0]) + durham.B_minus * np.exp(-W[0]))
    rows.extend(idx(0, i_arr))
    cols.extend(idx(1, i_arr))
    vals.extend(np.full(nx, 4 / (2 * hy)))
    rows.extend(idx(0, i_arr))
    cols.extend(idx(2, i_arr))
    vals.extend(np.full(nx, -1 / (2 * hy)))

    rows.extend(idx(ny - 1, i_arr))
    cols.extend(idx(ny - 1, i_arr))
    vals.extend(3 / (2 * hy) - a_plus * np.exp(W[-1]) + durham.B_plus * np.exp(-W[-1]))
    rows.extend(idx(ny - 1, i_arr))
    cols.extend(idx(ny - 2, i_arr))
    vals.extend(np.full(nx, -4 / (2 * hy)))
    rows.extend(idx(ny - 1, i_arr))
    cols.extend(idx(ny - 3, i_arr))
    vals.extend(np.full(nx, 1 / (2 * hy)))

    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def solve_2d(
    grid: RibbonGrid,
    durham: DurhamData,
    initial_guess: np.ndarray | None = None,
    tol: float = 1e-8,
    max_iter: int = 60,
    a_modulation=None,
) -> RibbonSolution:
    """Damped Newton for the discrete sinh-Gordon boundary-value problem.

    Interior: 5-point Laplacian plus (1/2) sinh(2w); boundary rows: one-sided
    second-order w_y stencil minus the boundary law.  The step is halved (at
    most 30 times) until the max-norm residual decreases.
    """
    if initial_guess is None:
        prof = solve_1d(
            grid.half_width_T, durham, nx=grid.nx, ny=grid.ny, period_L=grid.period_L
        )
        W = prof.omega.copy()
    else:
        W = np.asarray(initial_guess, dtype=float).copy()
        if W.shape != (grid.ny, grid.nx):
            raise ValueError(f"initial guess must have shape {(grid.ny, grid.nx)}")

    history = []
    dampings = []
    for iteration in range(max_iter):
        F = _residual_2d(W, grid, durham, a_modulation)
        rnorm = float(np.max(np.abs(F)))
        history.append(rnorm)
        if rnorm < tol:
            meta = {
                "solver": "newton-2d",
                "iterations": iteration,
                "residual_history": history,
                "dampings": dampings,
                "tol": tol,
            }
            return RibbonSolution(grid=grid, omega=W, durham=durham, meta=meta)
        J = _jacobian_2d(W, grid, durham, a_modulation)
        delta_flat = spsolve(J, -F.ravel())
        if not np.all(np.isfinite(delta_flat)):
            raise ConditioningError("singular Jacobian in the 2-d Newton iteration")
        delta = delta_flat.reshape(W.shape)
        base = np.linalg.norm(F)
        step = 1.0
        for halving in range(31):
            trial = W + step * delta
            if np.linalg.norm(_residual_2d(trial, grid, durham, a_modulation)) < base:
                W = trial
                dampings.append(halving)
                break
            step *= 0.5
        else:
            raise SolverDivergedError(
                "Newton could not reduce the residual", history
            )
    raise SolverDivergedError(
        f"Newton did not reach tol={tol:.1e} in {max_iter} iterations", history
    )


# ------------------------------------------------------------------------------
# Derivative oracles
# ------------------------------------------------------------------------------

_CHAIN_FUNCS = []  # k -> callable(w, wy) evaluating d_y^k w on solutions


def _y_chain(k: int):
    """Closed form of d_y^k w as a function of (w, w_y), via the reduced ODE."""
    global _CHAIN_FUNCS
    if not _CHAIN_FUNCS:
        import sympy as sp_sym

        w, wy = sp_sym.symbols("w wy", real=True)
        _CHAIN_FUNCS.append(((w, wy), [w], [sp_sym.lambdify((w, wy), w, "numpy")]))
    (w, wy), exprs, funcs = _CHAIN_FUNCS[0]
    import sympy as sp_sym

    while len(exprs) <= k:
        prev = exprs[-1]
        nxt = sp_sym.diff(prev, w) * wy + sp_sym.diff(prev, wy) * (
            -sp_sym.sinh(2 * w) / 2
        )
        exprs.append(nxt)
        funcs.append(sp_sym.lambdify((w, wy), nxt, "numpy"))
    return funcs[k]


def _eval_y_derivative(sol: RibbonSolution, k: int) -> np.ndarray:
    f = _y_chain(k)
    vals = np.asarray(f(sol.profile_omega, sol.profile_omega_y), dtype=float)
    if vals.ndim == 0:
        vals = np.full(sol.grid.ny, float(vals))
    return vals


def _fd_x(F: np.ndarray, hx: float) -> np.ndarray:
    return (np.roll(F, -1, axis=1) - np.roll(F, 1, axis=1)) / (2 * hx)


def _fd_y(F: np.ndarray, hy: float) -> np.ndarray:
    return np.gradient(F, hy, axis=0, edge_order=2)


def _fd_xy_power(F: np.ndarray, jx: int, jy: int, grid: RibbonGrid) -> np.ndarray:
    out = F
    for _ in range(jy):
        out = _fd_y(out, grid.hy)
    for _ in range(jx):
        out = _fd_x(out, grid.hx)
    return out


def _fd_z_zbar(F: np.ndarray, c: int, d: int, grid: RibbonGrid) -> np.ndarray:
    """Apply d_z^c d_zbar^d to a plain grid function by binomial expansion."""
    out = np.zeros(F.shape, dtype=complex)
    for p in range(c + 1):
        for q in range(d + 1):
            coeff = (
                math.comb(c, p)
                * math.comb(d, q)
                * (-1j) ** (c - p)
                * (1j) ** (d - q)
            )
            out += coeff * _fd_xy_power(F, p + q, (c - p) + (d - q), grid)
    return out * (0.5 ** (c + d))


def derivative_oracle(sol: RibbonSolution, a: int, b: int) -> np.ndarray:
    """Grid values of d_z^a d_zbar^b w.

    x-independent solutions use the exact (w, w_y) chains: every pure y
    derivative follows from the ODE, and d_z = -(i/2) d_y, d_zbar = (i/2) d_y.
    Mixed requests reduce through the sinh-Gordon equation, which on exact
    solutions agrees with the direct chain; the chain is used for both.
    2-d solutions fall back to O(h^2) finite differences, with mixed requests
    reduced first so only the PDE right-hand side is differenced.
    """
    if a == 0 and b == 0:
        return sol.omega.astype(complex)
    if sol.x_independent and sol.profile_omega is not None:
        prof = _eval_y_derivative(sol, a + b)
        factor = (-0.5j) ** a * (0.5j) ** b
        col = factor * prof.astype(complex)
        return np.tile(col[:, None], (1, sol.grid.nx))
    if a >= 1 and b >= 1:
        # w_{z zbar} = -(1/16)(e^{2w} - e^{-2w}); difference the reduced field.
        G = -(np.exp(2 * sol.omega) - np.exp(-2 * sol.omega)) / 16.0
        return _fd_z_zbar(G, a - 1, b - 1, sol.grid)
    return _fd_z_zbar(sol.omega.astype(float), a, b, sol.grid)


def make_oracle(sol: RibbonSolution):
    """Memoised (a, b) -> grid array oracle bound to one solution."""
    cache: dict = {}

    def oracle(a: int, b: int) -> np.ndarray:
        if (a, b) not in cache:
            cache[(a, b)] = derivative_oracle(sol, a, b)
        return cache[(a, b)]

    return oracle


# ------------------------------------------------------------------------------
# Residual measures and linearised operators
# ------------------------------------------------------------------------------


def pde_residual(sol: RibbonSolution) -> float:
    """Max-norm defect of the discrete interior equation on the stored grid."""
    F = _residual_2d(sol.omega, sol.grid, sol.durham)
    return float(np.max(np.abs(F[1:-1])))


def durham_residual(sol: RibbonSolution) -> dict:
    """Max-norm boundary defects, per component.

    1-d solutions are measured with the exact w_y profile; 2-d solutions with
    the same one-sided stencil the solver enforces.
    """
    d = sol.durham
    if sol.x_independent and sol.profile_omega_y is not None:
        w0, wy0 = sol.profile_omega[0], sol.profile_omega_y[0]
        w1, wy1 = sol.profile_omega[-1], sol.profile_omega_y[-1]
        lower = abs(wy0 - d.A_minus * math.exp(w0) - d.B_minus * math.exp(-w0))
        upper = abs(wy1 - d.A_plus * math.exp(w1) - d.B_plus * math.exp(-w1))
        return {"lower": float(lower), "upper": float(upper)}
    F = _residual_2d(sol.omega, sol.grid, sol.durham)
    return {
        "lower": float(np.max(np.abs(F[0]))),
        "upper": float(np.max(np.abs(F[-1]))),
    }


def linearized_apply(sol: RibbonSolution, u: np.ndarray) -> np.ndarray:
    """Discrete Lap(u) + cosh(2 w) u; interior rows only, boundary rows zero."""
    grid = sol.grid
    u = np.asarray(u)
    out = np.zeros(u.shape, dtype=complex)
    lap_x = (np.roll(u, 1, axis=1) + np.roll(u, -1, axis=1) - 2 * u) / grid.hx**2
    out[1:-1] = (
        lap_x[1:-1]
        + (u[:-2] + u[2:] - 2 * u[1:-1]) / grid.hy**2
        + np.cosh(2 * sol.omega[1:-1]) * u[1:-1]
    )
    return out


def robin_defect(sol: RibbonSolution, u: np.ndarray, side: str) -> np.ndarray:
    """Boundary values of u_y - (A e^w - B e^{-w}) u on the requested component."""
    grid = sol.grid
    u = np.asarray(u)
    hy = grid.hy
    if side == "lower":
        uy = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * hy)
        w_row = sol.omega[0]
        A, B = sol.durham.A_minus, sol.durham.B_minus
        u_row = u[0]
    elif side == "upper":
        uy = (3 * u[-1] - 4 * u[-2] + u[-3]) / (2 * hy)
        w_row = sol.omega[-1]
        A, B = sol.durham.A_plus, sol.durham.B_plus
        u_row = u[-1]
    else:
        raise ValueError("side must be 'lower' or 'upper'")
    return uy - (A * np.exp(w_row) - B * np.exp(-w_row)) * u_row


# ------------------------------------------------------------------------------
# Solution files: JSON header + raw float64 or CSV payload
# ------------------------------------------------------------------------------

SOLUTION_SCHEMA_VERSION = 1


def save_solution(sol: RibbonSolution, base: str | Path, payload: str = "binary") -> list:
    """Write `<base>.json` plus a row-major payload; returns the paths written.

    Binary payload is raw little-endian float64; CSV uses 17 significant
    digits.  Both round-trip bit-exactly.
    """
    base = Path(base)
    header = {
        "schema_version": SOLUTION_SCHEMA_VERSION,
        "grid": {
            "period_L": sol.grid.period_L,
            "half_width_T": sol.grid.half_width_T,
            "nx": sol.grid.nx,
            "ny": sol.grid.ny,
        },
        "durham": {
            "A_plus": sol.durham.A_plus,
            "B_plus": sol.durham.B_plus,
            "A_minus": sol.durham.A_minus,
            "B_minus": sol.durham.B_minus,
        },
        "meta": sol.meta,
        "x_independent": sol.x_independent,
        "profile_omega": None
        if sol.profile_omega is None
        else list(map(float, sol.profile_omega)),
        "profile_omega_y": None
        if sol.profile_omega_y is None
        else list(map(float, sol.profile_omega_y)),
        "payload": {
            "format": payload,
            "file": base.name + (".f64" if payload == "binary" else ".csv"),
            "dtype": "float64",
            "shape": [sol.grid.ny, sol.grid.nx],
            "order": "row-major",
        },
    }
    json_path = base.with_suffix(".json")
    json_path.write_text(json.dumps(header, indent=2, sort_keys=True))
    if payload == "binary":
        data_path = base.with_suffix(".f64")
        data_path.write_bytes(np.ascontiguousarray(sol.omega, dtype="<f8").tobytes())
    elif payload == "csv":
        data_path = base.with_suffix(".csv")
        np.savetxt(data_path, sol.omega, fmt="%.17e", delimiter=",")
    else:
        raise ValueError("payload must be 'binary' or 'csv'")
    return [json_path, data_path]


def load_solution(base: str | Path) -> RibbonSolution:
    base = Path(base)
    header = json.loads(base.with_suffix(".json").read_text())
    g = header["grid"]
    grid = RibbonGrid(g["period_L"], g["half_width_T"], g["nx"], g["ny"])
    d = header["durham"]
    durham = DurhamData(d["A_plus"], d["B_plus"], d["A_minus"], d["B_minus"])
    fmt = header["payload"]["format"]
    shape = tuple(header["payload"]["shape"])
    if fmt == "binary":
        raw = base.with_suffix(".f64").read_bytes()
        omega = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
    else:
        omega = np.loadtxt(base.with_suffix(".csv"), delimiter=",").reshape(shape)
    prof = header.get("profile_omega")
    prof_y = header.get("profile_omega_y")
    return RibbonSolution(
        grid=grid,
        omega=omega,
        durham=durham,
        meta=header.get("meta", {}),
        x_independent=header.get("x_independent", False),
        profile_omega=None if prof is None else np.array(prof),
        profile_omega_y=None if prof_y is None else np.array(prof_y),
    )
