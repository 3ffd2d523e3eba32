"""Exact ideal-gas Riemann solver used as the analytical reference.

Newton iteration on the two-branch pressure function (Rankine-Hugoniot on
the shock side, isentropic relations on the rarefaction side), started from
the two-rarefaction estimate; a bracketed Brent solve takes over whenever an
iterate leaves the positive axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Tuple

import numpy as np
from scipy.optimize import brentq

from .diagnostics import ProfileTable
from .errors import NoConvergence, VacuumGenerated

NEWTON_TOL = 1e-12
MAX_ITER = 100


@dataclass(frozen=True)
class PrimitiveState:
    rho: float
    u: float
    p: float

    def __post_init__(self) -> None:
        if not (self.rho > 0.0 and self.p > 0.0):
            raise ValueError(
                f"[lbshock] primitive state needs rho > 0 and p > 0, got "
                f"rho={self.rho}, p={self.p}"
            )

    def sound_speed(self, gamma: float) -> float:
        return math.sqrt(gamma * self.p / self.rho)

    def conserved(self, gamma: float) -> Tuple[float, float, float]:
        energy = 0.5 * self.rho * self.u * self.u + self.p / (gamma - 1.0)
        return self.rho, self.rho * self.u, energy

    def flux(self, gamma: float) -> Tuple[float, float, float]:
        _, mom, energy = self.conserved(gamma)
        return mom, mom * self.u + self.p, self.u * (energy + self.p)


SOD_LEFT = PrimitiveState(rho=1.0, u=0.0, p=1.0)
SOD_RIGHT = PrimitiveState(rho=0.125, u=0.0, p=0.1)


@dataclass(frozen=True)
class RiemannSolution:
    left: PrimitiveState
    right: PrimitiveState
    gamma: float
    p_star: float
    u_star: float
    wave_types: Tuple[str, str]
    wave_speeds: Mapping[str, Dict[str, float]] = field(default_factory=dict)
    iterations: int = 0

    def star_density(self, side: str) -> float:
        state = self.left if side == "left" else self.right
        g = self.gamma
        ratio = self.p_star / state.p
        wave = self.wave_types[0 if side == "left" else 1]
        if wave == "shock":
            mu = (g - 1.0) / (g + 1.0)
            return state.rho * (ratio + mu) / (mu * ratio + 1.0)
        return state.rho * ratio ** (1.0 / g)

    def star_state(self, side: str) -> PrimitiveState:
        return PrimitiveState(self.star_density(side), self.u_star, self.p_star)

    def wave_positions(self, x0: float, t: float) -> Dict[str, float]:
        """Lattice positions of every wave front at time t."""
        positions: Dict[str, float] = {}
        for side in ("left", "right"):
            for name, speed in self.wave_speeds[side].items():
                positions[f"{side}_{name}"] = x0 + speed * t
        positions["contact"] = x0 + self.u_star * t
        return positions


def _pressure_branch(
    p: float, state: PrimitiveState, gamma: float
) -> Tuple[float, float]:
    """f_K(p) and its derivative for one side of the tube."""
    a = state.sound_speed(gamma)
    if p <= state.p:
        ratio = p / state.p
        value = 2.0 * a / (gamma - 1.0) * (ratio ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)
        deriv = ratio ** (-(gamma + 1.0) / (2.0 * gamma)) / (state.rho * a)
        return value, deriv
    big_a = 2.0 / ((gamma + 1.0) * state.rho)
    big_b = (gamma - 1.0) / (gamma + 1.0) * state.p
    root = math.sqrt(big_a / (p + big_b))
    return (p - state.p) * root, (1.0 - 0.5 * (p - state.p) / (p + big_b)) * root


def pressure_function(
    p: float, left: PrimitiveState, right: PrimitiveState, gamma: float
) -> float:
    f_l, _ = _pressure_branch(p, left, gamma)
    f_r, _ = _pressure_branch(p, right, gamma)
    return f_l + f_r + (right.u - left.u)


def _two_rarefaction_guess(
    left: PrimitiveState, right: PrimitiveState, gamma: float
) -> float:
    z = (gamma - 1.0) / (2.0 * gamma)
    a_l = left.sound_speed(gamma)
    a_r = right.sound_speed(gamma)
    num = a_l + a_r - 0.5 * (gamma - 1.0) * (right.u - left.u)
    den = a_l / left.p**z + a_r / right.p**z
    return max(num / den, 0.0) ** (1.0 / z)


def _bracketed(left: PrimitiveState, right: PrimitiveState, gamma: float) -> float:
    lo = 1e-14 * min(left.p, right.p)
    hi = max(left.p, right.p)
    while pressure_function(hi, left, right, gamma) < 0.0:
        hi *= 2.0
    return brentq(
        pressure_function,
        lo,
        hi,
        args=(left, right, gamma),
        xtol=1e-300,
        rtol=4.0 * np.finfo(float).eps,
        maxiter=MAX_ITER * 10,
    )


def solve_star(
    left: PrimitiveState,
    right: PrimitiveState,
    gamma: float,
    tol: float = NEWTON_TOL,
    max_iter: int = MAX_ITER,
) -> RiemannSolution:
    a_l = left.sound_speed(gamma)
    a_r = right.sound_speed(gamma)
    if 2.0 / (gamma - 1.0) * (a_l + a_r) <= right.u - left.u:
        raise VacuumGenerated(
            f"[lbshock] initial states generate vacuum: "
            f"2(a_L + a_R)/(gamma - 1) = {2.0 / (gamma - 1.0) * (a_l + a_r):.6g} "
            f"<= u_R - u_L = {right.u - left.u:.6g}"
        )

    p = _two_rarefaction_guess(left, right, gamma)
    if not p > 0.0:
        p = _bracketed(left, right, gamma)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        f_l, df_l = _pressure_branch(p, left, gamma)
        f_r, df_r = _pressure_branch(p, right, gamma)
        residual = f_l + f_r + (right.u - left.u)
        p_new = p - residual / (df_l + df_r)
        if not (p_new > 0.0 and math.isfinite(p_new)):
            p = _bracketed(left, right, gamma)
            break
        change = 2.0 * abs(p_new - p) / (p_new + p)
        p = p_new
        if change < tol:
            break
    else:
        raise NoConvergence(
            f"[lbshock] star pressure did not converge in {max_iter} iterations (p={p:.6g})"
        )

    f_l, _ = _pressure_branch(p, left, gamma)
    f_r, _ = _pressure_branch(p, right, gamma)
    u = 0.5 * (left.u + right.u) + 0.5 * (f_r - f_l)

    speeds: Dict[str, Dict[str, float]] = {}
    types = []
    for side, state, sign in (("left", left, -1.0), ("right", right, 1.0)):
        a = state.sound_speed(gamma)
        if p > state.p:
            ratio = p / state.p
            shock = state.u + sign * a * math.sqrt(
                (gamma + 1.0) / (2.0 * gamma) * ratio + (gamma - 1.0) / (2.0 * gamma)
            )
            speeds[side] = {"shock": shock}
            types.append("shock")
        else:
            a_star = a * (p / state.p) ** ((gamma - 1.0) / (2.0 * gamma))
            speeds[side] = {"head": state.u + sign * a, "tail": u + sign * a_star}
            types.append("rarefaction")

    return RiemannSolution(
        left=left,
        right=right,
        gamma=gamma,
        p_star=p,
        u_star=u,
        wave_types=(types[0], types[1]),
        wave_speeds=speeds,
        iterations=iterations,
    )


def sample(sol: RiemannSolution, xi: float) -> PrimitiveState:
    """Exact state travelling at similarity speed xi = x / t."""
    g = sol.gamma
    if xi <= sol.u_star:
        state, sign, side = sol.left, 1.0, "left"
    else:
        state, sign, side = sol.right, -1.0, "right"
    speeds = sol.wave_speeds[side]

    if "shock" in speeds:
        ahead = xi <= speeds["shock"] if side == "left" else xi >= speeds["shock"]
        return state if ahead else sol.star_state(side)

    head, tail = speeds["head"], speeds["tail"]
    if (side == "left" and xi <= head) or (side == "right" and xi >= head):
        return state
    if (side == "left" and xi > tail) or (side == "right" and xi < tail):
        return sol.star_state(side)

    a = state.sound_speed(g)
    # inside the fan: isentropic similarity relations
    c = 2.0 / (g + 1.0) * (a + sign * 0.5 * (g - 1.0) * (state.u - xi))
    u = 2.0 / (g + 1.0) * (sign * a + 0.5 * (g - 1.0) * state.u + xi)
    rho = state.rho * (c / a) ** (2.0 / (g - 1.0))
    p = state.p * (c / a) ** (2.0 * g / (g - 1.0))
    return PrimitiveState(rho=rho, u=u, p=p)


def pressure_residual(sol: RiemannSolution) -> float:
    return abs(pressure_function(sol.p_star, sol.left, sol.right, sol.gamma))


def rankine_hugoniot_residuals(
    sol: RiemannSolution, side: str
) -> Tuple[float, float, float]:
    """Flux-jump residuals F(U*) - F(U) - S (U* - U) across a shock."""
    speed = sol.wave_speeds[side].get("shock")
    if speed is None:
        raise ValueError(f"[lbshock] the {side} wave is not a shock")
    ahead = sol.left if side == "left" else sol.right
    behind = sol.star_state(side)
    u_a = ahead.conserved(sol.gamma)
    u_b = behind.conserved(sol.gamma)
    f_a = ahead.flux(sol.gamma)
    f_b = behind.flux(sol.gamma)
    return tuple(
        abs(fb - fa - speed * (ub - ua)) for fa, fb, ua, ub in zip(f_a, f_b, u_a, u_b)
    )


def sod_profile(
    nx: int,
    x0: float,
    t: float,
    left: PrimitiveState = SOD_LEFT,
    right: PrimitiveState = SOD_RIGHT,
    gamma: float = 1.4,
) -> ProfileTable:
    """Exact profile sampled at node centres x = 0.5, 1.5, ..., nx - 0.5."""
    if t < 0.0:
        raise ValueError(f"[lbshock] sampling time must be >= 0, got {t}")
    if not (0.0 < x0 < nx):
        raise ValueError(f"[lbshock] diaphragm x0={x0} outside (0, {nx})")
    x = np.arange(nx, dtype=np.float64) + 0.5
    if t == 0.0:
        states = [left if xi < x0 else right for xi in x]
    else:
        sol = solve_star(left, right, gamma)
        states = [sample(sol, (xi - x0) / t) for xi in x]
    rho = np.array([s.rho for s in states])
    u = np.array([s.u for s in states])
    p = np.array([s.p for s in states])
    return ProfileTable.from_columns(
        x=x, rho=rho, u=u, e=p / ((gamma - 1.0) * rho), p=p
    )


__all__ = [
    "MAX_ITER",
    "NEWTON_TOL",
    "PrimitiveState",
    "RiemannSolution",
    "SOD_LEFT",
    "SOD_RIGHT",
    "pressure_function",
    "pressure_residual",
    "rankine_hugoniot_residuals",
    "sample",
    "solve_star",
    "sod_profile",
]
