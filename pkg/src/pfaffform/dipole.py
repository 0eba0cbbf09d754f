"""Numerical integral of the dipole's Pfaffian form over positive parameters.

The form is restricted to the chart a_{2i+1} = 1, so only the coefficient of
da_1 ^ ... ^ da_{2i} survives.  Each remaining a_k runs over (0, inf) and is
mapped to (0, 1) by a = t / (1 - t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .engine import dipole_basis, phi_form
from .graph import dipole
from .poly import MultiPoly

DEFAULT_TOL = {"quadrature": 1e-3, "monte_carlo": 2e-2}
DEFAULT_BUDGET = {"quadrature": 200_000, "monte_carlo": 10_000_000}
MC_CHUNK = 500_000


class BudgetExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class DipoleIntegral:
    i: int
    scheme: str
    estimate: float
    error: float
    evaluations: int

    def to_json(self) -> dict:
        return {"i": self.i, "scheme": self.scheme, "estimate": self.estimate,
                "error": self.error, "evaluations": self.evaluations}


@dataclass(frozen=True)
class ChartIntegrand:
    """``const * num(a) / psi(a)^(k/2)`` on the chart a_{2i+1} = 1."""

    dim: int
    const: float
    num: MultiPoly
    psi: MultiPoly
    psi_half: int

    def __call__(self, a):
        """``a``: array of shape (dim, ...)."""
        vals = list(a) + [1.0]
        return self.const * self.num.evaluate(vals) / self.psi.evaluate(vals) ** (self.psi_half / 2)


def chart_integrand(i: int) -> ChartIntegrand:
    m = 2 * i + 1
    g = dipole(m)
    phi = phi_form(g, dipole_basis(i))
    top = tuple(range(1, m))
    coeff = phi.numerator.coefficient(top)
    const = float(phi.scalar) * math.pi ** phi.pi_power
    return ChartIntegrand(m - 1, const, coeff, phi.psi, phi.psi_half)


def _from_unit(t):
    # a = t / (1 - t) and its Jacobian
    a = t / (1.0 - t)
    return a, 1.0 / (1.0 - t) ** 2


def _quadrature(f: ChartIntegrand, budget: int):
    def g(*ts):
        t = np.asarray(ts[::-1])
        a, jac = _from_unit(t)
        return float(f(a) * np.prod(jac))

    opts = {"limit": max(50, int(budget ** (1 / f.dim))), "epsabs": 1e-6, "epsrel": 1e-6}
    val, err, info = integrate.nquad(g, [(0.0, 1.0)] * f.dim, opts=opts, full_output=True)
    return val, err, info["neval"]


def _smoothstep(u):
    """t = 10u^3 - 15u^4 + 6u^5 flattens both ends, giving the integrand
    finite variance; returns t and dt/du."""
    t = u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    dt = 30.0 * u * u * (1.0 - u) ** 2
    return t, dt


def _monte_carlo(f: ChartIntegrand, budget: int, seed: int):
    rng = np.random.default_rng(seed)
    n = 0
    s1 = s2 = 0.0
    while n < budget:
        k = min(MC_CHUNK, budget - n)
        u = rng.random((f.dim, k))
        t, dt = _smoothstep(u)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            a, jac = _from_unit(t)
            v = f(a) * np.prod(jac * dt, axis=0)
        v = np.where(np.isfinite(v), v, 0.0)
        s1 += float(v.sum())
        s2 += float((v * v).sum())
        n += k
    mean = s1 / n
    stderr = math.sqrt(max(s2 / n - mean * mean, 0.0) / n)
    return mean, stderr, n


def integrate_dipole_numeric(i: int, scheme: str | None = None, budget: int | None = None,
                             tol: float | None = None, seed: int = 0) -> DipoleIntegral:
    """Integral of the dipole's Pfaffian form; the exact value is 1.

    ``scheme`` defaults to quadrature for i = 1 and Monte Carlo otherwise.
    The reported error is the quadrature error bound, or three standard
    errors for Monte Carlo.  Raises BudgetExhausted if it exceeds ``tol``.
    """
    if i < 1:
        raise ValueError("i must be a positive integer")
    scheme = scheme or ("quadrature" if i == 1 else "monte_carlo")
    if scheme not in DEFAULT_TOL:
        raise ValueError(f"unknown scheme {scheme!r}")
    tol = DEFAULT_TOL[scheme] if tol is None else tol
    budget = DEFAULT_BUDGET[scheme] if budget is None else budget
    f = chart_integrand(i)
    if scheme == "quadrature":
        val, err, nev = _quadrature(f, budget)
        if nev > budget:
            raise BudgetExhausted(f"quadrature used {nev} evaluations, budget {budget}")
    else:
        val, stderr, nev = _monte_carlo(f, budget, seed)
        err = 3 * stderr
    if not err <= tol:
        raise BudgetExhausted(f"error estimate {err:.3g} above tolerance {tol:.3g} after {nev} evaluations")
    return DipoleIntegral(i, scheme, val, err, nev)


def positive_on_samples(i: int, count: int = 1000, seed: int = 0) -> bool:
    """The chart integrand is positive at random positive points."""
    f = chart_integrand(i)
    rng = np.random.default_rng(seed)
    a = rng.exponential(1.0, size=(f.dim, count))
    return bool(np.all(f(a) > 0))
