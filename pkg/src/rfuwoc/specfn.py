"""Complex Gamma helpers and Mellin-Barnes evaluation of Fox H-functions.

Conventions. The univariate H-function is

    H^{m,n}_{p,q}[z] = 1/(2 pi i) * int_L chi(s) z^{-s} ds,

    chi(s) = prod_{j<m} G(b_j + B_j s) prod_{j<n} G(1 - a_j - A_j s)
             / (prod_{j>=m} G(1 - b_j - B_j s) prod_{j>=n} G(a_j + A_j s)),

with ``L`` the vertical line Re(s) = c separating the poles of the two
numerator groups. The bivariate function uses the same kernel in each
variable plus outer factors coupling both variables:

    outer numerator   G(1 - a - A_x s - A_y t)        (first ``n`` upper triples)
    outer denominator G(a + A_x s + A_y t)            (remaining upper triples)
                      G(1 - b - B_x s - B_y t)        (all lower triples)

and integrand ``x^{-s} y^{-t}``.

All Gamma products are formed as exp(sum of log-Gammas) to avoid overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from rfuwoc.quadrature import integrate

__all__ = [
    "ContourInfeasible",
    "NotConverged",
    "FoxHParams",
    "BivarFoxHParams",
    "ContourSpec",
    "FoxHInfo",
    "ln_gamma_complex",
    "upper_incomplete_gamma",
    "fox_h",
    "fox_h_bivariate",
]


class ContourInfeasible(ValueError):
    """No vertical contour separates the two pole families."""


class NotConverged(RuntimeError):
    """Quadrature budget exhausted; carries the best estimate."""

    def __init__(self, message, estimate=float("nan"), est_error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.est_error = est_error


def ln_gamma_complex(z):
    """Principal-branch log-Gamma of a complex argument."""
    z = complex(z)
    k = round(z.real)
    if k <= 0 and abs(z - k) < 1e-12:
        raise ValueError(f"ln_gamma_complex: pole of Gamma at z={z}")
    return complex(special.loggamma(z))


def upper_incomplete_gamma(a, x):
    """Non-regularised upper incomplete Gamma function Gamma(a, x)."""
    if not a > 0:
        raise ValueError(f"upper_incomplete_gamma requires a > 0, got a={a}")
    if x < 0:
        raise ValueError(f"upper_incomplete_gamma requires x >= 0, got x={x}")
    if x == 0:
        return math.gamma(a) if a < 171 else math.inf
    q = special.gammaincc(a, x)
    if q == 0.0:
        return 0.0
    return math.exp(math.log(q) + special.gammaln(a))


def _loggamma(z):
    return special.loggamma(z)


def _loggamma_den(z):
    # 1/Gamma vanishes at the poles of Gamma; map those to log(0).
    out = special.loggamma(z)
    bad = ~np.isfinite(out)
    if np.any(bad):
        out = np.where(bad, complex(np.inf, 0.0), out)
    return out


def _pairs(seq):
    return tuple((float(a), float(b)) for a, b in seq)


@dataclass(frozen=True)
class FoxHParams:
    """Orders and coefficient groups of a univariate H-function."""

    m: int
    n: int
    upper: tuple = ()
    lower: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "upper", _pairs(self.upper))
        object.__setattr__(self, "lower", _pairs(self.lower))
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise ValueError(f"invalid orders m={self.m}, n={self.n}, p={self.p}, q={self.q}")
        for a, big_a in self.upper + self.lower:
            if not big_a > 0:
                raise ValueError(f"H-function weights must be positive, got {big_a}")

    @property
    def p(self):
        return len(self.upper)

    @property
    def q(self):
        return len(self.lower)

    def pole_gap(self):
        """(rightmost left-pole, leftmost right-pole) on the real axis."""
        left = max((-b / big_b for b, big_b in self.lower[: self.m]), default=-math.inf)
        right = min(((1 - a) / big_a for a, big_a in self.upper[: self.n]), default=math.inf)
        return left, right

    def log_kernel(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.zeros_like(s)
        for j, (b, big_b) in enumerate(self.lower):
            if j < self.m:
                out = out + _loggamma(b + big_b * s)
            else:
                out = out - _loggamma_den(1 - b - big_b * s)
        for j, (a, big_a) in enumerate(self.upper):
            if j < self.n:
                out = out + _loggamma(1 - a - big_a * s)
            else:
                out = out - _loggamma_den(a + big_a * s)
        return out


@dataclass(frozen=True)
class BivarFoxHParams:
    """Coefficient groups of a bivariate H-function.

    ``outer_upper`` holds triples ``(a, A_x, A_y)``; the first ``outer_n`` sit
    in the numerator. ``outer_lower`` triples are all in the denominator.
    ``x`` and ``y`` are the univariate kernels of each variable.
    """

    outer_n: int
    outer_upper: tuple
    outer_lower: tuple
    x: FoxHParams
    y: FoxHParams

    def __post_init__(self):
        up = tuple(tuple(map(float, t)) for t in self.outer_upper)
        low = tuple(tuple(map(float, t)) for t in self.outer_lower)
        object.__setattr__(self, "outer_upper", up)
        object.__setattr__(self, "outer_lower", low)
        if not 0 <= self.outer_n <= len(up):
            raise ValueError(f"invalid outer order n={self.outer_n}")
        for t in up + low:
            if len(t) != 3 or not (t[1] > 0 and t[2] > 0):
                raise ValueError(f"outer triples need positive weights, got {t}")

    def constraints(self):
        """Linear constraints ``g0 + gx*sigma + gy*tau > 0`` on the contour."""
        rows = []
        for b, big_b in self.x.lower[: self.x.m]:
            rows.append((b, big_b, 0.0))
        for a, big_a in self.x.upper[: self.x.n]:
            rows.append((1 - a, -big_a, 0.0))
        for b, big_b in self.y.lower[: self.y.m]:
            rows.append((b, 0.0, big_b))
        for a, big_a in self.y.upper[: self.y.n]:
            rows.append((1 - a, 0.0, -big_a))
        for a, ax, ay in self.outer_upper[: self.outer_n]:
            rows.append((1 - a, -ax, -ay))
        return np.array(rows, dtype=float).reshape(-1, 3)

    def log_outer(self, s, t):
        out = np.zeros(np.broadcast(s, t).shape, dtype=complex)
        for j, (a, ax, ay) in enumerate(self.outer_upper):
            if j < self.outer_n:
                out = out + _loggamma(1 - a - ax * s - ay * t)
            else:
                out = out - _loggamma_den(a + ax * s + ay * t)
        for b, bx, by in self.outer_lower:
            out = out - _loggamma_den(1 - b - bx * s - by * t)
        return out


@dataclass(frozen=True)
class ContourSpec:
    """Placement and accuracy controls for one Mellin-Barnes line.

    ``real_part=None`` places the line automatically at the minimum of the
    integrand modulus on the real axis inside the feasible strip.
    """

    real_part: float | None = None
    half_height: float = 40.0
    rel_tol: float = 1e-10
    max_nodes: int = 400_000
    abs_tol: float = 0.0

    def __post_init__(self):
        if not (0 < self.rel_tol < 1):
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if not (0 < self.half_height < math.inf):
            raise ValueError(f"half_height must be finite and positive, got {self.half_height}")
        if self.max_nodes <= 0:
            raise ValueError("max_nodes must be positive")


@dataclass
class FoxHInfo:
    value: float
    imag: float
    est_error: float
    contour: tuple
    half_height: float
    nodes: int
    converged: bool
    extra: dict = field(default_factory=dict)


_MAX_HALF_HEIGHT = 5000.0
_ROUNDOFF = 64 * np.finfo(float).eps


def _breakpoints(half_height, fine=0.25):
    """Symmetric partition of [-T, T], fine near the origin, geometric outside."""
    pos = [0.0, fine]
    while pos[-1] * 2 < half_height:
        pos.append(pos[-1] * 2)
    pos.append(half_height)
    pos = np.array(pos)
    return np.concatenate([-pos[:0:-1], pos])


def _extension(t_old, t_new, panels=8):
    right = np.linspace(t_old, t_new, panels + 1)
    return -right[::-1], right


def _line_integral(g, half_height, tol, max_nodes):
    """Integrate ``g(u)`` over the real line by growing a truncated window.

    ``g`` maps an array of ``u`` to values of shape ``(..., len(u))``. The
    window doubles until the tail estimate ``|g(+-T)| * T`` falls under a tenth
    of the error target.
    """
    t = float(half_height)
    res = integrate(g, _breakpoints(t), tol, max_nodes=max_nodes)
    value, err, mass, nodes, ok = res.value, res.error, res.abs_mass, res.nodes, res.converged
    while True:
        edge = np.abs(np.asarray(g(np.array([-t, t]))))
        tail = edge.max(axis=-1) * t
        target = np.asarray(tol(value, mass))
        if np.all(tail <= 0.1 * target) or not ok:
            return value, err + tail, mass, nodes, ok, t
        if 2 * t > _MAX_HALF_HEIGHT:
            return value, err + tail, mass, nodes, False, t
        left, right = _extension(t, 2 * t)
        for bp in (left, right):
            r = integrate(g, bp, lambda v, m: 0.05 * np.asarray(tol(value, mass)),
                          max_nodes=max(max_nodes - nodes, 30))
            value = value + r.value
            err = err + r.error
            mass = mass + r.abs_mass
            nodes += r.nodes
            ok = ok and r.converged
        t *= 2


def _auto_real_part(log_real, left, right, span=60.0, max_span=1e6):
    """Minimise the real-axis log-integrand over the open interval (left, right).

    An unbounded side is truncated at ``span`` from the other end and widened
    while the minimum sits on that artificial edge.
    """
    open_left, open_right = math.isinf(left), math.isinf(right)
    while True:
        lo_end = -span / 2 if open_left and open_right else (right - span if open_left else left)
        hi_end = span / 2 if open_left and open_right else (left + span if open_right else right)
        c, at_edge = _minimise_on(log_real, lo_end, hi_end)
        widen = (at_edge == "left" and open_left) or (at_edge == "right" and open_right)
        if not widen or span >= max_span:
            return c
        span *= 4


def _minimise_on(log_real, left, right):
    width = right - left
    grid = left + width * np.linspace(0.002, 0.998, 400)
    vals = np.real(log_real(grid))
    vals = np.where(np.isfinite(vals), vals, np.inf)
    i = int(np.argmin(vals))
    if not np.isfinite(vals[i]):
        return left + 0.5 * width, None
    edge = "left" if i == 0 else ("right" if i == grid.size - 1 else None)
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    if hi - lo <= 0:
        return float(grid[i]), edge
    res = optimize.minimize_scalar(
        lambda c: float(np.real(log_real(np.array([c]))[0])), bounds=(lo, hi),
        method="bounded", options={"xatol": 1e-6 * max(width, 1.0)},
    )
    return (float(res.x) if res.fun <= vals[i] else float(grid[i])), edge


def _univariate_contour(params, log_z, contour):
    left, right = params.pole_gap()
    if not left < right:
        raise ContourInfeasible(
            f"poles overlap: rightmost left pole {left} >= leftmost right pole {right}")
    if contour.real_part is not None:
        c = float(contour.real_part)
        if not left < c < right:
            raise ContourInfeasible(f"contour Re(s)={c} outside the feasible strip ({left}, {right})")
        return c
    return _auto_real_part(lambda s: params.log_kernel(s) - s * log_z, left, right)


def _check_z(z, name="z"):
    if not (z > 0 and math.isfinite(z)):
        raise ValueError(f"{name} must be positive and finite, got {z}")


def fox_h(params, z, contour=None, full_output=False):
    """Univariate Fox H-function H^{m,n}_{p,q}[z] for real z > 0.

    Raises ``ContourInfeasible`` when the pole families overlap and
    ``NotConverged`` (with the best estimate attached) when the node budget is
    spent before the error estimate meets ``contour.rel_tol``.
    """
    contour = contour or ContourSpec()
    _check_z(z)
    log_z = math.log(z)
    c = _univariate_contour(params, log_z, contour)

    def g(u):
        s = c + 1j * u
        return np.exp(params.log_kernel(s) - s * log_z) / (2 * math.pi)

    def tol(value, mass):
        return np.maximum(np.maximum(contour.rel_tol * np.abs(value), contour.abs_tol),
                          _ROUNDOFF * mass)

    value, err, mass, nodes, ok, t = _line_integral(g, contour.half_height, tol, contour.max_nodes)
    value = complex(value)
    info = FoxHInfo(value.real, value.imag, float(err), (c,), t, nodes, ok)
    if not ok:
        raise NotConverged(
            f"fox_h did not converge within {contour.max_nodes} nodes (z={z})",
            value.real, float(err))
    return info if full_output else value.real


def _bivariate_contour(params, log_x, log_y, cx, cy):
    cons = params.constraints()
    fixed = (cx.real_part, cy.real_part)
    if fixed[0] is not None and fixed[1] is not None:
        pt = np.array(fixed, dtype=float)
        if np.any(cons[:, 0] + cons[:, 1:] @ pt <= 0):
            raise ContourInfeasible(f"contour {tuple(pt)} violates pole separation")
        return pt
    # Chebyshev centre of the feasible polygon, boxed to keep it bounded.
    box = 30.0
    rows = np.vstack([cons, [[box, 1, 0], [box, -1, 0], [box, 0, 1], [box, 0, -1]]])
    for k, v in enumerate(fixed):
        if v is not None:
            e = np.zeros(2)
            e[k] = 1
            rows = np.vstack([rows, [[-v + 1e-9, *e], [v + 1e-9, *(-e)]]])
    norms = np.linalg.norm(rows[:, 1:], axis=1)
    norms[norms == 0] = 1.0
    # maximise r subject to g0 + g.x >= r*|g|
    lp = optimize.linprog(
        c=[0, 0, -1], A_ub=np.column_stack([-rows[:, 1:], norms]), b_ub=rows[:, 0],
        bounds=[(None, None), (None, None), (0, None)], method="highs")
    if lp.status != 0 or lp.x[2] <= 1e-12:
        raise ContourInfeasible("no contour pair separates the poles of the bivariate kernel")
    start = lp.x[:2]

    def obj(p):
        sig, tau = p
        if np.any(cons[:, 0] + cons[:, 1:] @ p <= 0):
            return np.inf
        val = (params.log_outer(sig, tau) + params.x.log_kernel(sig) + params.y.log_kernel(tau)
               - sig * log_x - tau * log_y)
        v = float(np.real(val))
        return v if np.isfinite(v) else np.inf

    free = [k for k in range(2) if fixed[k] is None]

    def sub(q):
        p = start.copy()
        p[free] = q
        return obj(p)

    res = optimize.minimize(sub, start[free], method="Nelder-Mead",
                            options={"xatol": 1e-7, "fatol": 1e-10, "maxiter": 2000})
    best = start.copy()
    if np.isfinite(res.fun) and res.fun <= sub(start[free]):
        best[free] = res.x
    for k in range(2):
        if fixed[k] is not None:
            best[k] = fixed[k]
    return best


def fox_h_bivariate(params, x, y, contour_x=None, contour_y=None, full_output=False):
    """Bivariate Fox H-function by nested Mellin-Barnes quadrature.

    The outer integral runs over ``s`` (argument ``x``); for every batch of
    outer nodes the inner ``t`` integrals share one adaptive panel partition.
    """
    contour_x = contour_x or ContourSpec(rel_tol=1e-8)
    contour_y = contour_y or ContourSpec(rel_tol=1e-8)
    _check_z(x, "x")
    _check_z(y, "y")
    log_x, log_y = math.log(x), math.log(y)
    sig, tau = _bivariate_contour(params, log_x, log_y, contour_x, contour_y)
    stats = {"inner_nodes": 0, "inner_ok": True}

    def inner(s):
        def h(v):
            t = tau + 1j * v
            lg = (params.log_outer(s[:, None], t[None, :]) + params.y.log_kernel(t)[None, :]
                  - t[None, :] * log_y)
            return np.exp(lg) / (2 * math.pi)

        def tol(value, mass):
            scale = np.maximum(np.abs(value), 1e-3 * np.max(np.abs(value)))
            return np.maximum(np.maximum(contour_y.rel_tol * scale, contour_y.abs_tol),
                              _ROUNDOFF * mass)

        value, err, _, nodes, ok, _ = _line_integral(h, contour_y.half_height, tol,
                                                     contour_y.max_nodes * max(len(s), 1))
        stats["inner_nodes"] += nodes
        stats["inner_ok"] = stats["inner_ok"] and ok
        return value, err

    def g(u):
        # Row 0 integrates the kernel, row 1 the propagated inner error.
        s = sig + 1j * u
        val, err = inner(s)
        w = np.exp(params.x.log_kernel(s) - s * log_x) / (2 * math.pi)
        return np.stack([w * val, np.abs(w) * err])

    def tol(value, mass):
        target = np.maximum(np.maximum(contour_x.rel_tol * np.abs(value[0]), contour_x.abs_tol),
                            _ROUNDOFF * mass[0])
        return np.array([target, np.inf])

    value, err, mass, nodes, ok, t = _line_integral(g, contour_x.half_height, tol,
                                                    contour_x.max_nodes)
    total = complex(value[0])
    est = float(err[0] + abs(value[1]))
    ok = ok and stats["inner_ok"]
    info = FoxHInfo(total.real, total.imag, est, (float(sig), float(tau)),
                    t, nodes + stats["inner_nodes"], ok, {"outer_nodes": nodes})
    if not ok:
        raise NotConverged("fox_h_bivariate did not converge within the node budget",
                           total.real, est)
    return info if full_output else total.real
