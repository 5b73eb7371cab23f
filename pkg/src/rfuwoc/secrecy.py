"""Secrecy outage probability (lower bound) of the DF-relayed RF/UWOC link.

With theta = 2^R_s the outage lower bound is

    SOP = int_0^inf F_eq(theta g) f_e(g) dg = 1 + K_gg + K_exp,

    F_eq(g) = 1 - Fbar_1(g) Fbar_2(g)                       (DF relay: min of hops)
    K_gg  = -(1-omega)/Gamma(a) E_e[Fbar_1(theta g) Gamma(a, b^-c (theta g/mu_r)^(c/r))]
    K_exp = -omega E_e[Fbar_1(theta g) exp(-(theta g/mu_r)^(1/r) / lambda)]

``K_gg`` is the generalised-Gamma branch of the optical hop, ``K_exp`` the
exponential branch. Every route below (closed form, quadrature, asymptotics)
evaluates the same two terms.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, special

from rfuwoc.channels import AlphaMuLink, EggLink, alpha_mu_ccdf, egg_snr_ccdf
from rfuwoc.specfn import BivarFoxHParams, ContourSpec, FoxHParams, NotConverged, fox_h, fox_h_bivariate


class NoSaturationOnGrid(RuntimeError):
    pass


class Method(enum.Enum):
    EXACT = "exact"
    ORACLE = "oracle"
    ASYMPTOTIC_MAIN = "asymptotic_main"
    ASYMPTOTIC_EVE = "asymptotic_eve"
    SATURATION = "saturation"


@dataclass(frozen=True)
class SecrecyScenario:
    main_rf: AlphaMuLink
    eavesdropper_rf: AlphaMuLink
    uwoc: EggLink
    rate_s: float

    def __post_init__(self):
        if not (self.rate_s >= 0 and math.isfinite(self.rate_s)):
            raise ValueError(f"rate_s must be a finite non-negative rate, got {self.rate_s}")

    @property
    def theta(self):
        return 2.0 ** self.rate_s

    def with_main_snr(self, mean_snr):
        return replace(self, main_rf=self.main_rf.with_mean_snr(mean_snr))

    def with_eve_snr(self, mean_snr):
        return replace(self, eavesdropper_rf=self.eavesdropper_rf.with_mean_snr(mean_snr))


@dataclass(frozen=True)
class SopResult:
    value: float
    method: Method
    est_error: float
    raw: float | None = None
    terms: tuple = ()


def end_to_end_cdf(s, snr):
    """CDF of min(g1, g2): 1 - Fbar_1 Fbar_2."""
    if np.any(np.asarray(snr) < 0):
        raise ValueError("end_to_end_cdf requires snr >= 0")
    return 1.0 - alpha_mu_ccdf(s.main_rf, snr) * egg_snr_ccdf(s.uwoc, snr)


def end_to_end_cdf_hform(s, snr, contour=None):
    """Same CDF with the RF factor taken through H^{2,0}_{1,2}[(1,1); (0,1),(mu,1/alpha)]."""
    m, u = s.main_rf, s.uwoc
    if snr == 0:
        return 0.0
    h = fox_h(FoxHParams(2, 0, [(1, 1)], [(0, 1), (m.mu, 1 / m.alpha)]), snr * m.inv_scale, contour)
    pref = m.kappa / m.inv_scale
    ex = math.exp(-((snr / u.mu_r) ** (1 / u.r)) / u.lambda_exp)
    gg = special.gammaincc(u.a, (snr / u.mu_r) ** (u.c / u.r) / u.b ** u.c)
    return 1.0 + pref * (u.omega - 1) * gg * h - pref * u.omega * ex * h


# ---------------------------------------------------------------- closed form

def _kernel_rf(link):
    return FoxHParams(2, 0, [(1, 1)], [(0, 1), (link.mu, 1 / link.alpha)])


def k_gg_bivariate(s):
    """(prefactor, params, x, y) with K_gg = prefactor * H[x, y]."""
    m, e, u = s.main_rf, s.eavesdropper_rf, s.uwoc
    th, r = s.theta, u.r
    log_pref = -(special.gammaln(m.mu) + special.gammaln(u.a) + special.gammaln(e.mu))
    pref = -(1 - u.omega) * math.exp(log_pref)
    params = BivarFoxHParams(
        outer_n=1,
        outer_upper=[(1 - e.mu, u.c / (r * e.alpha), 1 / e.alpha)],
        outer_lower=[],
        x=FoxHParams(2, 0, [(1, 1)], [(0, 1), (u.a, 1)]),
        y=_kernel_rf(m),
    )
    x = math.exp(-u.c * math.log(u.b) + (u.c / r) * math.log(th / (e.inv_scale * u.mu_r)))
    y = th * m.inv_scale / e.inv_scale
    return pref, params, x, y


def k_exp_bivariate(s):
    """(prefactor, params, x, y) with K_exp = prefactor * H[x, y]."""
    m, e, u = s.main_rf, s.eavesdropper_rf, s.uwoc
    th, r = s.theta, u.r
    p = e.alpha * e.mu
    x = u.lambda_exp ** r * e.inv_scale * u.mu_r / th
    log_pref = math.log(r) - special.gammaln(m.mu) - special.gammaln(e.mu) + p * math.log(x)
    pref = -u.omega * math.exp(log_pref)
    params = BivarFoxHParams(
        outer_n=1,
        outer_upper=[(1 - r * p, r, r)],
        outer_lower=[],
        x=FoxHParams(1, 0, [], [(0, 1 / e.alpha)]),
        y=_kernel_rf(m),
    )
    y = u.lambda_exp ** r * m.inv_scale * u.mu_r
    return pref, params, x, y


_DEFAULT_CONTOUR = ContourSpec(rel_tol=1e-8, abs_tol=1e-11)


def _eval_bivariate(builder, s, contours):
    cx, cy = contours if contours is not None else (_DEFAULT_CONTOUR, _DEFAULT_CONTOUR)
    pref, params, x, y = builder(s)
    if pref == 0.0:
        return 0.0, 0.0
    info = fox_h_bivariate(params, x, y, cx, cy, full_output=True)
    return pref * info.value, abs(pref) * info.est_error


def sop_exact(s, contours=None):
    """1 + K_gg + K_exp with both terms from bivariate H-functions.

    The raw sum is clamped to [0, 1] only when the excursion is within the
    propagated error estimate; larger excursions raise ``NotConverged``.
    """
    k_gg, e_gg = _eval_bivariate(k_gg_bivariate, s, contours)
    k_exp, e_exp = _eval_bivariate(k_exp_bivariate, s, contours)
    raw = 1.0 + k_gg + k_exp
    err = e_gg + e_exp
    return _clamped(raw, err, Method.EXACT, (k_gg, k_exp))


def _clamped(raw, err, method, terms):
    slack = err + 1e-12
    if raw < -slack or raw > 1 + slack:
        raise NotConverged(f"{method.value} SOP {raw} outside [0, 1] beyond error {err}", raw, err)
    return SopResult(min(max(raw, 0.0), 1.0), method, err, raw, terms)


# ---------------------------------------------------------------- oracle

def _oracle_terms(s, quad_tol):
    m, e, u = s.main_rf, s.eavesdropper_rf, s.uwoc
    th, r = s.theta, u.r
    mu_e = e.mu
    lg_mu_e = special.gammaln(mu_e)
    # Integrate over t = ln W, W = (Lambda_e g)^alpha_e ~ Gamma(mu_e).
    t_lo = (math.log(1e-17 * mu_e) + lg_mu_e) / mu_e
    t_hi = math.log(special.gammainccinv(mu_e, 1e-17))

    def snr(t):
        return np.exp(t / e.alpha) / e.inv_scale

    def dens(t):
        return np.exp(mu_e * t - np.exp(t) - lg_mu_e)

    def f_gg(t):
        g = th * snr(t)
        return alpha_mu_ccdf(m, g) * special.gammaincc(u.a, (g / (u.b ** r * u.mu_r)) ** (u.c / r)) * dens(t)

    def f_exp(t):
        g = th * snr(t)
        return alpha_mu_ccdf(m, g) * np.exp(-((g / u.mu_r) ** (1 / r)) / u.lambda_exp) * dens(t)

    # Where each factor switches off, in the t variable.
    marks = [
        e.alpha * math.log(e.inv_scale / (m.inv_scale * th)),
        e.alpha * math.log(e.inv_scale * u.lambda_exp ** r * u.mu_r / th),
        e.alpha * math.log(e.inv_scale * u.b ** r * u.mu_r / th),
        0.0,
    ]
    pts = sorted({min(max(p + d, t_lo), t_hi) for p in marks for d in (-2.0, -0.5, 0.0, 0.5, 2.0)})
    pts = [p for p in pts if t_lo < p < t_hi]
    edges = [t_lo, *pts, t_hi]
    out = []
    for f in (f_gg, f_exp):
        total, err = 0.0, 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            v, ev, *_ = integrate.quad(f, lo, hi, epsabs=quad_tol / (20 * len(edges)),
                                       epsrel=1e-12, limit=400, full_output=1)
            total += v
            err += ev
        out.append((total, err))
    (p_gg, e_gg), (p_exp, e_exp) = out
    k_gg = -(1 - u.omega) * p_gg
    k_exp = -u.omega * p_exp
    tails = 2e-17
    return k_gg, k_exp, (1 - u.omega) * e_gg + u.omega * e_exp + tails


def k_terms_oracle(s, quad_tol=1e-9):
    """K_gg and K_exp by direct quadrature of their defining integrals."""
    k_gg, k_exp, err = _oracle_terms(s, quad_tol)
    return k_gg, k_exp, err


def sop_oracle(s, quad_tol=1e-9):
    """SOP lower bound by adaptive quadrature over the eavesdropper SNR."""
    if not 0 < quad_tol <= 1e-3:
        raise ValueError(f"quad_tol must lie in (0, 1e-3], got {quad_tol}")
    k_gg, k_exp, err = _oracle_terms(s, quad_tol)
    if err > quad_tol:
        raise NotConverged(f"oracle quadrature error {err} exceeds {quad_tol}", 1 + k_gg + k_exp, err)
    return _clamped(1.0 + k_gg + k_exp, err, Method.ORACLE, (k_gg, k_exp))


# ---------------------------------------------------------------- asymptotics

def _h(params, z, contour=None):
    info = fox_h(params, z, contour, full_output=True)
    return info.value, info.est_error


def _main_asymptotic_terms(s):
    """((gg_vanishing, gg_floor), (exp_vanishing, exp_floor)) for a strong main link."""
    m, e, u = s.main_rf, s.eavesdropper_rf, s.uwoc
    th, r = s.theta, u.r
    am = m.alpha * m.mu
    y = th * m.inv_scale / e.inv_scale
    x_gg = math.exp(-u.c * math.log(u.b) + (u.c / r) * math.log(th / (e.inv_scale * u.mu_r)))
    x_exp = th / (u.lambda_exp ** r * u.mu_r * e.inv_scale)
    lg = special.gammaln
    w_c = u.c / (r * e.alpha)

    h_floor, er1 = _h(FoxHParams(2, 1, [(1 - e.mu, w_c), (1, 1)], [(0, 1), (u.a, 1)]), x_gg)
    h_van, er2 = _h(FoxHParams(2, 1, [(1 - e.mu - am / e.alpha, w_c), (1, 1)], [(0, 1), (u.a, 1)]), x_gg)
    c_floor = (1 - u.omega) * math.exp(-lg(u.a) - lg(e.mu))
    c_van = (1 - u.omega) * math.exp(am * math.log(y) - lg(m.mu + 1) - lg(u.a) - lg(e.mu))
    gg = (c_van * h_van, -c_floor * h_floor)

    g_floor, er3 = _h(FoxHParams(1, 1, [(1 - e.mu, 1 / e.alpha)], [(0, r)]), x_exp)
    g_van, er4 = _h(FoxHParams(1, 1, [(1 - e.mu - am / e.alpha, 1 / e.alpha)], [(0, r)]), x_exp)
    d_floor = u.omega * r * math.exp(-lg(e.mu))
    d_van = u.omega * r * math.exp(am * math.log(y) - lg(m.mu + 1) - lg(e.mu))
    ex = (d_van * g_van, -d_floor * g_floor)
    err = c_floor * er1 + c_van * er2 + d_floor * er3 + d_van * er4
    return gg, ex, err, y


def sop_asymptotic_main(s):
    """High main-link SNR expansion: floor terms plus the leading (Lambda^(alpha mu)) correction."""
    gg, ex, err, y = _main_asymptotic_terms(s)
    if y >= 1:
        warnings.warn(f"main-link asymptotic used with theta*Lambda/Lambda_e = {y:.3g} >= 1",
                      stacklevel=2)
    raw = 1.0 + sum(gg) + sum(ex)
    return _clamped(raw, err, Method.ASYMPTOTIC_MAIN, (sum(gg), sum(ex)))


def main_asymptotic_terms(s):
    """Split of the main-link expansion into vanishing and floor parts, per branch."""
    gg, ex, _, _ = _main_asymptotic_terms(s)
    return {"gg_vanishing": gg[0], "gg_floor": gg[1], "exp_vanishing": ex[0], "exp_floor": ex[1]}


def sop_saturation(s):
    """SOP floor reached as the main-link SNR grows; contains no main-link SNR."""
    gg, ex, err, _ = _main_asymptotic_terms(s)
    raw = 1.0 + gg[1] + ex[1]
    return _clamped(raw, err, Method.SATURATION, (gg[1], ex[1]))


def sop_asymptotic_eve(s):
    """High eavesdropper-SNR expansion (leading order in Lambda_e)."""
    m, e, u = s.main_rf, s.eavesdropper_rf, s.uwoc
    if e.mean_snr < 1:
        warnings.warn("eavesdropper asymptotic used below 0 dB mean SNR", stacklevel=2)
    th, r = s.theta, u.r
    p = e.alpha * e.mu
    lg = special.gammaln
    big_b = u.b ** r * u.mu_r
    big_c = u.lambda_exp ** r * u.mu_r
    h_gg, er1 = _h(FoxHParams(2, 2, [(1 - p, 1), (1 - u.a - r * p / u.c, r / u.c), (1, 1)],
                              [(0, 1), (m.mu, 1 / m.alpha), (-p, 1)]), m.inv_scale * big_b)
    c_gg = (1 - u.omega) * e.alpha * math.exp(p * math.log(e.inv_scale * big_b / th)
                                             - lg(m.mu) - lg(u.a) - lg(e.mu))
    h_exp, er2 = _h(FoxHParams(2, 1, [(1 - r * p, r), (1, 1)], [(0, 1), (m.mu, 1 / m.alpha)]),
                    m.inv_scale * big_c)
    c_exp = u.omega * r * e.alpha * math.exp(p * math.log(e.inv_scale * big_c / th)
                                            - lg(m.mu) - lg(e.mu))
    k_gg, k_exp = -c_gg * h_gg, -c_exp * h_exp
    err = c_gg * er1 + c_exp * er2
    raw = 1.0 + k_gg + k_exp
    # Leading-order expansions can undershoot zero far from their regime; report, then clamp.
    return SopResult(min(max(raw, 0.0), 1.0), Method.ASYMPTOTIC_EVE, err, raw, (k_gg, k_exp))


# ---------------------------------------------------------------- design

def optimal_transmit_power(s, rel_eps=0.05, grid=None, contours=None):
    """Smallest main-link mean SNR (dB) on ``grid`` whose SOP is within ``rel_eps`` of the floor."""
    if grid is None:
        grid = np.arange(-20.0, 40.0 + 1e-9, 1.0)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be non-empty and strictly ascending")
    if not rel_eps > 0:
        raise ValueError("rel_eps must be positive")
    floor = sop_saturation(s).value
    for g_db in grid:
        v = sop_exact(s.with_main_snr(10.0 ** (g_db / 10.0)), contours).value
        if (v - floor) / floor <= rel_eps:
            return float(g_db)
    raise NoSaturationOnGrid(f"SOP never within {rel_eps:.3g} of the floor {floor:.6g} on the grid")
