"""Fading models for the RF hops (alpha-mu) and the underwater optical hop (EGG).

The alpha-mu links use the mean-true parametrisation

    f(g) = alpha * kappa * (L g)^(alpha mu - 1) * exp(-(L g)^alpha),
    beta = Gamma(mu + 1/alpha) / Gamma(mu),  L = beta / mean_snr,  kappa = L / Gamma(mu),

so that ``(L g)^alpha`` is a unit-scale Gamma(mu) variate and E[g] = mean_snr.
All SNRs here are linear; dB conversion happens at the CLI boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from rfuwoc.specfn import FoxHParams, fox_h


@dataclass(frozen=True)
class AlphaMuLink:
    alpha: float
    mu: float
    mean_snr: float

    def __post_init__(self):
        for name in ("alpha", "mu", "mean_snr"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"AlphaMuLink.{name} must be positive and finite, got {v}")

    @property
    def beta(self):
        return math.exp(special.gammaln(self.mu + 1 / self.alpha) - special.gammaln(self.mu))

    @property
    def inv_scale(self):
        """Lambda = beta / mean_snr; (Lambda * snr)^alpha is Gamma(mu)-distributed."""
        return self.beta / self.mean_snr

    @property
    def kappa(self):
        return self.inv_scale / math.gamma(self.mu)

    def with_mean_snr(self, mean_snr):
        return AlphaMuLink(self.alpha, self.mu, mean_snr)


@dataclass(frozen=True)
class EggLink:
    """Exponential / generalised-Gamma irradiance mixture seen through detector exponent ``r``."""

    omega: float
    lambda_exp: float
    a: float
    b: float
    c: float
    r: int = 2
    mu_r: float = 1.0

    def __post_init__(self):
        if not 0 <= self.omega <= 1:
            raise ValueError(f"EggLink.omega must lie in [0, 1], got {self.omega}")
        for name in ("lambda_exp", "a", "b", "c", "mu_r"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"EggLink.{name} must be positive and finite, got {v}")
        if self.r not in (1, 2):
            raise ValueError(f"EggLink.r must be 1 (heterodyne) or 2 (IM/DD), got {self.r}")

    def with_mu_r(self, mu_r):
        return EggLink(self.omega, self.lambda_exp, self.a, self.b, self.c, self.r, mu_r)

    def irradiance_moment(self, k):
        """E[I^k] of the underlying irradiance mixture."""
        exp_part = self.lambda_exp ** k * math.gamma(1 + k)
        gg_part = self.b ** k * math.exp(special.gammaln(self.a + k / self.c) - special.gammaln(self.a))
        return self.omega * exp_part + (1 - self.omega) * gg_part


@dataclass(frozen=True)
class WaterScenario:
    label: str
    egg: EggLink


def _positive(snr, what):
    snr = np.asarray(snr, dtype=float)
    if np.any(snr <= 0):
        raise ValueError(f"{what} is only defined for snr > 0")
    return snr


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def alpha_mu_pdf(link, snr):
    snr = _positive(snr, "alpha_mu_pdf")
    lg = link.inv_scale * snr
    al, mu = link.alpha, link.mu
    out = al * link.kappa * np.exp((al * mu - 1) * np.log(lg) - lg ** al)
    return _scalar(out)


def alpha_mu_pdf_muform(link, snr):
    """Density written with mu^mu / mean^(alpha mu); a different family unless alpha = 1.

    Kept for comparison only; nothing downstream uses it.
    """
    snr = _positive(snr, "alpha_mu_pdf_muform")
    al, mu, gb = link.alpha, link.mu, link.mean_snr
    logf = (math.log(al) - special.gammaln(mu) + mu * math.log(mu) - al * mu * math.log(gb)
            + (al * mu - 1) * np.log(snr) - mu * (snr / gb) ** al)
    return _scalar(np.exp(logf))


def alpha_mu_ccdf(link, snr):
    snr = np.asarray(snr, dtype=float)
    if np.any(snr < 0):
        raise ValueError("alpha_mu_ccdf requires snr >= 0")
    out = special.gammaincc(link.mu, (link.inv_scale * snr) ** link.alpha)
    return _scalar(out)


def alpha_mu_ccdf_hform(link, snr, contour=None):
    """Complementary CDF through H^{2,0}_{1,2}[(1,1); (0,1),(mu,1/alpha)] at Lambda*snr.

    Independent of :func:`alpha_mu_ccdf`: it goes through the Mellin-Barnes engine.
    """
    if snr == 0:
        return 1.0
    params = FoxHParams(2, 0, [(1, 1)], [(0, 1), (link.mu, 1 / link.alpha)])
    return link.kappa / link.inv_scale * fox_h(params, link.inv_scale * snr, contour)


def alpha_mu_sample(link, rng, size=None):
    """Draw SNRs as W^(1/alpha) / Lambda with W ~ Gamma(mu, 1)."""
    w = rng.standard_gamma(link.mu, size=size)
    return w ** (1 / link.alpha) / link.inv_scale


def egg_snr_pdf(link, snr):
    snr = _positive(snr, "egg_snr_pdf")
    r, c, a, b = link.r, link.c, link.a, link.b
    u = snr / (b ** r * link.mu_r)
    with np.errstate(over="ignore"):  # u^(c/r) -> inf only where the density underflows to 0
        gg = (c * (1 - link.omega) / (snr * r * math.gamma(a))
              * np.exp((a * c / r) * np.log(u) - u ** (c / r)))
    v = (snr / link.mu_r) ** (1 / r)
    ex = link.omega / (snr * link.lambda_exp * r) * v * np.exp(-v / link.lambda_exp)
    return _scalar(gg + ex)


def egg_snr_ccdf(link, snr):
    snr = np.asarray(snr, dtype=float)
    if np.any(snr < 0):
        raise ValueError("egg_snr_ccdf requires snr >= 0")
    r = link.r
    ex = link.omega * np.exp(-(snr / link.mu_r) ** (1 / r) / link.lambda_exp)
    gg = (1 - link.omega) * special.gammaincc(link.a, (snr / (link.b ** r * link.mu_r)) ** (link.c / r))
    return _scalar(ex + gg)


def egg_sample(link, rng, size=None, return_branch=False):
    """Draw SNR = mu_r * I^r with I from the exponential / generalised-Gamma mixture."""
    n = 1 if size is None else size
    branch = rng.random(n) < link.omega
    expo = link.lambda_exp * rng.standard_exponential(n)
    gg = link.b * rng.standard_gamma(link.a, n) ** (1 / link.c)
    irr = np.where(branch, expo, gg)
    out = link.mu_r * irr ** link.r
    if size is None:
        out, branch = float(out[0]), bool(branch[0])
    return (out, branch) if return_branch else out
