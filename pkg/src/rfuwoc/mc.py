"""Monte Carlo estimates of the secrecy outage probability.

Trials are split into fixed-size chunks; chunk ``k`` draws from its own
Philox stream keyed by ``(master_seed, *stream_key, k)``. Chunking is fixed
by the config, never by the worker count, so estimates are bit-identical
however many threads run them.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from rfuwoc.channels import alpha_mu_sample, egg_sample

Z95 = 1.959963984540054


class Mode(enum.Enum):
    EXACT_DEFINITION = "exact_definition"
    LOWER_BOUND = "lower_bound"


@dataclass(frozen=True)
class McConfig:
    trials: int = 10_000_000
    master_seed: int = 20240601
    chunk_size: int = 1_000_000
    mode: Mode = Mode.LOWER_BOUND
    stream_key: tuple = ()

    def __post_init__(self):
        if self.trials <= 0 or self.chunk_size <= 0:
            raise ValueError("trials and chunk_size must be positive")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    sop_hat: float
    ci_low: float
    ci_high: float
    trials_used: int
    outages: int


def wilson_interval(k, n, z=Z95):
    p = k / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    # The bounds bracket p exactly; rounding can break that at k = 0 or k = n.
    return min(max(0.0, centre - half), p), max(min(1.0, centre + half), p)


def chunk_rng(cfg, k):
    seq = np.random.SeedSequence(cfg.master_seed, spawn_key=(*cfg.stream_key, k))
    return np.random.Generator(np.random.Philox(seq))


def _chunk_outages(s, cfg, k, n):
    rng = chunk_rng(cfg, k)
    g1 = alpha_mu_sample(s.main_rf, rng, n)
    g2 = egg_sample(s.uwoc, rng, n)
    ge = alpha_mu_sample(s.eavesdropper_rf, rng, n)
    geq = np.minimum(g1, g2)
    if cfg.mode is Mode.LOWER_BOUND:
        out = geq <= s.theta * ge
    else:
        # [log2((1+geq)/(1+ge))]^+ <= R_s, which for R_s >= 0 is (1+geq) <= theta (1+ge)
        out = np.log2(1 + geq) - np.log2(1 + ge) <= s.rate_s
    return int(np.count_nonzero(out))


def simulate_sop(s, cfg, workers=1):
    sizes = [cfg.chunk_size] * (cfg.trials // cfg.chunk_size)
    if cfg.trials % cfg.chunk_size:
        sizes.append(cfg.trials % cfg.chunk_size)
    jobs = list(enumerate(sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            counts = list(pool.map(lambda kn: _chunk_outages(s, cfg, *kn), jobs))
    else:
        counts = [_chunk_outages(s, cfg, k, n) for k, n in jobs]
    k = sum(counts)
    lo, hi = wilson_interval(k, cfg.trials)
    return McEstimate(k / cfg.trials, lo, hi, cfg.trials, k)


@dataclass(frozen=True)
class KsResult:
    statistic: float
    critical_value: float
    pvalue: float
    passed: bool


def ks_validate(sampler, cdf, n, rng, level=0.01):
    """Two-sided one-sample KS test of ``sampler(rng, n)`` against ``cdf``."""
    if n < 10_000:
        raise ValueError("ks_validate needs n >= 1e4 samples")
    x = np.asarray(sampler(rng, n), dtype=float)
    res = stats.kstest(x, cdf)
    crit = float(stats.kstwo.ppf(1 - level, n))
    return KsResult(float(res.statistic), crit, float(res.pvalue), bool(res.statistic < crit))
