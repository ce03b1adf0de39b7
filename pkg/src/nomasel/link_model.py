"""Scenario parameters, achievable rates, and fairness for one antenna triple.

Two users share a downlink resource by power-domain superposition: the user
whose selected gain is instantaneously larger decodes with interference
cancellation at power fraction b, the weaker one decodes directly at power
fraction a = 1 - b > b. Squared channel magnitudes are exponential with rate
Omega = distance**alpha under the path-loss model, so Omega is 1/E[gain].
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


@dataclass(frozen=True)
class SystemParams:
    """All scenario constants plus derived linear-scale quantities."""

    n_bs: int
    n_ue1: int
    n_ue2: int
    d1: float
    d2: float
    alpha: float
    a: float
    b: float
    ps_dbm: float
    sigma_dbm: float
    rho: float        # transmit SNR, linear
    omega_h: float    # rate of the BS->UE1 gain distribution, d1**alpha
    omega_g: float    # rate of the BS->UE2 gain distribution, d2**alpha


def derive_params(n_bs=2, n_ue1=2, n_ue2=2, d1=30.0, d2=100.0, alpha=3.0,
                  b=0.4, ps_dbm=20.0, sigma_dbm=-70.0):
    """Validate raw scenario constants and fill in derived fields.

    Powers enter in dBm and are converted to the linear SNR rho exactly once
    here; everything downstream works in linear scale. b is the stored power
    coefficient and a = 1 - b is derived.
    """
    for name, v in (("n_bs", n_bs), ("n_ue1", n_ue1), ("n_ue2", n_ue2)):
        if not (isinstance(v, (int, np.integer)) and v >= 1):
            raise ValueError(f"{name} must be a positive integer, got {v!r}")
    for name, v in (("d1", d1), ("d2", d2), ("alpha", alpha)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v!r}")
    if not 0.0 < b < 0.5:
        raise ValueError(f"b={b!r} outside (0, 0.5): power split violates a > b")
    if not (math.isfinite(ps_dbm) and math.isfinite(sigma_dbm)):
        raise ValueError("ps_dbm and sigma_dbm must be finite")
    return SystemParams(
        n_bs=int(n_bs), n_ue1=int(n_ue1), n_ue2=int(n_ue2),
        d1=float(d1), d2=float(d2), alpha=float(alpha),
        a=1.0 - b, b=float(b),
        ps_dbm=float(ps_dbm), sigma_dbm=float(sigma_dbm),
        rho=10.0 ** ((ps_dbm - sigma_dbm) / 10.0),
        omega_h=float(d1) ** alpha,
        omega_g=float(d2) ** alpha,
    )


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the squared-magnitude gain matrices, h: N x M, g: N x K."""

    h: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        g = np.asarray(self.g, dtype=float)
        if h.ndim != 2 or g.ndim != 2 or h.shape[0] != g.shape[0]:
            raise ValueError("h and g must be 2-D with a shared antenna-row count")
        if (h < 0).any() or (g < 0).any():
            raise ValueError("channel gains are squared magnitudes, must be >= 0")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g", g)


class User(Enum):
    UE1 = 1
    UE2 = 2


@dataclass(frozen=True)
class RateReport:
    """Per-user achievable rates (bits/s/Hz), their sum, and Jain fairness."""

    r1: float
    r2: float
    r_sum: float
    eta: float
    delta: int  # 1 iff UE1's selected gain >= UE2's (UE1 is the strong user)


def jain_index(r1, r2):
    """(r1+r2)^2 / (2*(r1^2+r2^2)); equals 1 for equal rates, 1/2 for one user.

    The 0/0 case (both rates zero) is defined as 1: both users are equally
    served with nothing, and the event has measure zero under fading.
    """
    return float(_jain_arrays(np.asarray(r1, float), np.asarray(r2, float)))


def _jain_arrays(r1, r2):
    total_sq = (r1 + r2) ** 2
    denom = 2.0 * (r1 * r1 + r2 * r2)
    out = np.ones_like(denom)
    np.divide(total_sq, denom, out=out, where=denom > 0.0)
    return out


def _noma_rate_arrays(h_sel, g_sel, p):
    """Vector core of the superposition rate model.

    The stronger selected gain gets log2(1 + rho*b*gain) after interference
    cancellation; the weaker gets log2(1 + a*gain/(b*gain + 1/rho)). Ties
    count UE1 as strong (delta = 1 when h_sel == g_sel).
    """
    h_sel = np.asarray(h_sel, float)
    g_sel = np.asarray(g_sel, float)
    inv_rho = 1.0 / p.rho
    delta = h_sel >= g_sel
    strong_h = np.log2(1.0 + p.rho * p.b * h_sel)
    weak_h = np.log2(1.0 + p.a * h_sel / (p.b * h_sel + inv_rho))
    strong_g = np.log2(1.0 + p.rho * p.b * g_sel)
    weak_g = np.log2(1.0 + p.a * g_sel / (p.b * g_sel + inv_rho))
    r1 = np.where(delta, strong_h, weak_h)
    r2 = np.where(delta, weak_g, strong_g)
    rsum = r1 + r2
    eta = _jain_arrays(r1, r2)
    return r1, r2, rsum, eta, delta


def noma_rates(h_sel, g_sel, p):
    """Rates achieved by superposed transmission over a selected gain pair."""
    if h_sel < 0 or g_sel < 0:
        raise ValueError("selected gains must be nonnegative")
    r1, r2, rsum, eta, delta = _noma_rate_arrays(h_sel, g_sel, p)
    return RateReport(r1=float(r1), r2=float(r2), r_sum=float(rsum),
                      eta=float(eta), delta=int(delta))


def _oma_rate_arrays(h_best, g_best, p):
    """Vector core of the orthogonal baseline.

    Convention: orthogonal time sharing at full transmit power. The user
    whose best gain is larger gets fraction a of the frame, the other gets
    fraction b, so growing b hands more exclusive airtime to the poorer
    channel and the sum-rate strictly decreases in b whenever the gains
    differ. (An equal-time power split a/b cannot reproduce that behavior:
    at high SNR its sum-rate goes like log2(a*b) which rises toward b=1/2.)
    """
    h_best = np.asarray(h_best, float)
    g_best = np.asarray(g_best, float)
    delta = h_best >= g_best
    rate_h = np.log2(1.0 + p.rho * h_best)
    rate_g = np.log2(1.0 + p.rho * g_best)
    r1 = np.where(delta, p.a, p.b) * rate_h
    r2 = np.where(delta, p.b, p.a) * rate_g
    rsum = r1 + r2
    eta = _jain_arrays(r1, r2)
    return r1, r2, rsum, eta, delta


def oma_rates(h_best, g_best, p):
    """Rates of the orthogonal time-sharing baseline for per-user best gains."""
    if h_best < 0 or g_best < 0:
        raise ValueError("selected gains must be nonnegative")
    r1, r2, rsum, eta, delta = _oma_rate_arrays(h_best, g_best, p)
    return RateReport(r1=float(r1), r2=float(r2), r_sum=float(rsum),
                      eta=float(eta), delta=int(delta))
