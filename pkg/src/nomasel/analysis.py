"""Closed-form gain distributions and asymptotic average sum-rates.

For exponential per-antenna gains, the selected strong gain gamma_s has a
tractable distribution under both heuristics: a product of powered CDFs for
the max-max-max rule, and a multinomial-expansion form for the max-min-max
rule. The high-SNR average sum-rate approximates the weak user's rate by the
constant log2(1/b) and integrates log2(1 + b*rho*x) against the gamma_s
density, which reduces every term to chi(x) = exp(x/(b*rho))*Ei(-x/(b*rho))
via int_0^inf ln(1+c*x) e^(-mu*x) dx = -exp(mu/c) Ei(-mu/c) / mu.

An adaptive-quadrature oracle over the same densities provides an
independent check of the term algebra.
"""

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from . import specfun
from .selection import Algorithm

LN2 = math.log(2.0)

# Below this value of rho*b*E[min pair gain] the weak-rate-constant
# approximation underlying the closed forms is poor; 1/(omega_h + omega_g)
# is the mean of an unselected gain pair minimum, a conservative scale for
# the selected weak gain.
LOW_SNR_GUARD = 100.0


class LowSnrApproximationWarning(UserWarning):
    """Closed-form approximation evaluated outside its high-SNR regime."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach its error target."""


def low_snr_guard(p):
    """True when the high-SNR approximation behind the closed forms is suspect."""
    return p.rho * p.b / (p.omega_h + p.omega_g) < LOW_SNR_GUARD


# ---------------------------------------------------------------------------
# order-statistic building blocks
# ---------------------------------------------------------------------------

def _check_nonneg(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("gain arguments must be >= 0")
    return x


def _cdf_max_iid(x, omega, count, form):
    """CDF of the max of `count` iid exponential(omega) gains."""
    x = _check_nonneg(x)
    if form == "product":
        return (-np.expm1(-omega * x)) ** count
    if form == "lambda":
        acc = np.zeros_like(x)
        for i in range(count + 1):
            acc = acc + specfun.lambda_coeff(i, count) * np.exp(-i * omega * x)
        return acc
    raise ValueError(f"unknown form {form!r}")


def _pdf_max_iid(x, omega, count, form):
    x = _check_nonneg(x)
    if form == "product":
        return count * omega * np.exp(-omega * x) * (-np.expm1(-omega * x)) ** (count - 1)
    if form == "lambda":
        acc = np.zeros_like(x)
        for i in range(1, count + 1):
            acc = acc - i * omega * specfun.lambda_coeff(i, count) * np.exp(-i * omega * x)
        return acc
    raise ValueError(f"unknown form {form!r}")


def cdf_row_max_h(x, p, form="product"):
    """CDF of a per-BS-antenna best UE1 gain (max of M iid exponentials)."""
    return _cdf_max_iid(x, p.omega_h, p.n_ue1, form)


def pdf_row_max_h(x, p, form="product"):
    return _pdf_max_iid(x, p.omega_h, p.n_ue1, form)


def cdf_row_max_g(x, p, form="product"):
    """CDF of a per-BS-antenna best UE2 gain (max of K iid exponentials)."""
    return _cdf_max_iid(x, p.omega_g, p.n_ue2, form)


def pdf_row_max_g(x, p, form="product"):
    return _pdf_max_iid(x, p.omega_g, p.n_ue2, form)


def cdf_gamma_i_w(x, p):
    """CDF of the smaller element of one row's best-gain pair.

    1 - sum_{i=1..M} sum_{j=1..K} lambda_i lambda_j exp(-(i*Wh + j*Wg)*x);
    identical to 1 - (1 - F_hmax)(1 - F_gmax) by independence of the pair.
    """
    x = _check_nonneg(x)
    acc = np.ones_like(x)
    for i in range(1, p.n_ue1 + 1):
        li = specfun.lambda_coeff(i, p.n_ue1)
        for j in range(1, p.n_ue2 + 1):
            lj = specfun.lambda_coeff(j, p.n_ue2)
            acc = acc - li * lj * np.exp(-(i * p.omega_h + j * p.omega_g) * x)
    return acc


# ---------------------------------------------------------------------------
# strong-gain distribution, max-min-max rule
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _aia_primitives(n_bs, n_ue1, n_ue2, omega_h, omega_g):
    """Flatten the max-min-max gamma_s density into exponential primitives.

    Conditioning on the winning row and on which side holds the row minimum,
    the density is a signed sum of terms w * exp(-mu*x) * (1-exp(-nu*x))/nu
    with w = C_l * t_l * N*i*j*Wh*Wg*lambda_i*lambda_j, (mu, nu) running over
    (i*Wh, j*Wg + xi_l) and (j*Wg, i*Wh + xi_l). Returns the coefficient
    arrays (w, mu, nu).
    """
    terms = specfun.enumerate_terms(n_bs - 1, n_ue1, n_ue2, omega_h, omega_g)
    w, mu, nu = [], [], []
    for term in terms:
        ct = term.c_l * term.t_l
        for i in range(1, n_ue1 + 1):
            li = specfun.lambda_coeff(i, n_ue1)
            for j in range(1, n_ue2 + 1):
                lj = specfun.lambda_coeff(j, n_ue2)
                zeta = n_bs * i * j * omega_h * omega_g * li * lj
                w.append(ct * zeta)
                mu.append(i * omega_h)
                nu.append(j * omega_g + term.xi_l)
                w.append(ct * zeta)
                mu.append(j * omega_g)
                nu.append(i * omega_h + term.xi_l)
    return np.asarray(w), np.asarray(mu), np.asarray(nu)


def _aia_prims_for(p):
    return _aia_primitives(p.n_bs, p.n_ue1, p.n_ue2, p.omega_h, p.omega_g)


def pdf_gamma_s_aia(x, p):
    """Density of the strong selected gain under the max-min-max rule.

    Scalar arguments are accumulated with math.fsum (the term weights
    alternate in sign); array arguments take a chunked vector path.
    """
    w, mu, nu = _aia_prims_for(p)
    if np.ndim(x) == 0:
        x = float(x)
        if x < 0:
            raise ValueError("gain arguments must be >= 0")
        vals = np.exp(-mu * x) * (-np.expm1(-nu * x)) / nu
        return math.fsum(w * vals)
    x = _check_nonneg(x)
    out = np.empty_like(x)
    for sl in _chunks(x.size):
        xs = x.reshape(-1)[sl][None, :]
        vals = np.exp(-mu[:, None] * xs) * (-np.expm1(-nu[:, None] * xs)) / nu[:, None]
        out.reshape(-1)[sl] = w @ vals
    return out


def cdf_gamma_s_aia(x, p):
    """CDF matching pdf_gamma_s_aia: each primitive integrates in closed form."""
    w, mu, nu = _aia_prims_for(p)
    if np.ndim(x) == 0:
        x = float(x)
        if x < 0:
            raise ValueError("gain arguments must be >= 0")
        vals = ((-np.expm1(-mu * x)) / mu - (-np.expm1(-(mu + nu) * x)) / (mu + nu)) / nu
        return math.fsum(w * vals)
    x = _check_nonneg(x)
    out = np.empty_like(x)
    for sl in _chunks(x.size):
        xs = x.reshape(-1)[sl][None, :]
        m_ = mu[:, None]
        n_ = nu[:, None]
        vals = ((-np.expm1(-m_ * xs)) / m_ - (-np.expm1(-(m_ + n_) * xs)) / (m_ + n_)) / n_
        out.reshape(-1)[sl] = w @ vals
    return out


def _chunks(total, size=4096):
    for start in range(0, total, size):
        yield slice(start, min(start + size, total))


# ---------------------------------------------------------------------------
# strong-gain distribution, max-max-max rule
# ---------------------------------------------------------------------------

def cdf_gamma_s_a3(x, p):
    """CDF of the global-max gain: product of the two powered exponentials."""
    x = _check_nonneg(x)
    nm, nk = p.n_bs * p.n_ue1, p.n_bs * p.n_ue2
    return (-np.expm1(-p.omega_h * x)) ** nm * (-np.expm1(-p.omega_g * x)) ** nk


def pdf_gamma_s_a3(x, p, form="product"):
    """Density of the global-max gain.

    The product form differentiates the CDF directly and has no combinatorial
    blowup; the lambda form expands into the signed double sum over
    (i, j) <= (N*M, N*K) and exists mainly to cross-check the expansion.
    """
    x = _check_nonneg(x)
    nm, nk = p.n_bs * p.n_ue1, p.n_bs * p.n_ue2
    if form == "product":
        fh = _pdf_max_iid(x, p.omega_h, nm, "product")
        fg = _pdf_max_iid(x, p.omega_g, nk, "product")
        ch = _cdf_max_iid(x, p.omega_h, nm, "product")
        cg = _cdf_max_iid(x, p.omega_g, nk, "product")
        return fh * cg + fg * ch
    if form == "lambda":
        acc = np.zeros_like(x)
        for i in range(1, nm + 1):
            li = specfun.lambda_coeff(i, nm)
            ih = i * p.omega_h
            for j in range(1, nk + 1):
                lj = specfun.lambda_coeff(j, nk)
                jg = j * p.omega_g
                acc = acc + li * lj * (ih * np.exp(-ih * x) + jg * np.exp(-jg * x)
                                       - (ih + jg) * np.exp(-(ih + jg) * x))
        return acc
    raise ValueError(f"unknown form {form!r}")


@dataclass(frozen=True)
class OrderStatDistributions:
    """Evaluable strong-gain distribution for one selection rule."""

    params: object
    kind: Algorithm

    def __post_init__(self):
        if self.kind not in (Algorithm.AIA, Algorithm.A3):
            raise ValueError("kind must be Algorithm.AIA or Algorithm.A3")

    def pdf_gamma_s(self, x):
        if self.kind is Algorithm.AIA:
            return pdf_gamma_s_aia(x, self.params)
        return pdf_gamma_s_a3(x, self.params)

    def cdf_gamma_s(self, x):
        if self.kind is Algorithm.AIA:
            return cdf_gamma_s_aia(x, self.params)
        return cdf_gamma_s_a3(x, self.params)


# ---------------------------------------------------------------------------
# asymptotic average sum-rates
# ---------------------------------------------------------------------------

def _warn_if_low_snr(p):
    if low_snr_guard(p):
        warnings.warn(
            f"rho*b/(omega_h+omega_g) = {p.rho * p.b / (p.omega_h + p.omega_g):.3g}"
            f" < {LOW_SNR_GUARD:g}: the constant weak-rate approximation is poor"
            " at this SNR",
            LowSnrApproximationWarning,
            stacklevel=3,
        )


def avg_sum_rate_aia(p):
    """High-SNR average sum-rate of the max-min-max rule, in bits/s/Hz.

    log2(1/b) plus the term-by-term integral of log2(1+b*rho*x) against the
    gamma_s density. Each (l, i, j) term contributes

        T1 + T2 + T3 - N*li*lj*(chi(i*Wh) + chi(j*Wg))

    with T1 = xi*N*li*lj/(i*Wh+xi) * chi(j*Wg), T2 symmetric in (i <-> j),
    T3 = zeta*(i*Wh+j*Wg+2*xi)*chi(i*Wh+j*Wg+xi) / ((i*Wh+xi)(j*Wg+xi)(i*Wh+j*Wg+xi)).
    The last piece is the exact integral of the density primitives; summed
    against the multinomial weights it coincides with folding the constant
    into chi(i*Wh + j*Wg) whenever N >= 2 (the weights C_l*t_l sum to zero),
    and unlike that folding it stays correct at N = 1.
    """
    _warn_if_low_snr(p)
    m_ant, k_ant, n = p.n_ue1, p.n_ue2, p.n_bs
    oh, og, b, rho = p.omega_h, p.omega_g, p.b, p.rho
    terms = specfun.enumerate_terms(n - 1, m_ant, k_ant, oh, og)
    chi_h = {i: specfun.chi(i * oh, b, rho) for i in range(1, m_ant + 1)}
    chi_g = {j: specfun.chi(j * og, b, rho) for j in range(1, k_ant + 1)}
    acc = []
    for term in terms:
        ct, xi = term.c_l * term.t_l, term.xi_l
        for i in range(1, m_ant + 1):
            li = specfun.lambda_coeff(i, m_ant)
            for j in range(1, k_ant + 1):
                lj = specfun.lambda_coeff(j, k_ant)
                zt = n * li * lj
                zeta = zt * i * j * oh * og
                phi_i = i * oh + xi
                phi_j = j * og + xi
                phi_1 = i * oh + j * og + xi
                phi_2 = i * oh + j * og + 2.0 * xi
                t1 = xi * zt / phi_i * chi_g[j]
                t2 = xi * zt / phi_j * chi_h[i]
                t3 = zeta * phi_2 * specfun.chi(phi_1, b, rho) / (phi_i * phi_j * phi_1)
                t4 = -zt * (chi_h[i] + chi_g[j])
                acc.append(ct * (t1 + t2 + t3 + t4))
    return math.log2(1.0 / b) + math.fsum(acc) / LN2


def avg_sum_rate_a3(p):
    """High-SNR average sum-rate of the max-max-max rule, in bits/s/Hz.

    log2(1/b) + (1/ln2) * sum_{i<=N*M} sum_{j<=N*K} lambda_i lambda_j *
    (chi(i*Wh + j*Wg) - chi(i*Wh) - chi(j*Wg)).
    """
    _warn_if_low_snr(p)
    nm, nk = p.n_bs * p.n_ue1, p.n_bs * p.n_ue2
    oh, og, b, rho = p.omega_h, p.omega_g, p.b, p.rho
    chi_h = {i: specfun.chi(i * oh, b, rho) for i in range(1, nm + 1)}
    chi_g = {j: specfun.chi(j * og, b, rho) for j in range(1, nk + 1)}
    acc = []
    for i in range(1, nm + 1):
        li = specfun.lambda_coeff(i, nm)
        for j in range(1, nk + 1):
            lj = specfun.lambda_coeff(j, nk)
            acc.append(li * lj * (specfun.chi(i * oh + j * og, b, rho)
                                  - chi_h[i] - chi_g[j]))
    return math.log2(1.0 / b) + math.fsum(acc) / LN2


# ---------------------------------------------------------------------------
# quadrature oracle
# ---------------------------------------------------------------------------

def _feature_points(p):
    """Interior breakpoints (in u-space) flagging where the density lives.

    The densities here concentrate around 1/omega scales that can sit ten
    orders of magnitude below the unit interval's width; without breakpoints
    bracketing both the peak and the exponential tail the adaptive rule can
    mistake the spike (or its tail) for zero.
    """
    scales = []
    for omega in (p.omega_h, p.omega_g, p.omega_h + p.omega_g):
        for c in (0.01, 0.1, 1.0, 10.0, 100.0):
            scales.append(c / omega)
    scales.append(300.0 / min(p.omega_h, p.omega_g))
    return sorted({min(s / (1.0 + s), 1.0 - 1e-12) for s in scales})


_QUAD_TARGET = 1e-9


def _integrate_mapped(fn, p):
    """Integrate fn over [0, inf) through the substitution u = x/(1+x).

    The map sends the half line onto [0, 1) exactly, so no tail truncation
    is involved; breakpoints derived from the gain scales steer the
    subdivision toward the density's support.
    """
    def integrand(u):
        x = u / (1.0 - u)
        return fn(x) / (1.0 - u) ** 2

    val, abserr, *rest = quad(integrand, 0.0, 1.0, points=_feature_points(p),
                              limit=400, epsabs=1e-11, epsrel=1e-11,
                              full_output=True)
    if len(rest) > 1 or abserr > _QUAD_TARGET:
        raise QuadratureError(
            f"quadrature did not reach {_QUAD_TARGET:g}; achieved error"
            f" estimate {abserr:.3e}"
        )
    return val


def quadrature_avg_rate(pdf, p):
    """Average sum-rate by direct integration against a gamma_s density:
    int_0^inf log2(1 + b*rho*x) pdf(x) dx + log2(1/b)."""
    b, rho = p.b, p.rho
    value = _integrate_mapped(lambda x: math.log2(1.0 + b * rho * x) * pdf(x), p)
    return value + math.log2(1.0 / b)


def integrate_density(pdf, p):
    """Normalization check: integral of pdf over [0, inf) (should be 1)."""
    return _integrate_mapped(pdf, p)
