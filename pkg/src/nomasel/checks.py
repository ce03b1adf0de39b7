"""Self-contained numeric validity checks behind the `validate` command.

Each check pits an implementation path against an independent reference
(brute force, series, product form, quadrature) at reduced trial counts, so
a fresh build can be vetted in well under two minutes. The checks call into
the library through module attributes on purpose: the test suite flips
individual pieces (a chi sign, a binomial weight) to confirm each check
actually trips.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import analysis, link_model, selection, specfun
from .link_model import ChannelRealization, derive_params
from .montecarlo import Scheme, SweepAxis, SweepSpec, run_sweep, sample_realization


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _fig2_params(ps_dbm=30.0):
    return derive_params(ps_dbm=ps_dbm)


def check_selection_oracles(realizations=2000, seed=7):
    """Both heuristics against brute-force references, index for index."""
    rng = np.random.default_rng(seed)
    worst = ""
    for t in range(realizations):
        n, m, k = rng.integers(1, 5, size=3)
        ch = ChannelRealization(h=rng.exponential(1.0, (n, m)),
                                g=rng.exponential(1.0, (n, k)))
        aia = selection.aia_select(ch)
        hm, gm = ch.h.max(axis=1), ch.g.max(axis=1)
        i_ref = int(np.argmax(np.minimum(hm, gm)))
        ref = (i_ref + 1, int(np.argmax(ch.h[i_ref])) + 1, int(np.argmax(ch.g[i_ref])) + 1)
        if (aia.i, aia.m, aia.k) != ref:
            worst = f"max-min-max mismatch at trial {t}: {(aia.i, aia.m, aia.k)} vs {ref}"
            break
        a3 = selection.a3_select(ch)
        if a3.gamma_s != max(ch.h.max(), ch.g.max()):
            worst = f"max-max-max gamma_s not global max at trial {t}"
            break
        i_ref = int(np.argmax(np.maximum(hm, gm)))
        ref = (i_ref + 1, int(np.argmax(ch.h[i_ref])) + 1, int(np.argmax(ch.g[i_ref])) + 1)
        if (a3.i, a3.m, a3.k) != ref:
            worst = f"max-max-max mismatch at trial {t}: {(a3.i, a3.m, a3.k)} vs {ref}"
            break
    return CheckResult("selection-oracle-equivalence", worst == "",
                       worst or f"{realizations} random realizations, dims 1..4")


def check_es_dominance(trials=20000, seed=11):
    """Exhaustive search beats every other policy on each realization."""
    spec = SweepSpec(base=_fig2_params(), axis=SweepAxis.PS_DBM, points=(20.0,),
                     trials=trials, seed=seed,
                     schemes=(Scheme.NOMA_ES, Scheme.AIA, Scheme.A3, Scheme.NOMA_RAN))
    res = run_sweep(spec)
    viol = sum(res.dominance_violations[20.0].values())
    return CheckResult("es-dominance", viol == 0,
                       f"{viol} violations in {trials} trials")


def check_pdf_normalization():
    """Both strong-gain densities integrate to one."""
    worst = 0.0
    for n, m, k in [(1, 1, 1), (2, 2, 2), (3, 2, 2)]:
        p = derive_params(n_bs=n, n_ue1=m, n_ue2=k)
        for pdf in (lambda x: analysis.pdf_gamma_s_aia(x, p),
                    lambda x: analysis.pdf_gamma_s_a3(x, p)):
            worst = max(worst, abs(analysis.integrate_density(pdf, p) - 1.0))
    return CheckResult("pdf-normalization", worst <= 1e-8,
                       f"max |integral - 1| = {worst:.2e}")


def check_ei_accuracy():
    """Series oracle at -1, regime overlap, and the derivative identity."""
    series_ref = specfun._ei_series(-1.0)
    err_one = abs(specfun.expint_ei(-1.0) - series_ref)
    overlap = max(abs(specfun._ei_series(-u) / specfun._ei_contfrac(-u) - 1.0)
                  for u in np.linspace(2.0, 7.0, 21))
    worst_d = 0.0
    rng = np.random.default_rng(3)
    for x in rng.uniform(-10.0, -0.1, size=20):
        h = 6e-6 * abs(x)
        num = (specfun.expint_ei(x + h) - specfun.expint_ei(x - h)) / (2 * h)
        worst_d = max(worst_d, abs(num / (math.exp(x) / x) - 1.0))
    ok = err_one <= 1e-10 and overlap <= 1e-10 and worst_d <= 1e-6
    return CheckResult("exponential-integral", ok,
                       f"Ei(-1) err {err_one:.1e}, overlap {overlap:.1e}, "
                       f"d/dx rel err {worst_d:.1e}")


def check_closed_vs_quadrature():
    """Closed-form average rates against quadrature over their own densities."""
    worst = 0.0
    for n, m, k in [(1, 2, 2), (2, 2, 2), (3, 2, 1)]:
        for ps in (30.0,):
            p = derive_params(n_bs=n, n_ue1=m, n_ue2=k, ps_dbm=ps)
            cf = analysis.avg_sum_rate_aia(p)
            qv = analysis.quadrature_avg_rate(lambda x: analysis.pdf_gamma_s_aia(x, p), p)
            worst = max(worst, abs(cf - qv) / abs(qv))
            cf = analysis.avg_sum_rate_a3(p)
            qv = analysis.quadrature_avg_rate(lambda x: analysis.pdf_gamma_s_a3(x, p), p)
            worst = max(worst, abs(cf - qv) / abs(qv))
    return CheckResult("closed-form-vs-quadrature", worst <= 1e-6,
                       f"max relative gap {worst:.2e}")


def check_expansion_correctness():
    """Multinomial expansion against the direct powered product form.

    Relative agreement to 1e-9, floored at the summation noise bound
    1e-13 * sum(|C_l t_l| e^(-xi_l x)): deep in the lower tail the expansion
    cancels ~18 digits, which no double-precision summation can resolve, but
    a wrong weight shows up at the scale of the terms themselves.
    """
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(40):
        n = int(rng.integers(1, 6))
        m = int(rng.integers(1, 4))
        k = int(rng.integers(1, 4))
        oh, og = rng.uniform(0.5, 3.0, size=2)
        x = rng.uniform(0.05, 3.0)
        terms = specfun.enumerate_terms(n - 1, m, k, oh, og)
        lhs = math.fsum(t.c_l * t.t_l * math.exp(-t.xi_l * x) for t in terms)
        f_pair = 1.0 - (1.0 - (1.0 - math.exp(-oh * x)) ** m) \
                     * (1.0 - (1.0 - math.exp(-og * x)) ** k)
        rhs = f_pair ** (n - 1)
        floor = 1e-13 * math.fsum(abs(t.c_l * t.t_l) * math.exp(-t.xi_l * x)
                                  for t in terms)
        excess = max(abs(lhs - rhs) - floor, 0.0)
        worst = max(worst, excess / max(abs(rhs), 1e-300))
    return CheckResult("expansion-correctness", worst <= 1e-9,
                       f"max relative error beyond noise floor {worst:.2e}")


def check_sampling_distribution(samples=20000, seed=17):
    """Channel sampler against the exponential law (mean and KS distance)."""
    p = _fig2_params()
    draws = np.concatenate([sample_realization(p, t, seed).h.ravel()
                            for t in range(samples // (p.n_bs * p.n_ue1))])
    mean_err = abs(draws.mean() * p.omega_h - 1.0)
    xs = np.sort(draws)
    ecdf_hi = np.arange(1, xs.size + 1) / xs.size
    cdf = -np.expm1(-p.omega_h * xs)
    ks = max(np.max(ecdf_hi - cdf), np.max(cdf - (ecdf_hi - 1.0 / xs.size)))
    ok = mean_err < 0.02 and ks < 1.36 / math.sqrt(xs.size) * 1.5
    return CheckResult("sampling-distribution", ok,
                       f"mean rel err {mean_err:.3f}, KS {ks:.4f} over {xs.size} draws")


ALL_CHECKS = (
    check_selection_oracles,
    check_es_dominance,
    check_pdf_normalization,
    check_ei_accuracy,
    check_expansion_correctness,
    check_closed_vs_quadrature,
    check_sampling_distribution,
)


def run_all():
    return [fn() for fn in ALL_CHECKS]
