"""Antenna-selection policies over one channel realization.

All four policies return 1-based indices (i, m, k) into the N x M and N x K
gain matrices plus an elementary operation count: one unit per scalar
comparison, and for the exhaustive search one unit per sum-rate evaluation.
Every argmax/argmin tie breaks toward the lowest index so results are
reproducible; ties have measure zero under continuous fading anyway.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .link_model import User, _noma_rate_arrays


class Algorithm(Enum):
    ES = "ES"
    AIA = "AIA"   # max-min-max: maximize the weaker of the per-row best gains
    A3 = "A3"     # max-max-max: maximize the overall best gain
    RAN = "RAN"


@dataclass(frozen=True)
class SelectionResult:
    i: int
    m: int
    k: int
    gamma_s: float          # max(h[i,m], g[i,k])
    gamma_w: float          # min(h[i,m], g[i,k])
    strong_user: User
    algorithm: Algorithm
    op_count: int


def gains_at(ch, i, m, k):
    """Selected gain pair (h[i,m], g[i,k]) for 1-based indices."""
    return float(ch.h[i - 1, m - 1]), float(ch.g[i - 1, k - 1])


def _result(ch, i, m, k, algorithm, op_count):
    h_sel, g_sel = gains_at(ch, i, m, k)
    return SelectionResult(
        i=i, m=m, k=k,
        gamma_s=max(h_sel, g_sel), gamma_w=min(h_sel, g_sel),
        strong_user=User.UE1 if h_sel >= g_sel else User.UE2,
        algorithm=algorithm, op_count=op_count,
    )


def exhaustive_search(ch, p):
    """Optimal triple: evaluate the full sum-rate for all N*M*K candidates.

    Deliberately evaluates the complete rate expression per candidate rather
    than ranking by the (gamma_s, gamma_w) pair, so it stays an independent
    reference for the heuristics. op_count = N*M*K rate evaluations.
    """
    n, m_ant = ch.h.shape
    k_ant = ch.g.shape[1]
    hh = ch.h[:, :, None]            # N x M x 1
    gg = ch.g[:, None, :]            # N x 1 x K
    _, _, rsum, _, _ = _noma_rate_arrays(np.broadcast_to(hh, (n, m_ant, k_ant)),
                                         np.broadcast_to(gg, (n, m_ant, k_ant)), p)
    flat = int(np.argmax(rsum))      # first occurrence = lexicographic (i, m, k)
    i, rem = divmod(flat, m_ant * k_ant)
    m, k = divmod(rem, k_ant)
    return _result(ch, i + 1, m + 1, k + 1, Algorithm.ES, n * m_ant * k_ant)


def row_maxima(ch):
    """Stage shared by both heuristics: per-BS-antenna best gain and column.

    Returns (h_max, h_col, g_max, g_col), each length N, columns 0-based.
    """
    h_col = ch.h.argmax(axis=1)
    g_col = ch.g.argmax(axis=1)
    rows = np.arange(ch.h.shape[0])
    return ch.h[rows, h_col], h_col, ch.g[rows, g_col], g_col


def _stage1_ops(n, m_ant, k_ant):
    # max over M costs M-1 comparisons per row, likewise for K
    return n * (m_ant - 1) + n * (k_ant - 1)


def aia_select(ch):
    """Max-min-max: pick the BS antenna whose weaker per-user best gain is largest.

    Stage 1 takes row maxima of both matrices, stage 2 the smaller element of
    each row pair, stage 3 the best row. The selected triple pairs the weaker
    element's antenna with its same-row partner.
    """
    n, m_ant = ch.h.shape
    k_ant = ch.g.shape[1]
    h_max, h_col, g_max, g_col = row_maxima(ch)
    row_min = np.minimum(h_max, g_max)           # stage 2: N comparisons
    i = int(np.argmax(row_min))                  # stage 3: N-1 comparisons
    ops = _stage1_ops(n, m_ant, k_ant) + n + (n - 1)
    return _result(ch, i + 1, int(h_col[i]) + 1, int(g_col[i]) + 1,
                   Algorithm.AIA, ops)


def a3_select(ch):
    """Max-max-max: pick the triple containing the globally largest gain.

    Same staging as aia_select but stage 2 keeps the larger element of each
    row pair, so the winner's gamma_s equals the maximum entry over both
    matrices; the partner row maximum becomes gamma_w.
    """
    n, m_ant = ch.h.shape
    k_ant = ch.g.shape[1]
    h_max, h_col, g_max, g_col = row_maxima(ch)
    row_max = np.maximum(h_max, g_max)           # stage 2: N comparisons
    i = int(np.argmax(row_max))                  # stage 3: N-1 comparisons
    ops = _stage1_ops(n, m_ant, k_ant) + n + (n - 1)
    return _result(ch, i + 1, int(h_col[i]) + 1, int(g_col[i]) + 1,
                   Algorithm.A3, ops)


def random_select(dims, rng_stream, ch=None):
    """Uniform independent choice of (i, m, k); op_count = 0.

    Consumes exactly three uniforms from rng_stream, mapped to indices by
    floor(u * dim) + 1, so a fixed stream state reproduces the same triple.
    When the realization is provided the gain fields are populated from it;
    otherwise they are NaN (the indices alone are the draw).
    """
    n, m_ant, k_ant = dims
    if min(n, m_ant, k_ant) < 1:
        raise ValueError("dims must be positive")
    u = rng_stream.random(3)
    i = int(u[0] * n) + 1
    m = int(u[1] * m_ant) + 1
    k = int(u[2] * k_ant) + 1
    if ch is not None:
        return _result(ch, i, m, k, Algorithm.RAN, 0)
    return SelectionResult(i=i, m=m, k=k, gamma_s=float("nan"),
                           gamma_w=float("nan"), strong_user=User.UE1,
                           algorithm=Algorithm.RAN, op_count=0)


@dataclass(frozen=True)
class OmaSelection:
    """Per-user independent best entries (for the orthogonal baseline)."""

    h_best: float
    i_h: int
    m: int
    g_best: float
    i_g: int
    k: int


def oma_select(ch):
    """Each user independently pairs its best receive antenna with the best
    BS antenna for its own matrix; the two slots may use different BS rows."""
    n, m_ant = ch.h.shape
    k_ant = ch.g.shape[1]
    fh = int(np.argmax(ch.h))
    fg = int(np.argmax(ch.g))
    i_h, m = divmod(fh, m_ant)
    i_g, k = divmod(fg, k_ant)
    return OmaSelection(h_best=float(ch.h[i_h, m]), i_h=i_h + 1, m=m + 1,
                        g_best=float(ch.g[i_g, k]), i_g=i_g + 1, k=k + 1)
