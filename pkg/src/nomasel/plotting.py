"""Render sweep and analysis tables to figure files next to the CSV output."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_AXIS_LABELS = {
    "ps_dbm": "Transmit power (dBm)",
    "n_bs": "BS antennas N",
    "d2": "BS-UE2 distance d2 (m)",
    "b": "Power allocation coefficient b",
}

_STYLES = {
    "NOMA_ES": dict(marker="o", ls="-"),
    "AIA": dict(marker="s", ls="-"),
    "A3": dict(marker="^", ls="-"),
    "NOMA_RAN": dict(marker="d", ls="-"),
    "OMA_ES": dict(marker="v", ls="-"),
    "AIA_ANALYTIC": dict(marker="", ls="--"),
    "A3_ANALYTIC": dict(marker="", ls=":"),
}


def save_sweep_figure(result, path):
    """Average sum-rate and fairness versus the swept variable, one line per
    scheme (analytic curves carry no per-user split, so they appear only in
    the sum-rate panel)."""
    points = np.asarray(result.spec.points, dtype=float)
    schemes = list(dict.fromkeys(st.scheme for st in result.stats))
    fig, (ax_rate, ax_eta) = plt.subplots(2, 1, figsize=(7.0, 8.0), sharex=True)
    for scheme in schemes:
        rs = result.series(scheme, "mean_rsum")
        style = _STYLES.get(scheme.value, {})
        ax_rate.plot(points, rs, label=scheme.value, **style)
        eta = result.series(scheme, "mean_eta")
        if not np.all(np.isnan(eta)):
            ax_eta.plot(points, eta, label=scheme.value, **style)
    ax_rate.set_ylabel("Average sum-rate (bits/s/Hz)")
    ax_rate.grid(True, alpha=0.3)
    ax_rate.legend(fontsize=8)
    ax_eta.set_ylabel("Mean Jain fairness index")
    ax_eta.set_xlabel(_AXIS_LABELS.get(result.spec.axis.value, result.spec.axis.value))
    ax_eta.grid(True, alpha=0.3)
    ax_eta.set_ylim(0.0, 1.05)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_analyze_figure(rows, axis_name, path):
    """Closed forms against their quadrature references per sweep point."""
    points = np.array([r["point"] for r in rows], dtype=float)
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(points, [r["aia_closed"] for r in rows], "s-", label="max-min-max closed form")
    ax.plot(points, [r["aia_quadrature"] for r in rows], "x--", label="max-min-max quadrature")
    ax.plot(points, [r["a3_closed"] for r in rows], "^-", label="max-max-max closed form")
    ax.plot(points, [r["a3_quadrature"] for r in rows], "+--", label="max-max-max quadrature")
    ax.set_xlabel(_AXIS_LABELS.get(axis_name, axis_name))
    ax.set_ylabel("Average sum-rate (bits/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
