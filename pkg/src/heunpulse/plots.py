"""File-based figure rendering for traces and verification reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_trace(trace, path, dpi=150):
    """Render U(t) and delta_t(t) of a sampled trace to an image file."""
    fig, (ax_u, ax_d) = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
    ax_u.plot(trace.t, trace.U, lw=1.2)
    ax_u.set_ylabel("U(t)")
    ax_d.plot(trace.t, trace.delta_t, lw=1.2, color="tab:orange")
    ax_d.set_ylabel("detuning(t)")
    ax_d.set_xlabel("t")
    meta = trace.metadata
    cls = meta.get("class")
    title = meta.get("transform", "trace")
    if cls is not None:
        title = f"class {cls}  ({title})"
    if "normalization" in meta:
        title += f"  [normalized, peak {meta['normalization']:.6g}]"
    ax_u.set_title(title)
    for ax in (ax_u, ax_d):
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path


def render_verification(report, path, dpi=150):
    """Render the numeric/analytic amplitude comparison of a verification."""
    samples = getattr(report, "samples", None)
    fig, (ax_a, ax_e) = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
    if samples is not None:
        t = samples["t"]
        ax_a.plot(t, np.abs(samples["a2_numeric"]), lw=1.4,
                  label="|a2| numeric")
        ax_a.plot(t, np.abs(samples["a2_analytic"]), "--", lw=1.2,
                  label="|a2| analytic")
        ax_a.legend(loc="best")
        err = np.abs(samples["a2_analytic"] - samples["a2_numeric"])
        ax_e.semilogy(t, np.maximum(err, 1e-18), lw=1.2, color="tab:red")
    ax_a.set_ylabel("|a2|")
    ax_e.set_ylabel("|deviation|")
    ax_e.set_xlabel("t")
    ax_a.set_title(f"class {report.class_id}  ({report.transform_kind}): "
                   f"max relative error {report.max_relative_error:.3e}")
    for ax in (ax_a, ax_e):
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path
