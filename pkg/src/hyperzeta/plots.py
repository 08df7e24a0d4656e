"""Figure rendering for the CLI report paths.

Every CLI task that writes a delimited artifact also renders a companion
matplotlib figure next to it (same stem, .png). Figures are written with
the Agg backend and stripped metadata so artifact bytes stay deterministic.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import numpy as np
import matplotlib.pyplot as plt

_SAVEFIG_KW = {"dpi": 130, "metadata": {"Software": None}}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG_KW)
    plt.close(fig)
    return path


def plot_resonances(rset, path, title=""):
    fig, ax = plt.subplots(figsize=(6.5, 5))
    if rset.points:
        xs = [z.real for z, _ in rset.points]
        ys = [z.imag for z, _ in rset.points]
        ms = [m for _, m in rset.points]
        sc = ax.scatter(xs, ys, c=ms, s=36, cmap="viridis", vmin=1, vmax=max(ms))
        fig.colorbar(sc, ax=ax, label="multiplicity")
    if rset.box:
        r0, r1, i0, i1 = rset.box
        ax.plot([r0, r1, r1, r0, r0], [i0, i0, i1, i1, i0], "k--", lw=0.8, alpha=0.6)
    ax.axvline(0.5, color="gray", lw=0.6, alpha=0.5)
    ax.set_xlabel("Re s")
    ax.set_ylabel("Im s")
    ax.set_title(title or f"resonances ({rset.source})")
    return _save(fig, path)


def plot_eval_grid(rows, path, what="Z", title=""):
    rows = list(rows)
    re_s = np.array([r[0] for r in rows])
    im_s = np.array([r[1] for r in rows])
    vals = np.array([complex(r[2], r[3]) for r in rows])
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    n_im = len(np.unique(im_s))
    if n_im == 1:
        ax.plot(re_s, np.abs(vals), "-", lw=1.2, label=f"|{what}|")
        ax.plot(re_s, vals.real, "--", lw=0.9, label=f"Re {what}")
        ax.set_xlabel("Re s")
        ax.legend()
    else:
        re_u = np.unique(re_s)
        im_u = np.unique(im_s)
        grid = np.full((len(im_u), len(re_u)), np.nan)
        for r, i, v in zip(re_s, im_s, np.abs(vals)):
            grid[np.searchsorted(im_u, i), np.searchsorted(re_u, r)] = v
        pm = ax.pcolormesh(re_u, im_u, np.log10(np.maximum(grid, 1e-300)), shading="nearest")
        fig.colorbar(pm, ax=ax, label=f"log10 |{what}|")
        ax.set_xlabel("Re s")
        ax.set_ylabel("Im s")
    ax.set_title(title or f"{what} on the evaluation grid")
    return _save(fig, path)


def plot_verify(results, path, suite=""):
    fig, ax = plt.subplots(figsize=(7.5, 0.42 * max(6, len(results))))
    names = [r["identity"] for r in results]
    resid = np.array([max(r["residual"], 1e-18) for r in results])
    tols = np.array([r["tolerance"] for r in results])
    colors = ["tab:green" if r["passed"] else "tab:red" for r in results]
    y = np.arange(len(results))
    ax.barh(y, np.log10(resid) + 18, left=-18, color=colors, alpha=0.75)
    for k, t in enumerate(tols):
        ax.plot([np.log10(t)] * 2, [k - 0.4, k + 0.4], "k-", lw=1.4)
    ax.set_yticks(y, names, fontsize=7)
    ax.invert_yaxis()
    ax.set_xlabel("log10 residual (black tick = tolerance)")
    ax.set_title(f"verification suite: {suite}")
    return _save(fig, path)


def plot_spectrum(spectrum, path, title=""):
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    if spectrum.entries:
        xs, ns = [0.0], [0]
        total = 0
        for ell, m in spectrum.entries:
            xs.extend([ell, ell])
            ns.extend([total, total + m])
            total += m
        xs.append(spectrum.L_max)
        ns.append(total)
        ax.plot(xs, ns, "-", drawstyle="steps-post", lw=1.4)
    ax.set_xlabel("L")
    ax.set_ylabel("N(L)")
    ax.set_title(title or "length spectrum counting function")
    return _save(fig, path)


def plot_fit(samples, fit, path, title=""):
    s = np.array([float(np.real(x)) for x, _ in samples])
    y = np.array([float(np.real(v)) for _, v in samples])
    a, b = fit.chi_est, -fit.chi_est - fit.n_c_est
    c2, c1, c0 = fit.quad_coeffs
    pred = (a * s * s * np.log(s) + b * s * np.log(s) + c2 * s * s + c1 * s
            + c0 + fit.log_coeff * np.log(s))
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.5, 5.5), sharex=True)
    ax1.plot(s, y, "o", ms=3.5, label="samples")
    ax1.plot(s, pred, "-", lw=1.0, label="fit")
    ax1.set_ylabel("log P")
    ax1.legend()
    ax2.plot(s, y - pred, "o-", ms=3, lw=0.7)
    ax2.set_ylabel("residual")
    ax2.set_xlabel("s")
    ax1.set_title(title or f"asymptotic fit: chi={fit.chi_est:.3f}, n_C={fit.n_c_est:.3f}")
    return _save(fig, path)
