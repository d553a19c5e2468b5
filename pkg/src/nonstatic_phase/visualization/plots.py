"""
SVG line and density plots of phase curves and scans.

Files are written with a fixed hash salt and without a creation date, so
identical data gives identical bytes. Density plots go through `imshow`,
which the SVG backend embeds as an inline base64 PNG.
"""
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

SVG_HASHSALT = "nonstatic-phase"


def save_svg(fig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASHSALT, "svg.fonttype": "path"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_curves(
    df: pd.DataFrame,
    x: str,
    ys: Sequence[str],
    title: Optional[str] = None,
    xlabel: Optional[str] = None,
    ylabel: Optional[str] = None,
    styles: Optional[Dict[str, dict]] = None,
    vlines: Iterable[float] = (),
    ax=None,
    **kwargs,
):
    """
    Plots each column of ``ys`` against ``x``. ``styles`` maps a column to
    keyword arguments of `Axes.plot` (e.g. a dash-dot line for Fock curves).
    """
    if ax is None:
        fig, ax = plt.subplots(1, 1, figsize=kwargs.pop("figsize", (6, 4)))
    else:
        fig = ax.get_figure()
    styles = styles or {}
    for col in ys:
        ax.plot(df[x], df[col], label=col, **styles.get(col, {}))
    for v in vlines:
        ax.axvline(v, color="gray", linestyle=":", linewidth=1)
    ax.set_xlabel(xlabel or x)
    if ylabel:
        ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(ys) > 1:
        ax.legend(fontsize="small")
    fig.tight_layout()
    return fig, ax


def plot_density(
    df: pd.DataFrame,
    x: str,
    y: str,
    z: str,
    title: Optional[str] = None,
    cmap: str = "viridis",
    mask: Optional[str] = None,
    ax=None,
    colorbar=True,
    **kwargs,
):
    """
    Density plot of column ``z`` over the regular (x, y) grid given in long
    format. Rows where the boolean column ``mask`` is false are left blank.
    """
    table = df.pivot(index=y, columns=x, values=z).sort_index()
    values = table.to_numpy(dtype=float)
    if mask is not None:
        valid = df.pivot(index=y, columns=x, values=mask).sort_index().to_numpy(dtype=bool)
        values = np.where(valid, values, np.nan)
    if ax is None:
        fig, ax = plt.subplots(1, 1, figsize=kwargs.pop("figsize", (6, 5)))
    else:
        fig = ax.get_figure()
    extent = (table.columns.min(), table.columns.max(), table.index.min(), table.index.max())
    im = ax.imshow(values, origin="lower", aspect="auto", extent=extent, cmap=cmap, interpolation="nearest", **kwargs)
    if colorbar:
        fig.colorbar(im, ax=ax, label=z)
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return fig, ax


def draw_panel(panel, **kwargs):
    """
    Draws a `Panel` of the figure builders as a line or density plot.
    """
    if panel.plot == "density":
        return plot_density(panel.frame, panel.x, panel.y, panel.z, title=panel.title, mask=panel.mask, **kwargs)
    return plot_curves(
        panel.frame,
        panel.x,
        panel.ys,
        title=panel.title,
        styles=panel.styles,
        vlines=panel.vlines,
        **kwargs,
    )
