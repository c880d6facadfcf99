"""Stem plots of pulse trains: SVG via matplotlib plus a plain-text rendering."""

import logging
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from propagate import PulseSequence  # noqa: E402

log = logging.getLogger(__name__)

# Fixed ids and no timestamp keep the SVG bytes reproducible.
matplotlib.rcParams["svg.hashsalt"] = "sfq-pulse-train"
matplotlib.rcParams["svg.fonttype"] = "none"


def text_stem(seq):
    """Three rows (+1, 0, -1); 'o' marks each tick's value, '|' joins it to the axis."""
    top, mid, bottom = [], [], []
    for s in seq:
        top.append("o" if s == 1 else " ")
        mid.append("o" if s == 0 else "|")
        bottom.append("o" if s == -1 else " ")
    rows = [("+1", top), (" 0", mid), ("-1", bottom)]
    return "\n".join(f"{label} {''.join(cells)}".rstrip() for label, cells in rows) + "\n"


def svg_stem(seq, path, tick, title=None):
    times = [k * tick for k in range(len(seq))]
    values = list(seq)
    fig, ax = plt.subplots(figsize=(max(4.0, 0.06 * len(seq)), 2.2))
    try:
        ax.stem(times, values, basefmt="k-")
        ax.set_ylim(-1.4, 1.4)
        ax.set_yticks([-1, 0, 1])
        ax.set_xlabel("time, ns")
        if title:
            ax.set_title(title, fontsize=9)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)


def emit_plot(records, out_dir, tick):
    """One seq_<N>.svg and one seq_<N>.stem.txt per record; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for record in records:
        seq = PulseSequence.from_text(record.genome)
        stem = os.path.join(out_dir, f"seq_{record.index}")
        svg_stem(seq, stem + ".svg", tick,
                 title=f"N={record.index}  f0={record.f0:g} GHz")
        with open(stem + ".stem.txt", "w") as f:
            f.write(text_stem(seq))
        written += [stem + ".svg", stem + ".stem.txt"]
    log.info("Wrote %d plots to %s", len(records), out_dir)
    return written
