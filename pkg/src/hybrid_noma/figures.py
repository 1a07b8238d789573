"""Figure presets: sweep definitions, CSV/manifest/plot-script emission, PNG rendering."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .config import RunConfig
from .errors import DomainError
from .sweep import SweepSpec, read_csv, run_sweep, write_csv

PERFECT = -math.inf
MODERATE_DB = -130.0
HIGH_DB = -120.0

# settings of the energy-efficiency room scenario
_EE_BASE = {"semi_angle_deg": 50.0, "K": 4, "rho_db": 150.0, "rf_rho_db": 30.0}


@dataclass(frozen=True)
class Family:
    name: str
    overrides: dict
    modes: tuple = ("noma",)
    links: tuple = ("vlc",)


@dataclass(frozen=True)
class Preset:
    figure: str
    title: str
    sweep: SweepSpec
    families: tuple
    y_label: str
    base: dict = field(default_factory=dict)
    x_label: str = ""


def _csi_name(db):
    return "perfect" if db == PERFECT else f"csi{int(db)}dB"


def _grid(ks=(None,), csis=(PERFECT, MODERATE_DB, HIGH_DB), modes=("noma",), links=("vlc",), betas=(None,)):
    fams = []
    for K in ks:
        for beta in betas:
            for db in csis:
                for mode in modes:
                    parts, ov = [], {"sigma_e_sq_db": db}
                    if K is not None:
                        parts.append(f"K{K}")
                        ov["K"] = K
                    if beta is not None:
                        parts.append(f"beta{beta:g}")
                        ov["beta_vlc"] = beta
                    parts.append(_csi_name(db))
                    if len(modes) > 1:
                        parts.append(mode)
                    fams.append(Family("_".join(parts), ov, (mode,), links))
    return tuple(fams)


_RATE = "sum rate (bit/s/Hz)"
_EE = "energy efficiency (bit/J)"

PRESETS: dict[str, Preset] = {
    "fig3": Preset(
        "fig3", "Sum rate vs LED semi-angle, NOMA-VLC",
        SweepSpec("semi_angle_deg", 15.0, 80.0, 14), _grid(ks=(2, 5, 10)), _RATE, x_label="semi-angle (deg)",
    ),
    "fig4": Preset(
        "fig4", "Sum rate vs transmit SNR, NOMA-VLC",
        SweepSpec("rho_db", 60.0, 200.0, 15), _grid(ks=(2, 5), csis=(PERFECT, -120.0, -110.0)), _RATE,
        x_label="transmit SNR (dB)",
    ),
    "fig5": Preset(
        "fig5", "Sum rate vs transmit SNR, NOMA-VLC and OFDMA-VLC",
        SweepSpec("rho_db", 100.0, 200.0, 11), _grid(modes=("noma", "ofdma")), _RATE,
        base={"K": 5}, x_label="transmit SNR (dB)",
    ),
    "fig6": Preset(
        "fig6", "Sum rate vs number of users",
        SweepSpec("K", 2.0, 7.0, 6), _grid(modes=("noma", "ofdma")), _RATE, x_label="K",
    ),
    "fig7": Preset(
        "fig7", "Sum rate vs vertical distance, NOMA-VLC",
        SweepSpec("L", 2.1, 4.25, 44), _grid(), _RATE, base={"K": 2}, x_label="L (m)",
    ),
    "fig8": Preset(
        "fig8", "Sum rate vs CSI error, NOMA-VLC",
        SweepSpec("sigma_e_sq_db", -130.0, -100.0, 13), _grid(ks=(2, 5), csis=(PERFECT,)), _RATE,
        x_label="CSI error variance (dB)",
    ),
    "fig9": Preset(
        "fig9", "Sum rate vs CSI error, NOMA-VLC and OFDMA-VLC",
        SweepSpec("sigma_e_sq_db", -220.0, -110.0, 23),
        _grid(ks=(2, 5), csis=(PERFECT,), modes=("noma", "ofdma")), _RATE, x_label="CSI error variance (dB)",
    ),
    "fig10": Preset(
        "fig10", "Energy efficiency vs LOS availability, K = 4",
        SweepSpec("beta_los", 0.0, 1.0, 11), _grid(links=("hybrid",)), _EE,
        base={**_EE_BASE, "beta_rf_follows_vlc": True}, x_label="LOS availability",
    ),
    "fig11": Preset(
        "fig11", "Energy efficiency vs VLC AP fixed power, K = 4",
        SweepSpec("Q_vlc", 1.0, 10.0, 10),
        _grid(betas=(0.5, 1.0), csis=(PERFECT, HIGH_DB), modes=("noma", "ofdma"), links=("hybrid",)), _EE,
        base={**_EE_BASE, "beta_rf_follows_vlc": True}, x_label="Q_VLC (W)",
    ),
    "fig12": Preset(
        "fig12", "Energy efficiency vs number of users",
        SweepSpec("K", 2.0, 10.0, 9), _grid(betas=(0.5, 1.0), csis=(PERFECT, HIGH_DB), links=("hybrid",)), _EE,
        base={**_EE_BASE, "beta_rf_follows_vlc": True}, x_label="K",
    ),
    "fig13": Preset(
        "fig13", "Standalone VLC vs hybrid VLC-RF energy efficiency",
        SweepSpec("beta_los", 0.0, 1.0, 11), _grid(csis=(PERFECT, HIGH_DB), links=("hybrid", "vlc_only")), _EE,
        base={**_EE_BASE, "beta_rf": 1.0, "beta_rf_follows_vlc": False}, x_label="VLC LOS availability",
    ),
}


def preset(figure: str) -> Preset:
    try:
        return PRESETS[figure]
    except KeyError:
        raise DomainError(f"unknown figure '{figure}', expected one of {', '.join(PRESETS)}") from None


def family_config(cfg: RunConfig, p: Preset, fam: Family) -> RunConfig:
    return cfg.with_values(source=f"preset:{p.figure}", **{**p.base, **fam.overrides})


def compute_family(cfg: RunConfig, p: Preset, fam: Family, methods=("analytic", "mc")):
    return run_sweep(family_config(cfg, p, fam), p.sweep, modes=fam.modes, methods=methods, links=fam.links)


_PLOT_SCRIPT = '''\
# Plot script for {figure}: {title}
# Usage: python {script} [output.png]
import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent
FILES = {files!r}

fig, ax = plt.subplots(figsize=(7, 4.5))
for i, name in enumerate(FILES):
    curves = defaultdict(lambda: ([], [], []))
    with open(HERE / name, newline="") as fh:
        for row in csv.DictReader(fh):
            xs, ys, es = curves[(row["link"], row["mode"], row["method"])]
            xs.append(float(row["value"]))
            ys.append(float(row["estimate"]))
            es.append(float(row["std_error"]))
    color = "C%d" % (i % 10)
    label = name[len("{figure}_"):-len(".csv")]
    for (link, mode, method), (xs, ys, es) in sorted(curves.items()):
        tag = label if link in ("vlc", "rf", "hybrid") else label + " " + link
        if method == "analytic":
            ls = "--" if link == "vlc_only" else "-"
            ax.plot(xs, ys, ls, color=color, label=tag)
        else:
            ax.errorbar(xs, ys, yerr=[3 * e for e in es], fmt="o", ms=3, color=color, mfc="none")
ax.set_xlabel({x_label!r})
ax.set_ylabel({y_label!r})
ax.set_title({title!r})
ax.grid(True, alpha=0.3)
ax.legend(fontsize=7, ncol=2)
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else HERE / "{figure}.png", dpi=120)
'''


def write_plot_script(p: Preset, files, out_dir: Path) -> Path:
    path = out_dir / f"{p.figure}_plot.py"
    text = _PLOT_SCRIPT.format(
        figure=p.figure, title=p.title, script=path.name, files=list(files), x_label=p.x_label, y_label=p.y_label
    )
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


def write_manifest(cfg: RunConfig, p: Preset, files, methods, out_dir: Path) -> Path:
    s = p.sweep
    lines = [
        f"figure = {p.figure}",
        f"title = {p.title}",
        f"sweep_parameter = {s.parameter}",
        f"sweep_from = {s.start!r}",
        f"sweep_to = {s.stop!r}",
        f"sweep_steps = {s.steps}",
        f"sweep_scale = {s.scale}",
        f"methods = {','.join(methods)}",
        f"trials = {cfg.trials}",
        f"seed = {cfg.seed}",
        f"base_config_digest = {cfg.digest()}",
    ]
    for k, v in sorted(p.base.items()):
        lines.append(f"preset.{k} = {v}")
    for fam, name in zip(p.families, files):
        ov = ";".join(f"{k}={v}" for k, v in sorted(fam.overrides.items()))
        lines.append(f"family.{fam.name} = file={name};links={','.join(fam.links)};modes={','.join(fam.modes)};{ov}")
    path = out_dir / f"{p.figure}_manifest.txt"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def render_png(p: Preset, files, out_dir: Path) -> Path:
    """Render the figure with matplotlib (Agg) from the emitted CSVs."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for i, name in enumerate(files):
        color = f"C{i % 10}"
        label = name[len(p.figure) + 1 : -len(".csv")]
        curves: dict = {}
        for r in read_csv(out_dir / name):
            curves.setdefault((r.link, r.mode, r.method), []).append((r.value, r.estimate, r.std_error))
        for (link, _mode, method), pts in sorted(curves.items()):
            xs, ys, es = zip(*pts)
            tag = label if link != "vlc_only" else f"{label} vlc_only"
            if method == "analytic":
                ax.plot(xs, ys, "--" if link == "vlc_only" else "-", color=color, label=tag)
            else:
                ax.errorbar(xs, ys, yerr=[3 * e for e in es], fmt="o", ms=3, color=color, mfc="none")
    ax.set_xlabel(p.x_label)
    ax.set_ylabel(p.y_label)
    ax.set_title(p.title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    path = out_dir / f"{p.figure}.png"
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def reproduce_figure(figure: str, out_dir, cfg: RunConfig | None = None, methods=("analytic", "mc"), render=True):
    """Write one CSV per curve family, a manifest, a plot script and (optionally) a PNG.

    Returns the list of written paths.
    """
    p = preset(figure)
    cfg = cfg or RunConfig()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for fam in p.families:
        name = f"{p.figure}_{fam.name}.csv"
        write_csv(compute_family(cfg, p, fam, methods), out / name)
        files.append(name)
    written = [out / f for f in files]
    written.append(write_manifest(cfg, p, files, methods, out))
    written.append(write_plot_script(p, files, out))
    if render:
        written.append(render_png(p, files, out))
    return written
