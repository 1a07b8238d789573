"""Parameter sweeps and the CSV record format."""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import RunConfig
from .errors import AccuracyError, DomainError
from .hybrid import energy_efficiency, hybrid_sum_rate, vlc_only_energy_efficiency
from .montecarlo import mc_noma_rf_sum_rate, mc_noma_vlc_sum_rate, mc_ofdma_vlc_sum_rate
from .rates import (
    RateEstimate,
    analytic_noma_rf_sum_rate,
    analytic_noma_vlc_sum_rate,
    analytic_ofdma_vlc_sum_rate,
)

CSV_HEADER = "param,value,link,mode,method,estimate,std_error,trials,seed,config_digest"
LINKS = ("vlc", "rf", "hybrid", "vlc_only")
MODES = ("noma", "ofdma")
METHODS = ("analytic", "mc")

# sweep parameter -> config field(s) it sets
SWEEP_FIELDS = {
    "semi_angle_deg": ("semi_angle_deg",),
    "rho_db": ("rho_db",),
    "K": ("K",),
    "sigma_e_sq_db": ("sigma_e_sq_db",),
    "L": ("height_L",),
    "beta_los": ("beta_vlc",),
    "Q_vlc": ("Q_vlc",),
}


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int
    scale: str = "linear"

    def __post_init__(self):
        if self.parameter not in SWEEP_FIELDS:
            raise DomainError(f"unknown sweep parameter '{self.parameter}'")
        if not self.start < self.stop:
            raise DomainError("sweep needs start < stop")
        if self.steps < 2:
            raise DomainError("sweep needs at least 2 steps")
        if self.scale not in ("linear", "log"):
            raise DomainError("scale must be 'linear' or 'log'")
        if self.scale == "log" and self.start <= 0:
            raise DomainError("log scale needs a positive start")
        lo, hi = {
            "semi_angle_deg": (0.0, 90.0),
            "beta_los": (0.0, 1.0),
            "K": (1.0, 60.0),
            "Q_vlc": (0.0, math.inf),
            "L": (0.0, math.inf),
            "sigma_e_sq_db": (-math.inf, 0.0),
        }.get(self.parameter, (-math.inf, math.inf))
        open_ends = self.parameter in ("semi_angle_deg", "L", "sigma_e_sq_db")
        bad = (self.start <= lo or self.stop >= hi) if open_ends else (self.start < lo or self.stop > hi)
        if bad:
            raise DomainError(f"sweep range [{self.start}, {self.stop}] invalid for {self.parameter}")

    def values(self) -> list[float]:
        if self.scale == "log":
            vals = np.geomspace(self.start, self.stop, self.steps)
        else:
            vals = np.linspace(self.start, self.stop, self.steps)
        if self.parameter == "K":
            ints = np.rint(vals)
            if np.any(np.abs(ints - vals) > 1e-9) or len(set(ints)) != len(ints):
                raise DomainError("K sweep must land on distinct integers")
            vals = ints
        return [float(v) for v in vals]


@dataclass(frozen=True)
class RunRecord:
    param: str
    value: float
    link: str
    mode: str
    method: str
    estimate: float
    std_error: float
    trials: int
    seed: int
    config_digest: str
    error: str = field(default="", compare=False)

    def row(self) -> list[str]:
        return [
            self.param,
            _f(self.value),
            self.link,
            self.mode,
            self.method,
            _f(self.estimate),
            _f(self.std_error),
            str(self.trials),
            str(self.seed),
            self.config_digest,
        ]


def _f(x: float) -> str:
    return format(float(x), ".17g")


def apply_sweep_value(cfg: RunConfig, parameter: str, value: float) -> RunConfig:
    fields = SWEEP_FIELDS[parameter]
    v = int(round(value)) if parameter == "K" else float(value)
    updates = {f: v for f in fields}
    if parameter == "K" and cfg.P_rf_users:
        # an explicit per-user list cannot follow K; fall back to the equal split
        updates["P_rf_users"] = ()
    return cfg.with_values(source=f"sweep:{parameter}", **updates)


# --- evaluation ------------------------------------------------------------

_ENERGY_ONLY = dict(
    beta_vlc=0.5, beta_rf=0.5, beta_rf_follows_vlc=False, Q_vlc=4.0, Q_rf=6.7, P_rf_total=0.7, P_rf_users=()
)


def _rate_key(cfg: RunConfig) -> RunConfig:
    # energy-only fields do not change a rate; blank them so the cache hits
    return dataclasses.replace(cfg, provenance={}, **_ENERGY_ONLY)


@lru_cache(maxsize=512)
def _vlc_rate(cfg: RunConfig, mode: str, method: str) -> RateEstimate:
    vlc, K = cfg.vlc(), cfg.K
    if method == "analytic":
        if mode == "noma":
            return analytic_noma_vlc_sum_rate(
                vlc, K, cfg.noma(), cfg.rho_vlc, cfg.sigma_vlc, route=cfg.vlc_route, strongest=cfg.strongest
            )
        return analytic_ofdma_vlc_sum_rate(vlc, K, cfg.ofdma(), cfg.rho_vlc, cfg.sigma_vlc, route=cfg.vlc_route)
    kw = dict(mc=cfg.mc(), sort_by=cfg.sort_by, anchor=cfg.anchor, workers=cfg.workers)
    if mode == "noma":
        return mc_noma_vlc_sum_rate(vlc, K, cfg.noma(), cfg.rho_vlc, cfg.sigma_vlc, strongest=cfg.strongest, **kw)
    return mc_ofdma_vlc_sum_rate(vlc, K, cfg.ofdma(), cfg.rho_vlc, cfg.sigma_vlc, **kw)


@lru_cache(maxsize=512)
def _rf_rate(cfg: RunConfig, method: str) -> RateEstimate:
    rf, K = cfg.rf(), cfg.K
    if method == "analytic":
        return analytic_noma_rf_sum_rate(
            rf,
            K,
            cfg.noma(),
            cfg.sigma_rf,
            rho=cfg.rho_rf,
            route="chebyshev" if cfg.rf_route == "chebyshev" else "quadrature",
            strongest=cfg.strongest,
            error_model=cfg.rf_error_model,
        )
    return mc_noma_rf_sum_rate(
        rf,
        K,
        cfg.noma(),
        cfg.sigma_rf,
        mc=cfg.mc(),
        rho=cfg.rho_rf,
        strongest=cfg.strongest,
        sort_by=cfg.sort_by,
        anchor=cfg.anchor,
        workers=cfg.workers,
    )


def evaluate(cfg: RunConfig, link: str, mode: str, method: str) -> tuple[float, float, int]:
    """One ``(estimate, std_error, trials)`` triple.

    ``vlc`` and ``rf`` give sum rates in bit/s/Hz; ``hybrid`` and ``vlc_only``
    give energy efficiency in bit/J. The RF link is always NOMA; ``mode``
    selects the VLC scheme.
    """
    if link not in LINKS or mode not in MODES or method not in METHODS:
        raise DomainError(f"unknown link/mode/method {link}/{mode}/{method}")
    if link == "vlc":
        r = _vlc_rate(_rate_key(cfg), mode, method)
        return r.sum_rate, r.std_error, r.trials
    if link == "rf":
        if mode != "noma":
            raise DomainError("only NOMA is modelled on the RF link")
        r = _rf_rate(_rate_key(cfg), method)
        return r.sum_rate, r.std_error, r.trials
    h = cfg.hybrid()
    rv = _vlc_rate(_rate_key(cfg), mode, method)
    if link == "vlc_only":
        ee = vlc_only_energy_efficiency(h, rv)
        return ee.value, ee.std_error, rv.trials
    rr = _rf_rate(_rate_key(cfg), method)
    ee = energy_efficiency(h, hybrid_sum_rate(h, rv, rr))
    return ee.value, ee.std_error, rv.trials


def _record(cfg, param, value, link, mode, method) -> RunRecord:
    digest = cfg.digest()
    try:
        est, se, n = evaluate(cfg, link, mode, method)
        err = ""
    except (DomainError, AccuracyError) as exc:
        est, se, n, err = math.nan, math.nan, 0, f"{type(exc).__name__}: {exc}"
    if method == "analytic":
        se, n = (0.0, 0) if not err else (math.nan, 0)
    return RunRecord(param, value, link, mode, method, est, se, n, cfg.seed, digest, err)


def run_sweep(
    cfg: RunConfig,
    sweep: SweepSpec,
    modes=("noma",),
    methods=("analytic",),
    links=("vlc",),
    workers: int = 1,
) -> list[RunRecord]:
    """Evaluate the Cartesian product, ordered by (value, link, mode, method).

    A failing row is kept with a NaN estimate and its error message.
    """
    jobs = []
    for value in sweep.values():
        point = apply_sweep_value(cfg, sweep.parameter, value)
        for link in links:
            for mode in modes:
                if link == "rf" and mode != "noma":
                    continue
                for method in methods:
                    jobs.append((point, sweep.parameter, value, link, mode, method))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda j: _record(*j), jobs))
    return [_record(*j) for j in jobs]


# --- CSV -------------------------------------------------------------------

def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER.split(","))
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def write_csv(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(records_to_csv(records))


def parse_csv(text: str) -> list[RunRecord]:
    lines = text.split("\n")
    if lines[0] != CSV_HEADER:
        raise DomainError("unexpected CSV header")
    out = []
    for row in csv.reader(lines[1:]):
        if not row:
            continue
        p, v, link, mode, method, est, se, n, seed, dig = row
        out.append(RunRecord(p, float(v), link, mode, method, float(est), float(se), int(n), int(seed), dig))
    return out


def read_csv(path) -> list[RunRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_csv(fh.read())
