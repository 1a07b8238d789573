"""Flat ``key = value`` run configuration with Table-style defaults.

Precedence, lowest first: built-in default, ``HYBRID_NOMA_SEED`` (seed only),
config file, command-line overrides. Every resolved key remembers where its
value came from.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .channel import RfApConfig, VlcApConfig
from .errors import ConfigError, DomainError
from .hybrid import HybridConfig
from .montecarlo import McConfig
from .rates import NomaAllocation, OfdmaAllocation

SEED_ENV = "HYBRID_NOMA_SEED"


def db_to_linear(db: float) -> float:
    """``10^(db/10)``; ``-inf`` maps to exactly 0."""
    if db == -math.inf:
        return 0.0
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return -math.inf if x == 0 else 10.0 * math.log10(x)


# --- value parsers ---------------------------------------------------------

def _float(s: str) -> float:
    s = s.strip().lower()
    if s in ("perfect", "none"):
        return -math.inf
    return float(s)


def _opt_float(s: str):
    s = s.strip().lower()
    if s in ("", "auto", "same"):
        return None
    return _float(s)


def _int(s: str) -> int:
    v = float(s)
    if v != int(v):
        raise ValueError(f"not an integer: {s}")
    return int(v)


def _bool(s: str) -> bool:
    s = s.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s}")


def _str(s: str) -> str:
    return s.strip()


def _floats(s: str) -> tuple:
    s = s.strip()
    if s.lower() in ("", "auto"):
        return ()
    return tuple(float(x) for x in s.split(","))


@dataclass(frozen=True)
class _Key:
    parse: Callable[[str], Any]
    check: Callable[[Any], bool]
    hint: str


def _pos(v):
    return v > 0


def _prob(v):
    return 0.0 <= v <= 1.0


def _choice(*opts):
    return _Key(_str, lambda v: v in opts, "one of " + ", ".join(opts))


_KEYS: dict[str, _Key] = {
    # VLC access point and receiver
    "height_L": _Key(_float, _pos, "> 0 m"),
    "cell_radius_re": _Key(_float, _pos, "> 0 m"),
    "semi_angle_deg": _Key(_float, lambda v: 0 < v < 90, "in (0, 90) degrees"),
    "pd_area_A": _Key(_float, _pos, "> 0 m^2"),
    "responsivity_Rp": _Key(_float, _pos, "> 0 A/W"),
    "filter_gain_T": _Key(_float, _pos, "> 0"),
    "fov_deg": _Key(_float, lambda v: 0 < v <= 90, "in (0, 90] degrees"),
    "refractive_index": _Key(_float, lambda v: v >= 1, ">= 1"),
    "tx_elec_power_Pe": _Key(_float, _pos, "> 0 W"),
    "noise_psd_N0": _Key(_float, _pos, "> 0 A^2/Hz"),
    "bandwidth_B": _Key(_float, _pos, "> 0 Hz"),
    "rho_db": _Key(_opt_float, lambda v: v is None or math.isfinite(v), "finite dB or 'auto'"),
    # multiple access
    "K": _Key(_int, lambda v: 1 <= v <= 60, "integer in [1, 60]"),
    "mu": _Key(_float, lambda v: 0 < v < 1, "in (0, 1)"),
    "strongest": _choice("consistent", "as_printed"),
    "vlc_route": _choice("quadrature", "series"),
    # channel estimation error
    "sigma_e_sq_db": _Key(_float, lambda v: v < 0 or v == -math.inf, "< 0 dB or 'perfect'"),
    "sigma_e_sq_rf_db": _Key(_opt_float, lambda v: v is None or v < 0, "< 0 dB, 'perfect' or 'same'"),
    # RF access point
    "path_loss_exp": _Key(_float, lambda v: v >= 2, ">= 2"),
    "cell_radius_D": _Key(_float, _pos, "> 0 m"),
    "chebyshev_order_n": _Key(_int, lambda v: 1 <= v <= 200, "integer in [1, 200]"),
    "rf_tx_power_P": _Key(_float, _pos, "> 0 W"),
    "rf_noise_var": _Key(_float, _pos, "> 0 W"),
    "rf_rho_db": _Key(_opt_float, lambda v: v is None or math.isfinite(v), "finite dB or 'auto'"),
    "bandwidth_B_RF": _Key(_float, _pos, "> 0 Hz"),
    "rf_route": _choice("quadrature", "chebyshev"),
    "rf_error_model": _choice("normalized", "as_printed"),
    # hybrid network and energy
    "beta_vlc": _Key(_float, _prob, "in [0, 1]"),
    "beta_rf": _Key(_float, _prob, "in [0, 1]"),
    "beta_rf_follows_vlc": _Key(_bool, lambda v: True, "boolean"),
    "Q_vlc": _Key(_float, lambda v: v >= 0, ">= 0 W"),
    "Q_rf": _Key(_float, lambda v: v >= 0, ">= 0 W"),
    "P_rf_total": _Key(_float, lambda v: v >= 0, ">= 0 W"),
    "P_rf_users": _Key(_floats, lambda v: all(p >= 0 for p in v), "comma list of >= 0 W"),
    # Monte Carlo
    "trials": _Key(_int, lambda v: v >= 1, "integer >= 1"),
    "seed": _Key(_int, lambda v: 0 <= v < 2 ** 64, "integer in [0, 2^64)"),
    "batch": _Key(_int, lambda v: v >= 1, "integer >= 1"),
    "workers": _Key(_int, lambda v: v >= 1, "integer >= 1"),
    "sort_by": _choice("estimated", "true"),
    "anchor": _choice("estimate", "truth"),
}


@dataclass(frozen=True)
class RunConfig:
    height_L: float = 2.15
    cell_radius_re: float = 3.6
    semi_angle_deg: float = 45.0
    pd_area_A: float = 1e-4
    responsivity_Rp: float = 0.4
    filter_gain_T: float = 1.0
    fov_deg: float = 60.0
    refractive_index: float = 1.5
    tx_elec_power_Pe: float = 0.25
    noise_psd_N0: float = 1e-21
    bandwidth_B: float = 20e6
    rho_db: float | None = None
    K: int = 2
    mu: float = 0.4
    strongest: str = "consistent"
    vlc_route: str = "quadrature"
    sigma_e_sq_db: float = -math.inf
    sigma_e_sq_rf_db: float | None = None
    path_loss_exp: float = 3.0
    cell_radius_D: float = 10.0
    chebyshev_order_n: int = 10
    rf_tx_power_P: float = 0.7
    rf_noise_var: float = 7e-4
    rf_rho_db: float | None = None
    bandwidth_B_RF: float = 20e6
    rf_route: str = "quadrature"
    rf_error_model: str = "normalized"
    beta_vlc: float = 0.5
    beta_rf: float = 0.5
    beta_rf_follows_vlc: bool = False
    Q_vlc: float = 4.0
    Q_rf: float = 6.7
    P_rf_total: float = 0.7
    P_rf_users: tuple = ()
    trials: int = 100_000
    seed: int = 12345
    batch: int = 50_000
    workers: int = 1
    sort_by: str = "estimated"
    anchor: str = "estimate"
    provenance: dict = field(default_factory=dict, compare=False, repr=False)

    # --- derived objects ---------------------------------------------------

    def vlc(self) -> VlcApConfig:
        return VlcApConfig(
            height_L=self.height_L,
            cell_radius_re=self.cell_radius_re,
            semi_angle_deg=self.semi_angle_deg,
            pd_area_A=self.pd_area_A,
            responsivity_Rp=self.responsivity_Rp,
            filter_gain_T=self.filter_gain_T,
            fov_deg=self.fov_deg,
            refractive_index=self.refractive_index,
            tx_elec_power_Pe=self.tx_elec_power_Pe,
            noise_psd_N0=self.noise_psd_N0,
            bandwidth_B=self.bandwidth_B,
        )

    def rf(self) -> RfApConfig:
        return RfApConfig(
            path_loss_exp=self.path_loss_exp,
            cell_radius_D=self.cell_radius_D,
            chebyshev_order_n=self.chebyshev_order_n,
            tx_power_P=self.rf_tx_power_P,
            noise_var=self.rf_noise_var,
            bandwidth_B_RF=self.bandwidth_B_RF,
        )

    @property
    def rho_vlc(self) -> float:
        if self.rho_db is None:
            return self.vlc().rho
        return db_to_linear(self.rho_db)

    @property
    def rho_rf(self) -> float:
        if self.rf_rho_db is None:
            return self.rf_tx_power_P / self.rf_noise_var
        return db_to_linear(self.rf_rho_db)

    @property
    def sigma_vlc(self) -> float:
        return db_to_linear(self.sigma_e_sq_db)

    @property
    def sigma_rf(self) -> float:
        db = self.sigma_e_sq_db if self.sigma_e_sq_rf_db is None else self.sigma_e_sq_rf_db
        return db_to_linear(db)

    def noma(self) -> NomaAllocation:
        return NomaAllocation.geometric(self.K, self.mu)

    def ofdma(self) -> OfdmaAllocation:
        return OfdmaAllocation.equal(self.K)

    def hybrid(self) -> HybridConfig:
        users = self.P_rf_users or (self.P_rf_total / self.K,) * self.K
        beta_rf = self.beta_vlc if self.beta_rf_follows_vlc else self.beta_rf
        return HybridConfig(
            beta_vlc=self.beta_vlc,
            beta_rf=beta_rf,
            B_vlc=self.bandwidth_B,
            B_rf=self.bandwidth_B_RF,
            Q_vlc=self.Q_vlc,
            Q_rf=self.Q_rf,
            P_rf_users=users,
        )

    def mc(self) -> McConfig:
        return McConfig(trials=self.trials, seed=self.seed, batch=self.batch)

    # --- identity ----------------------------------------------------------

    def as_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.name != "provenance"}
        d["P_rf_users"] = list(d["P_rf_users"])
        return d

    def digest(self) -> str:
        """sha256 over the canonical JSON of every resolved value."""
        blob = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"), allow_nan=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def with_values(self, source: str = "override", **values) -> "RunConfig":
        for k, v in values.items():
            _validate(k, v, None)
        prov = dict(self.provenance)
        prov.update({k: source for k in values})
        return dataclasses.replace(self, provenance=prov, **values)


def _validate(key, value, line):
    spec = _KEYS.get(key)
    if spec is None:
        raise ConfigError(f"unknown key '{key}'", key=key, line=line)
    if not spec.check(value):
        raise ConfigError(f"value {value!r} for '{key}' out of range: expected {spec.hint}", key=key, line=line)


def _parse_value(key, raw, line):
    spec = _KEYS.get(key)
    if spec is None:
        raise ConfigError(f"unknown key '{key}'", key=key, line=line)
    try:
        value = spec.parse(raw)
    except ValueError as exc:
        raise ConfigError(f"cannot parse '{key}': {exc}", key=key, line=line) from None
    _validate(key, value, line)
    return value


def parse_text(text: str, source: str = "<string>") -> tuple[dict, dict]:
    """Parse config text into ``(values, provenance)``."""
    values, prov = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'", key=None, line=lineno)
        key, val = (p.strip() for p in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key", key=None, line=lineno)
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key '{key}'", key=key, line=lineno)
        values[key] = _parse_value(key, val, lineno)
        prov[key] = f"file:{source}:{lineno}"
    return values, prov


def resolve(path=None, overrides: dict[str, str] | None = None, env=None) -> RunConfig:
    """Merge defaults, environment, an optional file and string overrides."""
    env = os.environ if env is None else env
    values: dict[str, Any] = {}
    prov = {f.name: "default" for f in dataclasses.fields(RunConfig) if f.name != "provenance"}
    if env.get(SEED_ENV):
        values["seed"] = _parse_value("seed", env[SEED_ENV], None)
        prov["seed"] = f"env:{SEED_ENV}"
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}", key=None, line=None)
        v, pv = parse_text(p.read_text(encoding="utf-8"), str(p))
        values.update(v)
        prov.update(pv)
    for key, raw in (overrides or {}).items():
        values[key] = _parse_value(key, str(raw), None)
        prov[key] = "flag"
    try:
        cfg = RunConfig(provenance=prov, **values)
        cfg.vlc()
        cfg.rf()
    except DomainError as exc:
        raise ConfigError(str(exc), key=None, line=None) from None
    return cfg


def parse_config(path) -> RunConfig:
    return resolve(path, env={})


def format_provenance(cfg: RunConfig) -> str:
    lines = []
    for k, v in cfg.as_dict().items():
        lines.append(f"{k} = {_fmt(v)}  # {cfg.provenance.get(k, 'default')}")
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if v is None:
        return "auto"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)  # shortest form that round-trips
    if isinstance(v, list):
        return ",".join(repr(float(x)) for x in v)
    return str(v)


def config_keys() -> list[str]:
    return list(_KEYS)
