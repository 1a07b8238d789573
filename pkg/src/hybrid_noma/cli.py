"""Command-line front end.

Exit codes: 0 success, 1 input/configuration error, 2 accuracy or
convergence failure.
"""

from __future__ import annotations

import argparse
import math
import sys

from .config import ConfigError, RunConfig, format_provenance, resolve
from .errors import AccuracyError, DomainError
from .figures import PRESETS, reproduce_figure
from .sweep import RunRecord, SweepSpec, evaluate, records_to_csv, run_sweep

EXIT_OK, EXIT_INPUT, EXIT_ACCURACY = 0, 1, 2


def _csv_list(s: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in s.split(",") if x.strip())


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any config key")
    p.add_argument("--k", type=str, help="number of users K")
    p.add_argument("--rho-db", type=str, help="VLC transmit SNR in dB")
    p.add_argument("--sigma-e-db", type=str, help="CSI error variance in dB ('perfect' for none)")
    p.add_argument("--seed", type=str)
    p.add_argument("--trials", type=str)
    p.add_argument("--workers", type=str)
    p.add_argument("--show-config", action="store_true", help="echo the resolved config with provenance to stderr")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hybrid-noma", description="NOMA VLC/RF sum rate and energy efficiency")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sumrate", help="average sum rate at one operating point")
    _common(p)
    p.add_argument("--link", choices=("vlc", "rf"), default="vlc")
    p.add_argument("--mode", choices=("noma", "ofdma"), default="noma")
    p.add_argument("--methods", type=_csv_list, default=("analytic", "mc"))
    p.add_argument("--out", help="CSV output path (default stdout)")

    p = sub.add_parser("energy", help="hybrid and standalone-VLC energy efficiency")
    _common(p)
    p.add_argument("--beta", type=str, help="VLC LOS availability")
    p.add_argument("--beta-rf", type=str, help="RF LOS availability")
    p.add_argument("--mode", choices=("noma", "ofdma"), default="noma")
    p.add_argument("--methods", type=_csv_list, default=("analytic",))
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="sweep one parameter")
    _common(p)
    p.add_argument("--param", required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--scale", choices=("linear", "log"), default="linear")
    p.add_argument("--links", type=_csv_list, default=("vlc",))
    p.add_argument("--modes", type=_csv_list, default=("noma",))
    p.add_argument("--methods", type=_csv_list, default=("analytic",))
    p.add_argument("--out")

    p = sub.add_parser("reproduce", help="regenerate the data behind a figure")
    _common(p)
    p.add_argument("--figure", required=True, help="fig3 .. fig13, or 'all'")
    p.add_argument("--out-dir", default="out")
    p.add_argument("--methods", type=_csv_list, default=("analytic", "mc"))
    p.add_argument("--no-render", action="store_true", help="skip the PNG")

    p = sub.add_parser("selftest", help="analytic-vs-Monte-Carlo battery")
    _common(p)

    p = sub.add_parser("config", help="print the resolved configuration")
    _common(p)
    return ap


def _overrides(args) -> dict[str, str]:
    ov = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got '{item}'")
        k, v = item.split("=", 1)
        ov[k.strip()] = v.strip()
    for flag, key in (
        ("k", "K"),
        ("rho_db", "rho_db"),
        ("sigma_e_db", "sigma_e_sq_db"),
        ("seed", "seed"),
        ("trials", "trials"),
        ("workers", "workers"),
        ("beta", "beta_vlc"),
        ("beta_rf", "beta_rf"),
    ):
        val = getattr(args, flag, None)
        if val is not None:
            ov[key] = val
    return ov


def _check_methods(methods):
    bad = [m for m in methods if m not in ("analytic", "mc")]
    if bad or not methods:
        raise ConfigError(f"methods must be drawn from analytic, mc; got {','.join(methods) or 'nothing'}")


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _point(cfg: RunConfig, param, value, link, mode, methods) -> list[RunRecord]:
    rows = []
    for method in methods:
        est, se, n = evaluate(cfg, link, mode, method)
        if method == "analytic":
            se, n = 0.0, 0
        rows.append(RunRecord(param, value, link, mode, method, est, se, n, cfg.seed, cfg.digest()))
    return rows


def cmd_sumrate(cfg, args):
    _check_methods(args.methods)
    if args.link == "rf" and args.mode != "noma":
        raise ConfigError("only NOMA is modelled on the RF link")
    _emit(records_to_csv(_point(cfg, "K", float(cfg.K), args.link, args.mode, args.methods)), args.out)
    return EXIT_OK


def cmd_energy(cfg, args):
    _check_methods(args.methods)
    rows = []
    for link in ("hybrid", "vlc_only"):
        rows += _point(cfg, "beta_los", cfg.beta_vlc, link, args.mode, args.methods)
    _emit(records_to_csv(rows), args.out)
    return EXIT_OK


def cmd_sweep(cfg, args):
    _check_methods(args.methods)
    spec = SweepSpec(args.param, args.start, args.stop, args.steps, args.scale)
    records = run_sweep(cfg, spec, modes=args.modes, methods=args.methods, links=args.links, workers=cfg.workers)
    for r in records:
        if r.error:
            print(f"row {r.param}={r.value:g} {r.link}/{r.mode}/{r.method}: {r.error}", file=sys.stderr)
    _emit(records_to_csv(records), args.out)
    return EXIT_OK


def cmd_reproduce(cfg, args):
    _check_methods(args.methods)
    figures = list(PRESETS) if args.figure == "all" else [args.figure]
    for fig in figures:
        for path in reproduce_figure(fig, args.out_dir, cfg, methods=args.methods, render=not args.no_render):
            print(path)
    return EXIT_OK


def selftest_battery(cfg: RunConfig):
    """(label, analytic, mc estimate, mc std error) for a small fixed battery."""
    cases = [
        ("vlc", "noma", dict(K=3, rho_db=120.0, sigma_e_sq_db=-130.0)),
        ("vlc", "ofdma", dict(K=3, rho_db=120.0, sigma_e_sq_db=-130.0)),
        ("vlc", "noma", dict(K=5, rho_db=180.0, sigma_e_sq_db=-120.0)),
        ("rf", "noma", dict(K=3, sigma_e_sq_db=-20.0, rf_rho_db=30.0)),
    ]
    out = []
    for link, mode, ov in cases:
        c = cfg.with_values(source="selftest", **ov)
        a, _, _ = evaluate(c, link, mode, "analytic")
        m, se, _ = evaluate(c, link, mode, "mc")
        label = f"{link}/{mode} " + " ".join(f"{k}={v:g}" for k, v in ov.items())
        out.append((label, a, m, se))
    return out


def cmd_selftest(cfg, args):
    failed = 0
    for label, a, m, se in selftest_battery(cfg):
        z = (m - a) / se if se > 0 else math.inf
        ok = abs(z) <= 3.0
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {label}: analytic={a:.6g} mc={m:.6g} se={se:.3g} z={z:+.2f}")
    return EXIT_OK if not failed else EXIT_ACCURACY


def cmd_config(cfg, args):
    sys.stdout.write(format_provenance(cfg))
    return EXIT_OK


_COMMANDS = {
    "sumrate": cmd_sumrate,
    "energy": cmd_energy,
    "sweep": cmd_sweep,
    "reproduce": cmd_reproduce,
    "selftest": cmd_selftest,
    "config": cmd_config,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args.config, _overrides(args))
        if args.show_config:
            sys.stderr.write(format_provenance(cfg))
        return _COMMANDS[args.command](cfg, args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AccuracyError as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY


if __name__ == "__main__":
    sys.exit(main())
