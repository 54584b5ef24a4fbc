"""Experiment runner: every subsystem behind a subcommand with reproducible
JSON configs and CSV/JSON outputs.

Outputs carry a comment header with the config hash, seed and package version;
bodies are byte-identical across runs of the same config.  Exit codes:
0 success, 1 invalid config, 2 numerical failure, 3 I/O failure.
"""

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .geometry import (BoundarySystem, Disc, HolderIndex, ProductDomain,
                       make_circle, make_fourier_contour)
from .quadrature import (ToleranceError, log_weight_integral,
                         lemma_bound_near_zero, lemma_bound_to_h0, pv_cauchy)
from .operators import cauchy_interior, plemelj_boundary
from .quadrature import area_cauchy
from .holder import BoundaryCurve, Interval, seminorm_estimate
from .counterexample import remark_divergence_experiment, tumanov_boundary
from .dbar import (example_form, example_witness, residual_report, solve_dbar,
                   witness_target)


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


def _require_pow2(cfg, keys):
    for k in keys:
        if k in cfg and not _is_pow2(int(cfg[k])):
            raise ConfigError(f"resolution {k}={cfg[k]} must be a power of two")


def _config_hash(cfg):
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path, cfg, columns, rows, stamp):
    lines = [f"# config_hash={_config_hash(cfg)}",
             f"# seed={cfg.get('seed', 0)}",
             f"# version={__version__}"]
    if stamp:
        lines.append(f"# timestamp={time.strftime('%Y-%m-%dT%H:%M:%S')}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_json(path, cfg, payload, stamp):
    doc = {"config_hash": _config_hash(cfg), "seed": cfg.get("seed", 0),
           "version": __version__}
    if stamp:
        doc["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    doc.update(payload)
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")


def _merge_config(args, defaults):
    cfg = dict(defaults)
    for k in defaults:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text())
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}")
        for k, v in loaded.items():
            if k not in cfg:
                raise ConfigError(f"unknown config field {k!r}")
            cfg[k] = v
    return cfg


# ---------------------------------------------------------------------------
# verify suites

def _suite_pv(out, cfg, stamp):
    rows, ok = [], True
    for name, contour in [("circle", make_circle(0, 1, 256)),
                          ("ellipse", make_fourier_contour({1: 0.75, -1: 0.25}, 256))]:
        bs = BoundarySystem([contour])
        one = lambda z: np.ones_like(z)
        worst = 0.0
        for t in contour.z:
            worst = max(worst, abs(pv_cauchy(one, t, bs) - 0.5))
        passed = worst <= 1e-10
        ok &= passed
        rows.append((name, repr(worst), "pass" if passed else "FAIL"))
        print(f"pv identity on {name}: max err {worst:.2e} -> {'pass' if passed else 'FAIL'}")
    _write_csv(out / "verify_pv.csv", cfg, ["case", "max_abs_err", "status"], rows, stamp)
    return ok


def _suite_cauchy(out, cfg, stamp):
    bs = BoundarySystem([make_circle(0, 1, 512)])
    rng = np.random.default_rng(cfg["seed"])
    pts = 0.85 * np.sqrt(rng.uniform(0.05, 1.0, 10)) * np.exp(1j * rng.uniform(0, 2 * math.pi, 10))
    rows, ok = [], True
    for deg in range(9):
        f = lambda z, _d=deg: z ** _d
        worst = max(abs(cauchy_interior(f, z, bs) - z ** deg) for z in pts)
        passed = worst <= 1e-10
        ok &= passed
        rows.append((deg, repr(worst), "pass" if passed else "FAIL"))
        print(f"monomial degree {deg}: max err {worst:.2e} -> {'pass' if passed else 'FAIL'}")
    _write_csv(out / "verify_cauchy.csv", cfg, ["degree", "max_abs_err", "status"], rows, stamp)
    return ok


def _suite_plemelj(out, cfg, stamp):
    bs = BoundarySystem([make_circle(0, 1, 256)])
    f = lambda z: np.conj(z) + z ** 2
    rows, ok = [], True
    for k in range(8):
        t = np.exp(2j * math.pi * k / 8)
        phi = plemelj_boundary(f, t, bs)
        e1, e2 = 1e-2, 1e-3
        v1 = cauchy_interior(f, t * (1 - e1), bs)
        v2 = cauchy_interior(f, t * (1 - e2), bs)
        rich = (e1 * v2 - e2 * v1) / (e1 - e2)
        err = abs(rich - phi)
        passed = err <= 1e-4
        ok &= passed
        rows.append((k, repr(err), "pass" if passed else "FAIL"))
        print(f"plemelj point {k}: richardson err {err:.2e} -> {'pass' if passed else 'FAIL'}")
    _write_csv(out / "verify_plemelj.csv", cfg, ["point", "richardson_err", "status"], rows, stamp)
    return ok


def _suite_lemma41(out, cfg, stamp):
    rows, ok = [], True
    for alpha, nu in [(0.5, 1.0), (0.5, -1.0), (1.0, 1.0), (0.9, 2.0)]:
        h0 = HolderIndex(alpha=alpha, nu=nu).h0
        hs = h0 * 0.5 ** np.linspace(0.0, 20.0, 50)
        viol = 0
        for h in hs:
            nz = log_weight_integral(h, alpha, nu, "near_zero", h0=h0)
            if nz > lemma_bound_near_zero(h, alpha, nu) * (1 + 1e-9):
                viol += 1
            th = log_weight_integral(h, alpha, nu, "to_h0", h0=h0)
            if th > lemma_bound_to_h0(h, alpha, nu) * (1 + 1e-9):
                viol += 1
        passed = viol == 0
        ok &= passed
        rows.append((alpha, nu, viol, "pass" if passed else "FAIL"))
        print(f"log-weight bounds alpha={alpha} nu={nu}: {viol} violations -> "
              f"{'pass' if passed else 'FAIL'}")
    _write_csv(out / "verify_lemma41.csv", cfg, ["alpha", "nu", "violations", "status"],
               rows, stamp)
    return ok


_SUITES = {"pv": _suite_pv, "cauchy": _suite_cauchy,
           "plemelj": _suite_plemelj, "lemma41": _suite_lemma41}


def cmd_verify(args):
    cfg = _merge_config(args, {"suite": "all", "seed": 0})
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = list(_SUITES) if cfg["suite"] == "all" else [cfg["suite"]]
    if any(n not in _SUITES for n in names):
        raise ConfigError(f"unknown suite {cfg['suite']!r}")
    ok = all(_SUITES[n](out, cfg, not args.no_timestamp) for n in names)
    if not ok:
        raise ToleranceError("verify suite failed")
    return 0


def cmd_tumanov(args):
    cfg = _merge_config(args, {"alpha": 0.5, "J": 12, "mu": "0,0.5,1", "seed": 0})
    if not (0.0 < cfg["alpha"] < 1.0):
        raise ConfigError("alpha must lie in (0, 1)")
    mus = [float(x) for x in str(cfg["mu"]).split(",")]
    rows = remark_divergence_experiment(cfg["alpha"], mus, int(cfg["J"]))
    cols = ["j", "lambda", "S_value_re", "S_value_im"]
    cols += [f"q_mu{m:g}" for m in mus] + [f"qabs_mu{m:g}" for m in mus]
    table = [[r["j"], r["lam"], r["S_re"], r["S_im"]]
             + [r[f"q_mu{m:g}"] for m in mus] + [r[f"qabs_mu{m:g}"] for m in mus]
             for r in rows]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "tumanov.csv", cfg, cols, table, not args.no_timestamp)
    print(f"wrote {out / 'tumanov.csv'} ({len(table)} rows)")
    return 0


_SEMINORM_FUNCS = {
    "linear": (lambda x: x, Interval(0.0, 0.5)),
    "sqrt_abs": (lambda x: np.sqrt(np.abs(x)) + 0j, Interval(0.0, 0.5)),
    "sin": (lambda x: np.sin(x), Interval(0.0, 0.5)),
    "tumanov": (lambda th: tumanov_boundary(np.real(th), 2.0 ** -6, 0.5) + 0j,
                Interval(-math.pi, math.pi)),
}


def cmd_seminorm(args):
    cfg = _merge_config(args, {"function": "sqrt_abs", "alpha": 0.5, "nu": 0.0,
                               "budget": 512, "bands": 16, "seed": 0})
    _require_pow2(cfg, ["budget"])
    if cfg["function"] not in _SEMINORM_FUNCS:
        raise ConfigError(f"unknown function {cfg['function']!r}; "
                          f"choose from {sorted(_SEMINORM_FUNCS)}")
    f, dom = _SEMINORM_FUNCS[cfg["function"]]
    est = seminorm_estimate(f, dom, cfg["alpha"], cfg["nu"], int(cfg["budget"]),
                            bands=int(cfg["bands"]), seed=int(cfg["seed"]))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "seminorm_bands.csv", cfg, ["band_j", "h_mid", "max_quotient"],
               [(j, hm, q) for j, hm, q in est.band_table], not args.no_timestamp)
    _write_json(out / "seminorm.json", cfg, {"estimate": est.to_json_dict()},
                not args.no_timestamp)
    print(f"seminorm estimate {est.value:.6g} over {est.pair_count} pairs")
    return 0


_OPERATOR_DATA = {
    "conj": lambda z: np.conj(z),
    "poly2": lambda z: z ** 2,
    "poly5": lambda z: z ** 5,
    "runge": lambda z: 1.0 / (z - 1.3),
}


def cmd_operators(args):
    cfg = _merge_config(args, {"op": "S", "data": "poly2", "n": 256,
                               "points": 16, "seed": 0})
    _require_pow2(cfg, ["n", "points"])
    if cfg["data"] not in _OPERATOR_DATA:
        raise ConfigError(f"unknown data {cfg['data']!r}")
    f = _OPERATOR_DATA[cfg["data"]]
    rows = []
    if cfg["op"] in ("S", "phi"):
        bs = BoundarySystem([make_circle(0, 1, int(cfg["n"]))])
        if cfg["op"] == "S":
            rng = np.random.default_rng(cfg["seed"])
            pts = 0.8 * np.sqrt(rng.uniform(0.05, 1, int(cfg["points"]))) \
                * np.exp(1j * rng.uniform(0, 2 * math.pi, int(cfg["points"])))
            for z in pts:
                v = cauchy_interior(f, z, bs)
                rows.append((z.real, z.imag, v.real, v.imag))
        else:
            for t in bs.contours[0].z[:: int(cfg["n"]) // int(cfg["points"])]:
                v = plemelj_boundary(f, t, bs)
                rows.append((t.real, t.imag, v.real, v.imag))
    elif cfg["op"] == "T":
        d = Disc(0j, 1.0)
        rng = np.random.default_rng(cfg["seed"])
        pts = 0.8 * np.sqrt(rng.uniform(0.05, 1, int(cfg["points"]))) \
            * np.exp(1j * rng.uniform(0, 2 * math.pi, int(cfg["points"])))
        for z in pts:
            v = area_cauchy(f, z, d, n_theta=int(cfg["n"]), n_r=64)
            rows.append((z.real, z.imag, v.real, v.imag))
    else:
        raise ConfigError(f"unknown operator {cfg['op']!r}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "operators.csv", cfg, ["z_re", "z_im", "val_re", "val_im"],
               rows, not args.no_timestamp)
    print(f"wrote {out / 'operators.csv'} ({len(rows)} rows)")
    return 0


def _dbar_form(cfg, domain):
    kind = cfg["form"]
    if kind == "example":
        return example_form(int(cfg["k"]), cfg["alpha"], cfg["nu"], domain=domain)
    if kind == "conj_pair":
        from .dbar import Form01
        return Form01(domain,
                      (lambda z1, z2: np.conj(z2) + 0.0 * z1,
                       lambda z1, z2: np.conj(z1) + 0.0 * z2),
                      depends=((1,), (0,)))
    raise ConfigError(f"unknown form {kind!r}")


def _dbar_domain(cfg):
    radii = cfg["radii"]
    if len(radii) != 2:
        raise ConfigError("exactly two disc radii expected")
    return ProductDomain.of_discs(
        (Disc(0j, float(radii[0])), Disc(0j, float(radii[1]))),
        boundary_n=int(cfg["boundary_n"]), rings=2, rays=4, clearance=0.35)


def cmd_dbar(args):
    defaults = {"form": "conj_pair", "k": 0, "alpha": 0.5, "nu": 1.0,
                "radii": [1.0, 1.0], "boundary_n": 512, "area_theta": 64,
                "area_r": 64, "clearance": 0.2, "h": 1e-3, "m": 128,
                "xis": "0,0.5j,-0.5j,-0.5,0.9", "seed": 0}
    cfg = _merge_config(args, defaults)
    _require_pow2(cfg, ["boundary_n", "area_theta", "area_r", "m"])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    domain = _dbar_domain(cfg)
    form = _dbar_form(cfg, domain)
    area = (int(cfg["area_theta"]), int(cfg["area_r"]))
    stamp = not args.no_timestamp

    if args.dbar_command == "solve":
        u = solve_dbar(form, area=area)
        _write_json(out / "dbar_solution.json", cfg, {"u": u.to_json_dict()}, stamp)
        print(f"wrote {out / 'dbar_solution.json'}")
        return 0

    if args.dbar_command == "residual":
        u = solve_dbar(form, area=area, fill_grid=False)
        rng = np.random.default_rng(cfg["seed"])
        clear = float(cfg["clearance"])
        nodes = []
        while len(nodes) < 6:
            z = tuple((1 - clear - 0.2) * np.sqrt(rng.uniform(0.05, 1, 2))
                      * np.exp(1j * rng.uniform(0, 2 * math.pi, 2)))
            nodes.append(z)
        rep = residual_report(form, u, nodes, float(cfg["h"]))
        payload = {"max_rel_err": list(rep.max_rel_err), "overall": rep.overall,
                   "h": rep.h,
                   "nodes": [[z.real, z.imag] for pt in rep.nodes for z in pt]}
        _write_json(out / "dbar_residual.json", cfg, payload, stamp)
        print(f"max relative dbar residual: {rep.overall:.3e}")
        return 0

    if args.dbar_command == "witness":
        if cfg["form"] != "example":
            raise ConfigError("the witness run needs the example form")
        u = solve_dbar(form, area=area, fill_grid=False)
        xis = [complex(x) for x in str(cfg["xis"]).split(",")]
        rows = example_witness(u, xis, m=int(cfg["m"]), k=int(cfg["k"]),
                               alpha=cfg["alpha"], nu=cfg["nu"])
        table = [(r["xi"].real, r["xi"].imag, r["w"].real, r["w"].imag,
                  r["target"].real, r["target"].imag, r["abs_err"]) for r in rows]
        _write_csv(out / "dbar_witness.csv", cfg,
                   ["xi_re", "xi_im", "w_re", "w_im",
                    "closed_form_re", "closed_form_im", "abs_err"],
                   table, stamp)
        worst = max(r["abs_err"] for r in rows)
        print(f"max witness abs err: {worst:.3e}")
        if worst > 1e-2:
            raise ToleranceError("witness mismatch above 1e-2")
        return 0

    raise ConfigError("missing dbar subcommand (solve/residual/witness)")


def build_parser():
    p = _Parser(prog="logcauchy", description=__doc__)
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--config", default=None, help="JSON config overriding flags")
    p.add_argument("--no-timestamp", action="store_true",
                   help="omit the timestamp header line")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", default=None,
                   choices=sorted(_SUITES) + ["all"])
    v.add_argument("--seed", type=int, default=None)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("tumanov", help="dyadic divergence table")
    t.add_argument("--alpha", type=float, default=None)
    t.add_argument("--J", type=int, default=None)
    t.add_argument("--mu", default=None, help="comma-separated exponents")
    t.add_argument("--seed", type=int, default=None)
    t.set_defaults(func=cmd_tumanov)

    s = sub.add_parser("seminorm", help="per-band seminorm quotients")
    s.add_argument("--function", default=None)
    s.add_argument("--alpha", type=float, default=None)
    s.add_argument("--nu", type=float, default=None)
    s.add_argument("--budget", type=int, default=None)
    s.add_argument("--bands", type=int, default=None)
    s.add_argument("--seed", type=int, default=None)
    s.set_defaults(func=cmd_seminorm)

    o = sub.add_parser("operators", help="evaluate S/phi/T on built-in data")
    o.add_argument("--op", default=None, choices=["S", "phi", "T"])
    o.add_argument("--data", default=None)
    o.add_argument("--n", type=int, default=None)
    o.add_argument("--points", type=int, default=None)
    o.add_argument("--seed", type=int, default=None)
    o.set_defaults(func=cmd_operators)

    d = sub.add_parser("dbar", help="solve/residual/witness on the bidisc")
    dsub = d.add_subparsers(dest="dbar_command", required=True)
    for name in ("solve", "residual", "witness"):
        dd = dsub.add_parser(name)
        dd.add_argument("--form", default=None)
        dd.add_argument("--k", type=int, default=None)
        dd.add_argument("--alpha", type=float, default=None)
        dd.add_argument("--nu", type=float, default=None)
        dd.add_argument("--boundary-n", dest="boundary_n", type=int, default=None)
        dd.add_argument("--area-theta", dest="area_theta", type=int, default=None)
        dd.add_argument("--area-r", dest="area_r", type=int, default=None)
        dd.add_argument("--clearance", type=float, default=None)
        dd.add_argument("--h", type=float, default=None)
        dd.add_argument("--m", type=int, default=None)
        dd.add_argument("--xis", default=None)
        dd.add_argument("--seed", type=int, default=None)
        dd.set_defaults(func=cmd_dbar)

    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except ToleranceError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"i/o failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
