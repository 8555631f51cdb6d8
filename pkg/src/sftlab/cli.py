"""Command line: sample | emptiness | entropy | orbits | zeta | cover | experiment.

Precedence for every option: explicit flag > config file (flat `key = value`
lines via --config) > built-in default.  Randomized commands require --seed.
Output encodings are UTF-8 with LF newlines; JSON goes to stdout unless an
output path is given.
"""

import argparse
import json
import os
import sys

from . import __version__
from .errors import SftlabError
from . import analysis, experiments, patterns, repeatcover, zeta
from .ensemble import AllowedSet, EnsembleParams, sample
from .orbits import count_orbits


def _load_config(path):
    out = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SftlabError(f"bad config line (expected key = value): {line!r}")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


def _apply_config(args, parser):
    """Fill parser defaults from the config file for options not on the CLI."""
    if not getattr(args, "config", None):
        return args
    cfg = _load_config(args.config)
    explicit = {a.lstrip("-").split("=")[0].replace("-", "_") for a in sys.argv[1:]
                if a.startswith("--")}
    for key, raw in cfg.items():
        if key in explicit or not hasattr(args, key):
            continue
        cur = getattr(args, key)
        if isinstance(cur, bool):
            setattr(args, key, raw.lower() in ("1", "true", "yes"))
        elif isinstance(cur, int):
            setattr(args, key, int(raw))
        elif isinstance(cur, float):
            setattr(args, key, float(raw))
        else:
            setattr(args, key, raw)
    return args


def _emit_json(payload, path=None):
    text = json.dumps(payload, indent=2, default=str)
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _parse_alphas(text):
    return tuple(float(x) for x in text.split(","))


def _add_common(p):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--d", type=int, default=1, help="lattice dimension")
    p.add_argument("--alphabet", type=int, default=2, help="alphabet size")


def build_parser():
    ap = argparse.ArgumentParser(prog="sftlab",
                                 description="random Z^d-SFT laboratory")
    ap.add_argument("--version", action="version", version=f"sftlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw one allowed-window set")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--omega-out", required=True, help="output bitset file")

    p = sub.add_parser("emptiness", help="decide emptiness of a saved draw")
    p.add_argument("--config")
    p.add_argument("--omega-in", required=True)
    p.add_argument("--kmax", type=int, default=8)
    p.add_argument("--torus-max", type=int, default=6)
    p.add_argument("--out")

    p = sub.add_parser("entropy", help="entropy bounds for a saved draw")
    p.add_argument("--config")
    p.add_argument("--omega-in", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--boundary-samples", type=int, default=0,
                   help="0 = exact periodic count")
    p.add_argument("--out")

    p = sub.add_parser("orbits", help="orbit counts per size")
    _add_common(p)
    p.add_argument("--max-size", type=int, required=True)
    p.add_argument("--out", required=True, help="CSV of (size, count) rows")

    p = sub.add_parser("zeta", help="truncated inverse zeta product")
    _add_common(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--jmax", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("cover", help="repeat cover of a text pattern")
    p.add_argument("--config")
    p.add_argument("--in", dest="infile", required=True, help="pattern text file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tau", type=float, default=0.0,
                   help="when > 0, use the banded construction for side n*ceil(n^tau)")
    p.add_argument("--out")

    p = sub.add_parser("experiment", help="Monte Carlo experiments")
    kinds = p.add_subparsers(dest="kind", required=True)
    for kind in ("emptiness", "entropy", "orbits"):
        q = kinds.add_parser(kind)
        _add_common(q)
        q.add_argument("--n", type=int, required=True)
        q.add_argument("--alpha", type=_parse_alphas, required=True,
                       help="comma-separated list")
        q.add_argument("--trials", type=int, required=True)
        q.add_argument("--seed", type=int, required=True)
        q.add_argument("--k", type=int, default=0, help="entropy window side")
        q.add_argument("--kmax", type=int, default=0)
        q.add_argument("--torus-max", type=int, default=0)
        q.add_argument("--orbit-max", type=int, default=8)
        q.add_argument("--boundary-samples", type=int, default=256)
        q.add_argument("--zeta-jmax", type=int, default=0)
        q.add_argument("--workers", type=int, default=1)
        q.add_argument("--epsilons", default="0.05,0.1,0.2")
        q.add_argument("--out-csv")
        q.add_argument("--out-json")
        q.add_argument("--check-max-unknown", type=float)
        q.add_argument("--check-zeta-sigma", type=float)
        q.add_argument("--check-per-empty-sigma", type=float)
    return ap


def _cmd_sample(args):
    params = EnsembleParams(args.alphabet, args.d, args.n, args.alpha, args.seed)
    omega = sample(params, args.trial)
    omega.save(args.omega_out)
    _emit_json({
        "d": args.d, "n": args.n, "alphabet": args.alphabet,
        "alpha": args.alpha, "seed": args.seed, "trial": args.trial,
        "windows": int(omega.n_windows), "retained": int(omega.bits.sum()),
        "omega_out": args.omega_out,
    })
    return 0


def _cmd_emptiness(args):
    omega = AllowedSet.load(args.omega_in)
    v = analysis.decide_empty(omega, args.kmax, args.torus_max)
    payload = {
        "verdict": v.verdict,
        "certificate_k": v.certificate_k,
        "certificate_orbit": None,
        "effort": v.effort,
        "config": {"omega_in": args.omega_in, "kmax": args.kmax,
                   "torus_max": args.torus_max},
    }
    if v.certificate_orbit is not None:
        payload["certificate_orbit"] = {
            "size": v.certificate_orbit.size,
            "lattice": [list(r) for r in v.certificate_orbit.lattice],
            "symbols": list(v.certificate_orbit.symbols),
        }
    _emit_json(payload, args.out)
    return 0


def _cmd_entropy(args):
    omega = AllowedSet.load(args.omega_in)
    est = analysis.entropy_estimate(omega, args.k, args.boundary_samples)
    payload = {
        "k": est.k,
        "pattern_count": str(int(est.pattern_count)) if est.pattern_count == int(est.pattern_count) else repr(est.pattern_count),
        "h_upper": repr(est.h_upper),
        "periodic_count": repr(est.periodic_count),
        "periodic_count_stderr": repr(est.periodic_count_stderr),
        "periodic_count_exact": est.periodic_count_exact,
        "h_per_lower": repr(est.h_per_lower),
        "boundary_pool": str(est.boundary_pool),
        "config": {"omega_in": args.omega_in, "k": args.k,
                   "boundary_samples": args.boundary_samples},
    }
    _emit_json(payload, args.out)
    return 0


def _cmd_orbits(args):
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        f.write("size,count\n")
        for j in range(1, args.max_size + 1):
            f.write(f"{j},{count_orbits(args.alphabet, args.d, j).count}\n")
    return 0


def _cmd_zeta(args):
    zt = zeta.zeta_inverse(args.alphabet, args.d, args.alpha, args.jmax)
    _emit_json(zt.as_dict(), args.out)
    return 0


def _cmd_cover(args):
    u = patterns.load_text(args.infile)
    if args.tau > 0:
        rep = repeatcover.asymptotic_cover(u, args.n, args.tau)
        payload = {
            "pattern_side": u.shape.side, "n": args.n, "tau": args.tau,
            "windows": rep.j, "cover_size": rep.size, "route": rep.route,
            "bound_terms": list(rep.bound_terms),
            "ratio_log_n_per_window": rep.ratio,
        }
    else:
        cov = repeatcover.full_cube_cover(u, args.n)
        payload = {
            "pattern_side": u.shape.side, "n": args.n,
            "windows": len(patterns.windows(u, args.n)),
            "cover_size": len(cov.repeats),
            "covered_area": len(cov.area()),
        }
    _emit_json(payload, args.out)
    return 0


def _cmd_experiment(args):
    workers = args.workers
    env_cap = os.environ.get("SFTLAB_THREADS")
    if env_cap:
        workers = max(1, min(workers, int(env_cap)))
    cfg = experiments.ExperimentConfig(
        d=args.d, alphabet=args.alphabet, n=args.n, alphas=args.alpha,
        trials=args.trials, seed=args.seed, k=args.k, k_max=args.kmax,
        torus_max=args.torus_max, orbit_max=args.orbit_max,
        boundary_samples=args.boundary_samples, zeta_j_max=args.zeta_jmax,
        epsilons=tuple(float(x) for x in str(args.epsilons).split(",")),
        workers=workers,
    )
    result = experiments.RUNNERS[args.kind](cfg)
    if args.out_csv:
        result.write_csv(args.out_csv)
    if args.out_json:
        result.write_json(args.out_json)
    if not args.out_csv and not args.out_json:
        _emit_json({"experiment": result.kind, "config": result.config,
                    "rows": [{k: experiments._json_safe(v) for k, v in r.items()}
                             for r in result.rows]})
    checks = {}
    if args.check_max_unknown is not None:
        checks["max_unknown_frac"] = args.check_max_unknown
    if args.check_zeta_sigma is not None:
        checks["zeta_sigma"] = args.check_zeta_sigma
    if args.check_per_empty_sigma is not None:
        checks["per_empty_sigma"] = args.check_per_empty_sigma
    if checks:
        failures = experiments.check_thresholds(result, checks)
        for f in failures:
            print(f"CHECK FAIL: {f}", file=sys.stderr)
        return 1 if failures else 0
    return 0


COMMANDS = {
    "sample": _cmd_sample,
    "emptiness": _cmd_emptiness,
    "entropy": _cmd_entropy,
    "orbits": _cmd_orbits,
    "zeta": _cmd_zeta,
    "cover": _cmd_cover,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args = _apply_config(args, parser)
    try:
        return COMMANDS[args.command](args)
    except SftlabError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
