"""Command-line experiment runner.

Subcommands: verify, sieve, orbit, correlate, bilinear, reduce-joining, weyl,
winding, constants, coboundary, run.  Most commands read an INI config
(``--config``, default the in-repo standard baseline) and accept overrides
``--out``, ``--workers``, ``--segment-size``, ``--checkpoints``.  The default
worker count comes from the ``LAB_WORKERS`` environment variable.

``run`` executes every experiment enabled in the config, writes CSV reports
with JSON sidecars, and finishes with a manifest listing each emitted file
with its SHA-256.  Report files are byte-identical across reruns of the same
config; only the manifest carries timestamps.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import SOFT_THRESHOLDS, ExperimentConfig, load_config, standard_config
from .diagnostics import coboundary_search, proof_constants, weyl_sums, winding_in_x
from .engine import orbit_points
from .moebius import (
    MobiusTable,
    bilinear_sum,
    bilinear_sum_reduced,
    correlation_sum,
    davenport_baseline,
    sieve_mobius,
)
from .reports import (
    coboundary_payload,
    constants_payload,
    correlation_sidecar,
    file_sha256,
    fmt17,
    write_correlation_csv,
    write_json,
    write_orbit_csv,
    write_weyl_csv,
)
from .verify import run_verify


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("LAB_WORKERS", "1")))
    except ValueError:
        return 1


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=str, default=None, help="INI config path")
    p.add_argument("--out", type=str, default=None, help="output directory")
    p.add_argument("--workers", type=int, default=None, help="worker threads")
    p.add_argument(
        "--segment-size", type=int, default=None, help="orbit segment size (power of two)"
    )
    p.add_argument(
        "--checkpoints", type=str, default=None, help="comma-separated checkpoint list"
    )


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else standard_config()
    patch = {}
    if args.out is not None:
        patch["out_dir"] = args.out
    if args.workers is not None:
        patch["workers"] = args.workers
    elif os.environ.get("LAB_WORKERS"):
        patch["workers"] = _default_workers()
    if args.segment_size is not None:
        patch["segment_size"] = args.segment_size
    if getattr(args, "checkpoints", None):
        patch["checkpoints"] = tuple(int(v) for v in args.checkpoints.split(","))
    if patch:
        cfg = dataclasses.replace(cfg, **patch).validate()
    return cfg


def _outdir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _sieve_for(cfg: ExperimentConfig) -> MobiusTable:
    return sieve_mobius(max(cfg.sieve_bound, cfg.checkpoints[-1]))


def cmd_verify(args) -> int:
    results, ok = run_verify(fault=args.inject_fault)
    for name, passed, detail in results:
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
    print(f"verify: {'all suites passed' if ok else 'FAILURES detected'}")
    return 0 if ok else 1


def cmd_sieve(args) -> int:
    cfg = _load(args)
    bound = args.bound or cfg.sieve_bound
    table = sieve_mobius(bound)
    rows = []
    n = 1000
    while n <= bound:
        m = table.mertens(n)
        rows.append((n, m))
        print(f"M({n}) = {m}")
        n *= 10
    if args.out:
        out = _outdir(dataclasses.replace(cfg, out_dir=args.out))
        lines = ["N,mertens"] + [f"{n},{m}" for n, m in rows]
        (out / "mertens.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {out / 'mertens.csv'}")
    return 0


def cmd_orbit(args) -> int:
    cfg = _load(args)
    sys_ = cfg.system()
    ns = list(cfg.checkpoints if args.n is None else range(1, args.n + 1))
    rows = orbit_points(sys_, None, ns)
    out = _outdir(cfg)
    write_orbit_csv(out / "orbit.csv", rows)
    for row in rows[:10]:
        print(f"n={row[0]}: ({fmt17(row[1])}, {fmt17(row[2])}, {fmt17(row[3])})")
    print(f"wrote {out / 'orbit.csv'}")
    return 0


def cmd_correlate(args) -> int:
    cfg = _load(args)
    table = _sieve_for(cfg)
    rep = correlation_sum(
        cfg.system(), cfg.observable(), None, list(cfg.checkpoints), table,
        cfg.plan(cfg.checkpoints[-1]),
    )
    out = _outdir(cfg)
    write_correlation_csv(out / "correlation.csv", rep)
    write_json(out / "correlation.json", correlation_sidecar(rep))
    for c in rep.checkpoints:
        print(f"N={c.n}: |sum| = {c.modulus:.6g}")
    print(f"wrote {out / 'correlation.csv'}")
    return 0


def cmd_bilinear(args) -> int:
    cfg = _load(args)
    obs = cfg.observable()
    rep = bilinear_sum(
        cfg.system(), obs, None, cfg.p, cfg.q, list(cfg.checkpoints),
        cfg.plan(cfg.p * cfg.checkpoints[-1]),
    )
    out = _outdir(cfg)
    write_correlation_csv(out / "bilinear.csv", rep)
    write_json(out / "bilinear.json", correlation_sidecar(rep))
    if args.two_route:
        rep2 = bilinear_sum_reduced(
            cfg.system(), obs, cfg.p, cfg.q, list(cfg.checkpoints),
            cfg.plan(cfg.checkpoints[-1]),
        )
        write_correlation_csv(out / "bilinear_reduced.csv", rep2)
        worst = max(
            abs(a.value - b.value)
            for a, b in zip(rep.checkpoints, rep2.checkpoints)
        )
        print(f"two-route max deviation: {worst:.3e}")
    for c in rep.checkpoints:
        print(f"N={c.n}: |sum| = {c.modulus:.6g}")
    print(f"wrote {out / 'bilinear.csv'}")
    return 0


def cmd_reduce_joining(args) -> int:
    cfg = _load(args)
    js = cfg.joining()
    w = winding_in_x(js.H_lift(), 0.37, js.lipschitz_H)
    print(f"prime pair      : p={js.p}, q={js.q}")
    print(f"twist p^2-q^2   : {js.twist}")
    print(f"H winding in x  : {w} (expected {js.twist * js.base.h.d1})")
    print(f"Lipschitz bound : {js.lipschitz_H:.6g}")
    from .verify import suite_commutation

    name, ok, detail = suite_commutation(np.random.default_rng(0))
    print(f"commutation     : {'ok' if ok else 'BROKEN'} ({detail})")
    return 0 if ok and w == js.twist * js.base.h.d1 else 1


def cmd_weyl(args) -> int:
    cfg = _load(args)
    reports = weyl_sums(
        cfg.joining(), None, cfg.weyl_freqs, list(cfg.checkpoints),
        cfg.plan(cfg.checkpoints[-1]),
    )
    out = _outdir(cfg)
    write_weyl_csv(out / "weyl.csv", reports)
    for rep in reports:
        print(f"k={rep.freq}: final |S|/N = {rep.checkpoints[-1].modulus:.6g}")
    print(f"wrote {out / 'weyl.csv'}")
    return 0


def cmd_winding(args) -> int:
    cfg = _load(args)
    js = cfg.joining()
    n = args.n
    lift = js.Hn_lift(n)
    w = winding_in_x(lift, args.y0, n * js.lipschitz_H)
    expected = n * js.twist * cfg.d1
    print(f"winding of H_{n} in x at y0={args.y0}: {w} (closed form {expected})")
    return 0 if w == expected else 1


def cmd_constants(args) -> int:
    cfg = _load(args)
    pc = proof_constants(
        cfg.coboundary_k, cfg.p, cfg.q, cfg.d1, cfg.alpha, cfg.beta,
        cfg.base_function().L,
    )
    out = _outdir(cfg)
    write_json(out / "constants.json", constants_payload(pc))
    print(f"discriminant = {pc.discriminant!r}")
    print(f"delta1       = {pc.delta1!r}")
    print(f"nu           = {pc.nu!r}")
    print(f"wrote {out / 'constants.json'}")
    return 0


def cmd_coboundary(args) -> int:
    cfg = _load(args)
    rep = coboundary_search(cfg.joining(), cfg.coboundary_k, cfg.coboundary_cutoff)
    out = _outdir(cfg)
    write_json(out / "coboundary.json", coboundary_payload(rep))
    print(
        f"residual = {rep.residual:.6g} over {rep.solved_modes} solved modes "
        f"({len(rep.skipped_modes)} skipped)"
    )
    print(f"wrote {out / 'coboundary.json'}")
    return 0


def cmd_run(args) -> int:
    cfg = _load(args)
    out = _outdir(cfg)
    table = None
    files = []
    summary = {}

    def emit(name, writer, *payload):
        path = out / name
        writer(path, *payload)
        files.append(path)

    if {"correlate", "davenport"} & set(cfg.experiments):
        table = _sieve_for(cfg)

    if "correlate" in cfg.experiments:
        rep = correlation_sum(
            cfg.system(), cfg.observable(), None, list(cfg.checkpoints), table,
            cfg.plan(cfg.checkpoints[-1]),
        )
        emit("correlation.csv", write_correlation_csv, rep)
        emit("correlation.json", write_json, correlation_sidecar(rep))
        summary["correlation_final_modulus"] = rep.checkpoints[-1].modulus
        summary["correlation_moduli"] = {str(c.n): c.modulus for c in rep.checkpoints}

    if "bilinear" in cfg.experiments:
        rep = bilinear_sum(
            cfg.system(), cfg.observable(), None, cfg.p, cfg.q,
            list(cfg.checkpoints), cfg.plan(cfg.p * cfg.checkpoints[-1]),
        )
        emit("bilinear.csv", write_correlation_csv, rep)
        emit("bilinear.json", write_json, correlation_sidecar(rep))
        summary["bilinear_final_modulus"] = rep.checkpoints[-1].modulus

    if "davenport" in cfg.experiments:
        rep = davenport_baseline(
            cfg.alpha, list(cfg.checkpoints), table, cfg.plan(cfg.checkpoints[-1])
        )
        emit("davenport.csv", write_correlation_csv, rep)
        emit("davenport.json", write_json, correlation_sidecar(rep))
        summary["davenport_final_modulus"] = rep.checkpoints[-1].modulus

    if "weyl" in cfg.experiments:
        reports = weyl_sums(
            cfg.joining(), None, cfg.weyl_freqs, list(cfg.checkpoints),
            cfg.plan(cfg.checkpoints[-1]),
        )
        emit("weyl.csv", write_weyl_csv, reports)
        summary["weyl_max_modulus"] = max(r.checkpoints[-1].modulus for r in reports)

    if "constants" in cfg.experiments:
        pc = proof_constants(
            cfg.coboundary_k, cfg.p, cfg.q, cfg.d1, cfg.alpha, cfg.beta,
            cfg.base_function().L,
        )
        emit("constants.json", write_json, constants_payload(pc))
        summary["delta1"] = pc.delta1
        summary["nu"] = pc.nu

    if "coboundary" in cfg.experiments:
        rep = coboundary_search(cfg.joining(), cfg.coboundary_k, cfg.coboundary_cutoff)
        emit("coboundary.json", write_json, coboundary_payload(rep))
        summary["coboundary_residual"] = rep.residual

    manifest = {
        "artifact_version": __version__,
        "config_hash": cfg.config_hash(),
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "soft_thresholds": SOFT_THRESHOLDS,
        "summary": summary,
        "files": [
            {"name": f.name, "sha256": file_sha256(f), "bytes": f.stat().st_size}
            for f in files
        ],
    }
    write_json(out / "manifest.json", manifest)
    (out / "config.ini").write_text(cfg.to_ini(), encoding="utf-8")
    print(f"run complete: {len(files)} report files in {out}")
    for f in files:
        print(f"  {f.name}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nillab",
        description="Heisenberg skew products, prime-pair joinings, Mobius correlations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("--inject-fault", choices=["twist"], default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sieve", help="sieve mu and print Mertens checkpoints")
    _add_common(p)
    p.add_argument("--bound", type=int, default=None)
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("orbit", help="emit orbit samples at checkpoints")
    _add_common(p)
    p.add_argument("--n", type=int, default=None, help="emit steps 1..n instead")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("correlate", help="Mobius correlation along the orbit")
    _add_common(p)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("bilinear", help="prime-pair bilinear average")
    _add_common(p)
    p.add_argument("--two-route", action="store_true", help="also run the reduced route")
    p.set_defaults(func=cmd_bilinear)

    p = sub.add_parser("reduce-joining", help="summarize the joining reduction")
    _add_common(p)
    p.set_defaults(func=cmd_reduce_joining)

    p = sub.add_parser("weyl", help="Weyl sums along the reduced orbit")
    _add_common(p)
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("winding", help="winding of the iterated joining cocycle")
    _add_common(p)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--y0", type=float, default=0.37)
    p.set_defaults(func=cmd_winding)

    p = sub.add_parser("constants", help="proof constants delta1 and nu")
    _add_common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("coboundary", help="cohomological-equation residual")
    _add_common(p)
    p.set_defaults(func=cmd_coboundary)

    p = sub.add_parser("run", help="run all experiments enabled in the config")
    _add_common(p)
    p.set_defaults(func=cmd_run)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
