"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 validation/diagnostic failure,
3 conformance failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .channel import parse_snr
from .config import ConfigError, load_config

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_CONFORMANCE = 0, 1, 2, 3

log = logging.getLogger("ltebench")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def parse_int_list(text: str) -> list[int]:
    """``"0..28"``, ``"0,5,10"`` or a mix such as ``"0..3,10"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise UsageError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise UsageError(f"empty list {text!r}")
    return out


def parse_snr_list(text: str) -> list[float]:
    try:
        return [parse_snr(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _snr_json(x: float):
    return "inf" if math.isinf(x) else x


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ltebench", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ltebench {__version__}")
    p.add_argument("--config", help="key = value file overriding the built-in defaults")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="execute an .app graph")
    r.add_argument("app", help=".app file")
    r.add_argument("--iters", type=int, default=1, help="graph iterations (subframes)")
    r.add_argument("--seed", type=int)
    r.add_argument("--cpu-time", action="store_true", help="also record thread CPU time")
    r.add_argument("--out", help="directory for costs.csv and manifest.json")

    c = sub.add_parser("conformance", help="BER or BLER conformance test")
    mode = c.add_mutually_exclusive_group(required=True)
    mode.add_argument("--ber", action="store_true", help="uncoded BER vs theory per modulation")
    mode.add_argument("--bler", action="store_true", help="BLER <= 0.1 at one operating point")
    c.add_argument("--qm", default="2,4,6", help="modulation orders for --ber")
    c.add_argument("--snr", help="SNR list (dB) for --ber, single SNR for --bler")
    c.add_argument("--bits", type=int, help="bits per SNR point for --ber")
    c.add_argument("--mcs", type=int, help="MCS for --bler")
    c.add_argument("--iters", type=int, help="turbo decoder iterations for --bler")
    c.add_argument("--blocks", type=int, help="transport blocks for --bler")
    c.add_argument("--seed", type=int)
    c.add_argument("--out", help="directory for report.json and manifest.json")

    s = sub.add_parser("sweep", help="BLER/throughput/cost over MCS x SNR x iterations")
    s.add_argument("--mcs", help="e.g. 0..28 or 0,5,10")
    s.add_argument("--snr", help="comma-separated SNRs in dB")
    s.add_argument("--iters", help="comma-separated iteration counts")
    s.add_argument("--blocks", type=int)
    s.add_argument("--min-errors", type=int, help="stop a point after this many block errors")
    s.add_argument("--seed", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--no-isolation", action="store_true", help="allow parallel points (timings flagged)")
    s.add_argument("--goodput", action="store_true", help="report TBS x (1 - BLER) per TTI")
    s.add_argument("--from-manifest", help="repeat the sweep recorded in a manifest")
    s.add_argument("--out", required=True, help="output directory")

    t = sub.add_parser("threshold", help="smallest SNR meeting the BLER target")
    t.add_argument("--mcs", required=True, help="MCS list")
    t.add_argument("--iters", type=int)
    t.add_argument("--blocks", type=int, help="blocks per lattice point")
    t.add_argument("--seed", type=int)

    v = sub.add_parser("volumes", help="per-interface data volumes for one subframe")
    v.add_argument("--mcs", required=True, help="MCS list")

    rep = sub.add_parser("report", help="re-emit CSVs and plots from a result directory")
    rep.add_argument("--in", dest="indir", required=True)
    rep.add_argument("--out", help="output directory (default: same as --in)")
    return p


def _cmd_run(args, cfg) -> int:
    from .manifest import write_manifest
    from .pipeline.appfile import AppError, parse_app
    from .pipeline.cost import cost_csv
    from .pipeline.runtime import BlockError, run_graph

    path = Path(args.app)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    try:
        graph = parse_app(text)
    except AppError as exc:
        for d in exc.diagnostics:
            print(f"{path}:{d}", file=sys.stderr)
        return EXIT_INVALID
    seed = cfg["seed"] if args.seed is None else args.seed
    try:
        res = run_graph(graph, args.iters, seed, cpu_time=args.cpu_time)
    except BlockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report = res.cost()
    print(f"iterations {res.iterations}  wall {res.wall_ns / 1e6:.3f} ms")
    print(f"sink payload sha256 {res.payload_digest()}")
    for b in report.blocks:
        print(f"  {b.block:<14} calls {b.calls:>5}  mean {b.mean_ns / 1e3:>10.1f} us  share {b.share:6.3f}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "costs.csv").write_text(cost_csv([(path.stem, report)]))
        (out / "payload.sha256").write_text(res.payload_digest() + "\n")
        write_manifest(out, "run", {"app": str(path), "app_text": text, "iters": args.iters,
                                    "cpu_time": args.cpu_time}, seed)
    return EXIT_OK


def _cmd_conformance(args, cfg) -> int:
    from .harness.bler import conformance_bler
    from .harness.conformance import conformance_ber, default_ber_snr_points
    from .manifest import write_manifest

    seed = cfg["seed"] if args.seed is None else args.seed
    if args.ber:
        qms = parse_int_list(args.qm)
        bits = args.bits or cfg["ber_bits"]
        ok = True
        report = []
        for qm in qms:
            if qm not in (2, 4, 6):
                raise UsageError(f"qm must be 2, 4 or 6, got {qm}")
            snrs = parse_snr_list(args.snr) if args.snr else default_ber_snr_points(qm)
            rep = conformance_ber(qm, snrs, bits, seed)
            ok &= rep.passed
            for pt in rep.points:
                verdict = "PASS" if pt.passed else "FAIL"
                print(f"qm={qm} snr={pt.snr_db:6.2f} dB  ber={pt.ber:.3e}  theory={pt.theory:.3e}"
                      f"  tol={pt.tolerance:.1e}  {verdict}")
                report.append({"qm": qm, "snr_db": pt.snr_db, "bits": pt.bits, "bit_errors": pt.bit_errors,
                               "ber": pt.ber, "theory": pt.theory, "tolerance": pt.tolerance,
                               "passed": pt.passed})
        params = {"mode": "ber", "qm": qms, "snr": args.snr, "bits": bits}
    else:
        if args.mcs is None or args.snr is None:
            raise UsageError("--bler needs --mcs and --snr")
        snr = parse_snr(args.snr)
        iters = args.iters or cfg["iterations"]
        blocks = args.blocks or cfg["conformance_blocks"]
        res = conformance_bler(args.mcs, snr, iters, blocks, seed)
        ok = res.passed
        print(f"mcs={args.mcs} snr={args.snr} dB iters={iters} blocks={res.point.blocks} "
              f"bler={res.bler:.4f} ci95=[{res.ci95[0]:.4f}, {res.ci95[1]:.4f}] "
              f"{'PASS' if ok else 'FAIL'}")
        report = {"mcs": args.mcs, "snr_db": _snr_json(snr), "iterations": iters, "blocks": res.point.blocks,
                  "block_errors": res.point.block_errors, "bler": res.bler, "ci95": list(res.ci95),
                  "passed": ok}
        params = {"mode": "bler", "mcs": args.mcs, "snr": args.snr, "iters": iters, "blocks": blocks}
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
        write_manifest(out, "conformance", params, seed)
    return EXIT_OK if ok else EXIT_CONFORMANCE


def _sweep_spec(args, cfg):
    from .harness.bler import SweepSpec
    from .manifest import read_manifest

    if args.from_manifest:
        man = read_manifest(args.from_manifest)
        if man.get("command") != "sweep":
            raise UsageError(f"{args.from_manifest} is not a sweep manifest")
        return SweepSpec.from_dict(man["params"])
    if not (args.mcs and args.snr and args.iters):
        raise UsageError("sweep needs --mcs, --snr and --iters (or --from-manifest)")
    return SweepSpec(
        mcs=tuple(parse_int_list(args.mcs)),
        snr_db=tuple(parse_snr_list(args.snr)),
        iterations=tuple(parse_int_list(args.iters)),
        blocks=args.blocks or cfg["blocks"],
        min_block_errors=cfg["min_block_errors"] if args.min_errors is None else args.min_errors,
        seed=cfg["seed"] if args.seed is None else args.seed,
        workers=args.workers or cfg["workers"],
        isolation=cfg["isolation"] and not args.no_isolation,
        throughput_mode="goodput" if args.goodput else cfg["throughput_mode"],
    )


def _cmd_sweep(args, cfg) -> int:
    from .harness.bler import sweep
    from .harness.report import emit_all
    from .manifest import write_manifest

    try:
        spec = _sweep_spec(args, cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    points = sweep(spec)
    files = emit_all(points, args.out)
    params = spec.as_dict()
    params["snr_db"] = [_snr_json(s) for s in spec.snr_db]
    write_manifest(args.out, "sweep", params, spec.seed)
    for p in points:
        status = "failed: " + p.failed if p.failed else f"bler={p.bler:.4f}"
        print(f"mcs={p.mcs:>2} snr={p.snr_db:>6} it={p.iterations} blocks={p.blocks:>5} {status}")
    print("wrote " + ", ".join(str(f) for f in files.values()))
    return EXIT_OK if all(p.ok for p in points) else EXIT_INVALID


def _cmd_threshold(args, cfg) -> int:
    from .harness.bler import ThresholdUnreachable, find_snr_threshold

    iters = args.iters or cfg["iterations"]
    rc = EXIT_OK
    for mcs in parse_int_list(args.mcs):
        try:
            res = find_snr_threshold(mcs, iters, blocks_per_point=args.blocks or cfg["threshold_blocks"],
                                     seed=cfg["seed"] if args.seed is None else args.seed,
                                     snr_range=(cfg["snr_min"], cfg["snr_max"]), step=cfg["snr_step"])
            print(f"mcs={mcs:>2} iters={iters} threshold={res.snr_db:.2f} dB")
        except ThresholdUnreachable as exc:
            print(f"mcs={mcs:>2} iters={iters} {exc}", file=sys.stderr)
            rc = EXIT_CONFORMANCE
    return rc


def _cmd_volumes(args, cfg) -> int:
    from .params import interface_volumes

    for mcs in parse_int_list(args.mcs):
        print(json.dumps(interface_volumes(mcs).as_dict()))
    return EXIT_OK


def _cmd_report(args, cfg) -> int:
    from .harness.report import emit_all, read_results
    from .manifest import MANIFEST_NAME

    indir = Path(args.indir)
    if not (indir / "results.csv").exists():
        raise UsageError(f"{indir} has no results.csv")
    points = read_results(indir / "results.csv")
    out = Path(args.out) if args.out else indir
    files = emit_all(points, out)
    if out != indir and (indir / MANIFEST_NAME).exists():
        (out / MANIFEST_NAME).write_text((indir / MANIFEST_NAME).read_text())
    print("wrote " + ", ".join(str(f) for f in files.values()))
    return EXIT_OK


COMMANDS = {"run": _cmd_run, "conformance": _cmd_conformance, "sweep": _cmd_sweep,
            "threshold": _cmd_threshold, "volumes": _cmd_volumes, "report": _cmd_report}


def execute(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except (UsageError, ConfigError, OSError) as exc:
        print(f"ltebench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"ltebench: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(execute())


if __name__ == "__main__":
    main()
