"""
Command line interface

``consensus-lab`` exposes the spectral, stability, scaling and simulation modules
as subcommands which write plot-ready CSV, JSON and YAML files into ``--out``.

Exit codes: 0 success (or stable verdict), 1 usage or input error, 2 unstable
verdict, 3 marginal verdict, 4 numerical or resource failure.
"""
import argparse
import logging
import os
import sys
import time
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import pandas as pd

from ._version import __version__
from .definitions import FAMILY_TAGS
from .errors import DomainError, NumericError, ResourceError, UsageError
from .families import GraphFamily, family_sizes, generate
from .graph import build_laplacian
from .io import (
    read_graph,
    write_frame_csv,
    write_json,
    write_trace_binary,
    write_trace_csv,
    write_yaml,
)
from .scaling import SUMMARY_COLUMNS, SweepSpec, find_critical_N
from .sim import SimConfig, classify_against_report, integrate
from .spectral import (
    BOUND_KINDS,
    BOUNDS_COLUMNS,
    certificate_row,
    connectivity_bound,
    spectrum,
    sweep_connectivity,
)
from .stability import METHODS, MODES, Gains, assess
from .utils import resolve_jobs, resolve_seed

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNSTABLE = 2
EXIT_MARGINAL = 3
EXIT_NUMERIC = 4

STATUS_EXIT_CODES = {
    "stable": EXIT_OK,
    "unstable": EXIT_UNSTABLE,
    "marginal": EXIT_MARGINAL,
}

MANIFEST_FILE = "manifest.yaml"


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments, which is the "unstable" code here
    def error(self, message):
        raise UsageError("{}: {}".format(self.prog, message))


@dataclass
class RunManifest:
    """
    Record of a command line run

    Everything but ``wall_clock_seconds`` is a function of the inputs.
    """

    subcommand: str
    params: dict
    seed: int
    version: str = __version__
    outputs: List[str] = field(default_factory=list)
    wall_clock_seconds: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "subcommand": self.subcommand,
            "params": self.params,
            "seed": self.seed,
            "version": self.version,
            "outputs": list(self.outputs),
            "wall_clock_seconds": self.wall_clock_seconds,
        }
        out.update(self.extra)

        return out


class _Run(object):
    """Output directory bookkeeping of a single subcommand run"""

    def __init__(self, args):
        self.out_dir = args.out
        os.makedirs(self.out_dir, exist_ok=True)
        params = {
            k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")
        }
        self.manifest = RunManifest(
            subcommand=args.subcommand, params=params, seed=resolve_seed(args.seed)
        )
        self._start = time.perf_counter()

    def path(self, filename):
        """Register ``filename`` as an output and return its full path"""
        if filename not in self.manifest.outputs:
            self.manifest.outputs.append(filename)
        full = os.path.join(self.out_dir, filename)
        logger.info("writing %s", full)

        return full

    def finish(self):
        self.manifest.wall_clock_seconds = round(time.perf_counter() - self._start, 6)
        # the manifest lists itself
        manifest_path = self.path(MANIFEST_FILE)
        write_yaml(self.manifest.to_dict(), manifest_path)


def _comma_list(cast):
    def _parse(text):
        try:
            return [cast(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError("invalid list {!r}".format(text))

    return _parse


def _add_common_arguments(parser):
    parser.add_argument(
        "--out", default=".", help="output directory (default: current directory)"
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="random seed (default: $CONSENSUS_LAB_SEED or 0)",
    )
    parser.add_argument(
        "--jobs", type=int, default=None, help="number of worker threads"
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log debug information"
    )


def _add_family_arguments(parser, with_N=True):
    parser.add_argument("--family", choices=FAMILY_TAGS, help="graph family")
    if with_N:
        parser.add_argument(
            "--N", type=int, default=None, help="number of nodes of the realization"
        )
    parser.add_argument("--q", type=int, default=None, help="neighbourhood bound")
    parser.add_argument(
        "--r", type=int, default=1, help="fuzz radius of the toric lattice"
    )
    parser.add_argument(
        "--d", type=int, default=1, help="dimension of the toric lattice"
    )
    parser.add_argument("--w", type=float, default=1.0, help="uniform edge weight")


def _add_graph_arguments(parser):
    parser.add_argument("--file", default=None, help="graph file to read")
    _add_family_arguments(parser)


def _add_gains_arguments(parser):
    parser.add_argument("--n", type=int, required=True, help="order of the agents")
    parser.add_argument(
        "--a", required=True, help="comma separated gains a0,a1,...,a(n-1)"
    )


def _add_mode_arguments(parser):
    parser.add_argument("--mode", choices=MODES, default="leaderless")
    parser.add_argument(
        "--leader", type=int, default=1, help="1-based leader index (leader mode)"
    )


def _family(args):
    if args.family is None:
        raise UsageError("--family is required")

    return GraphFamily(
        tag=args.family,
        q=args.q,
        r=args.r,
        d=args.d,
        w=args.w,
        seed=resolve_seed(args.seed),
    )


def _graph(args):
    if args.file is not None:
        if args.family is not None:
            raise UsageError("--file and --family are mutually exclusive")
        return "file", read_graph(args.file)

    if args.N is None:
        raise UsageError("--N is required with --family")
    family = _family(args)

    return family.tag, generate(family, args.N)


def _gains(args):
    try:
        return Gains.from_string(args.a, n=args.n)
    except DomainError as exc:
        raise UsageError(str(exc))


def _leader_index(args):
    return args.leader - 1


def _leader(args):
    return args.leader - 1 if args.mode == "leader" else None


def cmd_spectrum(args, run):
    label, g = _graph(args)
    spec = spectrum(build_laplacian(g))
    df = spec.to_frame()
    df["lambda2_real"] = spec.lambda2_real
    logger.info("lambda2_real=%s", spec.lambda2_real)
    if args.mirror:
        mirror = spectrum(build_laplacian(g, "mirror"))
        df["mirror_lambda_re"] = mirror.eigenvalues.real
        df["mirror_lambda2_real"] = mirror.lambda2_real
        logger.info("mirror_lambda2_real=%s", mirror.lambda2_real)
    write_frame_csv(df, run.path("spectrum.csv"))

    if args.bounds:
        rows = []
        for kind in args.bounds:
            params = {}
            if kind == "leader_grounded":
                params["leader"] = _leader_index(args)
            if args.q is not None and kind in ("planar", "leader_grounded"):
                params["q"] = args.q
            cert = connectivity_bound(g, kind, **params)
            rows.append(certificate_row(cert, label, g, args.q))
        write_frame_csv(
            pd.DataFrame(rows, columns=BOUNDS_COLUMNS), run.path("bounds.csv")
        )

    return EXIT_OK


def cmd_stability(args, run):
    gains = _gains(args)
    _, g = _graph(args)
    report = assess(gains, g, args.mode, _leader(args), method=args.method)
    write_json(report.to_dict(), run.path("report.json"))
    logger.info("%s: %s", report.matrix_id, report.status)

    return STATUS_EXIT_CODES[report.status]


def cmd_critical_n(args, run):
    gains = _gains(args)
    family = _family(args)
    qs = args.qs if args.qs else [family.resolved_q]
    ns = args.ns if args.ns else [gains.n]

    sweeps = []
    summary = []
    for q in qs:
        for n in ns:
            spec = SweepSpec(
                family=family.with_q(q),
                gains=gains.truncate(n),
                N_min=args.Nmin,
                N_max=args.Nmax,
                step=args.step,
                mode=args.mode,
                leader=_leader_index(args),
            )
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                result = find_critical_N(spec, jobs=args.jobs, method=args.method)
            for w in caught:
                logger.warning("%s", w.message)
            logger.info("q=%s n=%s critical_N=%s", q, n, result.critical_N)
            sweeps.append(result.to_frame())
            summary.append(result.summary())

    write_frame_csv(pd.concat(sweeps, ignore_index=True), run.path("sweep.csv"))
    summary = pd.DataFrame(summary, columns=SUMMARY_COLUMNS)
    summary["critical_N"] = summary["critical_N"].astype("Int64")
    write_frame_csv(summary, run.path("critical_n.csv"))

    return EXIT_OK


def cmd_simulate(args, run):
    gains = _gains(args)
    _, g = _graph(args)
    cfg = SimConfig(
        gains=gains,
        graph=g,
        mode=args.mode,
        leader=_leader(args),
        step=args.step,
        horizon=args.horizon,
        seed=args.seed,
        amplitude=args.amplitude,
        record_every=args.record_every,
    )
    trace = integrate(cfg)
    write_trace_csv(trace, run.path("trace.csv"))
    if args.binary:
        write_trace_binary(trace, run.path("trace.ctrace"))
    logger.info("classification=%s", trace.classification)
    run.manifest.extra["simulation"] = trace.summary()

    if args.compare_stability:
        report = assess(gains, g, args.mode, _leader(args))
        run.manifest.extra["agreement"] = classify_against_report(
            trace, report
        ).to_dict()

    return EXIT_OK


def cmd_bounds(args, run):
    family = _family(args)
    Ns = family_sizes(family, args.Nmin, args.Nmax, args.step)
    if not Ns:
        raise DomainError(
            "No realizable size between {} and {}".format(args.Nmin, args.Nmax)
        )
    params = {}
    if args.kind == "leader_grounded":
        params["leader"] = _leader_index(args)
    if args.c2 is not None:
        params["c2"] = args.c2

    df = sweep_connectivity(family, Ns, args.kind, jobs=args.jobs, **params)
    write_frame_csv(df, run.path("bounds.csv"))
    if not df["satisfied"].all():
        logger.warning(
            "bound %s violated at N=%s",
            args.kind,
            df.loc[~df["satisfied"], "N"].tolist(),
        )

    return EXIT_OK


def get_parser():
    """
    Build the argument parser

    Returns
    -------
    :obj:`argparse.ArgumentParser`
    """
    parser = _ArgumentParser(
        prog="consensus-lab",
        description="Stability of high-order consensus on weighted digraphs",
    )
    parser.add_argument(
        "--version", action="version", version="%(prog)s {}".format(__version__)
    )
    subparsers = parser.add_subparsers(dest="subcommand", parser_class=_ArgumentParser)
    subparsers.required = True

    p = subparsers.add_parser("spectrum", help="Laplacian spectrum of a graph")
    _add_common_arguments(p)
    _add_graph_arguments(p)
    p.add_argument(
        "--mirror", action="store_true", help="add the mirror graph's spectrum"
    )
    p.add_argument(
        "--bounds", nargs="+", choices=BOUND_KINDS, help="connectivity bounds"
    )
    p.add_argument("--leader", type=int, default=1, help="1-based leader index")
    p.set_defaults(func=cmd_spectrum)

    p = subparsers.add_parser("stability", help="Routh-Hurwitz stability verdict")
    _add_common_arguments(p)
    _add_graph_arguments(p)
    _add_gains_arguments(p)
    _add_mode_arguments(p)
    p.add_argument("--method", choices=METHODS, default="auto")
    p.set_defaults(func=cmd_stability)

    p = subparsers.add_parser("critical-n", help="critical network size sweep")
    _add_common_arguments(p)
    _add_family_arguments(p, with_N=False)
    _add_gains_arguments(p)
    _add_mode_arguments(p)
    p.add_argument("--Nmin", type=int, default=2)
    p.add_argument("--Nmax", type=int, default=100)
    p.add_argument("--step", type=int, default=1)
    p.add_argument(
        "--qs", type=_comma_list(int), default=None, help="comma separated q values"
    )
    p.add_argument(
        "--ns",
        type=_comma_list(int),
        default=None,
        help="comma separated orders, the gains are truncated to each",
    )
    p.add_argument("--method", choices=("determinant", "oracle"), default="determinant")
    p.set_defaults(func=cmd_critical_n)

    p = subparsers.add_parser("simulate", help="RK4 simulation of the closed loop")
    _add_common_arguments(p)
    _add_graph_arguments(p)
    _add_gains_arguments(p)
    _add_mode_arguments(p)
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--record-every", type=int, default=1)
    p.add_argument(
        "--binary", action="store_true", help="also write trace.ctrace"
    )
    p.add_argument(
        "--compare-stability",
        action="store_true",
        help="record agreement with the stability verdict in the manifest",
    )
    p.set_defaults(func=cmd_simulate)

    p = subparsers.add_parser("bounds", help="connectivity bounds over a family")
    _add_common_arguments(p)
    _add_family_arguments(p, with_N=False)
    p.add_argument("--kind", choices=BOUND_KINDS, required=True)
    p.add_argument("--Nmin", type=int, default=2)
    p.add_argument("--Nmax", type=int, default=100)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--leader", type=int, default=1, help="1-based leader index")
    p.add_argument("--c2", type=float, default=None, help="genus bound constant")
    p.set_defaults(func=cmd_bounds)

    return parser


def _setup_logging(verbose):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    logging.captureWarnings(True)


def main(argv=None):
    """
    Run the command line interface

    Parameters
    ----------
    argv : list of str, optional
        Arguments, defaults to ``sys.argv[1:]``

    Returns
    -------
    int
        Exit code
    """
    try:
        args = get_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE

    _setup_logging(args.verbose)
    try:
        resolve_jobs(args.jobs)
        run = _Run(args)
        code = args.func(args, run)
        run.finish()
    except (UsageError, ValueError, FileNotFoundError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except (NumericError, ResourceError) as exc:
        logger.error("%s", exc)
        return EXIT_NUMERIC

    return code


if __name__ == "__main__":
    sys.exit(main())
