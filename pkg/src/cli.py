"""
Command-line front end.

Exit codes: 0 success, 2 input error, 3 analysis-premise error (including
expectation tables over the size cap), 4 simulation truncation.
"""
import argparse
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import bayesnet
from . import coeffring as cr
from . import config
from . import pgcl
from . import sim
from . import translate
from .dataset import load_all_network_files, load_network
from .errors import CoefficientError, InputError, PremiseError, SimulationError
from .services import engine

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PREMISE = 3
EXIT_SIMULATION = 4


def _parse_params(specs: Sequence[str]) -> Dict[str, Fraction]:
    point = {}
    for spec in specs:
        if "=" not in spec:
            raise InputError(f"expected NAME=RATIONAL, got {spec!r}")
        name, text = (s.strip() for s in spec.split("=", 1))
        try:
            point[name] = Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"{text!r} is not a rational") from None
    return point


def _load(args):
    net = load_network(args.file, normalize=args.normalize)
    point = _parse_params(getattr(args, "instantiate", None) or [])
    if point:
        net = bayesnet.instantiate(net, point)
    return net, bayesnet.ObservationMap.of(net, bayesnet.parse_assignments(net, args.observe))


def _print_value(value) -> None:
    if cr.is_parametric(value):
        print(cr.render(value))
    elif cr.is_inf(value):
        print("inf")
    else:
        print(f"{cr.render(value)} ({cr.to_decimal(value, config.DECIMAL_DIGITS)})")


# ============================================================================
# COMMANDS
# ============================================================================
def cmd_est(args) -> int:
    net, obs = _load(args)
    report = engine.est(net, obs, args.order, args.cost_model)
    print(report.summary())
    if not report.is_symbolic:
        print(f"scientific={report.scientific()}")
    point = _parse_params(args.param)
    if point:
        value = cr.eval_at(report.est, point)
        where = " ".join(f"{k}={v}" for k, v in point.items())
        print(f"at {where}: ", end="")
        _print_value(value)
    print(f"order={report.order} cost_model={report.cost_model} program_size={report.program_size}")
    return EXIT_OK


def cmd_prob(args) -> int:
    net, obs = _load(args)
    query = bayesnet.parse_assignments(net, args.query)
    if not query:
        raise InputError("prob needs at least one --query VAR=VALUE")
    _print_value(engine.posterior(net, query, obs, args.order))
    return EXIT_OK


def cmd_translate(args) -> int:
    net, obs = _load(args)
    print(pgcl.render(translate.translate(net, obs, args.order)))
    return EXIT_OK


def cmd_sweep(args) -> int:
    net, obs = _load(args)
    grid = engine.parse_grid(args.grid)
    points = engine.sweep(net, args.param, grid, obs, args.order, args.cost_model, _parse_params(args.fix))
    frame = engine.sweep_to_frame(points)
    if args.out:
        frame.to_csv(args.out, index=False)
        print(f"[INFO] Sweep saved to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(frame.to_csv(index=False))
    return EXIT_OK


def cmd_simulate(args) -> int:
    net, obs = _load(args)
    program = translate.translate(net, obs, args.order)
    result = sim.simulate(
        program,
        seed=args.seed,
        trials=args.trials,
        max_steps=args.max_steps,
        cost=args.cost_model,
        n_jobs=args.jobs,
    )
    print(result.summary_line())
    return EXIT_OK


def cmd_stats(args) -> int:
    net = load_network(args.file, normalize=args.normalize)
    stats = bayesnet.network_stats(net)
    print(f"nodes={stats['nodes']} edges={stats['edges']} avg_mb={float(stats['avg_mb']):.2f}")
    return EXIT_OK


def cmd_check(args) -> int:
    net, obs = _load(args)
    report = engine.soundness_check(net, obs, args.trials, args.seed, args.order)
    print(f"checked={report.checked} mismatches={len(report.mismatches)}")
    for m in report.mismatches:
        print(f"  {m['query']}: wp={cr.render(m['wp'])} oracle={cr.render(m['oracle'])}")
    return EXIT_OK


def cmd_bench(args) -> int:
    files = [f for f in load_all_network_files() if f.stem in config.REFERENCE_EXPERIMENTS]
    if not files:
        raise InputError(f"no benchmark networks found in {config.NETWORKS_DIR}")
    nets = [load_network(f, normalize=args.normalize) for f in files]
    table = engine.experiments_table(nets, args.trials, args.seed, args.order, args.cost_model)
    engine.export_experiments(table, args.out)
    print(table.to_string(index=False))
    return EXIT_OK


# ============================================================================
# PARSER
# ============================================================================
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bnl-sampletime",
        description="Exact expected sampling time of rejection sampling on Bayesian networks",
    )
    parser.add_argument(
        "--cost-model",
        default=config.DEFAULT_COST_MODEL,
        choices=sorted(pgcl.COST_MODELS),
        help="Charges per executed construct (default: %(default)s)",
    )
    parser.add_argument(
        "--order",
        default=config.DEFAULT_BRANCH_ORDER,
        choices=translate.BRANCH_ORDERS,
        help="Branch order of translated blocks (default: %(default)s)",
    )
    parser.add_argument(
        "--normalize",
        action="store_true",
        help="Rescale CPT rows whose mass is within tolerance of 1",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, func, help_text: str, observe: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="Network file (.bif or .json)")
        if observe:
            p.add_argument("--observe", action="append", default=[], metavar="VAR=VALUE")
        p.set_defaults(func=func)
        return p

    p = command("est", cmd_est, "Exact expected sampling time")
    p.add_argument("--param", action="append", default=[], metavar="NAME=RATIONAL")

    p = command("prob", cmd_prob, "Posterior probability via wp")
    p.add_argument("--query", action="append", default=[], metavar="VAR=VALUE")

    command("translate", cmd_translate, "Print the rejection-sampling program")

    p = command("sweep", cmd_sweep, "Evaluate a symbolic EST over a grid (CSV)")
    p.add_argument("--param", required=True, help="Parameter to sweep")
    p.add_argument("--grid", required=True, metavar="START:END:STEP")
    p.add_argument("--fix", action="append", default=[], metavar="NAME=RATIONAL",
                   help="Values of the other parameters")
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")

    p = command("simulate", cmd_simulate, "Seeded rejection-sampling simulation")
    p.add_argument("--param", dest="instantiate", action="append", default=[], metavar="NAME=RATIONAL",
                   help="Parameter values substituted before simulating")
    p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=config.DEFAULT_TRIALS)
    p.add_argument("--max-steps", type=int, default=config.DEFAULT_MAX_STEPS)
    p.add_argument("--jobs", type=int, default=config.SIM_JOBS)

    command("stats", cmd_stats, "Node, edge and Markov blanket statistics", observe=False)

    p = command("check", cmd_check, "Compare wp posteriors with enumeration")
    p.add_argument("--param", dest="instantiate", action="append", default=[], metavar="NAME=RATIONAL",
                   help="Parameter values substituted before checking")
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)

    p = sub.add_parser("bench", help="Experiments table over the vendored networks")
    p.add_argument("--trials", type=int, default=config.BENCHMARK_TRIALS)
    p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    p.add_argument("--out", default=None, help=f"CSV path (default: {config.BENCHMARK_CSV_PATH})")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PremiseError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_PREMISE
    except (InputError, CoefficientError, FileNotFoundError) as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_INPUT
    except SimulationError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_SIMULATION
