"""
Exact analyses on translated networks: expected sampling time, posteriors
via wp, the soundness cross-check against enumeration, parameter sweeps and
the experiments table over the vendored networks.
"""
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .. import bayesnet
from .. import coeffring as cr
from .. import config
from .. import expectation as ex
from .. import translate
from ..bayesnet import Network, ObservationMap
from ..coeffring import Coefficient
from ..errors import CoefficientError, InputError, UndeclaredParameter
from ..pgcl import CostModel, cost_model, ert, program_size, wp


@dataclass
class EstReport:
    est: Coefficient
    observed: ObservationMap
    program_size: int
    order: str
    cost_model: str
    params: tuple = ()

    @property
    def is_symbolic(self) -> bool:
        return cr.is_parametric(self.est)

    def decimal(self) -> str:
        return cr.to_decimal(self.est, config.DECIMAL_DIGITS)

    def scientific(self) -> str:
        return cr.to_scientific(self.est)

    def summary(self) -> str:
        """``352/15 (23.466667)`` for numbers, the canonical fraction for symbolic results."""
        if self.is_symbolic:
            return cr.render(self.est)
        if cr.is_inf(self.est):
            return "inf"
        return f"{cr.render(self.est)} ({self.decimal()})"


def _zero(net: Network) -> ex.Expectation:
    return ex.constant(cr.ZERO, net.domains)


def est(
    net: Network,
    obs: Optional[Mapping[str, object]] = None,
    order: Optional[str] = None,
    cost: Union[str, CostModel, None] = None,
) -> EstReport:
    """ert of the rejection-sampling program on the zero post-runtime."""
    cost = cost_model(cost or config.DEFAULT_COST_MODEL)
    order = order or config.DEFAULT_BRANCH_ORDER
    obs = ObservationMap.of(net, obs)
    program = translate.translate(net, obs, order)
    result = ert(program, _zero(net), cost)
    return EstReport(
        est=result.value(),
        observed=obs,
        program_size=program_size(program),
        order=order,
        cost_model=cost.name,
        params=net.params,
    )


def est_via_primitives(
    net: Network,
    obs: Optional[Mapping[str, object]] = None,
    order: Optional[str] = None,
    cost: Union[str, CostModel, None] = None,
) -> Coefficient:
    """(c + ert(body, 0)) / wp(body, [ψ]) from the loop-free body alone."""
    cost = cost_model(cost or config.DEFAULT_COST_MODEL)
    body = translate.program_of(net, order)
    psi = translate.observation_guard(net, ObservationMap.of(net, obs))
    accept = wp(body, ex.iverson(psi, net.domains)).value()
    runtime = ert(body, _zero(net), cost).value()
    return cr.guarded_div(cr.add(cr.coerce(cost.loop_guard), runtime), accept)


def posterior(
    net: Network,
    query: Mapping[str, object],
    obs: Optional[Mapping[str, object]] = None,
    order: Optional[str] = None,
) -> Coefficient:
    """wp of the translated program on the query indicator."""
    obs = ObservationMap.of(net, obs)
    program = translate.translate(net, obs, order)
    indicator = ex.iverson(translate.observation_guard(net, query), net.domains)
    return wp(program, indicator).value()


# ============================================================================
# SOUNDNESS CROSS-CHECK
# ============================================================================
@dataclass
class SoundnessReport:
    checked: int = 0
    mismatches: List[Dict[str, object]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def soundness_check(
    net: Network,
    obs: Optional[Mapping[str, object]] = None,
    trials: int = 8,
    seed: Optional[int] = None,
    order: Optional[str] = None,
) -> SoundnessReport:
    """Compare wp posteriors against brute-force conditionals on full queries.

    Queries assign every unobserved node. When there are at most ``trials``
    of them all are checked, otherwise ``trials`` are drawn with a seeded
    generator.
    """
    if net.params:
        raise InputError("the soundness check needs a parameter-free network")
    obs = ObservationMap.of(net, obs)
    free = [v for v in net.nodes if v not in obs]
    candidates = [{v: s[v] for v in free} for s in bayesnet.full_assignments(net, obs)]
    if len(candidates) > trials:
        rng = np.random.default_rng(config.DEFAULT_SEED if seed is None else seed)
        picks = rng.choice(len(candidates), size=trials, replace=False)
        candidates = [candidates[i] for i in sorted(picks)]

    report = SoundnessReport()
    for query in candidates:
        via_wp = posterior(net, query, obs, order)
        oracle = bayesnet.conditional_prob(net, query, obs)
        report.checked += 1
        if not cr.equal(via_wp, oracle):
            report.mismatches.append({"query": query, "wp": via_wp, "oracle": oracle})
    return report


# ============================================================================
# PARAMETER SWEEPS
# ============================================================================
@dataclass
class SweepPoint:
    value: Fraction
    est: Optional[Coefficient] = None
    error: Optional[str] = None


def sweep(
    net: Network,
    param: str,
    grid: Sequence,
    obs: Optional[Mapping[str, object]] = None,
    order: Optional[str] = None,
    cost: Union[str, CostModel, None] = None,
    fixed: Optional[Mapping[str, object]] = None,
) -> List[SweepPoint]:
    """Evaluate the symbolic EST at each grid point; bad points keep their error."""
    if param not in net.params:
        raise UndeclaredParameter(f"{param} is not a parameter of {net.name}")
    grid = [Fraction(x) for x in grid]
    if not grid:
        return []
    symbolic = est(net, obs, order, cost).est
    base = {k: Fraction(v) for k, v in dict(fixed or {}).items()}
    points = []
    for x in grid:
        point = dict(base)
        point[param] = x
        try:
            points.append(SweepPoint(x, cr.eval_at(symbolic, point)))
        except CoefficientError as exc:
            points.append(SweepPoint(x, None, f"{type(exc).__name__}: {exc}"))
    return points


def parse_grid(spec: str) -> List[Fraction]:
    """``start:end:step`` with exact endpoints; end is included when reached exactly."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise InputError(f"grid must be start:end:step, got {spec!r}")
    try:
        start, end, step = (Fraction(p.strip()) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"grid endpoints must be rationals, got {spec!r}") from None
    if step <= 0:
        raise InputError("grid step must be positive")
    values = []
    x = start
    while x <= end:
        values.append(x)
        x += step
    return values


def sweep_to_frame(points: Sequence[SweepPoint]) -> pd.DataFrame:
    """``param,est`` rows; ``inf`` for infinity and ``pole`` for undefined points."""
    rows = []
    for p in points:
        if p.error is not None:
            value = "pole"
        else:
            value = cr.to_exact(p.est)
        rows.append({"param": cr.to_exact(p.value), "est": value})
    return pd.DataFrame(rows, columns=["param", "est"])


# ============================================================================
# EXPERIMENTS TABLE
# ============================================================================
def experiments_table(
    nets: Sequence[Network],
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    order: Optional[str] = None,
    cost: Union[str, CostModel, None] = None,
) -> pd.DataFrame:
    """Stats, 0-observation EST and simulator agreement per network."""
    from .. import sim

    trials = trials or config.BENCHMARK_TRIALS
    seed = config.DEFAULT_SEED if seed is None else seed
    rows = []
    for net in nets:
        print(f"[INFO] Analyzing {net.name}...", file=sys.stderr)
        stats = bayesnet.network_stats(net)
        report = est(net, {}, order, cost)
        program = translate.translate(net, {}, report.order)
        result = sim.simulate(program, seed=seed, trials=trials, cost=report.cost_model)
        reference = config.REFERENCE_EXPERIMENTS.get(net.name, {})
        exact = report.est
        rows.append({
            "network": net.name,
            "nodes": stats["nodes"],
            "edges": stats["edges"],
            "avg_mb": f"{float(stats['avg_mb']):.2f}",
            "est": cr.render(exact),
            "est_sci": report.scientific(),
            "reference_est": reference.get("est"),
            "matches_reference": reference.get("est") is not None and cr.equal(exact, cr.coerce(reference["est"])),
            "sim_mean": float(result.mean),
            "sim_half_width": float(result.half_width),
            "sim_agrees": result.agrees_with(exact),
            "order": report.order,
            "cost_model": report.cost_model,
        })
    table = pd.DataFrame(rows)
    print(f"[INFO] Experiments table: {len(table)} networks", file=sys.stderr)
    return table


def export_experiments(table: pd.DataFrame, path=None) -> None:
    path = path or config.BENCHMARK_CSV_PATH
    table.to_csv(path, index=False)
    print(f"[INFO] Results saved to {path}", file=sys.stderr)
