"""
Seeded rejection-sampling interpreter.

Each trial runs the program from its initial state and accumulates the
charges of the selected cost model, so the mean step count estimates ert
of the program on the zero post-runtime. Random bits come from numpy's
PCG64 generator; shard ``i`` of a run with seed ``s`` is seeded with
``SeedSequence([s, i])`` and results are identical for a fixed shard plan.

An assignment ``x := Σ p_i·<a_i>`` picks the first ``a_i`` whose cumulative
threshold ``ceil(2^64 · (p_0 + ... + p_i))`` exceeds a raw 64-bit draw, so
each outcome is hit by exactly ``T_i - T_{i-1}`` of the 2^64 draws.
"""
import sys
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from . import coeffring as cr
from . import config
from .coeffring import Coefficient
from .errors import AllTrialsTruncated, InputError
from .pgcl import Assign, CostModel, Diverge, If, Program, RepeatUntil, Seq, Skip, While, cost_model

_SCALE = 1 << 64


class _Truncated(Exception):
    pass


class _Env:
    """Mutable state of one shard: current trial state, counters, draw buffer."""

    def __init__(self, bitgen: np.random.PCG64, max_steps: int):
        self.bitgen = bitgen
        self.max_steps = max_steps
        self.state: Dict[str, object] = {}
        self.steps = 0
        self.ticks = 0
        self._buffer: List[int] = []

    def tick(self, charge: int) -> None:
        self.steps += charge
        self.ticks += 1
        if self.ticks > self.max_steps:
            raise _Truncated()

    def draw(self) -> int:
        if not self._buffer:
            self._buffer = self.bitgen.random_raw(config.SIM_DRAW_BUFFER).tolist()
            self._buffer.reverse()
        return self._buffer.pop()


def thresholds(outcomes: Sequence[Tuple[Coefficient, object]]) -> List[int]:
    """Cumulative integer thresholds in [0, 2^64] of a parameter-free distribution."""
    cums = []
    acc = Fraction(0)
    for p, _ in outcomes:
        if cr.is_parametric(p):
            raise InputError("simulation needs a parameter-free program")
        acc += p
        cums.append(-((-acc.numerator * _SCALE) // acc.denominator))
    return cums


def _compile(C: Program, cost: CostModel) -> Callable[[_Env], None]:
    if isinstance(C, Skip):
        def run(env):
            env.tick(cost.skip)
        return run

    if isinstance(C, Diverge):
        def run(env):
            raise _Truncated()
        return run

    if isinstance(C, Assign):
        var = C.var
        pairs = list(zip(thresholds(C.dist.outcomes), C.dist.values()))
        if len(pairs) == 1:
            only = pairs[0][1]

            def run(env):
                env.tick(cost.assign)
                env.state[var] = only
            return run

        def run(env):
            env.tick(cost.assign)
            r = env.draw()
            for t, value in pairs:
                if r < t:
                    env.state[var] = value
                    return
        return run

    if isinstance(C, Seq):
        first, second = _compile(C.first, cost), _compile(C.second, cost)

        def run(env):
            first(env)
            second(env)
        return run

    if isinstance(C, If):
        holds = C.guard.holds
        then, orelse = _compile(C.then, cost), _compile(C.orelse, cost)

        def run(env):
            env.tick(cost.guard)
            (then if holds(env.state) else orelse)(env)
        return run

    if isinstance(C, While):
        holds = C.guard.holds
        body = _compile(C.body, cost)

        def run(env):
            while True:
                env.tick(cost.loop_guard)
                if not holds(env.state):
                    return
                body(env)
        return run

    if isinstance(C, RepeatUntil):
        holds = C.guard.holds
        body = _compile(C.body, cost)

        def run(env):
            while True:
                body(env)
                env.tick(cost.loop_guard)
                if holds(env.state):
                    return
        return run

    raise TypeError(f"not a program: {C!r}")


@dataclass
class _ShardResult:
    finished: int = 0
    truncated: int = 0
    total: int = 0
    total_sq: int = 0
    frequencies: Counter = field(default_factory=Counter)


def _run_shard(
    program: Program,
    cost: CostModel,
    seed: int,
    shard: int,
    trials: int,
    max_steps: int,
    query_vars: Tuple[str, ...],
    init: Mapping[str, object],
) -> _ShardResult:
    run = _compile(program, cost)
    env = _Env(np.random.PCG64(np.random.SeedSequence([seed, shard])), max_steps)
    out = _ShardResult()
    for _ in range(trials):
        env.state = dict(init)
        env.steps = 0
        env.ticks = 0
        try:
            run(env)
        except _Truncated:
            out.truncated += 1
            continue
        out.finished += 1
        out.total += env.steps
        out.total_sq += env.steps * env.steps
        if query_vars:
            out.frequencies[tuple(env.state.get(v) for v in query_vars)] += 1
    return out


def shard_plan(trials: int, shard_size: Optional[int] = None) -> List[int]:
    size = shard_size or config.SIM_SHARD_SIZE
    full, rest = divmod(trials, size)
    return [size] * full + ([rest] if rest else [])


def _sqrt(q: Fraction) -> Fraction:
    with localcontext() as ctx:
        ctx.prec = 40
        return Fraction((Decimal(q.numerator) / Decimal(q.denominator)).sqrt())


@dataclass
class SimResult:
    trials: int
    mean: Fraction
    variance: Fraction
    half_width: Fraction
    truncated: int = 0
    frequencies: Dict[tuple, int] = field(default_factory=dict)
    query_vars: Tuple[str, ...] = ()

    def agrees_with(self, exact: Coefficient, sigmas: Optional[int] = None) -> bool:
        """|mean - exact| <= sigmas·sqrt(var/trials), decided exactly."""
        if cr.is_inf(exact) or cr.is_parametric(exact):
            return False
        sigmas = config.AGREEMENT_SIGMAS if sigmas is None else sigmas
        gap = self.mean - exact
        return gap * gap <= sigmas * sigmas * self.variance / self.trials

    def frequency(self, values: Sequence) -> Fraction:
        return Fraction(self.frequencies.get(tuple(values), 0), self.trials)

    def summary_line(self) -> str:
        return (
            f"trials={self.trials} mean={cr.to_decimal(self.mean)} "
            f"var={cr.to_decimal(self.variance)} ci99={cr.to_decimal(self.half_width)} "
            f"truncated={self.truncated}"
        )


def simulate(
    program: Program,
    seed: Optional[int] = None,
    trials: Optional[int] = None,
    max_steps: Optional[int] = None,
    cost: Union[str, CostModel, None] = None,
    query_vars: Sequence[str] = (),
    init: Optional[Mapping[str, object]] = None,
    n_jobs: Optional[int] = None,
) -> SimResult:
    """Run ``trials`` seeded executions and summarize the step counts."""
    seed = config.DEFAULT_SEED if seed is None else seed
    trials = config.DEFAULT_TRIALS if trials is None else trials
    max_steps = config.DEFAULT_MAX_STEPS if max_steps is None else max_steps
    cost = cost_model(cost or config.DEFAULT_COST_MODEL)
    n_jobs = n_jobs or config.SIM_JOBS
    if trials < 1:
        raise InputError("trials must be at least 1")

    plan = shard_plan(trials)
    print(f"[SIM] {trials} trials in {len(plan)} shard(s), seed {seed}, cost model {cost.name}", file=sys.stderr)
    args = (tuple(query_vars), dict(init or {}))
    if n_jobs == 1:
        shards = [_run_shard(program, cost, seed, i, n, max_steps, *args) for i, n in enumerate(plan)]
    else:
        shards = Parallel(n_jobs=n_jobs)(
            delayed(_run_shard)(program, cost, seed, i, n, max_steps, *args) for i, n in enumerate(plan)
        )

    finished = sum(s.finished for s in shards)
    truncated = sum(s.truncated for s in shards)
    if not finished:
        raise AllTrialsTruncated(trials, max_steps)
    if truncated:
        print(f"[SIM] {truncated} trial(s) hit the step limit of {max_steps}", file=sys.stderr)

    total = sum(s.total for s in shards)
    total_sq = sum(s.total_sq for s in shards)
    mean = Fraction(total, finished)
    variance = Fraction(total_sq * finished - total * total, finished * (finished - 1)) if finished > 1 else Fraction(0)
    half_width = config.Z_99 * _sqrt(variance / finished)
    frequencies: Counter = Counter()
    for s in shards:
        frequencies.update(s.frequencies)
    return SimResult(
        trials=finished,
        mean=mean,
        variance=variance,
        half_width=half_width,
        truncated=truncated,
        frequencies=dict(frequencies),
        query_vars=tuple(query_vars),
    )


def sample_posterior(
    program: Program,
    query_vars: Sequence[str],
    seed: Optional[int] = None,
    trials: Optional[int] = None,
    max_steps: Optional[int] = None,
    cost: Union[str, CostModel, None] = None,
) -> Dict[tuple, int]:
    """Final values of ``query_vars`` tallied over the completed trials."""
    return simulate(program, seed, trials, max_steps, cost, query_vars=query_vars).frequencies
