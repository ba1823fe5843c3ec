"""
Probabilistic guarded commands: syntax, the wp and ert transformers, and
bounded loop orbits used as a test oracle.

Loops are never solved by fixed-point iteration here; ``While`` and
``RepeatUntil`` dispatch to the closed forms in ``src.iidrules`` and fail
with ``UnsupportedLoop`` when their premises do not hold.
"""
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from . import coeffring as cr
from . import expectation as ex
from .coeffring import Coefficient
from .errors import InputError, MassNotOne, UnknownCostModel, UnsupportedLoop
from .expectation import Expectation, Guard, Value, VarDomain


# ============================================================================
# COST MODELS
# ============================================================================
@dataclass(frozen=True)
class CostModel:
    """Charges per executed construct; ``standard`` charges 1 everywhere."""

    name: str
    skip: int = 1
    assign: int = 1
    guard: int = 1
    loop_guard: int = 1


COST_MODELS: Dict[str, CostModel] = {
    "standard": CostModel("standard", 1, 1, 1, 1),
    "guards": CostModel("guards", 0, 0, 1, 1),
    "body": CostModel("body", 1, 1, 1, 0),
    "iterations": CostModel("iterations", 0, 0, 0, 1),
    "assignments": CostModel("assignments", 0, 1, 0, 0),
}

STANDARD = COST_MODELS["standard"]


def cost_model(model: Union[str, CostModel, None]) -> CostModel:
    if model is None:
        return STANDARD
    if isinstance(model, CostModel):
        return model
    try:
        return COST_MODELS[model]
    except KeyError:
        raise UnknownCostModel(
            f"unknown cost model {model!r} (choose from {', '.join(COST_MODELS)})"
        ) from None


# ============================================================================
# SYNTAX
# ============================================================================
@dataclass(frozen=True)
class DistExpr:
    """Finite-support distribution sum_i p_i·<a_i> with constant values."""

    outcomes: Tuple[Tuple[Coefficient, Value], ...]

    def __post_init__(self):
        outcomes = tuple((cr.coerce(p), ex.as_value(v)) for p, v in self.outcomes)
        object.__setattr__(self, "outcomes", outcomes)
        values = [v for _, v in outcomes]
        if len(set(values)) != len(values):
            raise InputError(f"duplicate values in distribution {values}")
        mass = cr.total(p for p, _ in outcomes)
        if not cr.is_one(mass):
            raise MassNotOne(f"distribution has mass {cr.render(mass)}")

    @classmethod
    def point(cls, value) -> "DistExpr":
        return cls(((cr.ONE, value),))

    @classmethod
    def uniform(cls, values: Sequence) -> "DistExpr":
        values = list(values)
        p = cr.coerce(1) / len(values)
        return cls(tuple((p, v) for v in values))

    def values(self) -> List[Value]:
        return [v for _, v in self.outcomes]

    def render(self) -> str:
        if len(self.outcomes) == 1:
            return f"⟨{self.outcomes[0][1]}⟩"
        return " + ".join(f"{_paren(cr.render(p))}·⟨{v}⟩" for p, v in self.outcomes)


def _paren(text: str) -> str:
    return f"({text})" if any(op in text for op in " +-") else text


class Program:
    """Base of the program constructors."""

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Skip(Program):
    pass


@dataclass(frozen=True)
class Diverge(Program):
    pass


@dataclass(frozen=True)
class Assign(Program):
    var: str
    dist: DistExpr


@dataclass(frozen=True)
class Seq(Program):
    first: Program
    second: Program


@dataclass(frozen=True)
class If(Program):
    guard: Guard
    then: Program
    orelse: Program


@dataclass(frozen=True)
class While(Program):
    guard: Guard
    body: Program


@dataclass(frozen=True)
class RepeatUntil(Program):
    body: Program
    guard: Guard


def seq(*programs: Program) -> Program:
    """Left-nested sequential composition; the empty sequence is skip."""
    if not programs:
        return Skip()
    result = programs[0]
    for p in programs[1:]:
        result = Seq(result, p)
    return result


def desugar(p: RepeatUntil) -> Program:
    """repeat C until ψ  ==  C; while (¬ψ) { C }."""
    return Seq(p.body, While(~p.guard, p.body))


def modified_vars(C: Program) -> FrozenSet[str]:
    if isinstance(C, Assign):
        return frozenset((C.var,))
    if isinstance(C, Seq):
        return modified_vars(C.first) | modified_vars(C.second)
    if isinstance(C, If):
        return modified_vars(C.then) | modified_vars(C.orelse)
    if isinstance(C, (While, RepeatUntil)):
        return modified_vars(C.body)
    return frozenset()


def is_loop_free(C: Program) -> bool:
    if isinstance(C, (While, RepeatUntil)):
        return False
    if isinstance(C, Seq):
        return is_loop_free(C.first) and is_loop_free(C.second)
    if isinstance(C, If):
        return is_loop_free(C.then) and is_loop_free(C.orelse)
    return True


def program_size(C: Program) -> int:
    """Number of syntax-tree nodes."""
    if isinstance(C, Seq):
        return 1 + program_size(C.first) + program_size(C.second)
    if isinstance(C, If):
        return 1 + program_size(C.then) + program_size(C.orelse)
    if isinstance(C, (While, RepeatUntil)):
        return 1 + program_size(C.body)
    return 1


def validate(C: Program, domains: VarDomain) -> None:
    """Assigned values and guard variables must be declared in ``domains``."""
    if isinstance(C, Assign):
        for v in C.dist.values():
            domains.check_value(C.var, v)
    elif isinstance(C, Seq):
        validate(C.first, domains)
        validate(C.second, domains)
    elif isinstance(C, If):
        C.guard.validate(domains)
        validate(C.then, domains)
        validate(C.orelse, domains)
    elif isinstance(C, (While, RepeatUntil)):
        C.guard.validate(domains)
        validate(C.body, domains)


# ============================================================================
# TRANSFORMERS
# ============================================================================
def wp(C: Program, f: Expectation) -> Expectation:
    """Weakest preexpectation of ``f`` under ``C``."""
    if isinstance(C, Skip):
        return f
    if isinstance(C, Diverge):
        return ex.constant(cr.ZERO, f.domains)
    if isinstance(C, Assign):
        return ex.expected_over_dist(f, C.var, C.dist.outcomes)
    if isinstance(C, Seq):
        return wp(C.first, wp(C.second, f))
    if isinstance(C, If):
        return ex.select(C.guard, wp(C.then, f), wp(C.orelse, f))

    from . import iidrules

    if isinstance(C, While):
        return iidrules.wp_while_iid(C.guard, C.body, f)
    if isinstance(C, RepeatUntil):
        return iidrules.wp_repeat_until(C.body, C.guard, f)
    raise TypeError(f"not a program: {C!r}")


def ert(C: Program, f: Expectation, cost: Union[str, CostModel, None] = None) -> Expectation:
    """Expected runtime of ``C`` followed by post-runtime ``f``."""
    cost = cost_model(cost)
    if isinstance(C, Skip):
        return ex.shift(cost.skip, f)
    if isinstance(C, Diverge):
        return ex.constant(cr.INF, f.domains)
    if isinstance(C, Assign):
        return ex.shift(cost.assign, ex.expected_over_dist(f, C.var, C.dist.outcomes))
    if isinstance(C, Seq):
        return ert(C.first, ert(C.second, f, cost), cost)
    if isinstance(C, If):
        return ex.shift(cost.guard, ex.select(C.guard, ert(C.then, f, cost), ert(C.orelse, f, cost)))

    from . import iidrules

    if isinstance(C, While):
        return iidrules.ert_while_iid(C.guard, C.body, f, cost)
    if isinstance(C, RepeatUntil):
        return iidrules.ert_repeat_until(C.body, C.guard, f, cost)
    raise TypeError(f"not a program: {C!r}")


# ============================================================================
# ORBITS
# ============================================================================
def _require_loop_free(body: Program) -> None:
    if not is_loop_free(body):
        raise UnsupportedLoop("orbit iteration needs a loop-free body", premise="loop-free body")


def orbit_wp(phi: Guard, body: Program, f: Expectation, n: int) -> Expectation:
    """n-th iterate from 0 of X -> [¬φ]·f + [φ]·wp(body, X)."""
    _require_loop_free(body)
    X = ex.constant(cr.ZERO, f.domains)
    for _ in range(n):
        X = ex.select(phi, wp(body, X), f)
    return X


def orbit_ert(
    phi: Guard,
    body: Program,
    n: int,
    domains: VarDomain,
    f: Optional[Expectation] = None,
    cost: Union[str, CostModel, None] = None,
) -> Expectation:
    """n-th iterate from 0 of X -> c + [¬φ]·f + [φ]·ert(body, X)."""
    _require_loop_free(body)
    cost = cost_model(cost)
    if f is None:
        f = ex.constant(cr.ZERO, domains)
    X = ex.constant(cr.ZERO, f.domains)
    for _ in range(n):
        X = ex.shift(cost.loop_guard, ex.select(phi, ert(body, X, cost), f))
    return X


# ============================================================================
# PRETTY PRINTING
# ============================================================================
def render(C: Program, indent: int = 0) -> str:
    return "\n".join(_lines(C, indent))


def _lines(C: Program, depth: int) -> List[str]:
    pad = "    " * depth
    if isinstance(C, Skip):
        return [pad + "skip"]
    if isinstance(C, Diverge):
        return [pad + "diverge"]
    if isinstance(C, Assign):
        return [f"{pad}{C.var} := {C.dist.render()}"]
    if isinstance(C, Seq):
        first = _lines(C.first, depth)
        first[-1] += ";"
        return first + _lines(C.second, depth)
    if isinstance(C, If):
        out = [f"{pad}if ({C.guard.render()}) {{"] + _lines(C.then, depth + 1)
        out.append(pad + "} else {")
        out += _lines(C.orelse, depth + 1)
        out.append(pad + "}")
        return out
    if isinstance(C, While):
        return [f"{pad}while ({C.guard.render()}) {{"] + _lines(C.body, depth + 1) + [pad + "}"]
    if isinstance(C, RepeatUntil):
        return [pad + "repeat {"] + _lines(C.body, depth + 1) + [f"{pad}}} until ({C.guard.render()})"]
    raise TypeError(f"not a program: {C!r}")
