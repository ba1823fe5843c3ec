"""
Finite extensional expectations over finitely-valued program variables.

An ``Expectation`` is a dense table from assignments of its support
variables to coefficients. Supports are kept minimal: a variable the table
does not depend on is dropped, so the support is exactly the set of
variables the expectation reads.
"""
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from . import coeffring as cr
from . import config
from .coeffring import Coefficient
from .errors import (
    IncompleteState,
    InputError,
    MassNotOne,
    NegativeValue,
    TableTooLarge,
    UnknownVariable,
    ValueOutOfDomain,
)

Value = Union[int, Fraction]
Key = Tuple[Value, ...]


def as_value(v) -> Value:
    """Normalize a rational variable value (integral Fractions become ints)."""
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, int):
        return v
    q = Fraction(v)
    return q.numerator if q.denominator == 1 else q


class VarDomain(Mapping[str, Tuple[Value, ...]]):
    """Ordered finite value lists per variable, in declaration order."""

    def __init__(self, domains: Mapping[str, Sequence] = ()):
        self._domains: Dict[str, Tuple[Value, ...]] = {}
        for name, values in dict(domains).items():
            vals = tuple(as_value(v) for v in values)
            if not vals:
                raise InputError(f"empty domain for {name}")
            if len(set(vals)) != len(vals):
                raise InputError(f"duplicate values in domain of {name}")
            self._domains[name] = vals

    def __getitem__(self, name: str) -> Tuple[Value, ...]:
        try:
            return self._domains[name]
        except KeyError:
            raise UnknownVariable(name) from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._domains)

    def __len__(self) -> int:
        return len(self._domains)

    def __repr__(self):
        return f"VarDomain({self._domains!r})"

    def __contains__(self, name) -> bool:
        return name in self._domains

    def check_value(self, name: str, value) -> Value:
        v = as_value(value)
        if v not in self[name]:
            raise ValueOutOfDomain(name, value, self[name])
        return v

    def merge(self, other: "VarDomain") -> "VarDomain":
        if other is self or not len(other):
            return self
        if not len(self):
            return other
        merged = dict(self._domains)
        for name, vals in other.items():
            if name in merged and merged[name] != vals:
                raise InputError(f"conflicting domains for {name}")
            merged[name] = vals
        return VarDomain(merged)

    def cells(self, support: Iterable[str]) -> int:
        n = 1
        for name in support:
            n *= len(self[name])
        return n


# ============================================================================
# GUARDS
# ============================================================================
class Guard:
    """Boolean formula over ``variable = value`` atoms."""

    def variables(self) -> frozenset:
        raise NotImplementedError

    def holds(self, state: Mapping[str, Value]) -> bool:
        raise NotImplementedError

    def render(self) -> str:
        raise NotImplementedError

    def validate(self, domains: VarDomain) -> None:
        for name in self.variables():
            domains[name]

    def __and__(self, other: "Guard") -> "Guard":
        return conjunction([self, other])

    def __or__(self, other: "Guard") -> "Guard":
        return Or((self, other))

    def __invert__(self) -> "Guard":
        if isinstance(self, Not):
            return self.inner
        if isinstance(self, Const):
            return Const(not self.value)
        return Not(self)

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class Const(Guard):
    value: bool

    def variables(self):
        return frozenset()

    def holds(self, state):
        return self.value

    def render(self):
        return "true" if self.value else "false"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Atom(Guard):
    var: str
    value: Value

    def variables(self):
        return frozenset((self.var,))

    def holds(self, state):
        return state[self.var] == self.value

    def render(self):
        return f"{self.var} = {self.value}"

    def validate(self, domains):
        domains.check_value(self.var, self.value)


@dataclass(frozen=True)
class Not(Guard):
    inner: Guard

    def variables(self):
        return self.inner.variables()

    def holds(self, state):
        return not self.inner.holds(state)

    def render(self):
        return f"¬({self.inner.render()})"

    def validate(self, domains):
        self.inner.validate(domains)


@dataclass(frozen=True)
class And(Guard):
    parts: Tuple[Guard, ...]

    def variables(self):
        return frozenset().union(*(p.variables() for p in self.parts))

    def holds(self, state):
        return all(p.holds(state) for p in self.parts)

    def render(self):
        return " ∧ ".join(_wrap(p) for p in self.parts)

    def validate(self, domains):
        for p in self.parts:
            p.validate(domains)


@dataclass(frozen=True)
class Or(Guard):
    parts: Tuple[Guard, ...]

    def variables(self):
        return frozenset().union(*(p.variables() for p in self.parts))

    def holds(self, state):
        return any(p.holds(state) for p in self.parts)

    def render(self):
        return " ∨ ".join(_wrap(p) for p in self.parts)

    def validate(self, domains):
        for p in self.parts:
            p.validate(domains)


@dataclass(frozen=True)
class Extensional(Guard):
    """Guard given by its satisfying assignments over ``vars``."""

    vars: Tuple[str, ...]
    satisfying: frozenset
    label: str = ""

    @classmethod
    def from_predicate(
        cls,
        variables: Sequence[str],
        predicate: Callable[..., bool],
        domains: VarDomain,
        label: str = "",
    ) -> "Extensional":
        variables = tuple(variables)
        sat = frozenset(
            key
            for key in itertools.product(*(domains[v] for v in variables))
            if predicate(*key)
        )
        return cls(variables, sat, label)

    def variables(self):
        return frozenset(self.vars)

    def holds(self, state):
        return tuple(state[v] for v in self.vars) in self.satisfying

    def render(self):
        if self.label:
            return self.label
        return f"({', '.join(self.vars)}) ∈ {{{len(self.satisfying)} tuples}}"


def _wrap(g: Guard) -> str:
    if isinstance(g, (And, Or)):
        return f"({g.render()})"
    return g.render()


def conjunction(parts: Iterable[Guard]) -> Guard:
    flat: List[Guard] = []
    for p in parts:
        if isinstance(p, Const):
            if not p.value:
                return FALSE
            continue
        if isinstance(p, And):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


# ============================================================================
# EXPECTATIONS
# ============================================================================
def _check_size(domains: VarDomain, support: Sequence[str]) -> None:
    cells = domains.cells(support)
    if cells > config.MAX_TABLE_CELLS:
        raise TableTooLarge(cells, config.MAX_TABLE_CELLS)


def _minimize(domains: VarDomain, support: Tuple[str, ...], table: Dict[Key, Coefficient]):
    for var in list(support):
        i = support.index(var)
        first = domains[var][0]
        constant = True
        for key, val in table.items():
            if key[i] == first:
                continue
            ref = table[key[:i] + (first,) + key[i + 1:]]
            if not cr.equal(val, ref):
                constant = False
                break
        if constant:
            table = {key[:i] + key[i + 1:]: val for key, val in table.items() if key[i] == first}
            support = support[:i] + support[i + 1:]
    return support, table


class Expectation:
    """Dense table from support assignments to coefficients."""

    __slots__ = ("domains", "support", "table")

    def __init__(
        self,
        domains: VarDomain,
        support: Sequence[str],
        table: Dict[Key, Coefficient],
        minimize: bool = True,
    ):
        support = tuple(support)
        if list(support) != sorted(support):
            order = sorted(range(len(support)), key=lambda i: support[i])
            table = {tuple(key[i] for i in order): v for key, v in table.items()}
            support = tuple(support[i] for i in order)
        if len(table) != domains.cells(support):
            raise InputError(f"table over {support} is not total")
        for val in table.values():
            if isinstance(val, Fraction) and val < 0:
                raise NegativeValue(f"negative expectation entry {val}")
        if minimize:
            support, table = _minimize(domains, support, table)
        self.domains = domains
        self.support = support
        self.table = table

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------
    @classmethod
    def constant(cls, c, domains: Optional[VarDomain] = None) -> "Expectation":
        return cls(domains if domains is not None else VarDomain(), (), {(): cr.coerce(c)}, minimize=False)

    @classmethod
    def tabulate(
        cls,
        support: Sequence[str],
        fn: Callable[[Dict[str, Value]], Coefficient],
        domains: VarDomain,
    ) -> "Expectation":
        support = tuple(sorted(support))
        _check_size(domains, support)
        table = {}
        for key in itertools.product(*(domains[v] for v in support)):
            table[key] = cr.coerce(fn(dict(zip(support, key))))
        return cls(domains, support, table)

    # ------------------------------------------------------------------
    # inspection
    # ------------------------------------------------------------------
    @property
    def variables(self) -> frozenset:
        return frozenset(self.support)

    def is_constant(self) -> bool:
        return not self.support

    def value(self) -> Coefficient:
        if self.support:
            raise InputError(f"expectation still depends on {', '.join(self.support)}")
        return self.table[()]

    def items(self) -> Iterator[Tuple[Dict[str, Value], Coefficient]]:
        for key, val in self.table.items():
            yield dict(zip(self.support, key)), val

    def is_parametric(self) -> bool:
        return any(cr.is_parametric(v) for v in self.table.values())

    def __eq__(self, other):
        if not isinstance(other, Expectation):
            return NotImplemented
        if self.support != other.support:
            return False
        return all(cr.equal(v, other.table[k]) for k, v in self.table.items())

    def __hash__(self):
        return hash(self.support)

    def __repr__(self):
        return f"Expectation({self.render()})"

    def __str__(self):
        return self.render()

    def render(self) -> str:
        if not self.support:
            return cr.render(self.table[()])
        terms = []
        for key, val in self.table.items():
            if cr.is_zero(val):
                continue
            bracket = " ∧ ".join(f"{v}={x}" for v, x in zip(self.support, key))
            terms.append(f"[{bracket}]·{cr.render(val)}")
        return " + ".join(terms) if terms else "0"

    # ------------------------------------------------------------------
    # pointwise algebra
    # ------------------------------------------------------------------
    def zip_with(self, others: Sequence["Expectation"], fn, extra: Iterable[str] = ()) -> "Expectation":
        fs = (self,) + tuple(others)
        domains = self.domains
        for f in fs[1:]:
            domains = domains.merge(f.domains)
        support = tuple(sorted(set().union(*(f.support for f in fs), extra)))
        _check_size(domains, support)
        positions = [[support.index(v) for v in f.support] for f in fs]
        table = {}
        for key in itertools.product(*(domains[v] for v in support)):
            args = [f.table[tuple(key[i] for i in pos)] for f, pos in zip(fs, positions)]
            table[key] = fn(key, *args)
        return Expectation(domains, support, table)

    def map(self, fn: Callable[[Coefficient], Coefficient]) -> "Expectation":
        return Expectation(self.domains, self.support, {k: fn(v) for k, v in self.table.items()})

    def __add__(self, other: "Expectation") -> "Expectation":
        return add(self, other)

    def __mul__(self, other: "Expectation") -> "Expectation":
        return mul(self, other)


def constant(c, domains: Optional[VarDomain] = None) -> Expectation:
    return Expectation.constant(c, domains)


def iverson(g: Guard, domains: VarDomain) -> Expectation:
    """The 0/1 indicator [g]."""
    g.validate(domains)
    support = tuple(sorted(g.variables()))
    _check_size(domains, support)
    table = {}
    for key in itertools.product(*(domains[v] for v in support)):
        table[key] = cr.ONE if g.holds(dict(zip(support, key))) else cr.ZERO
    return Expectation(domains, support, table)


def add(f: Expectation, g: Expectation) -> Expectation:
    return f.zip_with([g], lambda _, a, b: cr.add(a, b))


def mul(f: Expectation, g: Expectation) -> Expectation:
    return f.zip_with([g], lambda _, a, b: cr.mul(a, b))


def scale(c, f: Expectation) -> Expectation:
    c = cr.coerce(c)
    if cr.is_zero(c):
        return Expectation.constant(cr.ZERO, f.domains)
    return f.map(lambda v: cr.mul(c, v))


def shift(c, f: Expectation) -> Expectation:
    """c + f."""
    c = cr.coerce(c)
    if cr.is_zero(c):
        return f
    return Expectation(f.domains, f.support, {k: cr.add(c, v) for k, v in f.table.items()}, minimize=False)


def select(g: Guard, then: Expectation, other: Expectation) -> Expectation:
    """[g]·then + [¬g]·other, built cell by cell."""
    domains = then.domains.merge(other.domains)
    g.validate(domains)
    gvars = tuple(sorted(g.variables()))
    if not gvars:
        return then if g.holds({}) else other
    support = tuple(sorted(set(then.support) | set(other.support) | set(gvars)))
    return then.zip_with(
        [other],
        lambda key, a, b: a if g.holds(dict(zip(support, key))) else b,
        extra=gvars,
    )


def substitute(f: Expectation, x: str, v) -> Expectation:
    """f[x/v]."""
    v = f.domains.check_value(x, v)
    if x not in f.support:
        return f
    i = f.support.index(x)
    table = {key[:i] + key[i + 1:]: val for key, val in f.table.items() if key[i] == v}
    return Expectation(f.domains, f.support[:i] + f.support[i + 1:], table)


def check_dist(x: str, dist: Sequence[Tuple[Coefficient, Value]], domains: VarDomain) -> None:
    mass = cr.total(p for p, _ in dist)
    if not cr.is_one(mass):
        raise MassNotOne(f"distribution for {x} has mass {cr.render(mass)}")
    seen = set()
    for _, v in dist:
        v = domains.check_value(x, v)
        if v in seen:
            raise InputError(f"duplicate value {v} in distribution for {x}")
        seen.add(v)


def expected_over_dist(f: Expectation, x: str, dist: Sequence[Tuple[Coefficient, Value]]) -> Expectation:
    """Σ_i p_i · f[x/a_i]."""
    check_dist(x, dist, f.domains)
    if x not in f.support:
        return f
    i = f.support.index(x)
    rest = f.support[:i] + f.support[i + 1:]
    table = {}
    for key in itertools.product(*(f.domains[v] for v in rest)):
        acc: Coefficient = cr.ZERO
        for p, a in dist:
            acc = cr.add(acc, cr.mul(p, f.table[key[:i] + (as_value(a),) + key[i:]]))
        table[key] = acc
    return Expectation(f.domains, rest, table)


def point_eval(f: Expectation, state: Mapping[str, Value]) -> Coefficient:
    missing = [v for v in f.support if v not in state]
    if missing:
        raise IncompleteState(f"state does not assign {', '.join(missing)}")
    return f.table[tuple(f.domains.check_value(v, state[v]) for v in f.support)]


def leq(f: Expectation, g: Expectation) -> bool:
    """Pointwise f ⪯ g; both must be parameter-free."""
    cmp = f.zip_with([g], lambda _, a, b: cr.ONE if cr.leq(a, b) else cr.ZERO)
    return cmp.is_constant() and cr.is_one(cmp.value())


def evaluate(f: Expectation, point: Mapping[str, Fraction]) -> Expectation:
    """Substitute parameter values in every cell."""
    return f.map(lambda v: cr.eval_at(v, point))
