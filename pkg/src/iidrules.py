"""
Closed-form wp and ert rules for f-i.i.d. while loops and repeat-until loops.

A loop ``while (φ) { C }`` is f-i.i.d. when both wp(C, [φ]) and
wp(C, [¬φ]·f) read no variable that C modifies. For such loops the orbit
of the characteristic functional is a geometric series, which gives

    wp  = [φ]·wp(C, [¬φ]·f) / (1 - wp(C, [φ])) + [¬φ]·f
    ert = c + [φ]·(c + ert(C, [¬φ]·f)) / (1 - wp(C, [φ])) + [¬φ]·f

with 0/0 = 0 and x/0 = inf, where c is the loop-guard charge of the cost
model. Repeat-until is the desugared loop ``C; while (¬ψ) { C }`` and
collapses to the quotients (c + ert(C, [ψ]·f)) / wp(C, [ψ]) and
wp(C, [ψ]·f) / (1 - wp(C, [¬ψ])), the latter equal to wp(C, [ψ]·f) / wp(C, [ψ])
for almost-surely terminating bodies.

Premise failures are errors, never warnings.
"""
from typing import Tuple, Union

from . import coeffring as cr
from . import expectation as ex
from .errors import BodyMayDiverge, NotFIID, VaryingIterationTime
from .expectation import Expectation, Guard
from .pgcl import CostModel, Program, cost_model, ert, modified_vars, wp


def unaffected(f: Expectation, C: Program) -> bool:
    """f ⋈ C: no variable read by f is assigned anywhere in C."""
    return not (f.variables & modified_vars(C))


def _affected_by(f: Expectation, C: Program) -> str:
    return ", ".join(sorted(f.variables & modified_vars(C)))


def _iid_parts(phi: Guard, body: Program, f: Expectation) -> Tuple[Expectation, Expectation, Expectation, Expectation]:
    """[φ], [¬φ]·f, wp(body, [φ]) and wp(body, [¬φ]·f)."""
    ind = ex.iverson(phi, f.domains)
    exit_f = ex.mul(ex.iverson(~phi, f.domains), f)
    return ind, exit_f, wp(body, ind), wp(body, exit_f)


def is_f_iid(phi: Guard, body: Program, f: Expectation) -> bool:
    _, _, p, w = _iid_parts(phi, body, f)
    return unaffected(p, body) and unaffected(w, body)


def _require_iid(body: Program, p: Expectation, w: Expectation, what: str) -> None:
    if not unaffected(p, body):
        raise NotFIID(f"wp(body, [{what}]) depends on {_affected_by(p, body)}, which the body modifies")
    if not unaffected(w, body):
        raise NotFIID(f"wp(body, [¬{what}]·f) depends on {_affected_by(w, body)}, which the body modifies")


def _require_runtime_premises(body: Program, f: Expectation, cost: CostModel) -> None:
    mass = wp(body, ex.constant(cr.ONE, f.domains))
    if not (mass.is_constant() and cr.is_one(mass.value())):
        raise BodyMayDiverge(f"loop body terminates with probability {mass.render()}")
    e0 = ert(body, ex.constant(cr.ZERO, f.domains), cost)
    if not unaffected(e0, body):
        raise VaryingIterationTime(
            f"ert(body, 0) depends on {_affected_by(e0, body)}, which the body modifies"
        )


# ============================================================================
# WHILE LOOPS
# ============================================================================
def wp_while_iid(phi: Guard, body: Program, f: Expectation) -> Expectation:
    ind, exit_f, p, w = _iid_parts(phi, body, f)
    _require_iid(body, p, w, phi.render())

    def cell(_, i, pv, wv, nf):
        return cr.add(cr.mul(i, cr.guarded_div(wv, cr.sub(cr.ONE, pv))), nf)

    return ind.zip_with([p, w, exit_f], cell)


def ert_while_iid(
    phi: Guard,
    body: Program,
    f: Expectation,
    cost: Union[str, CostModel, None] = None,
) -> Expectation:
    cost = cost_model(cost)
    ind, exit_f, p, w = _iid_parts(phi, body, f)
    _require_iid(body, p, w, phi.render())
    _require_runtime_premises(body, f, cost)

    c = cr.coerce(cost.loop_guard)
    e = ert(body, exit_f, cost)

    def cell(_, i, pv, ev, nf):
        loop = cr.guarded_div(cr.add(c, ev), cr.sub(cr.ONE, pv))
        return cr.add(c, cr.add(cr.mul(i, loop), nf))

    return ind.zip_with([p, e, exit_f], cell)


# ============================================================================
# REPEAT-UNTIL LOOPS
# ============================================================================
def _repeat_parts(body: Program, psi: Guard, f: Expectation):
    accept = ex.iverson(psi, f.domains)
    accept_f = ex.mul(accept, f)
    q = wp(body, accept)
    retry = wp(body, ex.iverson(~psi, f.domains))
    w = wp(body, accept_f)
    _require_iid(body, retry, w, f"¬({psi.render()})")
    if not unaffected(q, body):
        raise NotFIID(f"wp(body, [{psi.render()}]) depends on {_affected_by(q, body)}, which the body modifies")
    return accept_f, q, retry, w


def wp_repeat_until(body: Program, psi: Guard, f: Expectation) -> Expectation:
    """wp(C, [ψ]·f) / (1 - wp(C, [¬ψ])) with 0/0 = 0; C may diverge."""
    _, _, retry, w = _repeat_parts(body, psi, f)
    return w.zip_with([retry], lambda _, wv, rv: cr.guarded_div(wv, cr.sub(cr.ONE, rv)))


def ert_repeat_until(
    body: Program,
    psi: Guard,
    f: Expectation,
    cost: Union[str, CostModel, None] = None,
) -> Expectation:
    cost = cost_model(cost)
    accept_f, q, _, _ = _repeat_parts(body, psi, f)
    _require_runtime_premises(body, f, cost)

    c = cr.coerce(cost.loop_guard)
    e = ert(body, accept_f, cost)
    return e.zip_with([q], lambda _, ev, qv: cr.guarded_div(cr.add(c, ev), qv))
