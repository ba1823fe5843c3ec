"""
Exact coefficients for expectations: nonnegative rationals, rational
functions over declared parameters, and infinity.

Parameter-free values are ``fractions.Fraction``. Values mentioning
parameters are sympy ``FracElement`` instances of a rational function field
over QQ with lexicographic monomial order; sympy keeps them canonical
(no common factor, positive leading denominator coefficient). A field
element that happens to be constant is always demoted to ``Fraction``, so
zero and one have exactly one representation each.
"""
from decimal import Decimal, ROUND_HALF_EVEN, localcontext
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Tuple, Union

from sympy import Symbol
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    rationalize,
    standard_transformations,
)
from sympy.polys.domains import QQ
from sympy.polys.fields import FracElement, FracField, xfield
from sympy.polys.orderings import lex

from .errors import (
    CoefficientError,
    DivByInfinity,
    InputError,
    NegativeValue,
    ParameterizedComparison,
    PoleAtPoint,
    UndeclaredParameter,
    UndefinedAtPoint,
)


class _Infinity:
    """The single infinite coefficient."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __reduce__(self):
        return (_Infinity, ())

    def __repr__(self):
        return "inf"

    def __hash__(self):
        return hash("inf")


INF = _Infinity()
ZERO = Fraction(0)
ONE = Fraction(1)

Coefficient = Union[Fraction, FracElement, _Infinity]

_TRANSFORMS = standard_transformations + (convert_xor, rationalize)
_SUPERSCRIPT = str.maketrans("-0123456789", "⁻⁰¹²³⁴⁵⁶⁷⁸⁹")


@lru_cache(maxsize=None)
def field_of(params: Tuple[str, ...]) -> FracField:
    """Rational function field over QQ in ``params`` (lex order)."""
    K, _ = xfield(tuple(Symbol(p) for p in params), QQ, lex)
    return K


def params_of(c: Coefficient) -> Tuple[str, ...]:
    if isinstance(c, FracElement):
        return tuple(str(s) for s in c.field.symbols)
    return ()


def is_parametric(c: Coefficient) -> bool:
    return isinstance(c, FracElement)


def _q(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def _canon(x) -> Coefficient:
    if isinstance(x, FracElement):
        if x.numer.is_ground and x.denom.is_ground:
            return _q(x.numer.LC) / _q(x.denom.LC)
        return x
    return x


def coerce(x) -> Coefficient:
    """Accept ints, Fractions, rational strings, field elements and INF."""
    if x is INF or isinstance(x, Fraction):
        return x
    if isinstance(x, FracElement):
        return _canon(x)
    if isinstance(x, bool):
        return ONE if x else ZERO
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        text = x.strip()
        if text in ("inf", "∞"):
            return INF
        return Fraction(text)
    raise TypeError(f"cannot use {x!r} as a coefficient")


def _lift(x: Coefficient, K: FracField) -> FracElement:
    if isinstance(x, Fraction):
        return K.ground_new(QQ(x.numerator, x.denominator))
    if x.field == K:
        return x
    return K.from_expr(x.as_expr())


def _unify(a: Coefficient, b: Coefficient):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a, b
    pa, pb = params_of(a), params_of(b)
    merged = pa + tuple(p for p in pb if p not in pa)
    K = field_of(merged)
    return _lift(a, K), _lift(b, K)


# ============================================================================
# RING OPERATIONS
# ============================================================================
def is_zero(c: Coefficient) -> bool:
    return isinstance(c, Fraction) and c == 0


def is_one(c: Coefficient) -> bool:
    return isinstance(c, Fraction) and c == 1


def is_inf(c: Coefficient) -> bool:
    return c is INF


def equal(a: Coefficient, b: Coefficient) -> bool:
    if a is INF or b is INF:
        return a is b
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    if isinstance(a, Fraction) or isinstance(b, Fraction):
        return False
    if a.field == b.field:
        return a == b
    x, y = _unify(a, b)
    return x == y


def add(a: Coefficient, b: Coefficient) -> Coefficient:
    if a is INF or b is INF:
        return INF
    x, y = _unify(a, b)
    return _canon(x + y)


def sub(a: Coefficient, b: Coefficient) -> Coefficient:
    """a - b for finite b; the result may be negative symbolically."""
    if b is INF:
        raise CoefficientError("cannot subtract infinity")
    if a is INF:
        return INF
    x, y = _unify(a, b)
    return _canon(x - y)


def mul(a: Coefficient, b: Coefficient) -> Coefficient:
    if is_zero(a) or is_zero(b):
        return ZERO
    if a is INF or b is INF:
        return INF
    x, y = _unify(a, b)
    return _canon(x * y)


def guarded_div(num: Coefficient, den: Coefficient) -> Coefficient:
    """num / den with 0/0 = 0 and x/0 = inf."""
    if den is INF:
        raise DivByInfinity(f"division of {render(num)} by infinity")
    if is_zero(den):
        return ZERO if is_zero(num) else INF
    if num is INF:
        return INF
    x, y = _unify(num, den)
    return _canon(x / y)


def total(values: Iterable[Coefficient]) -> Coefficient:
    acc: Coefficient = ZERO
    for v in values:
        acc = add(acc, v)
    return acc


def power(c: Coefficient, n: int) -> Coefficient:
    acc: Coefficient = ONE
    for _ in range(n):
        acc = mul(acc, c)
    return acc


# ============================================================================
# EVALUATION AND COMPARISON
# ============================================================================
def _poly_at(p, values: Sequence[Fraction]) -> Fraction:
    acc = Fraction(0)
    for monom, coeff in p.terms():
        term = _q(coeff)
        for v, e in zip(values, monom):
            if e:
                term *= v ** e
        acc += term
    return acc


def eval_at(c: Coefficient, point: Mapping[str, Fraction]) -> Union[Fraction, _Infinity]:
    """Substitute parameter values exactly; infinity stays infinity."""
    if c is INF:
        return INF
    if isinstance(c, Fraction):
        value = c
    else:
        names = params_of(c)
        missing = [p for p in names if p not in point]
        if missing:
            raise UndefinedAtPoint(f"no value for parameter(s) {', '.join(missing)}")
        values = [Fraction(point[p]) for p in names]
        num = _poly_at(c.numer, values)
        den = _poly_at(c.denom, values)
        if den == 0:
            where = ", ".join(f"{p}={values[i]}" for i, p in enumerate(names))
            if num == 0:
                raise UndefinedAtPoint(f"{render(c)} is 0/0 at {where}")
            raise PoleAtPoint(f"{render(c)} has a pole at {where}")
        value = num / den
    if value < 0:
        raise NegativeValue(f"{render(c)} evaluates to {value} < 0")
    return value


def leq(a: Coefficient, b: Coefficient) -> bool:
    if is_parametric(a) or is_parametric(b):
        raise ParameterizedComparison("cannot order parameterized coefficients")
    if b is INF:
        return True
    if a is INF:
        return False
    return a <= b


# ============================================================================
# PARSING AND RENDERING
# ============================================================================
def parse_poly(text: str, params: Sequence[str] = ()) -> Coefficient:
    """Parse a polynomial over ``params`` with exact rational literals."""
    params = tuple(params)
    local = {p: Symbol(p) for p in params}
    try:
        expr = parse_expr(str(text), local_dict=local, transformations=_TRANSFORMS)
    except (SyntaxError, TypeError, ValueError) as exc:
        raise InputError(f"cannot parse expression {text!r}: {exc}") from exc

    if not hasattr(expr, "free_symbols"):
        raise InputError(f"cannot parse expression {text!r}")
    unknown = sorted(str(s) for s in expr.free_symbols if str(s) not in params)
    if unknown:
        raise UndeclaredParameter(f"undeclared parameter(s) {', '.join(unknown)} in {text!r}")

    if not expr.free_symbols:
        if not expr.is_Rational:
            raise InputError(f"{text!r} is not an exact rational")
        return Fraction(int(expr.p), int(expr.q))

    used = tuple(p for p in params if Symbol(p) in expr.free_symbols)
    K = field_of(params if params else used)
    try:
        value = K.from_expr(expr)
    except Exception as exc:
        raise InputError(f"{text!r} is not a rational function of {', '.join(params)}") from exc
    if not value.denom.is_ground:
        raise InputError(f"{text!r} is not a polynomial")
    return _canon(value)


def render(c: Coefficient) -> str:
    if c is INF:
        return "inf"
    if isinstance(c, Fraction):
        return str(c)
    return str(c).replace("**", "^")


def to_decimal(c: Coefficient, places: int = 6) -> str:
    """Fixed-point rendering of a parameter-free value."""
    if c is INF:
        return "inf"
    if is_parametric(c):
        raise ParameterizedComparison("decimal rendering needs a parameter-free value")
    with localcontext() as ctx:
        ctx.prec = 60
        value = Decimal(c.numerator) / Decimal(c.denominator)
        return str(value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN))


def to_scientific(c: Coefficient, digits: int = 4) -> str:
    """Table style, e.g. ``9.276·10¹``."""
    if c is INF:
        return "∞"
    if is_parametric(c):
        raise ParameterizedComparison("decimal rendering needs a parameter-free value")
    if c == 0:
        return "0." + "0" * (digits - 1) + "·10⁰"
    with localcontext() as ctx:
        ctx.prec = 60
        value = Decimal(c.numerator) / Decimal(c.denominator)
        exponent = value.adjusted()
        mantissa = value.scaleb(-exponent).quantize(Decimal(1).scaleb(1 - digits), rounding=ROUND_HALF_EVEN)
        if mantissa >= 10:
            exponent += 1
            mantissa = value.scaleb(-exponent).quantize(Decimal(1).scaleb(1 - digits), rounding=ROUND_HALF_EVEN)
    return f"{mantissa}·10{str(exponent).translate(_SUPERSCRIPT)}"


def to_exact(c: Coefficient) -> str:
    """Exact text of a parameter-free value: a terminating decimal when one exists, else ``p/q``."""
    if c is INF:
        return "inf"
    if is_parametric(c):
        raise ParameterizedComparison("exact decimal rendering needs a parameter-free value")
    d = c.denominator
    for prime in (2, 5):
        while d % prime == 0:
            d //= prime
    if d != 1:
        return f"{c.numerator}/{c.denominator}"
    with localcontext() as ctx:
        ctx.prec = 2 * len(str(c.denominator)) + len(str(c.numerator)) + 10
        text = format(Decimal(c.numerator) / Decimal(c.denominator), "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text
