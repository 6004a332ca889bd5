"""
Exact arithmetic over F(z) and F(z)[s].

Polynomials are sparse dictionaries from exponent vectors to rationals, backed by
sympy's ``PolyRing`` over QQ in graded lexicographic order with the pencil
indeterminate ``s`` as the last variable. Rational functions are quotients of two
such polynomials; see ``RationalFunction`` for the normalization policy.
"""
import logging
import math
import random
import re
from fractions import Fraction
from functools import reduce
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import Symbol
from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import PolyElement, PolyRing

from scmatroid.services.errors import PoleError, SpaceMismatchError, SymbolicZeroDivisionError

logger = logging.getLogger(__name__)

# Random evaluation points are drawn from [-EVAL_RANGE, EVAL_RANGE].
EVAL_RANGE = 2 ** 16
DEFAULT_REDUCE_THRESHOLD = 64

Exponents = Tuple[int, ...]
Scalar = Union[int, Fraction]

_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def to_fraction(coeff) -> Fraction:
    return Fraction(int(coeff.numerator), int(coeff.denominator))


def to_qq(value: Scalar):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _rational_content(rep: PolyElement) -> Fraction:
    """gcd of the numerators over lcm of the denominators, always positive."""
    nums, dens = [], []
    for coeff in rep.values():
        f = to_fraction(coeff)
        nums.append(abs(f.numerator))
        dens.append(f.denominator)
    return Fraction(reduce(math.gcd, nums), reduce(math.lcm, dens))


def _scale(rep: PolyElement, factor: Fraction) -> PolyElement:
    if factor == 1:
        return rep
    return rep * rep.ring.ground_new(to_qq(factor))


class ParamSpace:
    """Ordered parameters z1..zq plus the pencil indeterminate.

    ``reduce_threshold`` controls when rational functions get a full gcd
    reduction; it is configuration and does not take part in equality.
    """

    __slots__ = ("params", "s_name", "reduce_threshold", "variables", "ring", "_index")

    def __init__(self, params: Sequence[str], s_name: str = "s",
                 reduce_threshold: int = DEFAULT_REDUCE_THRESHOLD):
        params = tuple(params)
        for name in params + (s_name,):
            if not isinstance(name, str) or not _IDENTIFIER.match(name):
                raise ValueError(f"invalid variable name {name!r}")
        if len(set(params)) != len(params):
            raise ValueError(f"duplicate parameter names in {params}")
        if s_name in params:
            raise ValueError(f"parameter {s_name!r} collides with the pencil indeterminate")
        self.params = params
        self.s_name = s_name
        self.reduce_threshold = reduce_threshold
        self.variables = params + (s_name,)
        self.ring = PolyRing([Symbol(v) for v in self.variables], QQ, grlex)
        self._index = {v: i for i, v in enumerate(self.variables)}

    @property
    def s_index(self) -> int:
        return len(self.params)

    def index(self, name: str) -> int:
        return self._index[name]

    def declares(self, name: str) -> bool:
        return name in self._index

    def require_same(self, other: "ParamSpace") -> None:
        if self != other:
            raise SpaceMismatchError(f"parameter spaces differ: {self!r} vs {other!r}")

    def __eq__(self, other) -> bool:
        return (isinstance(other, ParamSpace)
                and self.params == other.params and self.s_name == other.s_name)

    def __hash__(self) -> int:
        return hash((self.params, self.s_name))

    def __repr__(self) -> str:
        return f"ParamSpace(params={list(self.params)!r}, s_name={self.s_name!r})"

    def zero(self) -> "Polynomial":
        return Polynomial(self, self.ring.zero)

    def one(self) -> "Polynomial":
        return Polynomial(self, self.ring.one)

    def constant(self, value: Scalar) -> "Polynomial":
        return Polynomial(self, self.ring.ground_new(to_qq(value)))

    def var(self, name: str) -> "Polynomial":
        try:
            return Polynomial(self, self.ring.gens[self._index[name]])
        except KeyError:
            raise SpaceMismatchError(f"{name!r} is not declared in {self!r}") from None

    def s(self) -> "Polynomial":
        return Polynomial(self, self.ring.gens[self.s_index])


def random_point(space: ParamSpace, rng: random.Random) -> Dict[str, int]:
    return {v: rng.randint(-EVAL_RANGE, EVAL_RANGE) for v in space.variables}


class Polynomial:
    __slots__ = ("space", "rep")

    def __init__(self, space: ParamSpace, rep: PolyElement):
        self.space = space
        self.rep = rep

    @classmethod
    def from_terms(cls, space: ParamSpace, terms: Mapping[Exponents, Scalar]) -> "Polynomial":
        width = len(space.variables)
        data = {}
        for exps, coeff in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != width or min(exps, default=0) < 0:
                raise ValueError(f"bad exponent vector {exps} for {space!r}")
            if coeff:
                data[exps] = to_qq(coeff)
        return cls(space, space.ring.from_dict(data))

    @property
    def terms(self) -> Dict[Exponents, Fraction]:
        return {monom: to_fraction(c) for monom, c in self.rep.items()}

    @property
    def is_zero(self) -> bool:
        return not self.rep

    def degree(self, name: str) -> Union[int, float]:
        i = self.space.index(name)
        return max((m[i] for m in self.rep.keys()), default=float("-inf"))

    @property
    def s_degree(self) -> Union[int, float]:
        return _s_degree(self.rep, self.space.s_index) if self.rep else float("-inf")

    @property
    def leading_coefficient(self) -> Fraction:
        return to_fraction(self.rep.LC) if self.rep else Fraction(0)

    def s_coefficients(self) -> Dict[int, "Polynomial"]:
        return {k: Polynomial(self.space, c)
                for k, c in _s_split(self.rep, self.space.s_index).items()}

    def _coerce(self, other) -> Optional["Polynomial"]:
        if isinstance(other, Polynomial):
            self.space.require_same(other.space)
            return other
        if isinstance(other, (int, Fraction)):
            return self.space.constant(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Polynomial(self.space, self.rep + other.rep)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Polynomial(self.space, self.rep - other.rep)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Polynomial(self.space, other.rep - self.rep)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Polynomial(self.space, self.rep * other.rep)

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial(self.space, -self.rep)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial exponents must be non-negative integers")
        return Polynomial(self.space, self.rep ** k)

    def exact_quotient(self, other: "Polynomial") -> "Polynomial":
        other = self._coerce(other)
        if other.is_zero:
            raise SymbolicZeroDivisionError("division by the zero polynomial")
        try:
            return Polynomial(self.space, self.rep.exquo(other.rep))
        except ExactQuotientFailed:
            raise ArithmeticError(f"{other} does not divide {self}") from None

    def divides(self, other: "Polynomial") -> bool:
        if self.is_zero:
            return other.is_zero
        _, remainder = other.rep.div(self.rep)
        return not remainder

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.space.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.space == other.space and self.rep == other.rep

    def __hash__(self) -> int:
        return hash((self.space, frozenset(self.rep.items())))

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        values = _point_values(self.space, point, self.rep)
        total = Fraction(0)
        for monom, coeff in self.rep.items():
            term = to_fraction(coeff)
            for i, e in enumerate(monom):
                if e:
                    term *= values[i] ** e
            total += term
        return total

    def substitute(self, point: Mapping[str, Scalar]) -> "Polynomial":
        """Replace the assigned variables by constants, keep the others."""
        fixed = {self.space.index(name): Fraction(v) for name, v in point.items()}
        data: Dict[Exponents, Fraction] = {}
        for monom, coeff in self.rep.items():
            value = to_fraction(coeff)
            kept = list(monom)
            for i, v in fixed.items():
                if monom[i]:
                    value *= v ** monom[i]
                    kept[i] = 0
            key = tuple(kept)
            data[key] = data.get(key, Fraction(0)) + value
        return Polynomial.from_terms(self.space, data)

    def render(self) -> str:
        if not self.rep:
            return "0"
        out = []
        for monom, coeff in self.rep.terms():
            c = to_fraction(coeff)
            factors = []
            for name, e in zip(self.space.variables, monom):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            magnitude = abs(c)
            if not factors:
                body = str(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(magnitude)] + factors)
            if not out:
                out.append(f"-{body}" if c < 0 else body)
            else:
                out.append(f" - {body}" if c < 0 else f" + {body}")
        return "".join(out)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"Polynomial({self.render()})"


def _point_values(space: ParamSpace, point: Mapping[str, Scalar], rep: PolyElement) -> List[Fraction]:
    used = set()
    for monom in rep.keys():
        used.update(i for i, e in enumerate(monom) if e)
    values = []
    for i, name in enumerate(space.variables):
        if name in point:
            values.append(Fraction(point[name]))
        elif i in used:
            raise ValueError(f"evaluation point assigns no value to {name!r}")
        else:
            values.append(Fraction(0))
    return values


def probabilistic_zero_test(p: Polynomial, trials: int, seed: int) -> bool:
    """Schwartz-Zippel screen: False means certainly nonzero.

    A True answer only says every sampled point vanished; callers confirm it with
    ``p.is_zero`` before relying on it. This is a library entry point for callers
    holding large unreduced polynomials; the seeded rank fast path in
    ``exactLinalg.generic_rank_lower_bound`` evaluates whole matrices instead,
    since a rank needs more than one zero test.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = random.Random(seed)
    for _ in range(trials):
        if p.evaluate(random_point(p.space, rng)) != 0:
            return False
    return True


class RationalFunction:
    """Element of F(z) or F(z)(s).

    Normalization: the denominator is always divided by its rational content and
    given a positive leading coefficient. A full multivariate gcd reduction only
    happens once num and den together exceed ``space.reduce_threshold`` terms, or
    on ``reduced()``. Equality is decided by cross-multiplication and does not
    depend on how far a value was reduced.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Optional[Polynomial] = None, *, full_reduce: bool = False):
        space = num.space
        if den is None:
            den = space.one()
        space.require_same(den.space)
        if den.is_zero:
            raise SymbolicZeroDivisionError("rational function with zero denominator")
        self.num, self.den = _normalize(num, den, full_reduce)

    @classmethod
    def coerce(cls, space: ParamSpace, value) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            space.require_same(value.space)
            return value
        if isinstance(value, Polynomial):
            space.require_same(value.space)
            return cls(value)
        if isinstance(value, (int, Fraction)):
            return cls(space.constant(value))
        raise TypeError(f"cannot use {value!r} as an element of F(z)")

    @classmethod
    def zero(cls, space: ParamSpace) -> "RationalFunction":
        return cls(space.zero())

    @classmethod
    def one(cls, space: ParamSpace) -> "RationalFunction":
        return cls(space.one())

    @property
    def space(self) -> ParamSpace:
        return self.num.space

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def _coerce(self, other) -> Optional["RationalFunction"]:
        try:
            return RationalFunction.coerce(self.space, other)
        except TypeError:
            return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero:
            raise SymbolicZeroDivisionError("the zero element has no inverse")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ValueError("only integer powers are supported")
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.num ** k, self.den ** k)

    def __eq__(self, other) -> bool:
        other = self._coerce(other) if not isinstance(other, RationalFunction) else other
        if other is None:
            return NotImplemented
        if self.space != other.space:
            return False
        return (self.num * other.den - other.num * self.den).is_zero

    def __hash__(self) -> int:
        r = self.reduced()
        return hash((r.num, r.den))

    def reduced(self) -> "RationalFunction":
        return RationalFunction(self.num, self.den, full_reduce=True)

    @property
    def is_polynomial(self) -> bool:
        return self.reduced().den == 1

    @property
    def s_degree(self) -> Union[int, float]:
        if self.is_zero:
            return float("-inf")
        r = self.reduced()
        return r.num.s_degree - r.den.s_degree

    def is_s_free(self) -> bool:
        r = self.reduced()
        return r.num.s_degree <= 0 and r.den.s_degree <= 0

    def is_unit_in_s(self) -> bool:
        """Nonzero and free of s: invertible for every value of s."""
        return not self.is_zero and self.is_s_free()

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        den = self.den.evaluate(point)
        if den == 0:
            raise PoleError(f"denominator {self.den} vanishes at {dict(point)}")
        return self.num.evaluate(point) / den

    def substitute(self, point: Mapping[str, Scalar]) -> "RationalFunction":
        den = self.den.substitute(point)
        if den.is_zero:
            raise PoleError(f"denominator {self.den} vanishes at {dict(point)}")
        return RationalFunction(self.num.substitute(point), den)

    def render(self) -> str:
        r = self.reduced()
        if r.den == 1:
            return r.num.render()
        num = r.num.render()
        den = r.den.render()
        if len(r.num.rep) > 1:
            num = f"({num})"
        if len(r.den.rep) > 1 or "*" in den:
            den = f"({den})"
        return f"{num}/{den}"

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"RationalFunction({self.render()})"


def _normalize(num: Polynomial, den: Polynomial, force: bool) -> Tuple[Polynomial, Polynomial]:
    space = num.space
    if num.is_zero:
        return num, space.one()
    p, q = num.rep, den.rep
    if force or len(p) + len(q) > space.reduce_threshold:
        p, q = p.cancel(q)
    scale = _rational_content(q)
    if to_fraction(q.LC) < 0:
        scale = -scale
    if scale != 1:
        p = _scale(p, 1 / scale)
        q = _scale(q, 1 / scale)
    return Polynomial(space, p), Polynomial(space, q)


# --- univariate-in-s view: coefficients are s-free polynomials of the same ring ---

def _s_degree(rep: PolyElement, si: int) -> int:
    return max((m[si] for m in rep.keys()), default=-1)


def _s_split(rep: PolyElement, si: int) -> Dict[int, PolyElement]:
    parts: Dict[int, dict] = {}
    for monom, coeff in rep.items():
        key = monom[:si] + (0,) + monom[si + 1:]
        parts.setdefault(monom[si], {})[key] = coeff
    return {k: rep.ring.from_dict(d) for k, d in parts.items()}


def prem_in_s(f: Polynomial, g: Polynomial) -> Polynomial:
    """Pseudo-remainder of f by g as polynomials in s over Q[z]."""
    f.space.require_same(g.space)
    if g.is_zero:
        raise SymbolicZeroDivisionError("pseudo-division by zero")
    return Polynomial(f.space, f.rep.prem(g.rep, f.space.ring.gens[f.space.s_index]))


def _primitive_in_s(rep: PolyElement, si: int) -> PolyElement:
    coeffs = list(_s_split(rep, si).values())
    content = reduce(lambda a, b: a.gcd(b), coeffs)
    prim = rep.exquo(content)
    scale = _rational_content(prim)
    if to_fraction(prim.LC) < 0:
        scale = -scale
    return _scale(prim, 1 / scale)


def gcd_in_s(p: Polynomial, q: Polynomial) -> Polynomial:
    """gcd in F(z)[s].

    The result is the associate lying in Z[z][s] that is primitive over Q[z] and
    has a positive leading coefficient; a unit gcd is returned as 1.
    """
    p.space.require_same(q.space)
    space, si = p.space, p.space.s_index
    if p.is_zero and q.is_zero:
        return space.zero()
    if p.is_zero or q.is_zero:
        other = q if p.is_zero else p
        return Polynomial(space, _primitive_in_s(other.rep, si))
    if p.s_degree == 0 or q.s_degree == 0:
        return space.one()
    prs = p.rep.subresultants(q.rep, space.ring.gens[si])
    return Polynomial(space, _primitive_in_s(prs[-1], si))
