"""Shuffle elements as evaluable expression trees.

An element is a symmetric (skew-symmetric in fermionic colors) rational
function of colored variable groups ``x[i-1] = (x_{i,1}, ..., x_{i,N_i})``.
Nothing is expanded: evaluating a :class:`Product` sums the shuffle formula
over per-color subset splittings at the requested point.

Variable assignments are indexed by ``color - 1``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Optional, Sequence

from .exact import (
    NO_LIMIT,
    UniPoly,
    UniRatFunction,
    as_ratfunc,
    fmt_scalar,
    limit_at_zero,
    parse_scalar,
    random_scalar,
)
from .report import Check
from .signature import AlgebraSignature, ParamPoint, structure_functions

DEFAULT_TRIALS = 5
DEFAULT_BOUND = 1000
DEFAULT_RESAMPLE_BUDGET = 20


class DegreeMismatch(ValueError):
    pass


class ResampleExhausted(RuntimeError):
    """Every sampled point hit a vanishing denominator."""


# ----------------------------------------------------------------------------
# nodes


class ShuffleElement:
    sig: AlgebraSignature
    degree: tuple

    def __add__(self, other: "ShuffleElement") -> "ShuffleElement":
        if not isinstance(other, ShuffleElement):
            return NotImplemented
        return Sum.of([self, other])

    def __sub__(self, other: "ShuffleElement") -> "ShuffleElement":
        if not isinstance(other, ShuffleElement):
            return NotImplemented
        return Sum.of([self, ScalarMul(-1, other)])

    def __neg__(self) -> "ShuffleElement":
        return ScalarMul(-1, self)

    def __mul__(self, other):
        if isinstance(other, ShuffleElement):
            return Product(self, other)
        return ScalarMul(other, self)

    def __rmul__(self, other):
        return ScalarMul(other, self)

    @property
    def total_degree(self) -> int:
        return sum(self.degree)

    @property
    def in_sh0(self) -> bool:
        return len(set(self.degree)) <= 1

    def evaluate(self, p: ParamPoint, x) -> Any:
        return evaluate(self, p, x)

    def _eval(self, ctx: "EvalContext", x: tuple) -> Any:  # pragma: no cover
        raise NotImplementedError


def _check_sig(a: ShuffleElement, b: ShuffleElement):
    if a.sig != b.sig:
        raise DegreeMismatch(f"signatures differ: {a.sig} vs {b.sig}")


class Unit(ShuffleElement):
    """The degree-0 element 1."""

    def __init__(self, sig: AlgebraSignature):
        self.sig = sig
        self.degree = (0,) * sig.K

    def _eval(self, ctx, x):
        return Fraction(1)

    def __repr__(self):
        return "Unit()"


class Generator(ShuffleElement):
    """x_{i,1}**k in degree 1_i."""

    def __init__(self, sig: AlgebraSignature, color: int, exponent: int = 0):
        if not 1 <= color <= sig.K:
            raise ValueError(f"color {color} outside 1..{sig.K}")
        self.sig = sig
        self.color = color
        self.exponent = int(exponent)
        self.degree = tuple(1 if j == color else 0 for j in range(1, sig.K + 1))

    def _eval(self, ctx, x):
        return x[self.color - 1][0] ** self.exponent

    def __repr__(self):
        return f"Generator({self.color}, {self.exponent})"


class Sum(ShuffleElement):
    def __init__(self, sig: AlgebraSignature, degree: Sequence[int], terms: Sequence[ShuffleElement]):
        self.sig = sig
        self.degree = tuple(degree)
        for t in terms:
            _check_sig(self, t)
            if t.degree != self.degree:
                raise DegreeMismatch(f"sum of degrees {self.degree} and {t.degree}")
        self.terms = tuple(terms)

    @classmethod
    def of(cls, terms: Sequence[ShuffleElement]) -> "Sum":
        flat: list[ShuffleElement] = []
        for t in terms:
            flat.extend(t.terms if isinstance(t, Sum) else (t,))
        if not flat:
            raise ValueError("Sum.of needs at least one term; use zero() instead")
        return cls(flat[0].sig, flat[0].degree, flat)

    def _eval(self, ctx, x):
        total = Fraction(0)
        for t in self.terms:
            total = total + ctx.value(t, x)
        return total

    def __repr__(self):
        return "Sum(" + ", ".join(map(repr, self.terms)) + ")"


def zero(sig: AlgebraSignature, degree: Sequence[int]) -> Sum:
    return Sum(sig, degree, ())


class ScalarMul(ShuffleElement):
    """coefficient * element; the coefficient may be a callable of the ParamPoint."""

    def __init__(self, coefficient, element: ShuffleElement):
        if isinstance(coefficient, int) and not isinstance(coefficient, bool):
            coefficient = Fraction(coefficient)
        self.coefficient = coefficient
        self.element = element
        self.sig = element.sig
        self.degree = element.degree

    def _eval(self, ctx, x):
        c = self.coefficient(ctx.p) if callable(self.coefficient) else self.coefficient
        if c == 0:
            return Fraction(0)
        return c * ctx.value(self.element, x)

    def __repr__(self):
        return f"ScalarMul({self.coefficient!r}, {self.element!r})"


def _splittings(sizes_left: Sequence[int], sizes_right: Sequence[int], fermionic: Sequence[bool]):
    """Per-color lists of (I, J, sign) with I ascending of the left size."""
    out = []
    for M, N, ferm in zip(sizes_left, sizes_right, fermionic):
        opts = []
        full = range(M + N)
        for I in itertools.combinations(full, M):
            Iset = set(I)
            J = tuple(a for a in full if a not in Iset)
            sign = 1
            if ferm:
                inversions = sum(1 for a in I for b in J if a > b)
                sign = -1 if inversions % 2 else 1
            opts.append((I, J, sign))
        out.append(opts)
    return out


class Product(ShuffleElement):
    """Shuffle product left * right."""

    def __init__(self, left: ShuffleElement, right: ShuffleElement):
        _check_sig(left, right)
        self.left = left
        self.right = right
        self.sig = left.sig
        self.degree = tuple(a + b for a, b in zip(left.degree, right.degree))
        ferm = [self.sig.is_fermionic(i) for i in range(1, self.sig.K + 1)]
        self._splits = _splittings(left.degree, right.degree, ferm)

    def _eval(self, ctx, x):
        sig = self.sig
        pairs = ctx.sf.nontrivial_pairs
        wcache: dict = {}

        def w(i, j, a, b):
            key = (i, j, a, b)
            v = wcache.get(key)
            if v is None:
                v = wcache[key] = ctx.sf(i, j, x[i - 1][a], x[j - 1][b])
            return v

        total = Fraction(0)
        for choice in itertools.product(*self._splits):
            sign = 1
            for _, _, s in choice:
                sign *= s
            xl = tuple(tuple(x[c][a] for a in choice[c][0]) for c in range(sig.K))
            fv = ctx.value(self.left, xl)
            if fv == 0:
                continue
            xr = tuple(tuple(x[c][b] for b in choice[c][1]) for c in range(sig.K))
            gv = ctx.value(self.right, xr)
            if gv == 0:
                continue
            term = fv * gv
            for i, j in pairs:
                I = choice[i - 1][0]
                J = choice[j - 1][1]
                for a in I:
                    for b in J:
                        term = term * w(i, j, a, b)
            total = total + (term if sign == 1 else -term)
        return total

    def __repr__(self):
        return f"Product({self.left!r}, {self.right!r})"


@dataclass(frozen=True)
class BuiltinSpec:
    name: str
    degree: Callable[[AlgebraSignature, dict], tuple]
    evaluate: Callable[["Builtin", "EvalContext", tuple], Any]
    doc: str = ""


BUILTINS: dict[str, BuiltinSpec] = {}


def register_builtin(name: str, degree: Callable, doc: str = ""):
    def deco(fn):
        BUILTINS[name] = BuiltinSpec(name, degree, fn, doc)
        return fn

    return deco


class Builtin(ShuffleElement):
    """A named closed formula registered by another module."""

    def __init__(self, sig: AlgebraSignature, name: str, **params):
        if name not in BUILTINS:
            _load_builtin_modules()
        if name not in BUILTINS:
            raise KeyError(f"unknown builtin {name!r}")
        self.sig = sig
        self.name = name
        self.params = dict(params)
        self.spec = BUILTINS[name]
        self.degree = tuple(self.spec.degree(sig, self.params))

    def _eval(self, ctx, x):
        return self.spec.evaluate(self, ctx, x)

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in sorted(self.params.items()))
        return f"Builtin({self.name!r}, {args})"


def _load_builtin_modules():
    from . import bethe, special  # noqa: F401  (registration side effect)


# ----------------------------------------------------------------------------
# canonical denominator and explicit elements


def canonical_denominator(sig: AlgebraSignature, x) -> Any:
    """prod_i prod_{a,b} (x_{i,a} - x_{i+1,b}); squared differences for Sh_1."""
    out = Fraction(1)
    if sig.K == 1:
        xs = x[0]
        for a in range(len(xs)):
            for b in range(a + 1, len(xs)):
                diff = xs[a] - xs[b]
                out = out * diff * diff
        return out
    for i in range(1, sig.K + 1):
        nxt = sig.color(i + 1)
        for xa in x[i - 1]:
            for xb in x[nxt - 1]:
                out = out * (xa - xb)
    return out


def _explicit_degree(sig, params):
    return tuple(params["degree"])


class ExplicitNumeratorError(ValueError):
    pass


def explicit(sig: AlgebraSignature, degree: Sequence[int], terms: Iterable) -> Builtin:
    """f / (canonical denominator) for a Laurent polynomial numerator f.

    ``terms`` is an iterable of ``(coefficient, exponents)`` where
    ``exponents[i][a]`` is the integer power of x_{i+1, a+1}.
    """
    degree = tuple(degree)
    norm = []
    for coef, exps in terms:
        if any(Fraction(e).denominator != 1 for row in exps for e in row):
            raise ExplicitNumeratorError("a Laurent numerator needs integer exponents")
        exps = tuple(tuple(int(e) for e in row) for row in exps)
        if len(exps) != sig.K or any(len(r) != n for r, n in zip(exps, degree)):
            raise ExplicitNumeratorError("exponent shape does not match the degree")
        norm.append((Fraction(coef), exps))
    return Builtin(sig, "Explicit", degree=degree, terms=tuple(norm))


@register_builtin("Explicit", _explicit_degree, "Laurent numerator over the canonical denominator")
def _eval_explicit(node: Builtin, ctx, x):
    num = Fraction(0)
    for coef, exps in node.params["terms"]:
        t = coef
        for row, vals in zip(exps, x):
            for e, v in zip(row, vals):
                if e:
                    t = t * v ** e
        num = num + t
    if num == 0:
        return num
    return num / canonical_denominator(node.sig, x)


# ----------------------------------------------------------------------------
# evaluation


class EvalContext:
    """Parameter point, structure functions and a per-call memo table."""

    def __init__(self, sig: AlgebraSignature, p: ParamPoint):
        self.sig = sig
        self.p = p
        self.sf = structure_functions(sig, p)
        self.cache: dict = {}

    def value(self, node: ShuffleElement, x: tuple):
        key = (id(node), x)
        try:
            hit = self.cache.get(key, _MISSING)
        except TypeError:
            return node._eval(self, x)
        if hit is _MISSING:
            hit = node._eval(self, x)
            self.cache[key] = hit
        return hit


_MISSING = object()


def _coerce(v):
    if isinstance(v, int) and not isinstance(v, bool):
        return Fraction(v)
    if isinstance(v, str):
        return parse_scalar(v)
    return v


def normalize_assignment(degree: Sequence[int], x) -> tuple:
    x = tuple(tuple(_coerce(v) for v in row) for row in x)
    if tuple(len(r) for r in x) != tuple(degree):
        raise DegreeMismatch(f"assignment of shape {[len(r) for r in x]} for degree {list(degree)}")
    return x


def evaluate(e: ShuffleElement, p: ParamPoint, x, ctx: Optional[EvalContext] = None):
    """Exact value of ``e`` at ``x``; raises ZeroDivisionError at degenerate points."""
    x = normalize_assignment(e.degree, x)
    ctx = ctx or EvalContext(e.sig, p)
    return ctx.value(e, x)


def random_assignment(degree: Sequence[int], rng: random.Random, bound: int = DEFAULT_BOUND) -> tuple:
    return tuple(tuple(random_scalar(rng, bound) for _ in range(n)) for n in degree)


def with_resampling(fn: Callable[[], Any], budget: int = DEFAULT_RESAMPLE_BUDGET):
    """Call ``fn`` until it avoids ZeroDivisionError, at most ``budget`` times."""
    for _ in range(budget):
        try:
            return fn()
        except ZeroDivisionError:
            continue
    raise ResampleExhausted(f"no generic point found in {budget} attempts")


def evaluate_limit(e: ShuffleElement, p: ParamPoint, x, perturb: Sequence[tuple], rng: random.Random,
                   bound: int = DEFAULT_BOUND):
    """Value at ``x``, or its limit along x + xi*r on the listed (color, index) slots.

    Use for points where the closed formula divides 0 by 0 (e.g. coinciding
    variables).  Returns NO_LIMIT when the restricted function has a pole.
    """
    try:
        return evaluate(e, p, x)
    except ZeroDivisionError:
        pass
    xi = UniRatFunction.xi()
    rows = [list(r) for r in normalize_assignment(e.degree, x)]
    for c, a in perturb:
        rows[c - 1][a] = rows[c - 1][a] + random_scalar(rng, bound) * xi
    val = evaluate(e, p, rows)
    return limit_at_zero(as_ratfunc(val))


def numerator_value(e: ShuffleElement, p: ParamPoint, x, rng: random.Random, bound: int = DEFAULT_BOUND):
    """f(x) for F = f / (canonical denominator), also where that denominator vanishes.

    f is a Laurent polynomial, so the value is the xi -> 0 limit along a random
    line through ``x`` whenever direct evaluation divides by zero.
    """
    x = normalize_assignment(e.degree, x)
    try:
        return evaluate(e, p, x) * canonical_denominator(e.sig, x)
    except ZeroDivisionError:
        pass
    xi = UniRatFunction.xi()
    line = tuple(tuple(v + random_scalar(rng, bound) * xi for v in row) for row in x)
    val = evaluate(e, p, line) * canonical_denominator(e.sig, line)
    return limit_at_zero(as_ratfunc(val))


# ----------------------------------------------------------------------------
# checks


def swap(x: tuple, color: int, a: int, b: int) -> tuple:
    rows = [list(r) for r in x]
    row = rows[color - 1]
    row[a], row[b] = row[b], row[a]
    return tuple(tuple(r) for r in rows)


def check_symmetry(e: ShuffleElement, p: ParamPoint, rng: random.Random, trials: int = DEFAULT_TRIALS,
                   bound: int = DEFAULT_BOUND, budget: int = DEFAULT_RESAMPLE_BUDGET,
                   name: str = "symmetry") -> Check:
    """Bosonic swaps fix the value, fermionic swaps negate it."""
    sig = e.sig
    chk = Check(name, "symmetry-in-colored-variables", {"signature": sig.label, "degree": list(e.degree)})
    swaps = [(c, a) for c in range(1, sig.K + 1) for a in range(e.degree[c - 1] - 1)]
    if not swaps:
        chk.notes = "no same-color pair"
        return chk
    for t in range(trials):
        def attempt():
            x = random_assignment(e.degree, rng, bound)
            ctx = EvalContext(sig, p)
            v = ctx.value(e, x)
            out = []
            for c, a in swaps:
                out.append((c, a, x, v, ctx.value(e, swap(x, c, a, a + 1))))
            return out
        for c, a, x, v, w in with_resampling(attempt, budget):
            expected = -v if sig.is_fermionic(c) else v
            if w != expected:
                return chk.fail(trial=t, color=c, index=a + 1, point=x, value=v, swapped=w)
        chk.trials += 1
    return chk


@dataclass(frozen=True)
class WheelCondition:
    """A chain of variables: node j > 0 equals factor * node parent."""

    label: str
    colors: tuple  # color of each node
    links: tuple  # per node j>0: (parent, ((param, power), ...))

    def requirement(self, K: int) -> list[int]:
        need = [0] * K
        for c in self.colors:
            need[c - 1] += 1
        return need


def wheel_conditions(sig: AlgebraSignature) -> list[WheelCondition]:
    m, n, K, col = sig.m, sig.n, sig.K, sig.color
    out = []

    def add(label, colors, factors):
        links = tuple((j, f) for j, f in enumerate(factors))
        out.append(WheelCondition(label, tuple(col(c) for c in colors), links))

    q3, q2, q1 = ("q3", 1), ("q2", 1), ("q1", 1)
    q3i, q2i, q1i = ("q3", -1), ("q2", -1), ("q1", -1)
    if n == 0:
        for i in range(1, m + 1):
            add(f"a[i={i}]", (i - 1, i, i), ((q3,), (q2,)))
            add(f"b[i={i}]", (i, i, i + 1), ((q2,), (q3,)))
        return out
    for i in range(1, m):
        add(f"a[i={i}]", (i - 1, i, i), ((q3,), (q2,)))
        add(f"b[i={i}]", (i, i, i + 1), ((q2,), (q3,)))
    add("c", (m - 1, m, m + 1, m), ((q3,), (q3i,), (q1i,)))
    for i in range(m + 1, K):
        add(f"d[i={i}]", (i - 1, i, i), ((q3i,), (q2i,)))
        add(f"e[i={i}]", (i, i, i + 1), ((q2i,), (q3i,)))
    add("f", (K - 1, K, 1, K), ((q3i,), (q3,), (q1,)))
    return out


def _index_tuples(cond: WheelCondition, degree: Sequence[int]):
    ranges = [range(degree[c - 1]) for c in cond.colors]
    for idx in itertools.product(*ranges):
        used = set()
        ok = True
        for c, a in zip(cond.colors, idx):
            if (c, a) in used:
                ok = False
                break
            used.add((c, a))
        if ok:
            yield idx


def _chain_values(cond: WheelCondition, p: ParamPoint, root):
    vals = [root]
    for parent, factors in cond.links:
        v = vals[parent]
        for name, power in factors:
            v = v * p.qs(name, power)
        vals.append(v)
    return vals


def check_wheel(e: ShuffleElement, p: ParamPoint, rng: random.Random, trials: int = DEFAULT_TRIALS,
                bound: int = DEFAULT_BOUND, budget: int = DEFAULT_RESAMPLE_BUDGET,
                conditions: Optional[Sequence[str]] = None, max_tuples: Optional[int] = None,
                name: str = "wheel") -> Check:
    """Exact vanishing of the numerator on every wheel locus and at coinciding fermions."""
    sig = e.sig
    chk = Check(name, "wheel-conditions", {"signature": sig.label, "degree": list(e.degree)})
    applied = []
    for cond in wheel_conditions(sig):
        if conditions is not None and cond.label.split("[")[0] not in conditions:
            continue
        need = cond.requirement(sig.K)
        if any(nd > have for nd, have in zip(need, e.degree)):
            continue
        tuples = list(_index_tuples(cond, e.degree))
        if max_tuples is not None:
            tuples = tuples[:max_tuples]
        applied.append(cond.label)
        for idx in tuples:
            for t in range(trials):
                def attempt():
                    rows = [list(r) for r in random_assignment(e.degree, rng, bound)]
                    vals = _chain_values(cond, p, random_scalar(rng, bound))
                    for c, a, v in zip(cond.colors, idx, vals):
                        rows[c - 1][a] = v
                    return rows, numerator_value(e, p, rows, rng, bound)
                rows, v = with_resampling(attempt, budget)
                chk.trials += 1
                if v != 0:
                    return chk.fail(condition=cond.label, indices=[a + 1 for a in idx], point=rows, value=v)
    if conditions is None or "trivial" in conditions:
        for c in sorted(sig.fermionic):
            if e.degree[c - 1] < 2:
                continue
            applied.append(f"trivial[color={c}]")
            for a, b in itertools.combinations(range(e.degree[c - 1]), 2):
                for t in range(trials):
                    def attempt():
                        rows = [list(r) for r in random_assignment(e.degree, rng, bound)]
                        rows[c - 1][b] = rows[c - 1][a]
                        return rows, numerator_value(e, p, rows, rng, bound)
                    rows, v = with_resampling(attempt, budget)
                    chk.trials += 1
                    if v is NO_LIMIT or v != 0:
                        return chk.fail(condition=f"trivial[color={c}]", indices=[a + 1, b + 1],
                                        point=rows, value=str(v))
    chk.params["conditions"] = applied
    if not applied:
        chk.notes = "no applicable condition"
    return chk


def _divides_by_coordinates(den: UniPoly, coords: Sequence[UniPoly]) -> bool:
    rest = den
    for f in coords:
        if f.degree < 1:
            continue
        while rest.degree >= 1:
            quo, rem = rest.divmod(f)
            if not rem.is_zero():
                break
            rest = quo
    return rest.degree < 1


def check_pole_shape(e: ShuffleElement, p: ParamPoint, rng: random.Random, trials: int = 1,
                     bound: int = DEFAULT_BOUND, budget: int = DEFAULT_RESAMPLE_BUDGET,
                     name: str = "pole-shape") -> Check:
    """Times the canonical denominator, only coordinate poles remain on a random line."""
    sig = e.sig
    chk = Check(name, "pole-shape", {"signature": sig.label, "degree": list(e.degree)})
    for t in range(trials):
        def attempt():
            base = random_assignment(e.degree, rng, bound)
            direc = random_assignment(e.degree, rng, bound)
            x = tuple(tuple(UniRatFunction.linear(b, d) for b, d in zip(rb, rd)) for rb, rd in zip(base, direc))
            v = as_ratfunc(evaluate(e, p, x) * canonical_denominator(sig, x))
            coords = [UniPoly((b, d)) for rb, rd in zip(base, direc) for b, d in zip(rb, rd)]
            return base, direc, v, coords
        base, direc, v, coords = with_resampling(attempt, budget)
        chk.trials += 1
        if not _divides_by_coordinates(v.den, coords):
            return chk.fail(trial=t, base=base, direction=direc, denominator=repr(v.den))
    return chk


# ----------------------------------------------------------------------------
# cyclic relabeling


def cyclic_point(p: ParamPoint) -> ParamPoint:
    """Parameters with every q_i inverted: q -> 1/q, d -> 1/d."""
    return ParamPoint(1 / p.q, 1 / p.d, (), None, check=False)


def cyclic_relabel(e: ShuffleElement) -> ShuffleElement:
    """Image in Sh_{n|m}: old color c becomes color c - m (mod K)."""
    sig = e.sig
    dual = sig.cyclic_dual()
    new_color = lambda c: dual.color(c - sig.m)
    if isinstance(e, Unit):
        return Unit(dual)
    if isinstance(e, Generator):
        return Generator(dual, new_color(e.color), e.exponent)
    if isinstance(e, Sum):
        deg = [0] * sig.K
        for c in range(1, sig.K + 1):
            deg[new_color(c) - 1] = e.degree[c - 1]
        return Sum(dual, deg, [cyclic_relabel(t) for t in e.terms])
    if isinstance(e, ScalarMul):
        return ScalarMul(e.coefficient, cyclic_relabel(e.element))
    if isinstance(e, Product):
        return Product(cyclic_relabel(e.left), cyclic_relabel(e.right))
    raise NotImplementedError(f"cyclic relabeling of {type(e).__name__}")


def cyclic_assignment(sig: AlgebraSignature, x) -> tuple:
    """Reorder an assignment of ``sig`` into the relabeled algebra's color order."""
    dual = sig.cyclic_dual()
    out = [None] * sig.K
    for c in range(1, sig.K + 1):
        out[dual.color(c - sig.m) - 1] = tuple(x[c - 1])
    return tuple(out)


# ----------------------------------------------------------------------------
# JSON


def _param_to_json(v):
    if isinstance(v, bool) or isinstance(v, int) or isinstance(v, str):
        return v
    if isinstance(v, Fraction):
        return {"q": fmt_scalar(v)}
    if isinstance(v, (tuple, list)):
        return [_param_to_json(t) for t in v]
    raise TypeError(f"parameter {v!r} is not serializable")


def _param_from_json(v):
    if isinstance(v, dict) and set(v) == {"q"}:
        return parse_scalar(v["q"])
    if isinstance(v, list):
        return tuple(_param_from_json(t) for t in v)
    return v


def node_to_json(e: ShuffleElement) -> dict:
    if isinstance(e, Unit):
        return {"node": "unit"}
    if isinstance(e, Generator):
        return {"node": "generator", "color": e.color, "exponent": e.exponent}
    if isinstance(e, Sum):
        return {"node": "sum", "degree": list(e.degree), "terms": [node_to_json(t) for t in e.terms]}
    if isinstance(e, ScalarMul):
        if callable(e.coefficient) or not isinstance(e.coefficient, Fraction):
            raise TypeError("only rational scalar coefficients are serializable")
        return {"node": "scalar", "coefficient": fmt_scalar(e.coefficient), "element": node_to_json(e.element)}
    if isinstance(e, Product):
        return {"node": "product", "left": node_to_json(e.left), "right": node_to_json(e.right)}
    if isinstance(e, Builtin):
        return {"node": "builtin", "name": e.name,
                "params": {k: _param_to_json(v) for k, v in sorted(e.params.items())}}
    raise TypeError(f"unknown node {type(e).__name__}")


def node_from_json(sig: AlgebraSignature, d: dict) -> ShuffleElement:
    kind = d.get("node")
    if kind == "unit":
        return Unit(sig)
    if kind == "generator":
        return Generator(sig, int(d["color"]), int(d.get("exponent", 0)))
    if kind == "sum":
        return Sum(sig, d["degree"], [node_from_json(sig, t) for t in d["terms"]])
    if kind == "scalar":
        return ScalarMul(parse_scalar(d["coefficient"]), node_from_json(sig, d["element"]))
    if kind == "product":
        return Product(node_from_json(sig, d["left"]), node_from_json(sig, d["right"]))
    if kind == "builtin":
        params = {k: _param_from_json(v) for k, v in d.get("params", {}).items()}
        return Builtin(sig, d["name"], **params)
    raise ValueError(f"unknown node tag {kind!r}")


def element_to_json(e: ShuffleElement) -> dict:
    return {"signature": {"m": e.sig.m, "n": e.sig.n}, "element": node_to_json(e)}


def element_from_json(d: dict) -> ShuffleElement:
    sig = AlgebraSignature(int(d["signature"]["m"]), int(d["signature"]["n"]))
    return node_from_json(sig, d["element"])
