"""Sparse multivariate polynomials over a finite field.

Variables are dense integer ids handed out by a registry (see network.py);
a monomial stores only its nonzero exponents as a sorted tuple of
(variable, exponent) pairs, and a polynomial maps monomials to nonzero
coefficient codes of its field.

The two operations that carry the whole package sit here:

* ``field_equation_remainder`` folds exponents with the rule
  e -> ((e - 1) mod (q - 1)) + 1 for e >= q, which rewrites a polynomial
  modulo the relations X^q = X without changing any of its values on
  GF(q)^n.  A polynomial therefore vanishes everywhere on GF(q)^n exactly
  when its remainder is the zero polynomial, and a nonzero remainder can
  be turned into an explicit nonzero point greedily one variable at a
  time (``find_nonzero_point``).
* ``zero_count_bound`` reads the leading monomial of the reduced
  polynomial under a chosen monomial order and bounds the number of
  zeros by q^n - prod(q - j_v) over the leading exponents j_v.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    FieldMismatchError,
    InternalCheckError,
    NckitError,
    NoSolutionError,
    NotApplicableError,
)
from .gf import FieldElement, FieldSpec, ff_enumerate

VariableId = int


class Monomial:
    """A power product, kept as a var-sorted tuple of (id, exponent) pairs."""

    __slots__ = ("exps",)

    def __init__(self, exps: Mapping[VariableId, int] | Iterable[tuple[VariableId, int]] = ()):
        items = exps.items() if isinstance(exps, Mapping) else exps
        pairs = tuple(sorted((int(v), int(e)) for v, e in items if e))
        for v, e in pairs:
            if e < 0:
                raise NckitError(f"negative exponent {e} for variable {v}")
        self.exps = pairs

    @classmethod
    def _raw(cls, pairs: tuple[tuple[int, int], ...]) -> "Monomial":
        m = cls.__new__(cls)
        m.exps = pairs
        return m

    def degree_of(self, var: VariableId) -> int:
        for v, e in self.exps:
            if v == var:
                return e
        return 0

    @property
    def total_degree(self) -> int:
        return sum(e for _, e in self.exps)

    @property
    def variables(self) -> tuple[VariableId, ...]:
        return tuple(v for v, _ in self.exps)

    def is_one(self) -> bool:
        return not self.exps

    def __mul__(self, other: "Monomial") -> "Monomial":
        a, b = self.exps, other.exps
        if not a:
            return other
        if not b:
            return self
        out: list[tuple[int, int]] = []
        i = j = 0
        while i < len(a) and j < len(b):
            va, ea = a[i]
            vb, eb = b[j]
            if va == vb:
                out.append((va, ea + eb))
                i += 1
                j += 1
            elif va < vb:
                out.append(a[i])
                i += 1
            else:
                out.append(b[j])
                j += 1
        out.extend(a[i:])
        out.extend(b[j:])
        return Monomial._raw(tuple(out))

    def divides(self, other: "Monomial") -> bool:
        their = dict(other.exps)
        return all(their.get(v, 0) >= e for v, e in self.exps)

    def divide(self, other: "Monomial") -> "Monomial":
        """self / other; other must divide self."""
        mine = dict(self.exps)
        for v, e in other.exps:
            left = mine.get(v, 0) - e
            if left < 0:
                raise NckitError(f"{other} does not divide {self}")
            if left:
                mine[v] = left
            else:
                mine.pop(v, None)
        return Monomial(mine)

    def split(self, vars: frozenset[VariableId] | set[VariableId]) -> tuple["Monomial", "Monomial"]:
        """(part inside vars, part outside vars)."""
        inside = tuple(p for p in self.exps if p[0] in vars)
        outside = tuple(p for p in self.exps if p[0] not in vars)
        return Monomial._raw(inside), Monomial._raw(outside)

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and self.exps == other.exps

    def __hash__(self) -> int:
        return hash(self.exps)

    def __repr__(self) -> str:
        if not self.exps:
            return "1"
        return "*".join(f"x{v}" + (f"^{e}" if e > 1 else "") for v, e in self.exps)


MONO_ONE = Monomial()


def _divkey(m: Monomial) -> tuple[tuple[int, int], ...]:
    # lex order with higher variable ids more significant; used where any
    # fixed admissible order will do (exact division, certificates)
    return tuple(reversed(m.exps))


class MonomialOrder:
    """lex / grlex / grevlex with an explicit variable priority.

    ``priority`` lists variable ids ascending: the last entry is the most
    significant variable.  Monomials compared under the order must only
    use listed variables.
    """

    KINDS = ("lex", "grlex", "grevlex")

    def __init__(self, kind: str, priority: Sequence[VariableId]):
        if kind not in self.KINDS:
            raise NckitError(f"unknown order kind {kind!r}")
        prio = tuple(int(v) for v in priority)
        if len(set(prio)) != len(prio):
            raise NckitError("priority lists a variable twice")
        self.kind = kind
        self.priority = prio
        self._rank = {v: i for i, v in enumerate(prio)}

    def _vector(self, m: Monomial) -> list[int]:
        # exponents, most significant variable first
        vec = [0] * len(self.priority)
        n = len(vec)
        for v, e in m.exps:
            r = self._rank.get(v)
            if r is None:
                raise NckitError(f"variable {v} not covered by this order")
            vec[n - 1 - r] = e
        return vec

    def key(self, m: Monomial):
        vec = self._vector(m)
        if self.kind == "lex":
            return tuple(vec)
        deg = sum(vec)
        if self.kind == "grlex":
            return (deg, tuple(vec))
        return (deg, tuple(-e for e in reversed(vec)))

    def __repr__(self) -> str:
        return f"MonomialOrder({self.kind}, {self.priority})"


class MultiPoly:
    """Sparse polynomial: monomial -> nonzero coefficient code of ``spec``."""

    __slots__ = ("spec", "terms")

    def __init__(self, spec: FieldSpec, terms: Mapping[Monomial, int] | None = None):
        self.spec = spec
        self.terms: dict[Monomial, int] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    self.terms[m] = c

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls, spec: FieldSpec) -> "MultiPoly":
        return cls(spec)

    @classmethod
    def const(cls, spec: FieldSpec, value: FieldElement | int) -> "MultiPoly":
        code = value.code if isinstance(value, FieldElement) else int(value) % spec.p
        return cls(spec, {MONO_ONE: code})

    @classmethod
    def variable(cls, spec: FieldSpec, var: VariableId) -> "MultiPoly":
        return cls(spec, {Monomial(((var, 1),)): 1})

    @classmethod
    def term(cls, spec: FieldSpec, mono: Monomial, value: FieldElement | int) -> "MultiPoly":
        code = value.code if isinstance(value, FieldElement) else int(value) % spec.p
        return cls(spec, {mono: code})

    # -- inspection ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and MONO_ONE in self.terms)

    def constant_value(self) -> FieldElement:
        if self.is_zero:
            return self.spec.zero
        if not self.is_constant():
            raise NckitError("polynomial is not constant")
        return self.spec.element(self.terms[MONO_ONE])

    def support(self) -> set[Monomial]:
        return set(self.terms)

    def coefficient(self, m: Monomial) -> FieldElement:
        return self.spec.element(self.terms.get(m, 0))

    def variables(self) -> set[VariableId]:
        out: set[VariableId] = set()
        for m in self.terms:
            out.update(m.variables)
        return out

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiPoly)
            and self.spec == other.spec
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.spec, tuple(sorted((m.exps, c) for m, c in self.terms.items()))))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        if self.is_zero:
            return "MultiPoly(0)"
        return f"MultiPoly({len(self.terms)} terms)"

    def canonical(self) -> tuple:
        """Hashable canonical form (used for memo keys)."""
        return tuple(sorted((m.exps, c) for m, c in self.terms.items()))

    # -- arithmetic -----------------------------------------------------------

    def _check(self, other: "MultiPoly") -> None:
        if self.spec != other.spec:
            raise FieldMismatchError(f"{self.spec!r} vs {other.spec!r}")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        spec = self.spec
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = spec.add_code(out.get(m, 0), c)
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        res = MultiPoly.__new__(MultiPoly)
        res.spec = spec
        res.terms = out
        return res

    def __neg__(self) -> "MultiPoly":
        spec = self.spec
        res = MultiPoly.__new__(MultiPoly)
        res.spec = spec
        res.terms = {m: spec.neg_code(c) for m, c in self.terms.items()}
        return res

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        spec = self.spec
        out: dict[Monomial, int] = {}
        small, big = (self.terms, other.terms)
        if len(small) > len(big):
            small, big = big, small
        for m1, c1 in small.items():
            for m2, c2 in big.items():
                c = spec.mul_code(c1, c2)
                m = m1 * m2
                s = spec.add_code(out.get(m, 0), c)
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        res = MultiPoly.__new__(MultiPoly)
        res.spec = spec
        res.terms = out
        return res

    def scale(self, value: FieldElement | int) -> "MultiPoly":
        code = value.code if isinstance(value, FieldElement) else int(value)
        spec = self.spec
        if code == 0:
            return MultiPoly.zero(spec)
        res = MultiPoly.__new__(MultiPoly)
        res.spec = spec
        res.terms = {m: spec.mul_code(c, code) for m, c in self.terms.items()}
        return res


def p_add(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    return f + g


def p_mul(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    return f * g


def p_eval_partial(f: MultiPoly, assignment: Mapping[VariableId, FieldElement]) -> MultiPoly:
    """Substitute values for a subset of variables."""
    spec = f.spec
    for el in assignment.values():
        if el.spec != spec:
            raise FieldMismatchError("assignment values live in a different field")
    if not assignment:
        return f
    keys = set(assignment)
    out: dict[Monomial, int] = {}
    for m, c in f.terms.items():
        inside, outside = m.split(keys)
        code = c
        for v, e in inside.exps:
            code = spec.mul_code(code, spec.pow_code(assignment[v].code, e))
            if not code:
                break
        if not code:
            continue
        s = spec.add_code(out.get(outside, 0), code)
        if s:
            out[outside] = s
        else:
            out.pop(outside, None)
    res = MultiPoly.__new__(MultiPoly)
    res.spec = spec
    res.terms = out
    return res


def p_eval(f: MultiPoly, assignment: Mapping[VariableId, FieldElement]) -> FieldElement:
    """Full evaluation; every variable of f must be assigned."""
    res = p_eval_partial(f, assignment)
    return res.constant_value()


def leading_monomial(f: MultiPoly, order: MonomialOrder) -> Monomial:
    if f.is_zero:
        raise NotApplicableError("the zero polynomial has no leading monomial")
    return max(f.terms, key=order.key)


def leading_term(f: MultiPoly, order: MonomialOrder) -> tuple[Monomial, FieldElement]:
    m = leading_monomial(f, order)
    return m, f.coefficient(m)


def _fold_exponent(e: int, q: int) -> int:
    return e if e < q else ((e - 1) % (q - 1)) + 1


def field_equation_remainder(
    f: MultiPoly, q: int, variables: Iterable[VariableId]
) -> MultiPoly:
    """Remainder of f modulo the relations X^q = X for the given variables.

    Exponent folding only: coefficients are untouched, so f may live over
    a subfield of GF(q).  The result agrees with f at every point of
    GF(q)^n and is idempotent under further folding with the same q.
    """
    if q < 2:
        raise NckitError(f"field equations need q >= 2, got {q}")
    fold = frozenset(variables)
    spec = f.spec
    out: dict[Monomial, int] = {}
    for m, c in f.terms.items():
        if any(v in fold and e >= q for v, e in m.exps):
            m = Monomial._raw(
                tuple((v, _fold_exponent(e, q) if v in fold else e) for v, e in m.exps)
            )
        s = spec.add_code(out.get(m, 0), c)
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    res = MultiPoly.__new__(MultiPoly)
    res.spec = spec
    res.terms = out
    return res


def has_nonzero_point(f: MultiPoly, q: int) -> bool:
    """True iff f takes a nonzero value somewhere on GF(q)^n."""
    return not field_equation_remainder(f, q, f.variables()).is_zero


def find_nonzero_point(f: MultiPoly, q: int) -> dict[VariableId, FieldElement]:
    """A point of GF(q)^n where f does not vanish, greedily constructed.

    f's coefficients must live in GF(q) itself (embed first if needed).
    Variables are processed by ascending id, values tried in enumeration
    order, keeping the partially substituted remainder nonzero.
    """
    spec = f.spec
    if spec.order != q:
        raise NckitError(f"polynomial lives over GF({spec.order}), not GF({q})")
    g = field_equation_remainder(f, q, f.variables())
    if g.is_zero:
        raise NoSolutionError("polynomial vanishes on the whole space")
    assignment: dict[VariableId, FieldElement] = {}
    for v in sorted(g.variables()):
        if v not in g.variables():
            continue
        for val in ff_enumerate(spec):
            h = field_equation_remainder(p_eval_partial(g, {v: val}), q, g.variables())
            if not h.is_zero:
                g = h
                assignment[v] = val
                break
        else:
            raise InternalCheckError("greedy substitution exhausted a variable")
    # fill variables that dropped out during folding; their value cannot matter
    for v in f.variables():
        assignment.setdefault(v, spec.zero)
    if not p_eval(f, {v: assignment[v] for v in f.variables()}):
        raise InternalCheckError("constructed point does not evaluate nonzero")
    return assignment


def zero_count_bound(f: MultiPoly, q: int, order: MonomialOrder) -> int:
    """Upper bound on |{x in GF(q)^n : f(x) = 0}| from the leading monomial.

    n is the number of variables the order covers; f may use a subset.
    """
    scope = set(order.priority)
    extra = f.variables() - scope
    if extra:
        raise NckitError(f"variables {sorted(extra)} outside the order's scope")
    g = field_equation_remainder(f, q, scope)
    if g.is_zero:
        raise NotApplicableError("reduction is zero; the bound needs a nonzero remainder")
    lm = leading_monomial(g, order)
    n = len(order.priority)
    prod = 1
    for v in order.priority:
        prod *= q - lm.degree_of(v)
    return q**n - prod


def count_nonzero_points(
    f: MultiPoly, variables: Sequence[VariableId]
) -> int:
    """Exact |{x in GF(q)^n : f(x) != 0}| for n = len(variables).

    Memoized substitution tree: substitutes variables one at a time and
    caches counts by the canonical form of the residual polynomial, so
    structured polynomials cost far less than q^n evaluations.
    f's coefficients must live in the field being counted over.
    """
    spec = f.spec
    q = spec.order
    vars_tuple = tuple(variables)
    missing = f.variables() - set(vars_tuple)
    if missing:
        raise NckitError(f"f uses variables {sorted(missing)} not in the point space")
    values = list(ff_enumerate(spec))
    memo: dict[tuple, int] = {}

    g0 = field_equation_remainder(f, q, f.variables())

    def rec(g: MultiPoly, idx: int) -> int:
        remaining = len(vars_tuple) - idx
        if g.is_zero:
            return 0
        if g.is_constant():
            return q**remaining
        v = vars_tuple[idx]
        if v not in g.variables():
            return q * rec(g, idx + 1)
        key = (g.canonical(), remaining)
        hit = memo.get(key)
        if hit is not None:
            return hit
        total = 0
        for val in values:
            total += rec(p_eval_partial(g, {v: val}), idx + 1)
        memo[key] = total
        return total

    return rec(g0, 0)


def divide_exact(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """f / g when the division is exact; raises InternalCheckError otherwise."""
    f._check(g)
    spec = f.spec
    if g.is_zero:
        raise NckitError("division by the zero polynomial")
    if f.is_zero:
        return f
    if g.is_constant():
        return f.scale(spec.inv_code(g.terms[MONO_ONE]))
    lg = max(g.terms, key=_divkey)
    cg_inv = spec.inv_code(g.terms[lg])
    quot: dict[Monomial, int] = {}
    r = f
    while not r.is_zero:
        lr = max(r.terms, key=_divkey)
        if not lg.divides(lr):
            raise InternalCheckError("division is not exact")
        m = lr.divide(lg)
        c = spec.mul_code(r.terms[lr], cg_inv)
        quot[m] = c
        r = r - g * MultiPoly.term(spec, m, spec.element(c))
    return MultiPoly(spec, quot)


def embed(f: MultiPoly, target: FieldSpec) -> MultiPoly:
    """Reinterpret a prime-field polynomial inside an extension field."""
    if f.spec == target:
        return f
    if f.spec.k != 1 or f.spec.p != target.p:
        raise FieldMismatchError(
            f"can only embed GF({target.p}) into GF({target.p}^{target.k})"
        )
    # prime-subfield codes are the same integers in the extension
    return MultiPoly(target, dict(f.terms))


def split_by(f: MultiPoly, vars: Iterable[VariableId]) -> dict[Monomial, MultiPoly]:
    """Group f by its monomial part in ``vars``; values are the cofactors.

    Coefficient polynomials are nonzero by construction: distinct outside
    parts cannot cancel each other.
    """
    keys = frozenset(vars)
    spec = f.spec
    groups: dict[Monomial, dict[Monomial, int]] = {}
    for m, c in f.terms.items():
        inside, outside = m.split(keys)
        groups.setdefault(inside, {})[outside] = c
    return {m: MultiPoly(spec, t) for m, t in groups.items()}


def render_poly(
    f: MultiPoly,
    namer: Callable[[VariableId], str] = lambda v: f"x{v}",
    order: MonomialOrder | None = None,
) -> str:
    """Canonical text form: terms sorted descending under the order."""
    if f.is_zero:
        return "0"
    if order is not None:
        monos = sorted(f.terms, key=order.key, reverse=True)
    else:
        monos = sorted(f.terms, key=_divkey, reverse=True)
    parts = []
    for m in monos:
        c = f.terms[m]
        factors = [
            namer(v) + (f"^{e}" if e > 1 else "") for v, e in m.exps
        ]
        if not factors:
            parts.append(str(c))
        elif c == 1:
            parts.append("*".join(factors))
        else:
            parts.append("*".join([str(c)] + factors))
    return " + ".join(parts)
