"""Success probability of randomized linear coding schemes.

A fixing pins some of the mixing coefficients to constants and leaves the
rest random.  Substituting the pinned values into the product of the sinks'
transfer determinants leaves a polynomial in the random coefficients whose
coefficients are decoding-variable polynomials; the scheme succeeds at a
random point exactly when that polynomial is nonzero there.  This module
builds that polynomial, evaluates the classical and footprint-based lower
bounds on the success probability, and computes the probability itself,
exactly by enumeration or approximately by seeded sampling.

Exact enumeration is double-checked: the point count from the polynomial
must match an independent count that propagates coding vectors through the
network and tests sink ranks.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Mapping

from nckit import _kernel
from nckit.det import det_bareiss
from nckit.errors import (
    FixtureFormatError,
    InfeasibleAtFieldError,
    InternalCheckError,
    NckitError,
    NotApplicableError,
    SearchRefusedError,
    TooLargeError,
)
from nckit.gf import FieldSpec
from nckit.network import Network, SymbolicMatrix, VariableRegistry, build_edmonds
from nckit.poly import (
    Monomial,
    MonomialOrder,
    MultiPoly,
    VariableId,
    field_equation_remainder,
    p_eval_partial,
    split_by,
)

# Hard cap on exhaustive point enumeration: q^mu points.
EXACT_POINT_CAP = 1 << 24

# Best-ordering search walks mu! lex orders.
ORDER_SEARCH_LIMIT = 8


@dataclass(frozen=True)
class Fixing:
    """Partition of the mixing coefficients into pinned and random.

    ``fixed_a`` maps (symbol, edge) pairs and ``fixed_f`` maps (upstream
    edge, edge) pairs to field element codes.  ``random_vars`` holds the
    remaining coefficient variable ids in registration order; decoding
    variables are never part of a fixing.
    """

    fixed_a: Mapping[tuple[int, int], int]
    fixed_f: Mapping[tuple[int, int], int]
    random_vars: tuple[VariableId, ...]

    @property
    def mu(self) -> int:
        return len(self.random_vars)


@dataclass(frozen=True)
class BoundReport:
    """All lower bounds for one network, field and fixing."""

    q: int
    mu: int
    eta: int
    bound_lm: Fraction
    bound_support_min: Fraction
    bound_ho: Fraction | None
    order: MonomialOrder
    best: tuple[Fraction, MonomialOrder] | None = None


@dataclass(frozen=True)
class ProbabilityResult:
    """Either an exact success probability or a sampled estimate.

    Exact results keep ``value`` as the unrounded fraction together with
    the raw count over the q^mu points.  Sampled results carry the trial
    outcome and the seed that reproduces it.
    """

    kind: str  # "exact" or "monte_carlo"
    successes: int
    trials: int
    value: Fraction | None = None
    seed: int | None = None

    @property
    def estimate(self) -> float:
        return self.successes / self.trials

    @property
    def stderr(self) -> float | None:
        if self.kind != "monte_carlo":
            return None
        p = self.successes / self.trials
        return math.sqrt(p * (1.0 - p) / self.trials)


def make_fixing(
    registry: VariableRegistry,
    fixed_a: Mapping[tuple[int, int], int],
    fixed_f: Mapping[tuple[int, int], int],
) -> Fixing:
    """Build a Fixing, leaving every unpinned coefficient random."""
    for (i, j) in fixed_a:
        if ("a", i, j) not in registry:
            raise NckitError(f"a[{i},{j}] is not a coefficient of this network")
    for (i, j) in fixed_f:
        if ("f", i, j) not in registry:
            raise NckitError(f"f[{i},{j}] is not a coefficient of this network")
    pinned = {registry.a_id(i, j) for (i, j) in fixed_a}
    pinned |= {registry.f_id(i, j) for (i, j) in fixed_f}
    free = tuple(v for v in registry.af_ids() if v not in pinned)
    return Fixing(dict(fixed_a), dict(fixed_f), free)


def all_random_fixing(registry: VariableRegistry) -> Fixing:
    """No coefficient pinned; mu equals the full coefficient count."""
    return Fixing({}, {}, registry.af_ids())


def default_fixing(net: Network, registry: VariableRegistry) -> Fixing:
    """Pin the coefficients that cannot matter and leave the rest random.

    An edge whose tail has a single incoming edge merely forwards it, so
    that forwarding coefficient is set to 1.  An origin with as many
    outgoing edges as symbols sends one symbol per edge: identity pattern,
    in symbol and edge order.  Fix directives from the network description
    are applied on top and win.
    """
    fixed_a: dict[tuple[int, int], int] = {}
    fixed_f: dict[tuple[int, int], int] = {}

    for e in net.edges:
        ins = net.in_edges(e.tail)
        if len(ins) == 1:
            fixed_f[(ins[0].id, e.id)] = 1

    by_origin: dict[str, list[int]] = {}
    for i in sorted(net.symbol_origin):
        by_origin.setdefault(net.symbol_origin[i], []).append(i)
    for v, symbols in by_origin.items():
        outs = net.out_edges(v)
        if len(outs) != len(symbols):
            continue
        for r, i in enumerate(symbols):
            for c, e in enumerate(outs):
                fixed_a[(i, e.id)] = 1 if r == c else 0

    for kind, i, j, value in net.fixes:
        (fixed_a if kind == "a" else fixed_f)[(i, j)] = value

    return make_fixing(registry, fixed_a, fixed_f)


def parse_fixing(net: Network, registry: VariableRegistry, text: str) -> Fixing:
    """Read an explicit fixing: one pinned coefficient per line.

    Lines are either ``(a|f) <i> <j> <value>`` or ``<alias> <value>`` for
    aliases declared by the network description.  Values are field element
    codes.  Everything not listed stays random.
    """
    fixed_a: dict[tuple[int, int], int] = {}
    fixed_f: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) == 2 and parts[0] in net.aliases:
            kind, i, j = net.aliases[parts[0]]
            value = parts[1]
        elif len(parts) == 4 and parts[0] in ("a", "f"):
            kind, i, j, value = parts[0], parts[1], parts[2], parts[3]
        else:
            raise FixtureFormatError(
                f"line {lineno}: expected '(a|f) <i> <j> <value>' or '<alias> <value>'"
            )
        try:
            i, j, value = int(i), int(j), int(value)
        except ValueError:
            raise FixtureFormatError(f"line {lineno}: indices and value must be integers")
        (fixed_a if kind == "a" else fixed_f)[(i, j)] = value
    return make_fixing(registry, fixed_a, fixed_f)


def _fixed_codes(
    registry: VariableRegistry, fixing: Fixing, spec: FieldSpec
) -> dict[VariableId, int]:
    """Pinned values as id -> code, validating the partition and the range."""
    codes: dict[VariableId, int] = {}
    for (i, j), c in fixing.fixed_a.items():
        codes[registry.a_id(i, j)] = c
    for (i, j), c in fixing.fixed_f.items():
        codes[registry.f_id(i, j)] = c
    for vid, c in codes.items():
        if not 0 <= c < spec.order:
            raise NckitError(
                f"fixed value {c} for {registry.name_of(vid)} is not a "
                f"GF({spec.order}) element code"
            )
    touched = set(codes) | set(fixing.random_vars)
    if touched != set(registry.af_ids()) or len(codes) + len(fixing.random_vars) != len(touched):
        raise NckitError("fixing does not partition the coefficient variables")
    return codes


def success_poly(
    net: Network, registry: VariableRegistry, fixing: Fixing, spec: FieldSpec
) -> MultiPoly:
    """Product of the sinks' transfer determinants with pinned values applied.

    Zero output is meaningful: it says no decoding choice works with these
    pinned values, whatever the random draws.
    """
    codes = _fixed_codes(registry, fixing, spec)
    assignment = {vid: spec.element(c) for vid, c in codes.items()}
    out = MultiPoly.const(spec, 1)
    for t in net.sinks:
        matrix = build_edmonds(net, t, registry, spec)
        entries: dict[tuple[int, int], MultiPoly] = {}
        for rc, poly in matrix.entries.items():
            value = p_eval_partial(poly, assignment)
            if not value.is_zero:
                entries[rc] = value
        det = det_bareiss(SymbolicMatrix(spec, matrix.rows, matrix.cols, entries))
        if det.is_zero:
            return MultiPoly.zero(spec)
        out = out * det
    return out


def reduced_success_poly(
    p_tilde: MultiPoly, q: int, random_vars: Iterable[VariableId]
) -> MultiPoly:
    """Fold the random variables' exponents with X^q = X; same values everywhere."""
    return field_equation_remainder(p_tilde, q, random_vars)


def _random_support(
    p_hat: MultiPoly, random_vars: tuple[VariableId, ...]
) -> list[Monomial]:
    """Support of p_hat viewed as a polynomial in the random variables."""
    if p_hat.is_zero:
        raise InfeasibleAtFieldError(
            "the pinned values admit no decoding over this field: "
            "the success polynomial is identically zero"
        )
    return sorted(split_by(p_hat, random_vars), key=lambda m: m.exps)


def _footprint(mono: Monomial, q: int, random_vars: tuple[VariableId, ...]) -> Fraction:
    num = 1
    for v in random_vars:
        d = mono.degree_of(v)
        if d >= q:
            raise NckitError("exponent at least q; reduce the polynomial first")
        num *= q - d
    return Fraction(num, q ** len(random_vars))


def bound_lm(
    p_hat: MultiPoly,
    q: int,
    random_vars: tuple[VariableId, ...],
    order: MonomialOrder,
) -> Fraction:
    """Footprint bound read off the leading monomial in the random variables."""
    support = _random_support(p_hat, random_vars)
    return _footprint(max(support, key=order.key), q, random_vars)


def bound_support_min(
    p_hat: MultiPoly, q: int, random_vars: tuple[VariableId, ...]
) -> Fraction:
    """Sharpest footprint bound over the whole support.

    Every support monomial is the leading one under some ordering, so this
    dominates `bound_lm` for any single ordering.
    """
    support = _random_support(p_hat, random_vars)
    return min(_footprint(m, q, random_vars) for m in support)


def bound_best_ordering(
    p_hat: MultiPoly,
    q: int,
    random_vars: tuple[VariableId, ...],
    limit: int = ORDER_SEARCH_LIMIT,
) -> tuple[Fraction, MonomialOrder]:
    """Best `bound_lm` over all lex orders, with a witnessing order.

    Exhaustive over mu! permutations, so refused above ``limit`` variables.
    Deterministic: the first permutation attaining the maximum wins.
    """
    mu = len(random_vars)
    if mu > limit:
        raise SearchRefusedError(
            f"{mu}! lex orders is past the search limit of {limit} variables; "
            "pick an order explicitly"
        )
    support = _random_support(p_hat, random_vars)
    vectors = [tuple(m.degree_of(v) for v in random_vars) for m in support]
    best: tuple[Fraction, tuple[VariableId, ...]] | None = None
    for perm in permutations(range(mu)):
        # Ascending priority: perm[-1] is the most significant position.
        sig = tuple(reversed(perm))
        lead = max(range(len(vectors)), key=lambda i: tuple(vectors[i][p] for p in sig))
        value = _footprint(support[lead], q, random_vars)
        if best is None or value > best[0]:
            best = (value, tuple(random_vars[p] for p in perm))
    assert best is not None
    return best[0], MonomialOrder("lex", best[1])


def _random_edges(registry: VariableRegistry, fixing: Fixing) -> set[int]:
    """Edges that carry at least one random coefficient."""
    return {registry.key_of(v)[2] for v in fixing.random_vars}


def ho_bound(
    net: Network, registry: VariableRegistry, fixing: Fixing, q: int
) -> Fraction:
    """Ho et al.'s bound ((q - sinks)/q)^eta; needs q above the sink count."""
    sinks = len(net.sinks)
    if q <= sinks:
        raise NotApplicableError(
            f"this bound needs q > {sinks} (the number of sinks); got q = {q}"
        )
    eta = len(_random_edges(registry, fixing))
    return Fraction((q - sinks) ** eta, q**eta)


def registry_order(fixing: Fixing) -> MonomialOrder:
    """Default lex order: random variables ascending in registration order."""
    return MonomialOrder("lex", fixing.random_vars)


def bound_report(
    net: Network,
    registry: VariableRegistry,
    fixing: Fixing,
    spec: FieldSpec,
    order: MonomialOrder | None = None,
    search: bool = False,
    limit: int = ORDER_SEARCH_LIMIT,
) -> BoundReport:
    """Evaluate every applicable bound once and package the results."""
    q = spec.order
    p_hat = reduced_success_poly(
        success_poly(net, registry, fixing, spec), q, fixing.random_vars
    )
    if order is None:
        order = registry_order(fixing)
    try:
        ho: Fraction | None = ho_bound(net, registry, fixing, q)
    except NotApplicableError:
        ho = None
    best = bound_best_ordering(p_hat, q, fixing.random_vars, limit) if search else None
    return BoundReport(
        q=q,
        mu=fixing.mu,
        eta=len(_random_edges(registry, fixing)),
        bound_lm=bound_lm(p_hat, q, fixing.random_vars, order),
        bound_support_min=bound_support_min(p_hat, q, fixing.random_vars),
        bound_ho=ho,
        order=order,
        best=best,
    )


def transfer_rank_decodable(
    net: Network,
    registry: VariableRegistry,
    scheme: Mapping[VariableId, int],
    spec: FieldSpec,
    t: str,
) -> bool:
    """Whether sink t can decode under a fully specified scheme.

    Propagates h-dimensional coding vectors edge by edge in topological
    order: each edge carries its injected symbols plus scheme-weighted
    copies of its tail's incoming vectors.  Decodable means the vectors on
    t's incoming edges have full rank, i.e. decoding values exist.
    """
    missing = [v for v in registry.af_ids() if v not in scheme]
    if missing:
        names = ", ".join(registry.name_of(v) for v in missing[:4])
        raise NckitError(f"scheme leaves coefficients unassigned: {names}")
    if t not in net.sinks:
        raise NckitError(f"{t!r} is not a sink")

    h = net.h
    symbols_at: dict[str, list[int]] = {}
    for i, v in net.symbol_origin.items():
        symbols_at.setdefault(v, []).append(i)

    vectors: dict[int, list[int]] = {}
    for e in net.topological_edges():
        row = [0] * h
        for i in symbols_at.get(e.tail, ()):
            c = scheme[registry.a_id(i, e.id)]
            row[i - 1] = spec.add_code(row[i - 1], c)
        for up in net.in_edges(e.tail):
            c = scheme[registry.f_id(up.id, e.id)]
            if c:
                src = vectors[up.id]
                row = [
                    spec.add_code(x, spec.mul_code(c, y)) for x, y in zip(row, src)
                ]
        vectors[e.id] = row

    rows = [vectors[e.id][:] for e in net.in_edges(t)]
    rank = 0
    for col in range(h):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            return False
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = spec.inv_code(rows[rank][col])
        for r in range(rank + 1, len(rows)):
            if rows[r][col]:
                factor = spec.mul_code(rows[r][col], inv)
                rows[r] = [
                    spec.sub_code(x, spec.mul_code(factor, y))
                    for x, y in zip(rows[r], rows[rank])
                ]
        rank += 1
    return True


def _slot_program(
    p_hat: MultiPoly, registry: VariableRegistry, fixing: Fixing
) -> tuple[array, ...]:
    """Flatten p_hat into the slot layout of `count_nonzero_slots`."""
    position = {v: i for i, v in enumerate(fixing.random_vars)}
    groups = split_by(p_hat, registry.b_ids())
    slot_ptr, term_coef, term_vptr, term_var, term_exp = [0], [], [0], [], []
    for bmono in sorted(groups, key=lambda m: m.exps):
        for mono in sorted(groups[bmono].terms, key=lambda m: m.exps):
            term_coef.append(groups[bmono].terms[mono])
            for v, e in mono.exps:
                term_var.append(position[v])
                term_exp.append(e)
            term_vptr.append(len(term_var))
        slot_ptr.append(len(term_coef))
    return tuple(
        array("q", a) for a in (slot_ptr, term_coef, term_vptr, term_var, term_exp)
    )


def _net_program(
    net: Network, registry: VariableRegistry, fixing: Fixing, spec: FieldSpec
) -> tuple[array, ...]:
    """Flatten the network and fixing into the layout of `count_rank_success`."""
    codes = _fixed_codes(registry, fixing, spec)
    position = {v: i for i, v in enumerate(fixing.random_vars)}
    storage = {e.id: i for i, e in enumerate(net.topological_edges())}
    symbols_at: dict[str, list[int]] = {}
    for i, v in net.symbol_origin.items():
        symbols_at.setdefault(v, []).append(i)

    c_ptr, c_kind, c_idx, c_isvar, c_val = [0], [], [], [], []

    def push(kind: int, idx: int, vid: VariableId) -> None:
        if vid in position:
            entry = (kind, idx, 1, position[vid])
        elif codes[vid] == 0:
            return
        else:
            entry = (kind, idx, 0, codes[vid])
        c_kind.append(entry[0])
        c_idx.append(entry[1])
        c_isvar.append(entry[2])
        c_val.append(entry[3])

    for e in net.topological_edges():
        for i in sorted(symbols_at.get(e.tail, ())):
            push(0, i - 1, registry.a_id(i, e.id))
        for up in net.in_edges(e.tail):
            push(1, storage[up.id], registry.f_id(up.id, e.id))
        c_ptr.append(len(c_kind))

    s_ptr, s_edge = [0], []
    for t in net.sinks:
        s_edge.extend(storage[e.id] for e in net.in_edges(t))
        s_ptr.append(len(s_edge))

    return tuple(
        array("q", a)
        for a in (c_ptr, c_kind, c_idx, c_isvar, c_val, s_ptr, s_edge)
    )


def _count_by_rank(
    net: Network,
    registry: VariableRegistry,
    fixing: Fixing,
    spec: FieldSpec,
    mode: int,
    trials: int = 0,
    seed: int = 0,
) -> int:
    exp, log, inv, neg = _kernel.field_arrays(spec)
    program = _net_program(net, registry, fixing, spec)
    return _kernel.count_rank_success(
        spec.order, spec.p, spec.k, exp, log, inv, neg,
        fixing.mu, net.h, net.num_edges, *program, mode, trials, seed,
    )


def exact_probability(
    net: Network, registry: VariableRegistry, fixing: Fixing, spec: FieldSpec
) -> ProbabilityResult:
    """Exact success probability by enumerating all q^mu random draws.

    Two independent counts must agree: points where the substituted
    determinant product is nonzero, and points where vector propagation
    gives every sink full rank.  Their disagreement would mean a bug, not
    a property of the network, hence the internal check error.
    """
    q = spec.order
    points = q**fixing.mu
    if points > EXACT_POINT_CAP:
        raise TooLargeError(
            f"q^mu = {points} points is past the exact-enumeration cap "
            f"({EXACT_POINT_CAP}); use monte_carlo instead"
        )
    p_hat = reduced_success_poly(
        success_poly(net, registry, fixing, spec), q, fixing.random_vars
    )
    if p_hat.is_zero:
        from_poly = 0
    else:
        exp, log, _inv, _neg = _kernel.field_arrays(spec)
        program = _slot_program(p_hat, registry, fixing)
        from_poly = _kernel.count_nonzero_slots(
            q, spec.p, spec.k, exp, log, fixing.mu, *program
        )
    from_rank = _count_by_rank(net, registry, fixing, spec, mode=0)
    if from_poly != from_rank:
        raise InternalCheckError(
            f"polynomial count {from_poly} != rank count {from_rank} "
            f"over GF({q})^{fixing.mu}"
        )
    return ProbabilityResult(
        kind="exact",
        successes=from_poly,
        trials=points,
        value=Fraction(from_poly, points),
    )


def monte_carlo(
    net: Network,
    registry: VariableRegistry,
    fixing: Fixing,
    spec: FieldSpec,
    trials: int,
    seed: int,
    trial_offset: int = 0,
) -> ProbabilityResult:
    """Estimate the success probability from seeded uniform draws.

    Fully deterministic given (seed, trial_offset, trials).  Draws depend
    only on the absolute trial index, so shards like (0, n) and (n, m)
    merge by adding successes and reproduce the single (0, n + m) run.
    """
    if trials < 1:
        raise NckitError(f"need at least one trial, got {trials}")
    successes = _count_by_rank(
        net, registry, fixing, spec,
        mode=1, trials=trials, seed=_kernel.shard_seed(seed, trial_offset),
    )
    return ProbabilityResult(
        kind="monte_carlo", successes=successes, trials=trials, seed=seed
    )
