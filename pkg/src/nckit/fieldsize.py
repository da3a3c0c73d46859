"""Minimum field size search and explicit scheme construction.

A network is solvable over GF(q) exactly when the product of the per-sink
transfer determinants keeps a nonzero remainder modulo the field equations
X^q - X.  Decoding variables occur at most linearly in every determinant,
so only the coding coefficients need folding; the determinants themselves
depend on the field only through its characteristic and are computed once.

`min_field_size` walks the ladder q = p, p^2, ... and stops at the first
nonzero remainder.  Any field with more elements than the network has sinks
admits a scheme, so the ladder is capped one step past floor(log_p sinks)
and a clean miss there indicates a bug, not an infeasible instance.
"""

from __future__ import annotations

from dataclasses import dataclass

from nckit.det import det_bareiss
from nckit.errors import (
    InfeasibleAtFieldError,
    InfeasibleNetworkError,
    InternalCheckError,
    NckitError,
    TooLargeError,
)
from nckit.gf import FieldElement, FieldSpec, field
from nckit.network import Network, VariableRegistry, build_edmonds, min_cut
from nckit.poly import (
    Monomial,
    MultiPoly,
    VariableId,
    embed,
    field_equation_remainder,
    find_nonzero_point,
)
from nckit.prob import transfer_rank_decodable

# Term-count cap for the accumulating determinant product.  The bundled
# networks stay under four thousand terms, so the default only trips on
# inputs far outside the intended scale.
DEFAULT_TERM_CAP = 1 << 18


@dataclass(frozen=True)
class FieldSizeResult:
    """Outcome of the field-size ladder.

    `trials` records every candidate order in the order tested, exactly one
    of which is feasible: the last.  `certificate` is the leading surviving
    term of the winning remainder, a concrete witness that it is nonzero.
    `extra_trial` is set when the winner needed the ladder's final rung,
    one past floor(log_p sinks).
    """

    q: int
    trials: tuple[tuple[int, bool], ...]
    certificate: tuple[Monomial, int]
    extra_trial: bool


def _floor_log(p: int, n: int) -> int:
    """Largest e with p**e <= n, for n >= 1."""
    e = 0
    m = p
    while m <= n:
        e += 1
        m *= p
    return e


def _prime_power(q: int) -> tuple[int, int]:
    """Split q into (p, k) with q = p**k and p prime."""
    if q < 2:
        raise NckitError(f"field order must be at least 2, got {q}")
    p = 2
    while p * p <= q:
        if q % p == 0:
            break
        p += 1
    else:
        return q, 1
    k, m = 0, q
    while m % p == 0:
        m //= p
        k += 1
    if m != 1:
        raise NckitError(f"{q} is not a prime power, so GF({q}) does not exist")
    return p, k


def _check_cuts(net: Network) -> None:
    for t in net.sinks:
        c = min_cut(net, t)
        if c < net.h:
            raise InfeasibleNetworkError(
                f"sink {t} has min-cut {c}, below the {net.h} symbols; "
                "no field admits a scheme"
            )


def _sink_determinants(
    net: Network, registry: VariableRegistry, spec: FieldSpec
) -> list[MultiPoly]:
    return [
        det_bareiss(build_edmonds(net, t, registry, spec)) for t in net.sinks
    ]


def _folded_product(
    dets: list[MultiPoly],
    q: int,
    fold_vars: tuple[VariableId, ...],
    max_terms: int,
) -> MultiPoly:
    """Multiply determinants, folding exponents after every factor.

    Folding early keeps each variable's degree below q throughout, which
    bounds intermediate growth; the cap turns a runaway product into a
    diagnostic instead of an out-of-memory kill.
    """
    r = MultiPoly.const(dets[0].spec, 1)
    for d in dets:
        r = field_equation_remainder(r * d, q, fold_vars)
        if len(r.terms) > max_terms:
            raise TooLargeError(
                f"determinant product reached {len(r.terms)} terms "
                f"(cap {max_terms}); raise max_terms to continue"
            )
        if r.is_zero:
            return r
    return r


def min_field_size(
    net: Network, p: int, max_terms: int = DEFAULT_TERM_CAP
) -> FieldSizeResult:
    """Smallest q = p**k over which the network has a linear scheme.

    The per-sink determinants are computed once over GF(p); each candidate
    order only changes the exponent folding, so a trial costs one
    multiply-and-fold pass.  Raises InfeasibleNetworkError when some sink's
    min-cut is below the symbol count, the one case no field can fix.
    """
    _check_cuts(net)
    registry = VariableRegistry(net)
    dets = _sink_determinants(net, registry, field(p))
    af = registry.af_ids()
    nominal = _floor_log(p, len(net.sinks))
    trials: list[tuple[int, bool]] = []
    for k in range(1, nominal + 2):
        q = p**k
        r = _folded_product(dets, q, af, max_terms)
        trials.append((q, not r.is_zero))
        if not r.is_zero:
            lead = max(r.terms, key=lambda m: m.exps)
            return FieldSizeResult(
                q=q,
                trials=tuple(trials),
                certificate=(lead, r.terms[lead]),
                extra_trial=k > nominal,
            )
    raise InternalCheckError(
        f"no feasible order up to p**{nominal + 1} = {p ** (nominal + 1)} "
        f"despite {len(net.sinks)} sinks; the product reduction is broken"
    )


def find_coding_scheme(
    net: Network, q: int, max_terms: int = DEFAULT_TERM_CAP
) -> dict[VariableId, FieldElement]:
    """Explicit coefficient assignment over GF(q) making every sink decode.

    Returns a value for every variable of `VariableRegistry(net)`, including
    the decoding ones, so the assignment is a complete end-to-end scheme.
    Variables the determinant product does not mention are set to zero.
    Raises InfeasibleAtFieldError when no scheme exists over GF(q).
    """
    p, k = _prime_power(q)
    _check_cuts(net)
    spec = field(p, k)
    registry = VariableRegistry(net)
    dets = _sink_determinants(net, registry, field(p))
    r = _folded_product(dets, q, registry.af_ids(), max_terms)
    if r.is_zero:
        raise InfeasibleAtFieldError(
            f"no linear scheme exists over GF({q}); any order above "
            f"{len(net.sinks)} of the same characteristic works"
        )
    point = find_nonzero_point(embed(r, spec) if k > 1 else r, q)
    scheme = {
        vid: point.get(vid, spec.zero)
        for vid in (*registry.af_ids(), *registry.b_ids())
    }
    coding = {vid: scheme[vid].code for vid in registry.af_ids()}
    for t in net.sinks:
        if not transfer_rank_decodable(net, registry, coding, spec, t):
            raise InternalCheckError(
                f"scheme from the nonzero point fails the rank check at "
                f"sink {t}"
            )
    return scheme
