"""Acceptance gate: one test per shipping criterion.

Each test is self-contained and pins its expected values inline, so a
glance at `pytest -v tests/test_acceptance.py` gives one pass/fail line
per criterion.  Two sub-claims are marked strict-xfail: each contradicts
the closed forms asserted right next to it, is asserted faithfully
anyway, and carries the actual value with the argument for it in the
xfail reason.  Everything else must stay green.

Numeric policy: probabilities and bounds are exact `Fraction`s compared
with `==`; decimal cells go through the same truncating renderer the CLI
uses; the only tolerance anywhere is the 3-standard-error band of the
seeded Monte Carlo criterion.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from fractions import Fraction

import pytest

import nckit._kernel as kernel
from nckit.cli import dec3, main
from nckit.det import det_bareiss, det_laplace, support_via_paths
from nckit.fieldsize import find_coding_scheme, min_field_size
from nckit.gf import field
from nckit.network import (
    SymbolicMatrix,
    VariableRegistry,
    build_edmonds,
    build_edmonds_unsigned,
    load_fixture,
)
from nckit.poly import (
    Monomial,
    MonomialOrder,
    MultiPoly,
    count_nonzero_points,
    divide_exact,
    has_nonzero_point,
    p_eval,
    split_by,
    zero_count_bound,
)
from nckit.prob import (
    bound_lm,
    bound_support_min,
    default_fixing,
    exact_probability,
    ho_bound,
    monte_carlo,
    reduced_success_poly,
    success_poly,
    transfer_rank_decodable,
)

GF2 = field(2)
GF3 = field(3)
GF4 = field(2, 2)

FIXTURES = ("butterfly", "example1", "example2")

# Pinned decimal cells for the two worked fixtures, column-indexed by q.
# Cells below 1/10 carry four places (they render scaled by ten), the
# rest three; render_cell applies the same rule.
TABLE1 = {
    "lm": {4: "0.140", 8: "0.430", 16: "0.672", 32: "0.893", 64: "0.909"},
    "smin": {4: "0.0703", 8: "0.322", 16: "0.588", 32: "0.773", 64: "0.880"},
    "ho": {4: "0.0625", 8: "0.316", 16: "0.586", 32: "0.772", 64: "0.880"},
}
TABLE2 = {
    "lm": {4: "0.133", 8: "0.392", 16: "0.636", 32: "0.800", 64: "0.895"},
    "smin": {4: "0.105", 8: "0.376", 16: "0.630", 32: "0.799", 64: "0.895"},
    "ho": {4: "0.0156", 8: "0.244", 16: "0.536", 32: "0.744", 64: "0.865"},
}


def setup(name):
    net = load_fixture(name)
    registry = VariableRegistry(net)
    return net, registry, default_fixing(net, registry)


def alias_ids(net, registry):
    return {name: registry.id_of(key) for name, key in net.aliases.items()}


def order_ex1(net, registry):
    ids = alias_ids(net, registry)
    return MonomialOrder("lex", [ids[x] for x in "abdeghfc"])


def order_ex2(net, registry):
    ids = alias_ids(net, registry)
    return MonomialOrder("lex", [ids[x] for x in "abcefg"] + [ids["d"]])


def reduced(name, spec):
    net, registry, fixing = setup(name)
    p_hat = reduced_success_poly(
        success_poly(net, registry, fixing, spec), spec.order, fixing.random_vars
    )
    return net, registry, fixing, p_hat


def render_cell(value: Fraction) -> str:
    """The tables print small cells scaled by 10, i.e. with 4 places."""
    if value < Fraction(1, 10):
        scaled = value.numerator * 10**4 // value.denominator
        return f"0.{scaled:04d}"
    return dec3(value)


def exact_by_factoring(net, registry, fixing, spec) -> Fraction:
    """Exact success fraction via the common-decoding-factor structure.

    Every random-monomial cofactor of the success polynomial is one and
    the same decoding polynomial Q, so dividing Q out (exactly, which
    verifies the claim en passant) leaves a polynomial T in the random
    variables alone with: success at x iff T(x) != 0.  Counting T's
    nonzero points by memoized substitution avoids enumerating GF(q)^mu.
    """
    p = success_poly(net, registry, fixing, spec)
    q_factor = next(iter(split_by(p, fixing.random_vars).values()))
    t_poly = divide_exact(p, q_factor)
    assert t_poly.variables() <= set(fixing.random_vars)
    count = count_nonzero_points(t_poly, fixing.random_vars)
    return Fraction(count, spec.order**fixing.mu)


def test_criterion_1_table1_reproduction():
    start = time.monotonic()
    for q, k in ((4, 2), (8, 3), (16, 4), (32, 5), (64, 6)):
        net, registry, fixing, p_hat = reduced("example1", field(2, k))
        lm = bound_lm(p_hat, q, fixing.random_vars, order_ex1(net, registry))
        smin = bound_support_min(p_hat, q, fixing.random_vars)
        ho = ho_bound(net, registry, fixing, q)
        assert lm == Fraction((q - 2) ** 2 * (q - 1) ** 2, q**4)
        assert smin == Fraction((q - 2) ** 3 * (q - 1) ** 2, q**5)
        assert ho == Fraction((q - 2) ** 4, q**4)
        assert render_cell(smin) == TABLE1["smin"][q]
        assert render_cell(ho) == TABLE1["ho"][q]
        if q == 32:
            # One pinned cell disagrees with its own closed form; the
            # formula value renders as 0.824 and is what this library keeps.
            assert render_cell(lm) == "0.824"
            assert TABLE1["lm"][q] == "0.893"
        else:
            assert render_cell(lm) == TABLE1["lm"][q]
    assert time.monotonic() - start < 10.0


def test_criterion_2_table2_reproduction():
    for q, k in ((4, 2), (8, 3), (16, 4), (32, 5), (64, 6)):
        net, registry, fixing, p_hat = reduced("example2", field(2, k))
        lm = bound_lm(p_hat, q, fixing.random_vars, order_ex2(net, registry))
        smin = bound_support_min(p_hat, q, fixing.random_vars)
        ho = ho_bound(net, registry, fixing, q)
        assert lm == Fraction((q - 1) ** 7, q**7)
        assert smin == Fraction((q - 1) ** 3 * (q - 2) ** 2, q**5)
        assert ho == Fraction((q - 3) ** 3, q**3)
        assert render_cell(lm) == TABLE2["lm"][q]
        assert render_cell(smin) == TABLE2["smin"][q]
        assert render_cell(ho) == TABLE2["ho"][q]


def test_criterion_3_polynomial_identities():
    # Example 1, coefficients folded and unfolded, spelled in fixture aliases.
    net, registry, fixing = setup("example1")
    ids = alias_ids(net, registry)

    def mono(letters: str, squared: str) -> Monomial:
        exps = {ids[x]: 1 for x in letters}
        exps.update({ids[x]: 2 for x in squared})
        return Monomial(exps)

    p = success_poly(net, registry, fixing, GF4)
    q_factor = next(iter(split_by(p, fixing.random_vars).values()))
    trinomial = divide_exact(p, q_factor)
    expected = MultiPoly(
        GF4,
        {mono("gh", "bce"): 1, mono("gh", "cf"): 1, mono("gh", "adf"): 1},
    )
    assert trinomial.canonical() == expected.canonical()

    net, registry, fixing, p_hat = reduced("example1", GF2)
    q_factor = next(iter(split_by(p_hat, fixing.random_vars).values()))
    folded = divide_exact(p_hat, q_factor)
    expected2 = MultiPoly(
        GF2,
        {mono("bcegh", ""): 1, mono("cfgh", ""): 1, mono("adfgh", ""): 1},
    )
    assert folded.canonical() == expected2.canonical()
    assert bound_lm(p_hat, 2, fixing.random_vars, order_ex1(net, registry)) == Fraction(1, 16)
    assert bound_support_min(p_hat, 2, fixing.random_vars) == Fraction(1, 32)

    # Example 2, same drill.
    net, registry, fixing = setup("example2")
    ids = alias_ids(net, registry)
    p = success_poly(net, registry, fixing, GF4)
    q_factor = next(iter(split_by(p, fixing.random_vars).values()))
    trinomial = divide_exact(p, q_factor)
    expected = MultiPoly(
        GF4,
        {mono("abcdefg", ""): 1, mono("abc", "ef"): 1, mono("efg", "bc"): 1},
    )
    assert trinomial.canonical() == expected.canonical()

    net, registry, fixing, p_hat = reduced("example2", GF2)
    q_factor = next(iter(split_by(p_hat, fixing.random_vars).values()))
    folded = divide_exact(p_hat, q_factor)
    expected2 = MultiPoly(
        GF2,
        {mono("abcdefg", ""): 1, mono("abcef", ""): 1, mono("bcefg", ""): 1},
    )
    assert folded.canonical() == expected2.canonical()
    assert bound_support_min(p_hat, 2, fixing.random_vars) == Fraction(1, 128)


@pytest.mark.xfail(
    strict=True,
    reason="unattainable: the full-support term of the folded polynomial "
    "dominates both others componentwise, so every monomial order makes "
    "it lead and the bound is 2^-7, not the claimed 2^-5",
)
def test_criterion_3_example2_claimed_leading_bound():
    net, registry, fixing, p_hat = reduced("example2", GF2)
    lm = bound_lm(p_hat, 2, fixing.random_vars, order_ex2(net, registry))
    assert lm == Fraction(1, 32)


def test_criterion_4_path_oracle_support():
    # The named product of one routing of the butterfly bottleneck.
    net = load_fixture("butterfly")
    registry = VariableRegistry(net)
    exps = {registry.f_id(i, j): 1 for i, j in ((1, 3), (2, 5), (5, 7), (7, 8))}
    exps[registry.a_id(1, 1)] = 1
    exps[registry.a_id(2, 2)] = 1
    exps[registry.b_id("t1", 1, 3)] = 1
    exps[registry.b_id("t1", 2, 8)] = 1
    k_monomial = Monomial(exps)
    support = set(
        det_bareiss(build_edmonds_unsigned(net, "t1", registry, GF2)).support()
    )
    assert k_monomial in support

    # Path systems and determinants name the same monomials everywhere,
    # and in characteristic 2 they agree coefficient for coefficient.
    for name in FIXTURES:
        net = load_fixture(name)
        registry = VariableRegistry(net)
        for t in net.sinks:
            oracle = support_via_paths(net, t, registry)
            for spec in (GF2, GF3):
                n_matrix = build_edmonds_unsigned(net, t, registry, spec)
                assert set(det_bareiss(n_matrix).support()) == oracle
            signed = det_bareiss(build_edmonds(net, t, registry, GF2))
            assert signed.canonical() == MultiPoly(
                GF2, {m: 1 for m in oracle}
            ).canonical()


@pytest.mark.xfail(
    strict=True,
    reason="unattainable: the bottleneck's one disjoint-path routing "
    "carries two mix labelings times two decode labelings, so the "
    "support has 4 monomials, not 2",
)
def test_criterion_4_butterfly_support_size_claim():
    net = load_fixture("butterfly")
    registry = VariableRegistry(net)
    det = det_bareiss(build_edmonds_unsigned(net, "t1", registry, GF2))
    assert len(set(det.support())) == 2


def test_criterion_5_independent_oracles_agree():
    # Two determinant algorithms on every fixture matrix, both builders.
    for name in FIXTURES:
        net = load_fixture(name)
        registry = VariableRegistry(net)
        for t in net.sinks:
            for build in (build_edmonds, build_edmonds_unsigned):
                m = build(net, t, registry, GF3)
                assert det_bareiss(m) == det_laplace(m)

    # And on 200 random sparse symbolic matrices up to 7x7.
    for spec in (GF2, GF3):
        rng = random.Random(1549 + spec.order)
        for _ in range(100):
            n = rng.randint(1, 7)
            entries = {}
            next_var = 0
            for r in range(n):
                for c in range(n):
                    roll = rng.random()
                    if roll < 0.55:
                        continue
                    if roll < 0.8:
                        entries[(r, c)] = MultiPoly.const(spec, 1)
                    else:
                        entries[(r, c)] = MultiPoly.variable(spec, next_var)
                        next_var += 1
            m = SymbolicMatrix(spec, n, n, entries)
            assert det_bareiss(m) == det_laplace(m)

    # Polynomial-side counts equal rank-oracle counts (checked internally
    # on every call; the values are pinned on top).
    expected = {
        ("butterfly", 2): Fraction(1, 4),
        ("butterfly", 3): Fraction(4, 9),
        ("butterfly", 4): Fraction(9, 16),
        ("example1", 2): Fraction(9, 128),
    }
    for (name, q), value in expected.items():
        net, registry, fixing = setup(name)
        spec = field(2, 2) if q == 4 else field(q)
        res = exact_probability(net, registry, fixing, spec)
        assert res.value == value
        assert res.trials == q**fixing.mu


def test_criterion_6_bound_chain():
    heavy_cap = 1 << 24 if kernel.BACKEND == "compiled" else 1 << 16
    for name in FIXTURES:
        for q, k in ((4, 2), (8, 3), (16, 4)):
            spec = field(2, k)
            net, registry, fixing, p_hat = reduced(name, spec)
            if name == "example1":
                order = order_ex1(net, registry)
            elif name == "example2":
                order = order_ex2(net, registry)
            else:
                order = MonomialOrder("lex", fixing.random_vars)
            lm = bound_lm(p_hat, q, fixing.random_vars, order)
            smin = bound_support_min(p_hat, q, fixing.random_vars)
            ho = ho_bound(net, registry, fixing, q)
            exact = exact_by_factoring(net, registry, fixing, spec)
            if spec.order**fixing.mu <= heavy_cap:
                enumerated = exact_probability(net, registry, fixing, spec)
                assert enumerated.value == exact
            assert ho <= smin <= lm <= exact


def test_criterion_7_zero_structure_properties():
    checked = 0
    for q in (2, 3, 4):
        spec = field(2, 2) if q == 4 else field(q)
        rng = random.Random(7000 + q)
        for _ in range(200):
            nvars = rng.randint(1, 4)
            terms = {}
            for _ in range(rng.randint(0, 5)):
                m = Monomial({v: rng.randint(0, 3) for v in range(nvars)})
                terms[m] = rng.randrange(1, q)
            f = MultiPoly(spec, terms)
            zeros = 0
            for point in itertools.product(range(q), repeat=nvars):
                assignment = {
                    v: spec.element(c) for v, c in enumerate(point)
                }
                if p_eval(f, assignment).code == 0:
                    zeros += 1
            space = q**nvars
            assert has_nonzero_point(f, q) == (zeros < space)
            assert count_nonzero_points(f, tuple(range(nvars))) == space - zeros
            if zeros < space:
                for kind in ("lex", "grlex", "grevlex"):
                    order = MonomialOrder(kind, tuple(range(nvars)))
                    assert zeros <= zero_count_bound(f, q, order)
            checked += 1
    assert checked >= 500


def test_criterion_8_minimum_fields():
    for name in FIXTURES:
        net = load_fixture(name)
        registry = VariableRegistry(net)
        start = time.monotonic()
        result = min_field_size(net, 2)
        assert time.monotonic() - start < 60.0
        assert result.q == 2
        scheme = find_coding_scheme(net, result.q)
        coding = {v: scheme[v].code for v in registry.af_ids()}
        for t in net.sinks:
            assert transfer_rank_decodable(net, registry, coding, GF2, t)


def test_criterion_9_monte_carlo(capsys):
    net, registry, fixing = setup("butterfly")
    first = monte_carlo(net, registry, fixing, GF4, trials=100_000, seed=711)
    second = monte_carlo(net, registry, fixing, GF4, trials=100_000, seed=711)
    assert first == second
    assert first.stderr is not None and first.stderr > 0
    assert abs(first.estimate - Fraction(9, 16)) <= 3 * first.stderr

    args = [
        "simulate", "butterfly", "--q", "4",
        "--trials", "2000", "--seed", "711", "--json",
    ]
    assert main(args) == 0
    report_a = capsys.readouterr().out
    assert main(args) == 0
    report_b = capsys.readouterr().out
    assert report_a == report_b
    assert json.loads(report_a)["seed"] == 711
