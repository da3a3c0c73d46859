"""Field-size ladder and explicit scheme construction.

The combination network used throughout has four relay nodes and one sink
per relay pair.  Classic projective-line counting says it needs q + 1 >= 4,
so the minimum order is 4 in characteristic 2 and 3 in characteristic 3,
which makes it the one network here whose ladder takes more than one step.
"""

from __future__ import annotations

import itertools

import pytest

import nckit._kernel as kernel
from nckit.errors import (
    InfeasibleAtFieldError,
    InfeasibleNetworkError,
    NckitError,
    TooLargeError,
)
from nckit.fieldsize import (
    FieldSizeResult,
    _floor_log,
    find_coding_scheme,
    min_field_size,
)
from nckit.gf import field
from nckit.network import VariableRegistry, load_fixture, parse_network
from nckit.prob import (
    all_random_fixing,
    default_fixing,
    exact_probability,
    make_fixing,
)

GF2 = field(2)
GF3 = field(3)
GF4 = field(2, 2)

CHAIN = parse_network(
    "net chain\nsymbols 1\nedge 1 s m\nedge 2 m t\nsource s 1\nsink t"
)

THIN = parse_network(
    "net thin\nsymbols 2\nedge 1 s m\nedge 2 m t\nsource s 1,2\nsink t"
)


def combination_4_2():
    lines = ["net b42", "symbols 2"]
    eid = 0
    for i in range(1, 5):
        eid += 1
        lines.append(f"edge {eid} s r{i}")
    pairs = list(itertools.combinations(range(1, 5), 2))
    for i, j in pairs:
        for rel in (i, j):
            eid += 1
            lines.append(f"edge {eid} r{rel} t{i}{j}")
    lines.append("source s 1,2")
    for i, j in pairs:
        lines.append(f"sink t{i}{j}")
    return parse_network("\n".join(lines))


def replay_fixing(registry, scheme):
    """Pin every coding coefficient to its scheme value."""
    fixed_a, fixed_f = {}, {}
    for vid in registry.af_ids():
        kind, i, j = registry.key_of(vid)
        (fixed_a if kind == "a" else fixed_f)[(i, j)] = scheme[vid].code
    return make_fixing(registry, fixed_a, fixed_f)


class TestMinFieldSize:
    def test_butterfly_char2(self):
        res = min_field_size(load_fixture("butterfly"), 2)
        assert res.q == 2
        assert res.trials == ((2, True),)
        assert not res.extra_trial

    @pytest.mark.parametrize("name", ["example1", "example2"])
    def test_bundled_fixtures_char2(self, name):
        res = min_field_size(load_fixture(name), 2)
        assert res.q == 2
        assert res.trials == ((2, True),)

    def test_chain_char3(self):
        res = min_field_size(CHAIN, 3)
        assert res.q == 3
        assert res.trials == ((3, True),)
        # One sink, so the nominal ladder is empty and the extra rung wins.
        assert res.extra_trial

    @pytest.mark.parametrize(
        ("name", "p", "extra"),
        [
            ("butterfly", 3, True),
            ("butterfly", 5, True),
            ("example1", 3, True),
            ("example2", 3, False),
            ("example2", 5, True),
        ],
    )
    def test_odd_characteristics(self, name, p, extra):
        res = min_field_size(load_fixture(name), p)
        assert res.q == p
        assert res.extra_trial is extra

    def test_combination_char2_needs_two_rungs(self):
        res = min_field_size(combination_4_2(), 2)
        assert res.q == 4
        assert res.trials == ((2, False), (4, True))
        assert not res.extra_trial

    @pytest.mark.parametrize("p", [3, 5])
    def test_combination_odd_char_first_rung(self, p):
        res = min_field_size(combination_4_2(), p)
        assert res.q == p
        assert res.trials == ((p, True),)

    def test_one_feasible_trial_and_its_last(self):
        cases = [
            (load_fixture("butterfly"), 2),
            (load_fixture("example2"), 3),
            (combination_4_2(), 2),
            (combination_4_2(), 3),
            (CHAIN, 3),
        ]
        for net, p in cases:
            res = min_field_size(net, p)
            assert all(not ok for _, ok in res.trials[:-1])
            assert res.trials[-1] == (res.q, True)
            assert len(res.trials) <= _floor_log(p, len(net.sinks)) + 1

    def test_certificate_is_a_folded_witness(self):
        net = load_fixture("butterfly")
        registry = VariableRegistry(net)
        res = min_field_size(net, 2)
        mono, coeff = res.certificate
        assert coeff == 1
        known = set(registry.af_ids()) | set(registry.b_ids())
        assert {v for v, _ in mono.exps} <= known
        # Folding at q = 2 leaves nothing above degree one.
        assert all(e == 1 for _, e in mono.exps)

    @pytest.mark.parametrize("p", [2, 3])
    def test_winner_admits_a_scheme(self, p):
        net = combination_4_2()
        res = min_field_size(net, p)
        scheme = find_coding_scheme(net, res.q)
        registry = VariableRegistry(net)
        assert len(scheme) == len(registry.af_ids()) + len(registry.b_ids())

    def test_deficient_sink_rejected(self):
        with pytest.raises(InfeasibleNetworkError, match="min-cut 1"):
            min_field_size(THIN, 2)

    def test_term_cap_trips(self):
        with pytest.raises(TooLargeError, match="cap 3"):
            min_field_size(load_fixture("example1"), 2, max_terms=3)

    def test_result_is_frozen(self):
        res = min_field_size(CHAIN, 2)
        assert isinstance(res, FieldSizeResult)
        with pytest.raises(AttributeError):
            res.q = 5


class TestFindCodingScheme:
    def test_chain_unit_scheme(self):
        registry = VariableRegistry(CHAIN)
        scheme = find_coding_scheme(CHAIN, 2)
        named = {registry.name_of(v): e.code for v, e in scheme.items()}
        assert named == {"a[1,1]": 1, "f[1,2]": 1, "b[t:1,2]": 1}

    def test_covers_every_registered_variable(self):
        net = load_fixture("butterfly")
        registry = VariableRegistry(net)
        scheme = find_coding_scheme(net, 2)
        assert set(scheme) == set(registry.af_ids()) | set(registry.b_ids())
        assert all(e.spec.order == 2 for e in scheme.values())

    def test_butterfly_scheme_survives_replay(self):
        # Pinning the returned coefficients must force certain success.
        net = load_fixture("butterfly")
        registry = VariableRegistry(net)
        scheme = find_coding_scheme(net, 2)
        fixing = replay_fixing(registry, scheme)
        assert fixing.mu == 0
        assert exact_probability(net, registry, fixing, GF2).value == 1

    def test_combination_gf4_scheme_survives_replay(self):
        net = combination_4_2()
        registry = VariableRegistry(net)
        scheme = find_coding_scheme(net, 4)
        fixing = replay_fixing(registry, scheme)
        assert exact_probability(net, registry, fixing, GF4).value == 1

    def test_extension_field_elements(self):
        scheme = find_coding_scheme(CHAIN, 9)
        assert all(e.spec.order == 9 for e in scheme.values())

    def test_combination_gf2_infeasible(self):
        with pytest.raises(InfeasibleAtFieldError, match=r"GF\(2\)"):
            find_coding_scheme(combination_4_2(), 2)

    @pytest.mark.parametrize("q", [0, 1, 6, 12])
    def test_rejects_non_prime_powers(self, q):
        with pytest.raises(NckitError, match="prime power|at least 2"):
            find_coding_scheme(CHAIN, q)

    def test_deficient_sink_rejected(self):
        with pytest.raises(InfeasibleNetworkError, match="min-cut 1"):
            find_coding_scheme(THIN, 4)


class TestVerdictsAgainstEnumeration:
    """Cross-check ladder verdicts with brute-force success counting."""

    @pytest.mark.parametrize("name", ["butterfly", "example1", "example2"])
    def test_char2_feasibility_backed_by_counts(self, name):
        net = load_fixture(name)
        registry = VariableRegistry(net)
        fixing = default_fixing(net, registry)
        assert exact_probability(net, registry, fixing, GF2).value > 0
        assert min_field_size(net, 2).q == 2

    def test_combination_char3_backed_by_counts(self):
        net = combination_4_2()
        registry = VariableRegistry(net)
        fixing = default_fixing(net, registry)
        assert exact_probability(net, registry, fixing, GF3).value > 0
        assert min_field_size(net, 3).q == 3

    @pytest.mark.skipif(
        kernel.BACKEND != "compiled",
        reason="the 2**20-point sweep is desk-scale only with the compiled kernel",
    )
    def test_combination_gf2_exhaustively_infeasible(self):
        # Every coefficient free: a zero count over all 2**20 assignments
        # confirms the ladder's first rung the hard way.
        net = combination_4_2()
        registry = VariableRegistry(net)
        res = exact_probability(net, registry, all_random_fixing(registry), GF2)
        assert res.trials == 2**20
        assert res.value == 0
