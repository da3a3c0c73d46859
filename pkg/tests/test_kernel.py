"""Parity and correctness checks for the enumeration kernel backends.

The two backends must be indistinguishable: same counts, same random draws,
bit for bit.  Programs here are hand-encoded so the kernels are exercised
without going through the builders in `nckit.prob`.
"""

from array import array

import pytest

from nckit._kernel import field_arrays, pure
from nckit.gf import field

ckernel = pytest.importorskip(
    "nckit._kernel._ckernel", reason="compiled kernels not built"
)

BACKENDS = [pure, ckernel]
IDS = [pure.NAME, ckernel.NAME]


def _encode_slots(slots):
    """slots: per slot, a list of (coef_code, [(var_pos, exp), ...]) terms."""
    slot_ptr, term_coef, term_vptr, term_var, term_exp = [0], [], [0], [], []
    for terms in slots:
        for coef, powers in terms:
            term_coef.append(coef)
            for var, e in powers:
                term_var.append(var)
                term_exp.append(e)
            term_vptr.append(len(term_var))
        slot_ptr.append(len(term_coef))
    return tuple(array("q", a) for a in (slot_ptr, term_coef, term_vptr, term_var, term_exp))


def run_slots(impl, spec, mu, slots):
    exp, log, inv, neg = field_arrays(spec)
    return impl.count_nonzero_slots(spec.order, spec.p, spec.k, exp, log, mu, *_encode_slots(slots))


def oracle_slots(spec, mu, slots):
    import itertools

    count = 0
    for x in itertools.product(range(spec.order), repeat=mu):
        for terms in slots:
            acc = 0
            for coef, powers in terms:
                v = coef
                for var, e in powers:
                    v = spec.mul_code(v, spec.pow_code(x[var], e))
                acc = spec.add_code(acc, v)
            if acc:
                count += 1
                break
    return count


def _encode_net(contribs, sinks):
    """contribs: per storage position, a list of (kind, idx, isvar, val)."""
    c_ptr, c_kind, c_idx, c_isvar, c_val = [0], [], [], [], []
    for entries in contribs:
        for kind, idx, isvar, val in entries:
            c_kind.append(kind)
            c_idx.append(idx)
            c_isvar.append(isvar)
            c_val.append(val)
        c_ptr.append(len(c_kind))
    s_ptr, s_edge = [0], []
    for edges in sinks:
        s_edge.extend(edges)
        s_ptr.append(len(s_edge))
    return tuple(
        array("q", a) for a in (c_ptr, c_kind, c_idx, c_isvar, c_val, s_ptr, s_edge)
    )


def run_rank(impl, spec, mu, h, contribs, sinks, mode=0, trials=0, seed=0):
    exp, log, inv, neg = field_arrays(spec)
    return impl.count_rank_success(
        spec.order, spec.p, spec.k, exp, log, inv, neg, mu, h, len(contribs),
        *_encode_net(contribs, sinks), mode, trials, seed,
    )


# One relay mixing two unit-vector edges: x0*e0 + x1*e1 on position 2.
# Rank facts are easy to state by hand.
RELAY = [
    [(0, 0, 0, 1)],
    [(0, 1, 0, 1)],
    [(1, 0, 1, 0), (1, 1, 1, 1)],
]
# Adds a constant-scaled copy of the mix; the coefficient code 2 needs q >= 3.
RELAY_SCALED = RELAY + [[(1, 2, 0, 2)]]


class TestDraw:
    def test_streams_match(self):
        for q in (2, 3, 4, 8, 31):
            for seed in (0, 12345, 2**63 + 11):
                a = [pure.draw(seed, t, s, q) for t in range(20) for s in range(4)]
                b = [ckernel.draw(seed, t, s, q) for t in range(20) for s in range(4)]
                assert a == b

    def test_pinned_values(self):
        got = [pure.draw(12345, t, s, 7) for t in range(4) for s in range(3)]
        assert got == [4, 2, 1, 5, 6, 1, 2, 1, 3, 3, 2, 3]
        assert [pure.draw(0, 0, s, 256) for s in range(6)] == [153, 188, 185, 27, 80, 50]

    def test_mix64_pinned(self):
        for impl in BACKENDS:
            assert impl.mix64(0) == 0
            assert impl.mix64(1) == 6238072747940578789
            assert impl.mix64(2**64 - 1) == 13029008266876403067

    def test_range(self):
        for impl in BACKENDS:
            vals = {impl.draw(7, t, 0, 5) for t in range(200)}
            assert vals == {0, 1, 2, 3, 4}


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
class TestSlotCount:
    def test_two_slots_gf4(self, impl):
        spec = field(2, 2)
        # x0 + x1 in one slot, x0*x1^2 in the other; both vanish only at (0, 0).
        slots = [
            [(1, [(0, 1)]), (1, [(1, 1)])],
            [(1, [(0, 1), (1, 2)])],
        ]
        assert run_slots(impl, spec, 2, slots) == 15
        assert oracle_slots(spec, 2, slots) == 15

    def test_single_root_gf3(self, impl):
        spec = field(3)
        slots = [[(2, [(0, 1)]), (1, [])]]  # 2x + 1, root at x = 1
        assert run_slots(impl, spec, 1, slots) == 2

    def test_cancelling_terms(self, impl):
        spec = field(3)
        slots = [[(1, [(0, 1)]), (2, [(0, 1)])]]  # x + 2x = 0 identically
        assert run_slots(impl, spec, 1, slots) == 0

    def test_constant_slot_mu_zero(self, impl):
        spec = field(5)
        assert run_slots(impl, spec, 0, [[(3, [])]]) == 1
        assert run_slots(impl, spec, 0, [[(0, [])]]) == 0

    def test_high_exponent_folding_input(self, impl):
        # Exponents arrive already folded into 1..q-1 by the caller; q-1 is
        # the largest legal value and must hit the doubled exp table safely.
        spec = field(2, 3)
        slots = [[(1, [(0, 7)])]]  # x^7 = 1 for x != 0 in GF(8)
        assert run_slots(impl, spec, 1, slots) == 7

    @pytest.mark.parametrize("p,k", [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)])
    def test_random_programs_match_oracle(self, impl, p, k):
        import random

        rng = random.Random(1000 * p + k)
        spec = field(p, k)
        for _ in range(12):
            mu = rng.randint(1, 3)
            slots = []
            for _ in range(rng.randint(1, 3)):
                terms = []
                for _ in range(rng.randint(1, 4)):
                    coef = rng.randrange(1, spec.order)
                    nvars = rng.randint(0, mu)
                    powers = [
                        (v, rng.randint(1, spec.order - 1))
                        for v in rng.sample(range(mu), nvars)
                    ]
                    terms.append((coef, powers))
                slots.append(terms)
            assert run_slots(impl, spec, mu, slots) == oracle_slots(spec, mu, slots)


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
class TestRankCount:
    def test_relay_both_sinks(self, impl):
        # Sinks see {e0, mix} and {e1, mix}: both decode iff x0 and x1 != 0.
        for spec in (field(2), field(3), field(2, 2), field(5)):
            q = spec.order
            got = run_rank(impl, spec, 2, 2, RELAY, [[0, 2], [1, 2]])
            assert got == (q - 1) ** 2

    def test_dependent_extra_row(self, impl):
        # Rows (x0,x1), 2*(x0,x1), (1,0): the scaled copy never helps, so
        # rank 2 needs x1 != 0.  Exercises pivot search past zero rows.
        spec = field(3)
        got = run_rank(impl, spec, 2, 2, RELAY_SCALED, [[2, 3, 0]])
        assert got == 3 * 2

    def test_deficient_sink(self, impl):
        spec = field(2, 2)
        assert run_rank(impl, spec, 2, 2, RELAY, [[2]]) == 0

    def test_mu_zero_fixed_net(self, impl):
        spec = field(2)
        fixed = [RELAY[0], RELAY[1], [(1, 0, 0, 1), (1, 1, 0, 1)]]
        assert run_rank(impl, spec, 0, 2, fixed, [[0, 2], [1, 2]]) == 1

    def test_trials_mode_counts(self, impl):
        # Success iff both draws are nonzero; check against the draws directly.
        spec = field(2, 2)
        trials, seed = 300, 99
        want = sum(
            1
            for t in range(trials)
            if pure.draw(seed, t, 0, 4) and pure.draw(seed, t, 1, 4)
        )
        got = run_rank(impl, spec, 2, 2, RELAY, [[0, 2], [1, 2]], mode=1,
                       trials=trials, seed=seed)
        assert got == want

    def test_trials_shard_merge(self, impl):
        # Draws depend only on (seed, trial, slot), so any split of the trial
        # range must sum to the full run's count.
        spec = field(3)
        full = run_rank(impl, spec, 2, 2, RELAY, [[0, 2], [1, 2]], mode=1,
                        trials=200, seed=5)
        per_trial = [
            int(bool(pure.draw(5, t, 0, 3)) and bool(pure.draw(5, t, 1, 3)))
            for t in range(200)
        ]
        assert full == sum(per_trial)
        assert full == sum(per_trial[:77]) + sum(per_trial[77:])


class TestBackendParity:
    def test_exhaustive_counts_equal(self):
        import random

        rng = random.Random(42)
        for spec in (field(2), field(3), field(2, 2), field(2, 3), field(7)):
            for _ in range(6):
                mu = rng.randint(1, 3)
                slots = [
                    [
                        (
                            rng.randrange(1, spec.order),
                            [(v, rng.randint(1, spec.order - 1)) for v in range(mu) if rng.random() < 0.6],
                        )
                        for _ in range(rng.randint(1, 3))
                    ]
                    for _ in range(rng.randint(1, 2))
                ]
                assert run_slots(pure, spec, mu, slots) == run_slots(ckernel, spec, mu, slots)

    def test_rank_counts_equal_both_modes(self):
        for spec in (field(3), field(2, 2), field(3, 2)):
            a = run_rank(pure, spec, 2, 2, RELAY_SCALED, [[0, 2], [1, 2], [2, 3, 0]])
            b = run_rank(ckernel, spec, 2, 2, RELAY_SCALED, [[0, 2], [1, 2], [2, 3, 0]])
            assert a == b
        for spec in (field(2), field(2, 2), field(3, 2)):
            a = run_rank(pure, spec, 2, 2, RELAY, [[0, 2], [1, 2]], mode=1, trials=500, seed=31)
            b = run_rank(ckernel, spec, 2, 2, RELAY, [[0, 2], [1, 2]], mode=1, trials=500, seed=31)
            assert a == b

    def test_backend_selection_reports(self):
        import nckit._kernel as kernel

        assert kernel.BACKEND in ("pure", "compiled")
        assert kernel.count_nonzero_slots in (
            pure.count_nonzero_slots,
            ckernel.count_nonzero_slots,
        )
