"""Pure-Python enumeration kernels.

Reference implementation of the two hot loops: counting points where the
substituted determinant product stays nonzero, and counting points/trials
where every sink's received coding vectors reach full rank.  The compiled
twin in ``_ckernel.pyx`` must be observably identical, including the random
draws, so results never depend on which backend happened to load.

All inputs are flat integer arrays (see the builders in `nckit.prob`):

* field tables: ``exp`` (doubled, so two logs can be added without reducing),
  ``log``, ``inv``, ``neg`` over element codes;
* a slot program: the polynomial grouped by decoding-variable monomial, one
  term list per slot, exponents over the mu random positions;
* a net program: per-edge contribution lists in topological storage order
  (kind 0 feeds a source symbol, kind 1 an upstream edge's vector), then the
  per-sink lists of storage positions whose vectors must span rank h.

Points are enumerated in plain code order; only the count matters.
"""

from __future__ import annotations

NAME = "pure"

_MASK = (1 << 64) - 1
_G1 = 0x9E3779B97F4A7C15
_G2 = 0xBF58476D1CE4E5B9
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def draw(seed: int, trial: int, slot: int, q: int) -> int:
    """Uniform-ish code in 0..q-1, a pure function of (seed, trial, slot).

    Stateless, so any sharding of the trial range reproduces the exact same
    values; the two odd stride constants keep distinct (trial, slot) pairs
    on distinct mix inputs for every realistic mu.
    """
    return mix64(seed + (trial + 1) * _G1 + (slot + 1) * _G2) % q


def _adder(q: int, p: int, k: int):
    if p == 2:
        return lambda a, b: a ^ b
    if k == 1:
        return lambda a, b: (a + b) % p
    def add(a: int, b: int) -> int:
        out = 0
        scale = 1
        while a or b:
            out += (a + b) % p * scale
            a //= p
            b //= p
            scale *= p
        return out
    return add


def count_nonzero_slots(
    q, p, k, exp, log, mu,
    slot_ptr, term_coef, term_vptr, term_var, term_exp,
) -> int:
    add = _adder(q, p, k)
    n = q - 1
    nslots = len(slot_ptr) - 1
    x = [0] * mu
    count = 0
    for _ in range(q**mu):
        for s in range(nslots):
            acc = 0
            for t in range(slot_ptr[s], slot_ptr[s + 1]):
                v = term_coef[t]
                for e in range(term_vptr[t], term_vptr[t + 1]):
                    base = x[term_var[e]]
                    if base == 0:
                        v = 0
                        break
                    v = exp[(log[v] + log[base] * term_exp[e] % n) % n]
                if v:
                    acc = add(acc, v)
            if acc:
                count += 1
                break
        i = 0
        while i < mu:
            x[i] += 1
            if x[i] < q:
                break
            x[i] = 0
            i += 1
    return count


def count_rank_success(
    q, p, k, exp, log, inv, neg, mu, h, n_edges,
    contrib_ptr, contrib_kind, contrib_idx, contrib_isvar, contrib_val,
    sink_ptr, sink_edge,
    mode, trials, seed,
) -> int:
    """Count points (mode 0: all q^mu, mode 1: seeded trials) decodable everywhere."""
    add = _adder(q, p, k)
    nsinks = len(sink_ptr) - 1
    max_rows = max(sink_ptr[i + 1] - sink_ptr[i] for i in range(nsinks))
    vec = [0] * (n_edges * h)
    mat = [0] * (max_rows * h)

    def succeeds(x) -> bool:
        for pos in range(n_edges):
            base = pos * h
            for j in range(h):
                vec[base + j] = 0
            for c in range(contrib_ptr[pos], contrib_ptr[pos + 1]):
                coeff = x[contrib_val[c]] if contrib_isvar[c] else contrib_val[c]
                if coeff == 0:
                    continue
                if contrib_kind[c] == 0:
                    j = base + contrib_idx[c]
                    vec[j] = add(vec[j], coeff)
                else:
                    src = contrib_idx[c] * h
                    lc = log[coeff]
                    for j in range(h):
                        sv = vec[src + j]
                        if sv:
                            vec[base + j] = add(vec[base + j], exp[lc + log[sv]])
        for si in range(nsinks):
            lo = sink_ptr[si]
            rows = sink_ptr[si + 1] - lo
            if rows < h:
                return False
            for r in range(rows):
                src = sink_edge[lo + r] * h
                for j in range(h):
                    mat[r * h + j] = vec[src + j]
            rank = 0
            for col in range(h):
                piv = -1
                for r in range(rank, rows):
                    if mat[r * h + col]:
                        piv = r
                        break
                if piv < 0:
                    return False
                if piv != rank:
                    for j in range(col, h):
                        mat[piv * h + j], mat[rank * h + j] = (
                            mat[rank * h + j],
                            mat[piv * h + j],
                        )
                linv = log[inv[mat[rank * h + col]]]
                for r in range(rank + 1, rows):
                    f = mat[r * h + col]
                    if f == 0:
                        continue
                    lf = (log[f] + linv) % (q - 1)
                    mat[r * h + col] = 0
                    for j in range(col + 1, h):
                        t = mat[rank * h + j]
                        if t:
                            rj = r * h + j
                            mat[rj] = add(mat[rj], neg[exp[lf + log[t]]])
                rank += 1
        return True

    count = 0
    if mode == 0:
        x = [0] * mu
        for _ in range(q**mu):
            if succeeds(x):
                count += 1
            i = 0
            while i < mu:
                x[i] += 1
                if x[i] < q:
                    break
                x[i] = 0
                i += 1
    else:
        for t in range(trials):
            x = [draw(seed, t, v, q) for v in range(mu)]
            if succeeds(x):
                count += 1
    return count
