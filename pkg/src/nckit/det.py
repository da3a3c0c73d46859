"""Exact symbolic determinants and the edge-disjoint-path support oracle.

Determinant bugs are the dominant risk in this package, so two independent
algorithms are provided and cross-checked: fraction-free elimination
(`det_bareiss`, divisions exact in the polynomial ring) and memoized
cofactor expansion (`det_laplace`).  A third, structural view comes from
`support_via_paths`: the support of a sink's Edmonds determinant is in
bijection with the labeled systems of h edge-disjoint source-to-sink paths
(labeled by which symbol each path mixes in and which it decodes as), which
lets golden values be derived without trusting either determinant code path.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .errors import InternalCheckError, NetworkValidationError
from .network import Network, SymbolicMatrix, VariableRegistry
from .poly import Monomial, MultiPoly, divide_exact

_LAPLACE_CACHE_CAP = 1 << 20


def _require_square(m: SymbolicMatrix) -> int:
    if m.rows != m.cols:
        raise NetworkValidationError(f"determinant needs a square matrix, got {m.rows}x{m.cols}")
    return m.rows


def det_bareiss(m: SymbolicMatrix) -> MultiPoly:
    """Determinant by fraction-free elimination with full pivoting.

    Every interior division is by the previous pivot and provably exact;
    pivots are chosen to keep the trailing submatrix sparse (constants
    first, then a Markowitz fill estimate), with swaps tracked in the sign.
    """
    n = _require_square(m)
    spec = m.spec
    zero = MultiPoly.zero(spec)
    a = [[m.entry(r, c) or zero for c in range(n)] for r in range(n)]
    sign = 1
    prev = MultiPoly.const(spec, 1)

    for k in range(n - 1):
        row_nnz = [sum(1 for j in range(k, n) if not a[i][j].is_zero) for i in range(n)]
        col_nnz = [sum(1 for i in range(k, n) if not a[i][j].is_zero) for j in range(n)]
        best = None
        pivot = None
        for i in range(k, n):
            for j in range(k, n):
                p = a[i][j]
                if p.is_zero:
                    continue
                score = (
                    0 if p.is_constant else 1,
                    (row_nnz[i] - 1) * (col_nnz[j] - 1),
                    len(p),
                )
                if best is None or score < best:
                    best = score
                    pivot = (i, j)
        if pivot is None:
            return zero
        pi, pj = pivot
        if pi != k:
            a[k], a[pi] = a[pi], a[k]
            sign = -sign
        if pj != k:
            for row in a:
                row[k], row[pj] = row[pj], row[k]
            sign = -sign

        lead = a[k][k]
        for i in range(k + 1, n):
            low = a[i][k]
            for j in range(k + 1, n):
                num = lead * a[i][j] - low * a[k][j]
                a[i][j] = divide_exact(num, prev) if not num.is_zero else zero
            a[i][k] = zero
        prev = lead

    result = a[n - 1][n - 1]
    return -result if sign < 0 else result


def det_laplace(m: SymbolicMatrix) -> MultiPoly:
    """Determinant by cofactor expansion, memoized on the open-column mask.

    Rows are consumed in a fixed sparsity-sorted order, so the set of used
    rows is implied by the mask and one dict suffices; the cache stops
    growing past 2^20 masks to bound memory on adversarial inputs.
    """
    n = _require_square(m)
    spec = m.spec
    zero = MultiPoly.zero(spec)
    one = MultiPoly.const(spec, 1)

    per_row: list[list[tuple[int, MultiPoly]]] = [[] for _ in range(n)]
    for (r, c), p in sorted(m.entries.items()):
        per_row[r].append((c, p))
    order = sorted(range(n), key=lambda r: len(per_row[r]))
    # parity of the row reordering
    inversions = sum(
        1 for x in range(n) for y in range(x + 1, n) if order[x] > order[y]
    )
    rows = [per_row[r] for r in order]

    memo: dict[int, MultiPoly] = {}

    def expand(mask: int) -> MultiPoly:
        if mask == 0:
            return one
        cached = memo.get(mask)
        if cached is not None:
            return cached
        row = rows[n - mask.bit_count()]
        total = zero
        for c, p in row:
            if not mask >> c & 1:
                continue
            sub = expand(mask ^ (1 << c))
            if sub.is_zero:
                continue
            term = p * sub
            if (mask & ((1 << c) - 1)).bit_count() % 2:
                term = -term
            total = total + term
        if len(memo) < _LAPLACE_CACHE_CAP:
            memo[mask] = total
        return total

    det = expand((1 << n) - 1)
    return -det if inversions % 2 else det


@dataclass(frozen=True, slots=True)
class PathSystem:
    """h edge-disjoint paths into one sink, each path doubly labeled.

    ``paths[u-1] = (u, edge ids, w)``: path u mixes symbol u onto its first
    edge (which must leave symbol u's origin) and is decoded as symbol w at
    the sink.  The mix labels run 1..h in order; the decode labels are a
    permutation of 1..h.  The two labelings are independent: which symbol a
    sink reads off a path is a decoding choice, not a routing one, and the
    determinant support distinguishes every combination.
    """

    sink: str
    paths: tuple[tuple[int, tuple[int, ...], int], ...]

    def check(self, net: Network) -> None:
        if [u for u, _, _ in self.paths] != list(range(1, net.h + 1)):
            raise InternalCheckError("path system must mix symbols 1..h in order")
        if sorted(w for _, _, w in self.paths) != list(range(1, net.h + 1)):
            raise InternalCheckError("decode labels must permute 1..h")
        used: set[int] = set()
        for u, edges, _ in self.paths:
            if not edges:
                raise InternalCheckError(f"symbol {u} has an empty path")
            if net.edge(edges[0]).tail != net.symbol_origin[u]:
                raise InternalCheckError(f"symbol {u} does not start at its origin")
            if net.edge(edges[-1]).head != self.sink:
                raise InternalCheckError(f"symbol {u} does not end at {self.sink}")
            for x, y in zip(edges, edges[1:]):
                if net.edge(x).head != net.edge(y).tail:
                    raise InternalCheckError(f"edges {x} -> {y} are not adjacent")
            if used & set(edges):
                raise InternalCheckError("paths share an edge")
            used.update(edges)


def enumerate_path_systems(net: Network, t: str) -> list[PathSystem]:
    """All labeled edge-disjoint path systems into sink t, in canonical order.

    Depth-first over mix symbols 1..h, extending each path edge-by-edge in
    ascending id order, then every decode permutation per path tuple; the
    output is lexicographic on (edge lists, decode labels).  Empty when
    fewer than h disjoint paths exist.
    """
    if t not in net.sinks:
        raise NetworkValidationError(f"{t} is not a sink of {net.name}")
    h = net.h
    systems: list[PathSystem] = []
    chosen: list[tuple[int, ...]] = []
    used: set[int] = set()

    def extend(symbol: int, node: str, prefix: list[int]) -> None:
        for e in net.out_edges(node):
            if e.id in used:
                continue
            prefix.append(e.id)
            used.add(e.id)
            if e.head == t:
                chosen.append(tuple(prefix))
                assign(symbol + 1)
                chosen.pop()
            else:
                extend(symbol, e.head, prefix)
            used.discard(e.id)
            prefix.pop()

    def assign(symbol: int) -> None:
        if symbol > h:
            for decode in permutations(range(1, h + 1)):
                paths = tuple(
                    (u + 1, edges, w) for u, (edges, w) in enumerate(zip(chosen, decode))
                )
                systems.append(PathSystem(t, paths))
            return
        extend(symbol, net.symbol_origin[symbol], [])

    assign(1)
    for ps in systems:
        ps.check(net)
    return systems


def path_system_to_monomial(ps: PathSystem, registry: VariableRegistry) -> Monomial:
    """The determinant monomial a mixing/forwarding/decoding walk contributes.

    For each path: one a-coefficient at the first edge, an f-coefficient per
    consecutive edge pair, and one b-coefficient at the final hop into the
    sink.  Edge-disjointness makes the result multilinear.
    """
    exps: dict[int, int] = {}
    try:
        for u, edges, w in ps.paths:
            exps[registry.a_id(u, edges[0])] = 1
            for x, y in zip(edges, edges[1:]):
                exps[registry.f_id(x, y)] = 1
            exps[registry.b_id(ps.sink, w, edges[-1])] = 1
    except KeyError as miss:
        raise InternalCheckError(f"path uses unregistered coefficient {miss}") from None
    return Monomial(exps)


def support_via_paths(net: Network, t: str, registry: VariableRegistry) -> set[Monomial]:
    """Determinant support of sink t derived purely from path systems."""
    systems = enumerate_path_systems(net, t)
    monomials = [path_system_to_monomial(ps, registry) for ps in systems]
    support = set(monomials)
    if len(support) != len(monomials):
        raise InternalCheckError(
            f"distinct path systems for {t} produced a repeated monomial"
        )
    return support
