"""Acyclic multicast networks: topology, coefficient catalog, Edmonds matrices.

A network is a directed acyclic multigraph with numbered edges, ``h``
source symbols anchored at origin nodes, and one or more sink nodes.
Linear coding attaches three coefficient families:

* ``a[i,j]``   mixes symbol i onto edge j leaving the symbol's origin,
* ``f[i,j]``   forwards data from edge i onto a downstream edge j,
* ``b[t:i,j]`` combines sink t's incoming edge j while recovering symbol i.

`VariableRegistry` assigns each coefficient a dense integer id so the
polynomial layer never needs to know what its variables mean.  The Edmonds
matrix of a sink couples all three families; the sink can decode exactly
when the determinant does not vanish, which is what everything downstream
(feasibility, field size, success probability) is computed from.

Network documents are line-oriented text (see `parse_network`); the bundled
fixtures live in ``nckit.fixtures`` and are loaded with `load_fixture`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from importlib import resources
from typing import Iterator, Mapping

from .errors import FixtureFormatError, InternalCheckError, NetworkValidationError
from .gf import FieldSpec
from .poly import Monomial, MultiPoly

VariableId = int

# Registry keys: ("a", symbol, edge), ("f", edge, edge), ("b", sink, symbol, edge).
VariableKey = tuple


@dataclass(frozen=True, slots=True)
class Edge:
    id: int
    tail: str
    head: str


class Network:
    """Validated acyclic multigraph with symbol origins and sinks.

    Construction fails loudly: non-contiguous edge ids, self-loops, unknown
    nodes, uncovered symbols, or a cycle all raise with a message naming the
    offender.  Instances are immutable; adjacency and a topological node
    order are precomputed.
    """

    __slots__ = (
        "name",
        "nodes",
        "edges",
        "h",
        "symbol_origin",
        "sinks",
        "fixes",
        "aliases",
        "_in",
        "_out",
        "_node_pos",
        "_topo",
    )

    def __init__(
        self,
        name: str,
        edges: tuple[Edge, ...],
        h: int,
        symbol_origin: Mapping[int, str],
        sinks: tuple[str, ...],
        *,
        nodes: tuple[str, ...] = (),
        fixes: tuple[tuple, ...] = (),
        aliases: Mapping[str, VariableKey] | None = None,
    ):
        if h < 1:
            raise NetworkValidationError("need at least one source symbol")
        if not edges:
            raise NetworkValidationError("network has no edges")

        seen_ids: set[int] = set()
        for e in edges:
            if e.id in seen_ids:
                raise NetworkValidationError(f"duplicate edge id {e.id}")
            seen_ids.add(e.id)
            if e.tail == e.head:
                raise NetworkValidationError(f"edge {e.id} is a self-loop at {e.tail}")
        missing = set(range(1, len(edges) + 1)) - seen_ids
        if missing:
            raise NetworkValidationError(
                f"edge ids must be 1..{len(edges)} with no gaps; missing {sorted(missing)}"
            )

        # First-mention order: explicit list, then edge endpoints.
        order: list[str] = []
        known: set[str] = set()
        for v in (*nodes, *(x for e in edges for x in (e.tail, e.head))):
            if v not in known:
                known.add(v)
                order.append(v)

        if sorted(symbol_origin) != list(range(1, h + 1)):
            raise NetworkValidationError(
                f"symbols must be assigned origins as exactly 1..{h}"
            )
        for i, v in symbol_origin.items():
            if v not in known:
                raise NetworkValidationError(f"origin {v} of symbol {i} is not a node")
        if not sinks:
            raise NetworkValidationError("network has no sinks")
        if len(set(sinks)) != len(sinks):
            raise NetworkValidationError("duplicate sink")
        origin_nodes = set(symbol_origin.values())
        for t in sinks:
            if t not in known:
                raise NetworkValidationError(f"sink {t} is not a node")
            if t in origin_nodes:
                raise NetworkValidationError(f"sink {t} is an origin of a symbol")

        self.name = name
        self.nodes = tuple(order)
        self.edges = tuple(sorted(edges, key=lambda e: e.id))
        self.h = h
        self.symbol_origin = dict(symbol_origin)
        self.sinks = tuple(sinks)
        self.fixes = tuple(fixes)
        self.aliases = dict(aliases or {})
        self._node_pos = {v: i for i, v in enumerate(self.nodes)}

        ins: dict[str, list[Edge]] = {v: [] for v in self.nodes}
        outs: dict[str, list[Edge]] = {v: [] for v in self.nodes}
        for e in self.edges:
            outs[e.tail].append(e)
            ins[e.head].append(e)
        self._in = {v: tuple(es) for v, es in ins.items()}
        self._out = {v: tuple(es) for v, es in outs.items()}

        for i in sorted(symbol_origin):
            if not self._out[symbol_origin[i]]:
                raise NetworkValidationError(
                    f"origin {symbol_origin[i]} of symbol {i} has no outgoing edge"
                )

        self._topo = self._toposort()

    def _toposort(self) -> tuple[str, ...]:
        indeg = {v: len(self._in[v]) for v in self.nodes}
        ready = sorted((v for v in self.nodes if indeg[v] == 0), key=self._node_pos.get)
        out: list[str] = []
        queue = deque(ready)
        while queue:
            v = queue.popleft()
            out.append(v)
            for e in self._out[v]:
                indeg[e.head] -= 1
                if indeg[e.head] == 0:
                    queue.append(e.head)
        if len(out) == len(self.nodes):
            return tuple(out)
        raise NetworkValidationError("cycle detected: " + " -> ".join(self._find_cycle()))

    def _find_cycle(self) -> list[str]:
        # Only called once acyclicity has failed; DFS with a gray set.
        state: dict[str, int] = {}  # 1 = on stack, 2 = done
        stack: list[str] = []

        def walk(v: str) -> list[str] | None:
            state[v] = 1
            stack.append(v)
            for e in self._out[v]:
                w = e.head
                if state.get(w) == 1:
                    return stack[stack.index(w) :] + [w]
                if w not in state:
                    found = walk(w)
                    if found:
                        return found
            state[v] = 2
            stack.pop()
            return None

        for v in self.nodes:
            if v not in state:
                found = walk(v)
                if found:
                    return found
        raise InternalCheckError("no cycle found in a graph that failed toposort")

    # -- queries --------------------------------------------------------

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge(self, eid: int) -> Edge:
        return self.edges[eid - 1]

    def in_edges(self, node: str) -> tuple[Edge, ...]:
        return self._in[node]

    def out_edges(self, node: str) -> tuple[Edge, ...]:
        return self._out[node]

    def topological_nodes(self) -> tuple[str, ...]:
        return self._topo

    def topological_edges(self) -> tuple[Edge, ...]:
        """Edges ordered so that every edge follows all edges into its tail."""
        pos = {v: i for i, v in enumerate(self._topo)}
        return tuple(sorted(self.edges, key=lambda e: (pos[e.tail], e.id)))

    def __repr__(self) -> str:
        return (
            f"Network({self.name!r}, |V|={len(self.nodes)}, |E|={self.num_edges}, "
            f"h={self.h}, sinks={list(self.sinks)})"
        )


class VariableRegistry:
    """Dense ids for the a/f/b coefficient catalog of one network.

    Registration order is deterministic: a-coefficients by (symbol, edge),
    then f-coefficients by (edge, edge), then b-coefficients by sink in
    declaration order.  Everything downstream that says "registry order"
    means the id order produced here.
    """

    __slots__ = ("_ids", "_keys")

    def __init__(self, net: Network):
        keys: list[VariableKey] = []
        for i in sorted(net.symbol_origin):
            for e in net.out_edges(net.symbol_origin[i]):
                keys.append(("a", i, e.id))
        for e in net.edges:
            for g in net.out_edges(e.head):
                keys.append(("f", e.id, g.id))
        for t in net.sinks:
            for i in range(1, net.h + 1):
                for e in net.in_edges(t):
                    keys.append(("b", t, i, e.id))
        self._keys = tuple(keys)
        self._ids = {key: vid for vid, key in enumerate(keys)}

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, key: VariableKey) -> bool:
        return key in self._ids

    def id_of(self, key: VariableKey) -> VariableId:
        return self._ids[key]

    def a_id(self, i: int, j: int) -> VariableId:
        return self._ids[("a", i, j)]

    def f_id(self, i: int, j: int) -> VariableId:
        return self._ids[("f", i, j)]

    def b_id(self, t: str, i: int, j: int) -> VariableId:
        return self._ids[("b", t, i, j)]

    def key_of(self, vid: VariableId) -> VariableKey:
        return self._keys[vid]

    def name_of(self, vid: VariableId) -> str:
        key = self._keys[vid]
        if key[0] == "b":
            return f"b[{key[1]}:{key[2]},{key[3]}]"
        return f"{key[0]}[{key[1]},{key[2]}]"

    def items(self, kind: str | None = None) -> Iterator[tuple[VariableKey, VariableId]]:
        for vid, key in enumerate(self._keys):
            if kind is None or key[0] == kind:
                yield key, vid

    def af_ids(self) -> tuple[VariableId, ...]:
        """The a- and f-variable ids in registry order (b-variables excluded)."""
        return tuple(vid for key, vid in self.items() if key[0] != "b")

    def b_ids(self, t: str | None = None) -> tuple[VariableId, ...]:
        return tuple(
            vid for key, vid in self.items("b") if t is None or key[1] == t
        )


class SymbolicMatrix:
    """Sparse matrix of polynomials; absent entries are zero."""

    __slots__ = ("spec", "rows", "cols", "entries")

    def __init__(
        self,
        spec: FieldSpec,
        rows: int,
        cols: int,
        entries: Mapping[tuple[int, int], MultiPoly],
    ):
        for (r, c), p in entries.items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise NetworkValidationError(f"entry ({r},{c}) outside {rows}x{cols}")
            if p.is_zero:
                raise NetworkValidationError(f"stored zero entry at ({r},{c})")
        self.spec = spec
        self.rows = rows
        self.cols = cols
        self.entries = dict(entries)

    def entry(self, r: int, c: int) -> MultiPoly | None:
        return self.entries.get((r, c))

    def __repr__(self) -> str:
        return f"SymbolicMatrix({self.rows}x{self.cols}, {len(self.entries)} entries)"


def _require_sink(net: Network, t: str) -> None:
    if t not in net.sinks:
        raise NetworkValidationError(f"{t} is not a sink of {net.name}")


def build_edmonds(
    net: Network, t: str, registry: VariableRegistry, spec: FieldSpec
) -> SymbolicMatrix:
    """Edmonds matrix of sink t: blocks [[A, 0], [I - F, Bᵀ]].

    Shape is (h + |E|) x (|E| + h).  The signed I - F convention is the
    one determinant feasibility is defined against; over characteristic 2
    it coincides with `build_edmonds_unsigned`.
    """
    _require_sink(net, t)
    m = net.num_edges
    h = net.h
    minus_one = spec.neg_code(1)
    entries: dict[tuple[int, int], MultiPoly] = {}
    for (_, i, j), vid in registry.items("a"):
        entries[(i - 1, j - 1)] = MultiPoly.variable(spec, vid)
    for j in range(1, m + 1):
        entries[(h + j - 1, j - 1)] = MultiPoly.const(spec, 1)
    for (_, i, j), vid in registry.items("f"):
        entries[(h + i - 1, j - 1)] = MultiPoly.term(spec, Monomial({vid: 1}), minus_one)
    for (_, sink, i, j), vid in registry.items("b"):
        if sink == t:
            entries[(h + j - 1, m + i - 1)] = MultiPoly.variable(spec, vid)
    return SymbolicMatrix(spec, h + m, m + h, entries)


def build_edmonds_unsigned(
    net: Network, t: str, registry: VariableRegistry, spec: FieldSpec
) -> SymbolicMatrix:
    """Block-swapped unsigned variant: [[I + F, Bᵀ], [A, 0]].

    Same determinant support as `build_edmonds`, with every f-entry kept
    positive; the per-monomial signs differ outside characteristic 2.  Its
    row r < |E| reads straight off the forwarding structure of edge r+1,
    which makes it the matrix of choice for support inspection.
    """
    _require_sink(net, t)
    m = net.num_edges
    entries: dict[tuple[int, int], MultiPoly] = {}
    for j in range(1, m + 1):
        entries[(j - 1, j - 1)] = MultiPoly.const(spec, 1)
    for (_, i, j), vid in registry.items("f"):
        entries[(i - 1, j - 1)] = MultiPoly.variable(spec, vid)
    for (_, sink, i, j), vid in registry.items("b"):
        if sink == t:
            entries[(j - 1, m + i - 1)] = MultiPoly.variable(spec, vid)
    for (_, i, j), vid in registry.items("a"):
        entries[(m + i - 1, j - 1)] = MultiPoly.variable(spec, vid)
    return SymbolicMatrix(spec, m + net.h, m + net.h, entries)


def min_cut(net: Network, t: str) -> int:
    """Maximum number of edge-disjoint source-to-sink paths into t.

    Unit capacity per edge; a virtual super-source feeds each origin node
    with capacity equal to the number of symbols it originates, so the
    result is capped at h and a value below h means sink t cannot receive
    all symbols no matter the coding.
    """
    _require_sink(net, t)
    names = {v: i + 1 for i, v in enumerate(net.nodes)}  # 0 is the super-source
    n = len(net.nodes) + 1

    to: list[int] = []
    cap: list[int] = []
    adj: list[list[int]] = [[] for _ in range(n)]

    def arc(u: int, v: int, c: int) -> None:
        adj[u].append(len(to))
        to.append(v)
        cap.append(c)
        adj[v].append(len(to))
        to.append(u)
        cap.append(0)

    per_origin: dict[str, int] = {}
    for v in net.symbol_origin.values():
        per_origin[v] = per_origin.get(v, 0) + 1
    for v, c in per_origin.items():
        arc(0, names[v], c)
    for e in net.edges:
        arc(names[e.tail], names[e.head], 1)

    sink = names[t]
    flow = 0
    while True:
        # BFS for a shortest augmenting path in the residual graph.
        prev_arc = [-1] * n
        prev_arc[0] = -2
        queue = deque([0])
        while queue and prev_arc[sink] == -1:
            u = queue.popleft()
            for a in adj[u]:
                if cap[a] > 0 and prev_arc[to[a]] == -1:
                    prev_arc[to[a]] = a
                    queue.append(to[a])
        if prev_arc[sink] == -1:
            return flow
        bottleneck = net.h
        v = sink
        while v != 0:
            a = prev_arc[v]
            bottleneck = min(bottleneck, cap[a])
            v = to[a ^ 1]
        v = sink
        while v != 0:
            a = prev_arc[v]
            cap[a] -= bottleneck
            cap[a ^ 1] += bottleneck
            v = to[a ^ 1]
        flow += bottleneck


# -- document format ---------------------------------------------------------


def _fail(lineno: int, msg: str) -> FixtureFormatError:
    return FixtureFormatError(f"line {lineno}: {msg}")


def _int(lineno: int, token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise _fail(lineno, f"{what} must be an integer, got {token!r}") from None


def parse_network(text: str) -> Network:
    """Parse a network document.

    Line-oriented, ``#`` starts a comment.  Directives::

        net <name>
        symbols <h>
        node <id> [<id> ...]
        edge <edge-id> <tail> <head>
        source <node> <symbol>[,<symbol>...]
        sink <node>
        fix (a|f) <i> <j> <value>
        alias <name> = (a|f) <i> <j>

    Nodes may be implied by edges; `fix` values are field element codes
    interpreted once a field is chosen; aliases give coefficients short
    report names.
    """
    name = "network"
    h: int | None = None
    nodes: list[str] = []
    edges: list[Edge] = []
    symbol_origin: dict[int, str] = {}
    sinks: list[str] = []
    fixes: list[tuple[str, int, int, int]] = []
    aliases: dict[str, VariableKey] = {}
    edge_ids: set[int] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        if kind == "net":
            if len(tok) != 2:
                raise _fail(lineno, "net takes exactly one name")
            name = tok[1]
        elif kind == "symbols":
            if len(tok) != 2:
                raise _fail(lineno, "symbols takes exactly one count")
            h = _int(lineno, tok[1], "symbol count")
            if h < 1:
                raise _fail(lineno, "symbol count must be positive")
        elif kind == "node":
            ids = [x for x in tok[1:] if x != "node"]
            if not ids:
                raise _fail(lineno, "node line lists no nodes")
            nodes.extend(ids)
        elif kind == "edge":
            if len(tok) != 4:
                raise _fail(lineno, "edge takes id, tail, head")
            eid = _int(lineno, tok[1], "edge id")
            if eid in edge_ids:
                raise _fail(lineno, f"duplicate edge id {eid}")
            edge_ids.add(eid)
            edges.append(Edge(eid, tok[2], tok[3]))
        elif kind == "source":
            if len(tok) != 3:
                raise _fail(lineno, "source takes node and symbol list")
            for part in tok[2].split(","):
                i = _int(lineno, part, "symbol index")
                if i in symbol_origin:
                    raise _fail(lineno, f"symbol {i} already has an origin")
                symbol_origin[i] = tok[1]
        elif kind == "sink":
            if len(tok) != 2:
                raise _fail(lineno, "sink takes exactly one node")
            sinks.append(tok[1])
        elif kind == "fix":
            if len(tok) != 5 or tok[1] not in ("a", "f"):
                raise _fail(lineno, "fix takes (a|f), two indices and a value")
            fixes.append(
                (
                    tok[1],
                    _int(lineno, tok[2], "index"),
                    _int(lineno, tok[3], "index"),
                    _int(lineno, tok[4], "value"),
                )
            )
        elif kind == "alias":
            if len(tok) != 6 or tok[2] != "=" or tok[3] not in ("a", "f"):
                raise _fail(lineno, "alias syntax: alias <name> = (a|f) <i> <j>")
            if tok[1] in aliases:
                raise _fail(lineno, f"duplicate alias {tok[1]}")
            aliases[tok[1]] = (
                tok[3],
                _int(lineno, tok[4], "index"),
                _int(lineno, tok[5], "index"),
            )
        else:
            raise _fail(lineno, f"unknown directive {kind!r}")

    if h is None:
        raise FixtureFormatError("missing symbols line")
    if not edges:
        raise FixtureFormatError("document defines no edges")
    missing = set(range(1, len(edges) + 1)) - edge_ids
    if missing:
        raise FixtureFormatError(
            f"edge ids must be 1..{len(edges)}; missing {sorted(missing)}"
        )
    known = set(nodes) | {e.tail for e in edges} | {e.head for e in edges}
    for i, v in symbol_origin.items():
        if v not in known:
            raise FixtureFormatError(f"source line names unknown node {v}")
    for t in sinks:
        if t not in known:
            raise FixtureFormatError(f"sink line names unknown node {t}")
    if sorted(symbol_origin) != list(range(1, h + 1)):
        covered = sorted(symbol_origin)
        raise FixtureFormatError(
            f"source lines must cover symbols 1..{h} exactly; got {covered}"
        )

    return Network(
        name,
        tuple(edges),
        h,
        symbol_origin,
        tuple(sinks),
        nodes=tuple(nodes),
        fixes=tuple(fixes),
        aliases=aliases,
    )


def available_fixtures() -> tuple[str, ...]:
    pkg = resources.files("nckit.fixtures")
    return tuple(
        sorted(p.name[: -len(".nc")] for p in pkg.iterdir() if p.name.endswith(".nc"))
    )


def load_fixture(name: str) -> Network:
    """Load a bundled network document by name ("butterfly" or "butterfly.nc")."""
    fname = name if name.endswith(".nc") else name + ".nc"
    pkg = resources.files("nckit.fixtures")
    candidate = pkg / fname
    if not candidate.is_file():
        raise FixtureFormatError(
            f"no bundled fixture {name!r}; have {', '.join(available_fixtures())}"
        )
    return parse_network(candidate.read_text(encoding="utf-8"))
