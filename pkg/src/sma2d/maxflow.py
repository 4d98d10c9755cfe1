"""Deterministic maximum-flow / minimum-cut machinery.

Dinic's algorithm on an arc-list representation.  Everything that touches
ordering (adjacency construction, BFS, the blocking-flow DFS) follows arc
insertion order, so identical inputs produce identical flows, cuts, and
labelings on every run.

Beyond the plain cut, this module exposes the two canonical optimal cuts
(source-minimal and source-maximal) and a closure-based selection step used
to pick, among all optimal cuts, one that agrees with a reference labeling on
as many nodes as possible.
"""

from __future__ import annotations

from collections import deque

INF = float("inf")


class FlowNetwork:
    """Arc-list flow network: arc 2k and its reverse 2k+1 are stored adjacent."""

    def __init__(self, n_nodes: int):
        self.n = n_nodes
        self.adj: list[list[int]] = [[] for _ in range(n_nodes)]
        self.to: list[int] = []
        self.cap: list[float] = []

    def add_arc(self, u: int, v: int, cap: float, rev_cap: float = 0.0) -> int:
        """Add arc u->v with capacity cap and reverse capacity rev_cap."""
        idx = len(self.to)
        self.to.append(v)
        self.cap.append(cap)
        self.adj[u].append(idx)
        self.to.append(u)
        self.cap.append(rev_cap)
        self.adj[v].append(idx + 1)
        return idx

    def _bfs_levels(self, s: int, t: int) -> list[int] | None:
        level = [-1] * self.n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for idx in self.adj[u]:
                v = self.to[idx]
                if self.cap[idx] > 0.0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def _dfs_block(self, s: int, t: int, level: list[int], it: list[int]) -> float:
        """One augmenting path per call, iterative, following arc order."""
        path: list[int] = []
        u = s
        while True:
            if u == t:
                pushed = min(self.cap[idx] for idx in path)
                for idx in path:
                    self.cap[idx] -= pushed
                    self.cap[idx ^ 1] += pushed
                return pushed
            advanced = False
            while it[u] < len(self.adj[u]):
                idx = self.adj[u][it[u]]
                v = self.to[idx]
                if self.cap[idx] > 0.0 and level[v] == level[u] + 1:
                    path.append(idx)
                    u = v
                    advanced = True
                    break
                it[u] += 1
            if not advanced:
                level[u] = -1  # dead end in this phase
                if not path:
                    return 0.0
                idx = path.pop()
                u = self.to[idx ^ 1]
                it[u] += 1

    def max_flow(self, s: int, t: int) -> float:
        total = 0.0
        while True:
            level = self._bfs_levels(s, t)
            if level is None:
                return total
            it = [0] * self.n
            while True:
                pushed = self._dfs_block(s, t, level, it)
                if pushed == 0.0:
                    break
                total += pushed

    def residual_reachable(self, s: int) -> list[bool]:
        """Nodes reachable from s through positive-residual arcs."""
        seen = [False] * self.n
        seen[s] = True
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for idx in self.adj[u]:
                v = self.to[idx]
                if self.cap[idx] > 0.0 and not seen[v]:
                    seen[v] = True
                    queue.append(v)
        return seen

    def residual_coreachable(self, t: int) -> list[bool]:
        """Nodes with a positive-residual path into t."""
        seen = [False] * self.n
        seen[t] = True
        queue = deque([t])
        while queue:
            v = queue.popleft()
            # arc u->v has positive residual iff cap[idx] > 0 where to[idx]==v;
            # scan v's incident arc stubs: stub idx points v->u, its pair
            # idx^1 is the arc u->v whose residual capacity we need.
            for idx in self.adj[v]:
                u = self.to[idx]
                if self.cap[idx ^ 1] > 0.0 and not seen[u]:
                    seen[u] = True
                    queue.append(u)
        return seen


def _condense_sccs(n: int, out_arcs: list[list[int]]) -> tuple[list[int], int, list[tuple[int, int]]]:
    """Kosaraju condensation; returns (component id per node, count, DAG arcs)."""
    order: list[int] = []
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        stack: list[tuple[int, int]] = [(start, 0)]
        seen[start] = True
        while stack:
            u, i = stack.pop()
            if i < len(out_arcs[u]):
                stack.append((u, i + 1))
                v = out_arcs[u][i]
                if not seen[v]:
                    seen[v] = True
                    stack.append((v, 0))
            else:
                order.append(u)

    rev: list[list[int]] = [[] for _ in range(n)]
    for u in range(n):
        for v in out_arcs[u]:
            rev[v].append(u)

    comp = [-1] * n
    n_comp = 0
    for start in reversed(order):
        if comp[start] >= 0:
            continue
        comp[start] = n_comp
        stack2 = [start]
        while stack2:
            u = stack2.pop()
            for v in rev[u]:
                if comp[v] < 0:
                    comp[v] = n_comp
                    stack2.append(v)
        n_comp += 1

    dag = sorted({(comp[u], comp[v]) for u in range(n) for v in out_arcs[u] if comp[u] != comp[v]})
    return comp, n_comp, dag


def max_weight_closure(n: int, weights: list[float], arcs: list[tuple[int, int]]) -> list[bool]:
    """Maximum-weight closed set: u in S and arc (u, v) imply v in S.

    Standard min-cut reduction: source arcs carry positive weights, sink arcs
    the negated negative weights, closure arcs are uncuttable.
    """
    net = FlowNetwork(n + 2)
    s, t = n, n + 1
    for u, w in enumerate(weights):
        if w > 0.0:
            net.add_arc(s, u, w)
        elif w < 0.0:
            net.add_arc(u, t, -w)
    for u, v in arcs:
        net.add_arc(u, v, INF)
    net.max_flow(s, t)
    reach = net.residual_reachable(s)
    return reach[:n]


def solve_binary_submodular(
    unary: list[float],
    edges: list[tuple[int, int]],
    weights: list[float],
    z_prev: list[int],
) -> list[int]:
    """Exact minimizer of sum(u_i z_i) + sum(w_e |z_i - z_j|) over binary z.

    Requires w_e >= 0 (validated by the caller).  Among all minimizers the
    returned one maximizes the number of nodes agreeing with ``z_prev``:
    nodes forced by every optimal cut keep their forced label, and the
    remaining degrees of freedom are resolved by a maximum-weight closure on
    the residual condensation.
    """
    n = len(unary)
    net = FlowNetwork(n + 2)
    s, t = n, n + 1
    for i, u in enumerate(unary):
        if u > 0.0:
            net.add_arc(i, t, u)
        elif u < 0.0:
            net.add_arc(s, i, -u)
    for (i, j), w in zip(edges, weights):
        if w > 0.0:
            net.add_arc(i, j, w, w)
    net.max_flow(s, t)

    reach = net.residual_reachable(s)
    coreach = net.residual_coreachable(t)
    z = [1 if reach[i] else 0 for i in range(n)]

    free = [i for i in range(n) if not reach[i] and not coreach[i]]
    if not free:
        return z

    # Tie-break over the free region: any closed set of the residual graph
    # may take label 1; maximize agreement with z_prev.
    index = {node: k for k, node in enumerate(free)}
    out_arcs: list[list[int]] = [[] for _ in free]
    for u in free:
        for idx in net.adj[u]:
            v = net.to[idx]
            if net.cap[idx] > 0.0 and v in index:
                out_arcs[index[u]].append(index[v])
    comp, n_comp, dag = _condense_sccs(len(free), out_arcs)
    comp_weight = [0.0] * n_comp
    for u in free:
        comp_weight[comp[index[u]]] += 1.0 if z_prev[u] == 1 else -1.0
    chosen = max_weight_closure(n_comp, comp_weight, dag)
    for u in free:
        if chosen[comp[index[u]]]:
            z[u] = 1
    return z
