"""Transportation simplex on dense cost matrices.

The basis is a spanning tree of the bipartite supplier/customer graph held as
a boolean mask; potentials and pivot cycles are found by tree search. Rows
and columns with exactly zero mass are dropped before solving.
"""
import numpy as np

from .._jit import njit


@njit
def _northwest_corner(supply, demand, flow, basis):
    m = supply.shape[0]
    n = demand.shape[0]
    s = supply.copy()
    d = demand.copy()
    i = 0
    j = 0
    while True:
        basis[i, j] = True
        q = min(s[i], d[j])
        flow[i, j] = q
        s[i] -= q
        d[j] -= q
        if i == m - 1 and j == n - 1:
            break
        if i == m - 1:
            j += 1
        elif j == n - 1:
            i += 1
        elif s[i] <= d[j]:
            i += 1
        else:
            j += 1


@njit
def _potentials(cost, basis, u, v):
    m, n = cost.shape
    seen = np.zeros(m + n, np.bool_)
    stack = np.empty(m + n, np.int64)
    top = 0
    u[0] = 0.0
    seen[0] = True
    stack[top] = 0
    top += 1
    while top > 0:
        top -= 1
        node = stack[top]
        if node < m:
            for c in range(n):
                if basis[node, c] and not seen[m + c]:
                    v[c] = cost[node, c] - u[node]
                    seen[m + c] = True
                    stack[top] = m + c
                    top += 1
        else:
            c = node - m
            for r in range(m):
                if basis[r, c] and not seen[r]:
                    u[r] = cost[r, c] - v[c]
                    seen[r] = True
                    stack[top] = r
                    top += 1


@njit
def _tree_path(basis, start_row, end_col, parent):
    """Fill ``parent`` by BFS from ``start_row``; return path length to the column."""
    m, n = basis.shape
    for k in range(m + n):
        parent[k] = -2
    queue = np.empty(m + n, np.int64)
    head = 0
    tail = 0
    queue[tail] = start_row
    tail += 1
    parent[start_row] = -1
    target = m + end_col
    while head < tail:
        node = queue[head]
        head += 1
        if node == target:
            break
        if node < m:
            for c in range(n):
                if basis[node, c] and parent[m + c] == -2:
                    parent[m + c] = node
                    queue[tail] = m + c
                    tail += 1
        else:
            c = node - m
            for r in range(m):
                if basis[r, c] and parent[r] == -2:
                    parent[r] = node
                    queue[tail] = r
                    tail += 1
    length = 0
    node = target
    while parent[node] != -1:
        node = parent[node]
        length += 1
    return length


@njit
def solve_transport(supply, demand, cost, max_iter):
    """Optimal flow for balanced ``supply``/``demand`` (both strictly positive).

    Returns (flow, iterations); iterations == -1 means the cap was hit.
    """
    m = supply.shape[0]
    n = demand.shape[0]
    flow = np.zeros((m, n))
    basis = np.zeros((m, n), np.bool_)
    _northwest_corner(supply, demand, flow, basis)
    if m == 1 or n == 1:
        return flow, 0
    u = np.zeros(m)
    v = np.zeros(n)
    parent = np.empty(m + n, np.int64)
    scale = 0.0
    for r in range(m):
        for c in range(n):
            if abs(cost[r, c]) > scale:
                scale = abs(cost[r, c])
    tol = 1e-13 * (1.0 + scale)
    bland_after = 20 * (m + n) * (m + n)
    for it in range(max_iter):
        _potentials(cost, basis, u, v)
        bi = -1
        bj = -1
        best = -tol
        for r in range(m):
            for c in range(n):
                if not basis[r, c]:
                    rc = cost[r, c] - u[r] - v[c]
                    if rc < best:
                        best = rc
                        bi = r
                        bj = c
                        if it > bland_after:
                            break
            if bi >= 0 and it > bland_after:
                break
        if bi < 0:
            return flow, it
        length = _tree_path(basis, bi, bj, parent)
        # walk from the entering column back to the entering row; edge k is
        # a minus cell for even k
        theta = np.inf
        leave_r = -1
        leave_c = -1
        node = m + bj
        k = 0
        while k < length:
            prev = parent[node]
            if node >= m:
                r = prev
                c = node - m
            else:
                r = node
                c = prev - m
            if k % 2 == 0 and flow[r, c] < theta:
                theta = flow[r, c]
                leave_r = r
                leave_c = c
            node = prev
            k += 1
        node = m + bj
        k = 0
        while k < length:
            prev = parent[node]
            if node >= m:
                r = prev
                c = node - m
            else:
                r = node
                c = prev - m
            if k % 2 == 0:
                flow[r, c] -= theta
            else:
                flow[r, c] += theta
            node = prev
            k += 1
        flow[bi, bj] += theta
        basis[bi, bj] = True
        basis[leave_r, leave_c] = False
        flow[leave_r, leave_c] = 0.0
    return flow, -1


@njit
def emd_full(a, b, cost, max_iter):
    """EMD between unit-normalised ``a`` and ``b`` with a full-size plan.

    Returns (objective, flow, iterations).
    """
    m = a.shape[0]
    n = b.shape[0]
    rows = np.empty(m, np.int64)
    cols = np.empty(n, np.int64)
    nr = 0
    nc = 0
    sa = a.sum()
    sb = b.sum()
    for i in range(m):
        if a[i] > 0.0:
            rows[nr] = i
            nr += 1
    for j in range(n):
        if b[j] > 0.0:
            cols[nc] = j
            nc += 1
    supply = np.empty(nr)
    demand = np.empty(nc)
    sub = np.empty((nr, nc))
    for i in range(nr):
        supply[i] = a[rows[i]] / sa
        for j in range(nc):
            sub[i, j] = cost[rows[i], cols[j]]
    for j in range(nc):
        demand[j] = b[cols[j]] / sb
    sub_flow, iters = solve_transport(supply, demand, sub, max_iter)
    flow = np.zeros((m, n))
    total = 0.0
    for i in range(nr):
        for j in range(nc):
            flow[rows[i], cols[j]] = sub_flow[i, j]
            total += sub_flow[i, j] * sub[i, j]
    return total, flow, iters


@njit
def pairwise_emd(masses, cost, max_iter):
    """Upper-triangle EMD over rows of ``masses``; -1 entries flag a capped solve."""
    k = masses.shape[0]
    out = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            total, _, iters = emd_full(masses[i], masses[j], cost, max_iter)
            if iters < 0:
                total = -1.0
            out[i, j] = total
            out[j, i] = total
    return out
