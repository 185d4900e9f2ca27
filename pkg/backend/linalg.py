"""Sparse Gauss-Jordan elimination over Q(i)."""

from backend.clifford_core import ONE, ZERO, GaussianRational
from backend.errors import SingularGramError

SparseRow = dict[int, GaussianRational]


def _to_sparse(rows) -> list[SparseRow]:
    sparse = []
    for row in rows:
        if isinstance(row, dict):
            sparse.append({c: GaussianRational.coerce(v) for c, v in row.items() if v})
        else:
            sparse.append(
                {c: GaussianRational.coerce(v) for c, v in enumerate(row) if v}
            )
    return sparse


def rref(rows, ncols: int) -> tuple[list[SparseRow], list[int]]:
    """Reduced row echelon form; returns the nonzero rows and their pivot columns."""
    pending = [row for row in _to_sparse(rows) if row]
    reduced: list[SparseRow] = []
    pivots: list[int] = []
    for col in range(ncols):
        pivot_row = None
        for idx, row in enumerate(pending):
            if col in row:
                pivot_row = pending.pop(idx)
                break
        if pivot_row is None:
            continue
        inv = ONE / pivot_row[col]
        pivot_row = {c: v * inv for c, v in pivot_row.items()}
        for group in (pending, reduced):
            for idx, row in enumerate(group):
                factor = row.get(col)
                if factor is None:
                    continue
                updated = dict(row)
                for c, v in pivot_row.items():
                    value = updated.get(c, ZERO) - factor * v
                    if value:
                        updated[c] = value
                    else:
                        updated.pop(c, None)
                group[idx] = updated
        pending = [row for row in pending if row]
        reduced.append(pivot_row)
        pivots.append(col)
    return reduced, pivots


def rank(rows, ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows, ncols: int) -> list[list[GaussianRational]]:
    reduced, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vector = [ZERO] * ncols
        vector[free] = ONE
        for row, pivot in zip(reduced, pivots):
            value = row.get(free)
            if value:
                vector[pivot] = -value
        basis.append(vector)
    return basis


def solve(rows, rhs, ncols: int) -> list[GaussianRational] | None:
    """One exact solution of rows @ x = rhs, or None when inconsistent."""
    augmented = []
    for row, value in zip(_to_sparse(rows), rhs):
        row = dict(row)
        value = GaussianRational.coerce(value)
        if value:
            row[ncols] = value
        augmented.append(row)
    reduced, pivots = rref(augmented, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    solution = [ZERO] * ncols
    for row, pivot in zip(reduced, pivots):
        solution[pivot] = row.get(ncols, ZERO)
    return solution


def inverse(matrix: list[list]) -> list[list[GaussianRational]]:
    n = len(matrix)
    augmented = []
    for i, row in enumerate(matrix):
        sparse = {c: GaussianRational.coerce(v) for c, v in enumerate(row) if v}
        sparse[n + i] = ONE
        augmented.append(sparse)
    reduced, pivots = rref(augmented, 2 * n)
    if pivots[:n] != list(range(n)):
        raise SingularGramError(f"Matrix of size {n} is singular")
    return [[row.get(n + j, ZERO) for j in range(n)] for row in reduced[:n]]


def matmul(a: list[list], b: list[list]) -> list[list[GaussianRational]]:
    inner_dim = len(b)
    cols = len(b[0]) if b else 0
    result = []
    for row in a:
        out = []
        for j in range(cols):
            total = ZERO
            for k in range(inner_dim):
                if row[k] and b[k][j]:
                    total = total + GaussianRational.coerce(row[k]) * b[k][j]
            out.append(total)
        result.append(out)
    return result
