"""Integer lattices attached to Theta: Smith/Hermite forms, the degeneracy group H
and its adapted basis, and the invariant lattice for a dynamics direction r.

Matrices are tuples of integer rows.  H is the group of integer x with
<x, Theta y> an integer for every integer y; an adapted basis is a Z-basis
p_1..p_d of Z^d together with a_1 | ... | a_m such that a_1 p_1, .., a_m p_m
is a basis of H.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .exact import ThetaMatrix

Matrix = tuple[tuple[int, ...], ...]


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _freeze(a: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(v) for v in row) for row in a)


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    cols = list(zip(*b)) if b else []
    inner = len(b)
    if any(len(row) != inner for row in a):
        raise ValueError("shape mismatch in matmul")
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def transpose(a: Sequence[Sequence[int]], ncols: int | None = None) -> Matrix:
    if not a:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*a))


def determinant(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-valued elimination."""
    n = len(a)
    m = [[Fraction(v) for v in row] for row in a]
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c] != 0), None)
        if pivot is None:
            return 0
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return int(det)


def unimodular_inverse(a: Sequence[Sequence[int]]) -> Matrix:
    """Inverse of an integer matrix with determinant +-1."""
    n = len(a)
    m = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        m[c], m[pivot] = m[pivot], m[c]
        pv = m[c][c]
        m[c] = [x / pv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    inv = [row[n:] for row in m]
    if any(v.denominator != 1 for row in inv for v in row):
        raise ValueError("matrix is not unimodular")
    return _freeze(inv)


@dataclass(frozen=True)
class SnfResult:
    """U A V = S with U, V unimodular and S diagonal with S_ii | S_{i+1,i+1}."""

    U: Matrix
    S: Matrix
    V: Matrix
    rank: int

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.S[i][i] for i in range(min(len(self.S), len(self.V))))


def smith_normal_form(a: Sequence[Sequence[int]], ncols: int | None = None) -> SnfResult:
    """Smith normal form with transforms, eliminating on the smallest pivot first."""
    rows = len(a)
    cols = len(a[0]) if rows else (ncols or 0)
    A = [[int(v) for v in row] for row in a]
    if any(len(row) != cols for row in A):
        raise ValueError("ragged matrix")
    U = _identity(rows)
    V = _identity(cols)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (A, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):  # row dst += c * row src
        for M in (A, U):
            M[dst] = [x + c * y for x, y in zip(M[dst], M[src])]

    def add_col(dst, src, c):  # col dst += c * col src
        for M in (A, V):
            for row in M:
                row[dst] += c * row[src]

    t = 0
    while t < min(rows, cols):
        entries = [(abs(A[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if A[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            changed = False
            for i in range(t + 1, rows):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
                    if A[i][t]:
                        changed = True
            for j in range(t + 1, cols):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
                    if A[t][j]:
                        changed = True
            if changed:
                cands = [(abs(A[i][t]), i, "r") for i in range(t + 1, rows) if A[i][t]]
                cands += [(abs(A[t][j]), j, "c") for j in range(t + 1, cols) if A[t][j]]
                _, idx, kind = min(cands)
                if kind == "r":
                    swap_rows(t, idx)
                else:
                    swap_cols(t, idx)
                continue
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return SnfResult(_freeze(U), _freeze(A), _freeze(V), t)


def hermite_normal_form(a: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix]:
    """Row-style Hermite form: returns (H, U) with U A = H, H upper echelon,
    positive pivots and entries above each pivot reduced into [0, pivot)."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    H = [[int(v) for v in row] for row in a]
    U = _identity(rows)
    r = 0
    pivots = []
    for c in range(cols):
        while True:
            nz = [(abs(H[i][c]), i) for i in range(r, rows) if H[i][c]]
            if not nz:
                break
            _, i = min(nz)
            H[r], H[i] = H[i], H[r]
            U[r], U[i] = U[i], U[r]
            done = True
            for i in range(r + 1, rows):
                if H[i][c]:
                    f = H[i][c] // H[r][c]
                    H[i] = [x - f * y for x, y in zip(H[i], H[r])]
                    U[i] = [x - f * y for x, y in zip(U[i], U[r])]
                    if H[i][c]:
                        done = False
            if done:
                break
        if r < rows and H[r][c]:
            if H[r][c] < 0:
                H[r] = [-x for x in H[r]]
                U[r] = [-x for x in U[r]]
            for i in range(r):
                f = H[i][c] // H[r][c]
                if f:
                    H[i] = [x - f * y for x, y in zip(H[i], H[r])]
                    U[i] = [x - f * y for x, y in zip(U[i], U[r])]
            pivots.append(c)
            r += 1
            if r == rows:
                break
    return _freeze(H), _freeze(U)


def integer_kernel(a: Sequence[Sequence[int]], ncols: int | None = None) -> Matrix:
    """Matrix whose columns are a basis of {x in Z^cols : A x = 0}.

    The basis spans a saturated lattice.  ``ncols`` is needed when A has no rows.
    """
    cols = len(a[0]) if a else (ncols or 0)
    if not a:
        return _freeze(_identity(cols))
    snf = smith_normal_form(a)
    return tuple(tuple(row[snf.rank:]) for row in snf.V)


def columns(m: Matrix) -> list[tuple[int, ...]]:
    return [tuple(row[j] for row in m) for j in range(len(m[0]) if m else 0)]


@dataclass(frozen=True)
class AdaptedBasis:
    """Z-basis p_1..p_d (columns of P) with a_1 | .. | a_m; a_i p_i (i <= m) span the lattice."""

    d: int
    m: int
    P: Matrix
    a: tuple[int, ...]
    P_inv: Matrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "P", _freeze(self.P))
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        if len(self.P) != self.d or any(len(row) != self.d for row in self.P):
            raise ValueError("P must be d x d")
        if len(self.a) != self.m or not 0 <= self.m <= self.d:
            raise ValueError("need exactly m invariants with 0 <= m <= d")
        if abs(determinant(self.P)) != 1 if self.d else False:
            raise ValueError("columns of P are not a Z-basis")
        if any(v <= 0 for v in self.a) or any(self.a[i + 1] % self.a[i] for i in range(self.m - 1)):
            raise ValueError("invariants must be positive with a_i | a_{i+1}")
        object.__setattr__(self, "P_inv", unimodular_inverse(self.P) if self.d else ())

    def column(self, i: int) -> tuple[int, ...]:
        return tuple(row[i] for row in self.P)

    def generators(self) -> list[tuple[int, ...]]:
        """a_i p_i for i < m."""
        return [tuple(self.a[i] * v for v in self.column(i)) for i in range(self.m)]

    def coordinates(self, w: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(x * y for x, y in zip(row, w)) for row in self.P_inv)

    def to_json(self) -> dict:
        return {"d": self.d, "m": self.m, "P": [list(self.column(i)) for i in range(self.d)],
                "a": list(self.a)}

    @classmethod
    def from_json(cls, data: Mapping) -> AdaptedBasis:
        d = data["d"]
        cols = data["P"]
        P = tuple(tuple(cols[j][i] for j in range(d)) for i in range(d))
        return cls(d, data["m"], P, tuple(data["a"]))

    def check(self, member: Callable[[tuple[int, ...]], bool]) -> None:
        """Assert the lattice-dependent invariants against a membership predicate."""
        for i in range(self.m):
            p = self.column(i)
            if not member(tuple(self.a[i] * v for v in p)):
                raise AssertionError(f"a_{i} p_{i} is not in the lattice")
            for div in range(1, self.a[i]):
                if self.a[i] % div == 0 and member(tuple(div * v for v in p)):
                    raise AssertionError(f"{div} p_{i} is already in the lattice")


def _sign_normalized(P: list[list[int]]) -> list[list[int]]:
    d = len(P)
    for j in range(d):
        first = next((P[i][j] for i in range(d) if P[i][j]), 0)
        if first < 0:
            for i in range(d):
                P[i][j] = -P[i][j]
    return P


def adapted_from_generators(gens: Sequence[Sequence[int]], d: int) -> AdaptedBasis:
    """Adapted basis for the lattice spanned by the columns of the d x g matrix ``gens``.

    The columns are assumed linearly independent.
    """
    if not gens or not gens[0]:
        return AdaptedBasis(d, 0, _freeze(_identity(d)), ())
    snf = smith_normal_form(gens)
    a = [snf.S[i][i] for i in range(snf.rank)]
    if snf.rank != len(gens[0]):
        raise ValueError("generators are linearly dependent")
    P = _sign_normalized([list(row) for row in unimodular_inverse(snf.U)])
    return AdaptedBasis(d, len(a), _freeze(P), tuple(a))


def _stage_condition_matrices(theta: ThetaMatrix) -> tuple[Matrix, list[Matrix], int]:
    """Integer matrices (R, [S_s], D) with <x, Theta y> = x^T (R + sum S_s s) y / D."""
    return theta._rational_form, list(theta._symbol_forms), theta.denom


def degeneracy_lattice_generators(theta: ThetaMatrix) -> Matrix:
    """Columns spanning H = {x : <x, Theta e_j> integer for all j}, exactly.

    First x must kill every symbol coefficient (integer kernel of the stacked
    symbol matrices); on that sublattice x = K y the rational part imposes
    N y = 0 mod D, solved through the Smith form of N.
    """
    d = theta.n
    R, symbol_forms, D = _stage_condition_matrices(theta)
    stacked = [tuple(col) for S in symbol_forms for col in zip(*S)]  # rows of S^T
    K = integer_kernel(stacked, ncols=d)
    kdim = len(K[0]) if K and K[0] else 0
    if kdim == 0:
        return tuple(() for _ in range(d))
    N = matmul(transpose(R), K)
    snf = smith_normal_form(N)
    scale = []
    for i in range(kdim):
        s = snf.S[i][i] if i < snf.rank else 0
        scale.append(D // math.gcd(s, D) if s else 1)
    KV = matmul(K, snf.V)
    return tuple(tuple(row[j] * scale[j] for j in range(kdim)) for row in KV)


def degeneracy_group(theta_d: ThetaMatrix) -> AdaptedBasis:
    return adapted_from_generators(degeneracy_lattice_generators(theta_d), theta_d.n)


def in_degeneracy_group(theta: ThetaMatrix, w: Sequence[int]) -> bool:
    """Direct test: <w, Theta e_j> is an integer for every j."""
    n = theta.n
    return all(theta.pairing(tuple(w), tuple(int(i == j) for i in range(n))).is_integer()
               for j in range(n))


def h_membership(w: Sequence[int], basis: AdaptedBasis) -> tuple[int, ...] | None:
    """Coefficients c with w = sum c_i a_i p_i, or None when w is not in the lattice."""
    if len(w) != basis.d:
        raise ValueError(f"expected a vector of length {basis.d}")
    coords = basis.coordinates(w)
    if any(coords[i] for i in range(basis.m, basis.d)):
        return None
    if any(coords[i] % basis.a[i] for i in range(basis.m)):
        return None
    return tuple(coords[i] // basis.a[i] for i in range(basis.m))


def _exact_r(r: Sequence) -> tuple[Fraction, ...]:
    out = []
    for v in r:
        if isinstance(v, float):
            raise TypeError("the invariant lattice needs r as exact rationals, got a float")
        out.append(Fraction(v))
    return tuple(out)


def invariant_lattice(theta: ThetaMatrix, r: Sequence) -> AdaptedBasis:
    """Adapted basis for {w in H(Theta) : <w, r> = 0}."""
    rv = _exact_r(r)
    if len(rv) != theta.n:
        raise ValueError(f"r must have length {theta.n}")
    B = degeneracy_lattice_generators(theta)
    if not B or not B[0]:
        return adapted_from_generators(B, theta.n)
    den = math.lcm(*(v.denominator for v in rv))
    rho = tuple(int(v * den) for v in rv)
    row = tuple(sum(rho[i] * B[i][j] for i in range(theta.n)) for j in range(len(B[0])))
    K2 = integer_kernel([row])
    if not K2 or not K2[0]:
        return adapted_from_generators(tuple(() for _ in range(theta.n)), theta.n)
    return adapted_from_generators(matmul(B, K2), theta.n)


def in_invariant_lattice(theta: ThetaMatrix, r: Sequence, w: Sequence[int]) -> bool:
    rv = _exact_r(r)
    return in_degeneracy_group(theta, w) and sum(Fraction(x) * y for x, y in zip(w, rv)) == 0


def box_vectors(d: int, radius: int) -> Iterable[tuple[int, ...]]:
    return itertools.product(range(-radius, radius + 1), repeat=d)


def box_oracle(basis: AdaptedBasis, member: Callable[[tuple[int, ...]], bool],
               radius: int = 4) -> list[tuple[int, ...]]:
    """Vectors in the box |x_i| <= radius where h_membership and the direct test disagree."""
    bad = []
    for x in box_vectors(basis.d, radius):
        if (h_membership(x, basis) is not None) != member(x):
            bad.append(x)
    return bad
