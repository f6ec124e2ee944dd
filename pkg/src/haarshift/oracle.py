"""Brute-force realization of Ш on a truncated Haar system.

Nothing here reuses the engine's sign tables or tail formula.  Values of
``Ш 1_J`` are summed term by term from ``|J| sum_{L ⊋ J} h_L(J) Ш h_L(x)``
over ancestors up to a fixed height, with h_L and Ш h_L evaluated from float
endpoint comparisons.  Truncating above the A-fold parent W' of the pair's
zero-anchored apex W drops a geometric tail of size at most |J|/|W'|.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dyadic import DyadicInterval, apex_scale
from .haar import LeafVector

DEFAULT_MAX_MATRIX = 4096
MAX_HEIGHT = 40
SVD_TOL = 1e-10
RANK_TOL = 1e-9


def max_matrix() -> int:
    raw = os.environ.get("HAARSHIFT_MAX_MATRIX")
    if not raw:
        return DEFAULT_MAX_MATRIX
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"HAARSHIFT_MAX_MATRIX must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError("HAARSHIFT_MAX_MATRIX must be positive")
    return value


def pair_top_scale(I: DyadicInterval, K: DyadicInterval, A: int) -> int:
    """Scale of W', the A-fold parent of the zero-anchored apex W of the pair."""
    return max(apex_scale(I), apex_scale(K)) + A


# pointwise evaluation ---------------------------------------------------


def _quarter_sign(q):
    # Ш h_L = (h_{L+} - h_{L-})/sqrt2 is + - - + on the four grandchildren
    return np.where((q == 0) | (q == 3), 1.0, -1.0)


def indicator_shift_values(leaf_left, leaf_scale, xs, top) -> np.ndarray:
    """Truncated ``Ш 1_J(x)`` for arrays of leaves J and points x.

    ``leaf_left`` (float) and ``leaf_scale`` (int) describe J; ``top`` is the
    highest ancestor scale kept.  All arrays broadcast to a common shape.
    """
    leaf_left, leaf_scale, xs, top = np.broadcast_arrays(
        np.asarray(leaf_left, dtype=float), np.asarray(leaf_scale, dtype=np.int64),
        np.asarray(xs, dtype=float), np.asarray(top, dtype=np.int64),
    )
    leaf_size = np.ldexp(1.0, leaf_scale)
    leaf_mid = leaf_left + leaf_size / 2
    out = np.zeros(xs.shape)
    if out.size == 0:
        return out
    for m in range(int(leaf_scale.min()) + 1, int(top.max()) + 1):
        active = (leaf_scale < m) & (top >= m)
        if not active.any():
            continue
        size = math.ldexp(1.0, m)
        L_left = np.floor(leaf_left / size) * size
        amp = 1.0 / size  # h_L(J) * Ш h_L(x) carries 1/sqrt|L| twice
        s_i = np.where(leaf_mid >= L_left + size / 2, 1.0, -1.0)
        inside = (xs >= L_left) & (xs < L_left + size)
        q = np.floor((xs - L_left) / (size / 4))
        term = np.where(inside & active, s_i * _quarter_sign(q) * amp, 0.0)
        out += term
    return out * leaf_size


def shift_values(f: LeafVector, xs, A: int, K: DyadicInterval | None = None) -> np.ndarray:
    """Truncated ``Ш f(x)`` for a leaf-level function, as a sum over its leaves."""
    root = f.root
    leaf_scale = root.scale - f.depth
    leaves = list(root.subintervals(f.depth))
    xs = np.asarray(xs, dtype=float)
    probe = K if K is not None else root
    top = pair_top_scale(root, probe, A)
    lefts = np.array([float(L.left) for L in leaves])
    vals = np.array([float(v) for v in f.values])
    table = indicator_shift_values(lefts[:, None], leaf_scale, xs[None, :], top)
    return vals @ table


# matrices -----------------------------------------------------------------


@dataclass(frozen=True)
class TruncatedSystem:
    """Haar atoms below W' (the A-fold parent of W) meeting the window W."""

    window: DyadicInterval
    leaf_depth: int
    ancestor_height: int

    def __post_init__(self):
        if not self.window.is_zero_anchored():
            raise ValueError(f"window {self.window} must be zero-anchored")
        _check_sizes(self.leaf_depth, self.ancestor_height)

    @property
    def top_scale(self) -> int:
        return self.window.scale + self.ancestor_height

    def atoms(self) -> list[DyadicInterval]:
        """Haar supports: all J ⊆ W above the leaf scale, and the ancestors of W up to W'."""
        W = self.window
        inside = [J for d in range(self.leaf_depth) for J in W.subintervals(d)]
        return inside + [W.ancestor(m) for m in range(W.scale + 1, self.top_scale + 1)]


@dataclass
class DenseOperator:
    """Dense matrix in orthonormal coordinates: columns are the normalized
    leaf indicators of the domain, rows the normalized cells of the target."""

    matrix: np.ndarray
    cols: list[DyadicInterval]
    rows: list[DyadicInterval]
    top_scale: int


def _check_sizes(D: int, A: int) -> None:
    if D < 0:
        raise ValueError("depth must be nonnegative")
    if not 0 <= A <= MAX_HEIGHT:
        raise ValueError(f"ancestor height must be in [0, {MAX_HEIGHT}]")
    if 2 ** D > max_matrix():
        raise ValueError(f"2^{D} leaves exceed the matrix cap {max_matrix()}")


def row_scale(I: DyadicInterval, K: DyadicInterval, D: int) -> int:
    """Resolution at which 1_K Ш f is piecewise constant for f at depth D on I."""
    leaf_scale = I.scale - D
    if K.intersects(I):
        return min(leaf_scale, K.scale) - 1
    return K.scale - 1


def pair_matrix(I: DyadicInterval, K: DyadicInterval, D: int, A: int) -> DenseOperator:
    """Matrix of f ↦ 1_K Ш f, f ranging over step functions on I at depth D."""
    _check_sizes(D, A)
    r = row_scale(I, K, D)
    n_rows = 1 << (K.scale - r)
    if n_rows > max_matrix():
        raise ValueError(f"{n_rows} target cells exceed the matrix cap {max_matrix()}")
    cols = list(I.subintervals(D))
    rows = list(K.subintervals(K.scale - r))
    top = pair_top_scale(I, K, A)
    leaf_scale = I.scale - D
    lefts = np.array([float(c.left) for c in cols])
    centers = np.array([float(c.center) for c in rows])
    values = indicator_shift_values(lefts[None, :], leaf_scale, centers[:, None], top)
    # <1_cell/sqrt|cell|, Ш 1_leaf/sqrt|leaf|> = value * sqrt(|cell|/|leaf|)
    weight = math.sqrt(math.ldexp(1.0, r - leaf_scale))
    return DenseOperator(values * weight, cols, rows, top)


def build_matrix(W: DyadicInterval, D: int, A: int) -> DenseOperator:
    """1_W Ш on the leaves of W at depth D; rows resolve W at depth D + 1."""
    return pair_matrix(W, W, D, A)


def to_coordinates(f: LeafVector) -> np.ndarray:
    """Leaf values in the orthonormal leaf-indicator basis."""
    leaf_size = math.ldexp(1.0, f.root.scale - f.depth)
    return np.array([float(v) for v in f.values]) * math.sqrt(leaf_size)


def oracle_restricted_norm(I: DyadicInterval, K: DyadicInterval, D: int, A: int, f: LeafVector) -> float:
    """``||1_K Ш f||`` by dense application of the truncated matrix."""
    if f.root != I or f.depth != D:
        raise ValueError(f"f must live on {I} at depth {D}")
    op = pair_matrix(I, K, D, A)
    return float(np.linalg.norm(op.matrix @ to_coordinates(f)))


# singular values ----------------------------------------------------------


def haar_basis(D: int) -> np.ndarray:
    """Orthonormal Haar vectors on 2^D leaves, constant vector first."""
    n = 1 << D
    basis = [np.full(n, 1.0 / math.sqrt(n))]
    for d in range(D):
        width = n >> d
        for j in range(1 << d):
            v = np.zeros(n)
            lo = j * width
            v[lo: lo + width // 2] = -1.0
            v[lo + width // 2: lo + width] = 1.0
            basis.append(v / math.sqrt(width))
    return np.column_stack(basis)


def jacobi_singular_values(M: np.ndarray, tol: float = 1e-15, max_sweeps: int = 80) -> np.ndarray:
    """One-sided (Hestenes) Jacobi: rotate column pairs until orthogonal.

    Returns all n singular values (zeros included) in decreasing order.
    """
    U = np.array(M, dtype=float, copy=True)
    n = U.shape[1]
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = U[:, p] @ U[:, p]
                beta = U[:, q] @ U[:, q]
                gamma = U[:, p] @ U[:, q]
                if abs(gamma) <= tol * math.sqrt(alpha) * math.sqrt(beta) or gamma == 0.0:
                    continue
                rotated = True
                diff = beta - alpha
                if abs(diff) > 1e150 * abs(gamma):
                    t = gamma / diff  # tiny angle; zeta would overflow
                else:
                    zeta = diff / (2 * gamma)
                    t = math.copysign(1.0, zeta) / (abs(zeta) + math.hypot(1.0, zeta))
                c = 1 / math.hypot(1.0, t)
                s = c * t
                up = U[:, p].copy()
                U[:, p] = c * up - s * U[:, q]
                U[:, q] = s * up + c * U[:, q]
        if not rotated:
            break
    return np.sort(np.linalg.norm(U, axis=0))[::-1]


def singular_values(M: np.ndarray, method: str = "svd") -> np.ndarray:
    """All n = ncols singular values of the map, padded with zeros when rows < n."""
    n = M.shape[1]
    if method == "jacobi":
        return jacobi_singular_values(M)
    if method != "svd":
        raise ValueError(f"unknown method {method!r}")
    s = np.linalg.svd(M, compute_uv=False)
    if s.size < n:
        s = np.concatenate([s, np.zeros(n - s.size)])
    return s


@dataclass(frozen=True)
class SingularReport:
    I: DyadicInterval
    K: DyadicInterval
    depth: int
    constraint: str
    sigma_min: float
    sigma_max: float
    rank_numeric: int
    values: tuple

    def csv_row(self) -> list:
        return [str(self.I), str(self.K), self.depth, self.constraint,
                f"{self.sigma_min:.12g}", f"{self.sigma_max:.12g}", self.rank_numeric]


CSV_HEADER = ["I", "K", "depth", "constraint", "sigma_min", "sigma_max", "rank_numeric"]


def smallest_singular(
    I: DyadicInterval, K: DyadicInterval, D: int, constraint: str = "none",
    A: int = MAX_HEIGHT, method: str = "svd",
) -> SingularReport:
    """Extreme singular values of 1_K Ш on step functions on I at depth D."""
    if constraint not in ("none", "zero-mean"):
        raise ValueError(f"constraint must be 'none' or 'zero-mean', got {constraint!r}")
    M = pair_matrix(I, K, D, A).matrix
    if constraint == "zero-mean":
        if D == 0:
            raise ValueError("zero-mean domain is empty at depth 0")
        M = M @ haar_basis(D)[:, 1:]
    s = singular_values(M, method)
    rank = int(np.sum(s > RANK_TOL))
    return SingularReport(I, K, D, constraint, float(s[-1]), float(s[0]), rank, tuple(float(x) for x in s))


# engine comparison ---------------------------------------------------------


def engine_matrix(I: DyadicInterval, K: DyadicInterval, D: int) -> np.ndarray:
    """Same coordinates as pair_matrix, filled from the exact engine."""
    from .shift import restricted_indicator_shift

    r = row_scale(I, K, D)
    leaf_scale = I.scale - D
    rows = list(K.subintervals(K.scale - r))
    weight = math.sqrt(math.ldexp(1.0, r - leaf_scale))
    M = np.zeros((len(rows), 1 << D))
    for j, leaf in enumerate(I.subintervals(D)):
        form = restricted_indicator_shift(leaf, K)
        for i, cell in enumerate(rows):
            M[i, j] = float(form.value_at(cell.center)) * weight
    return M


@dataclass(frozen=True)
class ConvergenceRow:
    A: int
    max_deviation: float
    ratio: float | None


def convergence_study(I: DyadicInterval, K: DyadicInterval, A_range: Iterable[int], D: int = 2) -> list[ConvergenceRow]:
    """Max |oracle - engine| over the leaf basis for each truncation height A."""
    exact = engine_matrix(I, K, D)
    rows = []
    prev = None
    for A in A_range:
        dev = float(np.max(np.abs(pair_matrix(I, K, D, A).matrix - exact)))
        ratio = dev / prev if prev else None
        rows.append(ConvergenceRow(A, dev, ratio))
        prev = dev
    return rows


def sample_points(J: DyadicInterval, K: DyadicInterval) -> list:
    """Probe points for 1_K Ш 1_J: centers of K's grandchildren, plus J's children when J ⊆ K."""
    pts = [c.center for c in K.subintervals(2)]
    if K.contains(J):
        pts += [c.center for c in J.subintervals(1)]
    return pts


def form_values(form, xs: Sequence) -> np.ndarray:
    """Float values of an engine form at points (synthesis of its three parts)."""
    f = form.to_float()
    K = f.K
    out = []
    k_lo, k_mid, k_hi = float(K.left), float(K.center), float(K.right)
    for x in xs:
        x = float(x)
        if not k_lo <= x < k_hi:
            out.append(0.0)
            continue
        v = f.constant
        if f.haar:
            v += f.haar / math.sqrt(float(K.size)) * (1 if x >= k_mid else -1)
        for L, c in f.inner.items():
            lo, size = float(L.left), float(L.size)
            if lo <= x < lo + size:
                q = math.floor((x - lo) / (size / 4))
                v += c / math.sqrt(size) * (1 if q in (0, 3) else -1)
        out.append(v)
    return np.array(out)


@dataclass
class AgreementReport:
    pairs: int
    points: int
    max_deviation: float
    bound: float
    worst: tuple | None
    min_ratio: float | None
    max_ratio: float | None
    failures: list

    @property
    def ok(self) -> bool:
        ratios_ok = self.min_ratio is None or (0.4 <= self.min_ratio and self.max_ratio <= 0.6)
        return not self.failures and self.max_deviation <= self.bound and ratios_ok


def agreement_sweep(
    intervals: Sequence[DyadicInterval], max_depth: int = 4, A: int = 24, floor: float = 1e-13,
) -> AgreementReport:
    """Engine vs oracle for every ordered pair (I, K) and every leaf atom of I
    at depth <= max_depth, probed at sample_points, at heights A - 1 and A.

    Deviation ratios are taken only where the A - 1 deviation exceeds
    ``floor`` (pairs in opposite half-lines agree exactly and have none).
    """
    from .shift import restricted_indicator_shift

    work: dict = {}
    for I in intervals:
        atoms = [J for d in range(max_depth + 1) for J in I.subintervals(d)]
        for K in intervals:
            for J in atoms:
                work.setdefault((J, K), None)
    keys = list(work)
    lefts, scales, xs, tops, owner, engine = [], [], [], [], [], []
    for idx, (J, K) in enumerate(keys):
        pts = sample_points(J, K)
        vals = form_values(restricted_indicator_shift(J, K), pts)
        top = pair_top_scale(J, K, A)
        for x, v in zip(pts, vals):
            lefts.append(float(J.left))
            scales.append(J.scale)
            xs.append(float(x))
            tops.append(top)
            owner.append(idx)
            engine.append(v)
    lefts = np.array(lefts)
    scales = np.array(scales, dtype=np.int64)
    xs = np.array(xs)
    tops = np.array(tops, dtype=np.int64)
    engine = np.array(engine)
    owner = np.array(owner)
    dev_a = np.abs(indicator_shift_values(lefts, scales, xs, tops) - engine)
    dev_b = np.abs(indicator_shift_values(lefts, scales, xs, tops - 1) - engine)
    per_a = np.zeros(len(keys))
    per_b = np.zeros(len(keys))
    np.maximum.at(per_a, owner, dev_a)
    np.maximum.at(per_b, owner, dev_b)
    bound = math.ldexp(1.0, 4 - A)
    mask = per_b > floor
    ratios = per_a[mask] / per_b[mask]
    failures = []
    for i in np.nonzero(per_a > bound)[0][:20]:
        failures.append((str(keys[i][0]), str(keys[i][1]), float(per_a[i])))
    if ratios.size:
        bad = np.nonzero((ratios < 0.4) | (ratios > 0.6))[0]
        sel = np.nonzero(mask)[0]
        for i in bad[:20]:
            k = sel[i]
            failures.append((str(keys[k][0]), str(keys[k][1]), float(ratios[i])))
    worst_i = int(np.argmax(per_a)) if len(keys) else None
    return AgreementReport(
        pairs=len(keys),
        points=int(xs.size),
        max_deviation=float(per_a.max()) if len(keys) else 0.0,
        bound=bound,
        worst=(str(keys[worst_i][0]), str(keys[worst_i][1])) if worst_i is not None else None,
        min_ratio=float(ratios.min()) if ratios.size else None,
        max_ratio=float(ratios.max()) if ratios.size else None,
        failures=failures,
    )


def universe(scales: Iterable[int], indices: Iterable[int], mirrored: bool = True) -> list[DyadicInterval]:
    """All (k, l) in the box, plus reflections -l-1 when mirrored."""
    out = []
    idx = list(indices)
    for k in scales:
        for l in idx:
            out.append(DyadicInterval(k, l))
            if mirrored:
                out.append(DyadicInterval(k, -l - 1))
    return sorted(set(out))
