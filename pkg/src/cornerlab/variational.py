"""Trilinear corner functional on weighted product grids.

The central object is T(phi) for phi on a product of three finite probability
spaces: average phi along each axis to form the three pairwise conditionals,
multiply them, and take the expectation.  Constant functions give
T(alpha) = alpha^3, and the infimum over the mean-alpha slice sits somewhere
in [alpha^4, alpha^3]; minimize_T chases it with projected descent from a
fixed family of starts, and sweep_and_envelope turns a grid of densities into
the lower convex envelope of the estimates.

The second half connects grids back to plane sets.  A BoxInstance records how
a set's hyperplane mass distributes over the inner cells of one outer box of
a partition pair; phi_from_partition normalizes those masses into a grid
function, T_of_box evaluates the box-level surrogate that dominates T of the
truncated grid function, and pipeline_lower_bound runs the whole chain on a
small group: regularize the three plane views, build the smoothing measure
from the final frequency set, and compare the exact weighted corner count
with its two structured approximations.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .bohr import BohrSet
from .corners import PlaneSet, hyperplane_views, weighted_corner_count
from .errors import BoundViolation, CapExceededError, ValidationError
from .parallel import deterministic_map, resolve_thread_count
from .regularity import GrowthFunction, Partition, double_regularity

_PROJECTION_ITERS = 50
_PROJECTION_TOL = 1e-12
_MEAN_FEASIBLE_TOL = 1e-10
_DESCENT_CAP = 10_000
_STEP_FLOOR = 1e-10
_LOWER_SLACK = 1e-6
_UPPER_SLACK = 1e-9
PIPELINE_CAP = 2**7

_WEIGHT_SUM_TOL = 1e-12
_VALUE_TOL = 1e-9


def _check_weights(w, name: str) -> np.ndarray:
    arr = np.asarray(w, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError(f"{name} must be a nonempty 1-d weight vector")
    if not np.all(np.isfinite(arr)) or arr.min() < -1e-15:
        raise ValidationError(f"{name} must be finite and nonnegative")
    if abs(arr.sum() - 1.0) > _WEIGHT_SUM_TOL:
        raise ValidationError(f"{name} must sum to 1, got {arr.sum()!r}")
    return np.clip(arr, 0.0, None)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A [0,1]-valued function on a product of three weighted finite axes.

    Each axis carries a probability vector; the product measure is the
    implicit domain.  Values slightly outside [0,1] from float noise are
    clamped, anything further out is rejected.
    """

    weights_x: np.ndarray
    weights_y: np.ndarray
    weights_z: np.ndarray
    values: np.ndarray

    def __init__(self, weights_x, weights_y, weights_z, values):
        wx = _check_weights(weights_x, "weights_x")
        wy = _check_weights(weights_y, "weights_y")
        wz = _check_weights(weights_z, "weights_z")
        vals = np.asarray(values, dtype=float)
        if vals.shape != (wx.size, wy.size, wz.size):
            raise ValidationError(
                f"values shape {vals.shape} does not match axis sizes "
                f"({wx.size}, {wy.size}, {wz.size})"
            )
        if not np.all(np.isfinite(vals)):
            raise ValidationError("values must be finite")
        if vals.min() < -_VALUE_TOL or vals.max() > 1.0 + _VALUE_TOL:
            raise ValidationError("values must lie in [0, 1]")
        object.__setattr__(self, "weights_x", wx)
        object.__setattr__(self, "weights_y", wy)
        object.__setattr__(self, "weights_z", wz)
        object.__setattr__(self, "values", np.clip(vals, 0.0, 1.0))

    @classmethod
    def uniform(cls, values) -> "GridFunction":
        """Wrap an (nx, ny, nz) array with uniform weights on every axis."""
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 3:
            raise ValidationError("values must be a 3-d array")
        ws = [np.full(s, 1.0 / s) for s in vals.shape]
        return cls(ws[0], ws[1], ws[2], vals)

    @classmethod
    def constant(cls, n: int, c: float) -> "GridFunction":
        if n < 1:
            raise ValidationError("n must be at least 1")
        return cls.uniform(np.full((n, n, n), float(c)))

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.weights_x.size, self.weights_y.size, self.weights_z.size)

    def weight_tensor(self) -> np.ndarray:
        """Outer product of the three axis weights; sums to 1."""
        return np.einsum(
            "i,j,k->ijk", self.weights_x, self.weights_y, self.weights_z
        )

    def mean(self) -> float:
        return float(
            np.einsum(
                "i,j,k,ijk->",
                self.weights_x,
                self.weights_y,
                self.weights_z,
                self.values,
            )
        )


def _marginals(wx, wy, wz, vals):
    F = np.einsum("k,ijk->ij", wz, vals)
    G = np.einsum("j,ijk->ik", wy, vals)
    H = np.einsum("i,ijk->jk", wx, vals)
    return F, G, H


def _t_value(wx, wy, wz, vals) -> float:
    F, G, H = _marginals(wx, wy, wz, vals)
    return float(np.einsum("i,j,k,ij,ik,jk->", wx, wy, wz, F, G, H))


def _bracket(wx, wy, wz, vals) -> np.ndarray:
    """Derivative of T in the weighted inner product (no weight prefactor)."""
    F, G, H = _marginals(wx, wy, wz, vals)
    t1 = np.einsum("k,ik,jk->ij", wz, G, H)
    t2 = np.einsum("j,ij,jk->ik", wy, F, H)
    t3 = np.einsum("i,ij,ik->jk", wx, F, G)
    return t1[:, :, None] + t2[:, None, :] + t3[None, :, :]


def evaluate_T(phi: GridFunction) -> float:
    """E[E(phi|X,Y) E(phi|X,Z) E(phi|Y,Z)] under the product measure.

    The three conditionals are plain weighted axis sums, so the whole thing
    is four einsum contractions; the result lands in [0, 1].
    """
    return _t_value(phi.weights_x, phi.weights_y, phi.weights_z, phi.values)


def gradient_T(phi: GridFunction) -> np.ndarray:
    """Analytic gradient of evaluate_T with respect to each grid value.

    T is a cubic polynomial in the entries, so the derivative at (a, b, c)
    is the weight of the cell times the sum of the three products of the
    complementary conditionals through that cell.
    """
    wx, wy, wz = phi.weights_x, phi.weights_y, phi.weights_z
    weight = np.einsum("i,j,k->ijk", wx, wy, wz)
    return weight * _bracket(wx, wy, wz, phi.values)


def _slice_mean(flat_vals: np.ndarray, flat_w: np.ndarray, lam: float) -> float:
    return float(np.dot(flat_w, np.clip(flat_vals - lam, 0.0, 1.0)))


def _project_to_slice(vals: np.ndarray, weight: np.ndarray, alpha: float) -> np.ndarray:
    """Project onto {0 <= phi <= 1, weighted mean = alpha}.

    The projection in the weight-induced metric is a scalar shift followed by
    clipping; the shift is found by bisection, since the clipped mean is
    nonincreasing in it.
    """
    flat = vals.ravel()
    w = weight.ravel()
    lo = float(flat.min()) - 1.0
    hi = float(flat.max())
    mid = 0.5 * (lo + hi)
    for _ in range(_PROJECTION_ITERS):
        mid = 0.5 * (lo + hi)
        m = _slice_mean(flat, w, mid)
        if abs(m - alpha) <= _PROJECTION_TOL:
            break
        if m > alpha:
            lo = mid
        else:
            hi = mid
    out = np.clip(vals - mid, 0.0, 1.0)
    achieved = float(np.dot(w, out.ravel()))
    assert abs(achieved - alpha) <= _MEAN_FEASIBLE_TOL, (
        f"projection missed the mean constraint: {achieved!r} vs {alpha!r}"
    )
    return out


def _slab_threshold(n: int, quantile: float) -> int:
    """Smallest t with P(i+j+k <= t) >= quantile under uniform weights."""
    idx = np.arange(n)
    sums = idx[:, None, None] + idx[None, :, None] + idx[None, None, :]
    hist = np.bincount(sums.ravel(), minlength=3 * n - 2)
    cum = np.cumsum(hist) / float(n**3)
    return int(np.searchsorted(cum, quantile))


def _restart_start(r: int, n: int, alpha: float, seed: int, restarts: int) -> np.ndarray:
    if r == 0:
        return np.full((n, n, n), alpha)
    if r <= 3:
        return np.random.default_rng([seed, r]).random((n, n, n))
    slabs = max(1, restarts - 4)
    q = (r - 3) / (slabs + 1)
    t = _slab_threshold(n, q)
    idx = np.arange(n)
    sums = idx[:, None, None] + idx[None, :, None] + idx[None, None, :]
    return (sums <= t).astype(float)


class MinimizeResult(NamedTuple):
    phi: GridFunction
    value: float
    restart_values: tuple[float, ...]


def _descend(
    vals: np.ndarray,
    weight: np.ndarray,
    wx: np.ndarray,
    wy: np.ndarray,
    wz: np.ndarray,
    alpha: float,
    max_iters: int,
    step: float,
) -> tuple[np.ndarray, float]:
    phi = _project_to_slice(vals, weight, alpha)
    t = _t_value(wx, wy, wz, phi)
    for _ in range(max_iters):
        direction = _bracket(wx, wy, wz, phi)
        cand = _project_to_slice(phi - step * direction, weight, alpha)
        tc = _t_value(wx, wy, wz, cand)
        if tc < t - 1e-15:
            phi, t = cand, tc
        else:
            step *= 0.5
            if step < _STEP_FLOOR:
                break
    return phi, t


def minimize_T(
    alpha: float,
    n: int,
    restarts: int = 8,
    max_iters: int = _DESCENT_CAP,
    step: float = 1.0,
    seed: int = 0,
) -> MinimizeResult:
    """Estimate the infimum of T over mean-alpha grid functions on [n]^3.

    Projected descent with a fixed step that halves on non-improvement, run
    from a constant start, three seeded uniform starts, and slab indicator
    starts (sublevel sets of i+j+k at evenly spread quantiles).  T is not
    convex, so the returned value is an upper estimate of the infimum and no
    global optimality is claimed.  The descent direction is the derivative in
    the weighted inner product, which keeps step sizes grid-independent; the
    projection is exact in the same metric, so each iterate is feasible.

    The result is checked against the universal bracket
    [alpha^4 - 1e-6, alpha^3 + 1e-9]: the cube is attained by the constant
    start, and the fourth power lower-bounds T on the whole slice.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha!r}")
    if n < 2:
        raise ValidationError("grid needs n >= 2 points per axis")
    if restarts < 1:
        raise ValidationError("at least one restart required")
    if alpha == 0.0:
        return MinimizeResult(GridFunction.constant(n, 0.0), 0.0, (0.0,) * restarts)
    if alpha == 1.0:
        return MinimizeResult(GridFunction.constant(n, 1.0), 1.0, (1.0,) * restarts)

    w = np.full(n, 1.0 / n)
    weight = np.einsum("i,j,k->ijk", w, w, w)
    best_vals: np.ndarray | None = None
    best_t = np.inf
    per_restart = []
    for r in range(restarts):
        start = _restart_start(r, n, alpha, seed, restarts)
        phi, t = _descend(start, weight, w, w, w, alpha, max_iters, step)
        per_restart.append(t)
        if t < best_t:
            best_vals, best_t = phi, t
    lower = alpha**4 - _LOWER_SLACK
    upper = alpha**3 + _UPPER_SLACK
    if not lower <= best_t <= upper:
        raise BoundViolation(
            f"estimate {best_t!r} escaped [{lower!r}, {upper!r}] at alpha={alpha!r}"
        )
    assert best_vals is not None
    return MinimizeResult(
        GridFunction(w, w, w, best_vals), float(best_t), tuple(per_restart)
    )


def _cross(ox, oy, ax, ay, bx, by) -> float:
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


@dataclass(frozen=True, eq=False)
class EnvelopePoints:
    """Sweep samples together with their lower convex envelope.

    alphas/values are the per-sample estimates after the monotone repair
    pass; raw_values are the direct per-sample solver outputs.  The envelope
    is the piecewise-linear minorant through the lower convex hull vertices,
    evaluated by interpolation (clamped outside the sampled range).
    """

    alphas: tuple[float, ...]
    values: tuple[float, ...]
    raw_values: tuple[float, ...]
    hull_alphas: tuple[float, ...]
    hull_values: tuple[float, ...]

    def __post_init__(self):
        hx, hy = self.hull_alphas, self.hull_values
        if len(hx) < 1:
            raise ValidationError("hull must have at least one vertex")
        for i in range(len(hx) - 2):
            turn = _cross(hx[i], hy[i], hx[i + 1], hy[i + 1], hx[i + 2], hy[i + 2])
            assert turn >= 0.0, "hull vertices must make convex turns"
        for a, v in zip(self.alphas, self.values):
            assert self.envelope_at(a) <= v + 1e-12, "envelope must sit below samples"

    def envelope_at(self, alpha: float) -> float:
        return float(np.interp(alpha, self.hull_alphas, self.hull_values))


def _lower_hull(xs: Sequence[float], ys: Sequence[float]) -> tuple[tuple[float, ...], tuple[float, ...]]:
    hull: list[tuple[float, float]] = []
    for p in zip(xs, ys):
        while len(hull) >= 2 and _cross(*hull[-2], *hull[-1], *p) <= 0.0:
            hull.pop()
        hull.append(p)
    return tuple(h[0] for h in hull), tuple(h[1] for h in hull)


def sweep_and_envelope(
    alphas: Sequence[float],
    n: int,
    restarts: int = 8,
    max_iters: int = _DESCENT_CAP,
    step: float = 1.0,
    seed: int = 0,
    threads: int | None = None,
) -> EnvelopePoints:
    """Run minimize_T over a sorted density grid and take the convex minorant.

    Each sample solves with its own derived seed; samples are independent and
    map over the worker pool in input order, so the output never depends on
    the thread count.  A right-to-left repair pass replaces any estimate that
    exceeds the cubic rescaling of its right neighbor: scaling a feasible
    point from density a2 down to a1 scales T by (a1/a2)^3, so the repaired
    value is still achieved by a feasible point and the sequence becomes
    monotone.  The envelope is the lower convex hull of the repaired samples.
    """
    pts = [float(a) for a in alphas]
    if len(pts) < 2:
        raise ValidationError("need at least two density samples")
    if any(b < a for a, b in zip(pts, pts[1:])):
        raise ValidationError("density samples must be sorted ascending")
    if pts[0] < 0.0 or pts[-1] > 1.0:
        raise ValidationError("density samples must lie in [0, 1]")
    workers = resolve_thread_count(threads)

    def solve(item: tuple[int, float]) -> float:
        i, a = item
        return minimize_T(
            a, n, restarts=restarts, max_iters=max_iters, step=step, seed=seed + i
        ).value

    raw = deterministic_map(solve, list(enumerate(pts)), threads=workers)
    repaired = list(raw)
    for i in range(len(pts) - 2, -1, -1):
        if pts[i + 1] > 0.0:
            scaled = (pts[i] / pts[i + 1]) ** 3 * repaired[i + 1]
            if scaled < repaired[i]:
                repaired[i] = scaled

    by_alpha: dict[float, float] = {}
    for a, v in zip(pts, repaired):
        by_alpha[a] = min(v, by_alpha.get(a, np.inf))
    uniq = sorted(by_alpha)
    hx, hy = _lower_hull(uniq, [by_alpha[a] for a in uniq])
    return EnvelopePoints(
        alphas=tuple(pts),
        values=tuple(repaired),
        raw_values=tuple(float(v) for v in raw),
        hull_alphas=hx,
        hull_values=hy,
    )


@dataclass(frozen=True, eq=False)
class BoxInstance:
    """Mass data of a plane set inside one outer box of a partition pair.

    The three delta vectors are the inner parts' shares of their outer part
    (each sums to 1).  cell_masses[i, j, k] is the hyperplane mass of the set
    inside inner cell i x j x k, and hyperplane_mass is the full hyperplane
    mass of the outer box, both in the same normalization.  eps and m feed
    the small-fiber cutoff eps^2 / m.
    """

    delta_x: np.ndarray
    delta_y: np.ndarray
    delta_z: np.ndarray
    cell_masses: np.ndarray
    hyperplane_mass: float
    eps: float
    m: int
    outer_label: tuple[int, int, int] | None = None

    def __init__(
        self,
        delta_x,
        delta_y,
        delta_z,
        cell_masses,
        hyperplane_mass: float,
        eps: float,
        m: int,
        outer_label: tuple[int, int, int] | None = None,
    ):
        dx = _check_weights(delta_x, "delta_x")
        dy = _check_weights(delta_y, "delta_y")
        dz = _check_weights(delta_z, "delta_z")
        cells = np.asarray(cell_masses, dtype=float)
        if cells.shape != (dx.size, dy.size, dz.size):
            raise ValidationError(
                f"cell_masses shape {cells.shape} does not match axis sizes"
            )
        if not np.all(np.isfinite(cells)) or cells.min() < -1e-15:
            raise ValidationError("cell masses must be finite and nonnegative")
        if hyperplane_mass < 0:
            raise ValidationError("hyperplane mass must be nonnegative")
        if eps <= 0:
            raise ValidationError("eps must be positive")
        if m < 1:
            raise ValidationError("m must be at least 1")
        support = np.einsum("i,j,k->ijk", dx, dy, dz) > 0
        if np.any(cells[~support] > 1e-15):
            raise ValidationError("positive cell mass on a zero-weight cell")
        object.__setattr__(self, "delta_x", dx)
        object.__setattr__(self, "delta_y", dy)
        object.__setattr__(self, "delta_z", dz)
        object.__setattr__(self, "cell_masses", np.clip(cells, 0.0, None))
        object.__setattr__(self, "hyperplane_mass", float(hyperplane_mass))
        object.__setattr__(self, "eps", float(eps))
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "outer_label", outer_label)

    @property
    def set_mass(self) -> float:
        """Hyperplane mass of the set inside the whole outer box."""
        return float(self.cell_masses.sum())

    def fiber_mask(self) -> np.ndarray:
        """Cells whose three inner parts all clear the eps^2/m cutoff."""
        th = self.eps * self.eps / self.m
        return (
            (self.delta_x[:, None, None] >= th)
            & (self.delta_y[None, :, None] >= th)
            & (self.delta_z[None, None, :] >= th)
        )


def phi_from_partition(inst: BoxInstance) -> tuple[np.ndarray, GridFunction]:
    """Normalized cell densities and their truncated grid function.

    The raw value on a cell divides its set mass by the cell's expected share
    of the outer box's hyperplane mass; its weighted mean therefore equals
    set_mass / hyperplane_mass exactly, which is asserted.  The grid function
    zeroes every cell with an inner part below the eps^2/m cutoff and caps
    the rest at 1.
    """
    if inst.hyperplane_mass <= 0:
        raise ValidationError("outer box carries no hyperplane mass")
    weight = np.einsum("i,j,k->ijk", inst.delta_x, inst.delta_y, inst.delta_z)
    denom = weight * inst.hyperplane_mass
    raw = np.divide(
        inst.cell_masses,
        denom,
        out=np.zeros_like(inst.cell_masses),
        where=denom > 0,
    )
    got = float(np.dot(weight.ravel(), raw.ravel()))
    expected = inst.set_mass / inst.hyperplane_mass
    assert abs(got - expected) <= 1e-12, (
        f"mean of raw densities {got!r} != mass ratio {expected!r}"
    )
    phi_vals = np.where(inst.fiber_mask(), np.minimum(raw, 1.0), 0.0)
    grid = GridFunction(inst.delta_x, inst.delta_y, inst.delta_z, phi_vals)
    return raw, grid


def T_of_box(inst: BoxInstance) -> float:
    """Box-level surrogate for T built from the raw cell densities.

    Conditionals are weighted fiber means of the raw densities; cells with a
    small inner part are dropped.  Truncation and zeroing only shrink the
    grid function's conditionals, so T of the truncated grid function never
    exceeds this value, which is asserted.
    """
    raw, grid = phi_from_partition(inst)
    dx, dy, dz = inst.delta_x, inst.delta_y, inst.delta_z
    F, G, H = _marginals(dx, dy, dz, raw)
    mask = inst.fiber_mask().astype(float)
    t_v = float(
        np.einsum("i,j,k,ijk,ij,ik,jk->", dx, dy, dz, mask, F, G, H)
    )
    t_phi = evaluate_T(grid)
    assert t_phi <= t_v + 1e-12, (
        f"truncated value {t_phi!r} exceeds box surrogate {t_v!r}"
    )
    return t_v


def _addition_table(group) -> np.ndarray:
    n = group.order
    table = np.empty((n, n), dtype=np.int64)
    for d in range(n):
        table[d] = group.translate_permutation(d)
    return table


def _block_value_matrix(labels: np.ndarray, part_count: int, projected: np.ndarray) -> np.ndarray:
    out = np.zeros((part_count, part_count))
    out[labels[:, None], labels[None, :]] = projected
    return out


def pipeline_lower_bound(
    A: PlaneSet,
    eps: float = 0.25,
    F: GrowthFunction | None = None,
    mode: str = "auto",
    restarts: int = 32,
    seed: int = 0,
    cap: int = PIPELINE_CAP,
) -> dict:
    """End-to-end comparison of a weighted corner count with its box models.

    Regularizes the three hyperplane views of A, builds the smoothing measure
    as the normalized indicator of the narrow Bohr set on the final frequency
    set (radius eps^2 * width / max(1, |S|), capped at 1/2), and reports three
    numbers: (a) the exact smoothed corner count, (b) the sum over inner-part
    triples of the products of projected box averages weighted by the smoothed
    mass of the triple, and (c) the hyperplane-mass-weighted sum of box
    surrogates over outer boxes.  Gaps are reported, never asserted; the
    guarantees behind them carry constants far beyond any group this runs on.
    """
    group = A.group
    n = group.order
    if n > cap:
        raise CapExceededError(f"group order {n} exceeds pipeline cap {cap}")
    if F is None:
        F = GrowthFunction("polynomial", c=2.0, k=1.0)
    views = hyperplane_views(A)
    arrays = [v.astype(float) for v in views]
    dr = double_regularity(
        arrays, eps=eps, F=F, group=group, mode=mode, restarts=restarts, seed=seed, cap=cap
    )

    freqs = dr.bohr.bohr_set.freqs
    width = dr.bohr.partition.width
    rho_prime = Fraction(eps) ** 2 * width / max(1, len(freqs))
    if rho_prime > Fraction(1, 2):
        rho_prime = Fraction(1, 2)
    nu_set = BohrSet(group, freqs, rho_prime)
    nu = nu_set.mu()

    exact = weighted_corner_count(A, nu)

    pi = dr.pi
    outer = Partition.from_bohr(dr.bohr.partition)
    labels = pi.labels
    m = pi.part_count
    f0 = _block_value_matrix(labels, m, dr.f_components[0][0])
    g0 = _block_value_matrix(labels, m, dr.f_components[1][0])
    h0 = _block_value_matrix(labels, m, dr.f_components[2][0])

    add = _addition_table(group)
    neg = group.negation_permutation()
    nuneg = nu.values[neg]
    pair_key = (labels[:, None] * m + labels[None, :]) * n + add
    counts = np.bincount(pair_key.ravel(), minlength=m * m * n).reshape(m, m, n)
    z_ind = np.zeros((n, m))
    z_ind[np.arange(n), labels] = 1.0
    mz = nuneg[add] @ z_ind
    w_triple = np.tensordot(counts.astype(float), mz, axes=([2], [0])) / float(n) ** 3
    box_sum = float(np.einsum("pq,pr,qr,pqr->", f0, g0, h0, w_triple))

    # hyperplane points (x, y) force z = -x-y; masses are counts / n^2
    negadd = neg[add]
    z_label = labels[negadd]
    trip_key = (labels[:, None] * m + labels[None, :]) * m + z_label
    hyp_counts = np.bincount(trip_key.ravel(), minlength=m**3).reshape(m, m, m)
    set_counts = np.bincount(
        trip_key[A.bits].ravel(), minlength=m**3
    ).reshape(m, m, m)

    outer_labels = outer.labels
    reps = np.unique(labels, return_index=True)[1]
    part_outer = outer_labels[reps]
    M = outer.part_count
    outer_trip_key = (
        outer_labels[:, None] * M + outer_labels[None, :]
    ) * M + outer_labels[negadd]
    outer_hyp = np.bincount(outer_trip_key.ravel(), minlength=M**3).reshape(M, M, M)

    parts_in = [np.flatnonzero(part_outer == ob) for ob in range(M)]
    sizes = pi.sizes.astype(float)
    n2 = float(n) ** 2
    box_model = 0.0
    evaluated = 0
    for ob, oc, od in zip(*np.nonzero(outer_hyp)):
        px, py, pz = parts_in[ob], parts_in[oc], parts_in[od]
        inst = BoxInstance(
            delta_x=sizes[px] / sizes[px].sum(),
            delta_y=sizes[py] / sizes[py].sum(),
            delta_z=sizes[pz] / sizes[pz].sum(),
            cell_masses=set_counts[np.ix_(px, py, pz)] / n2,
            hyperplane_mass=outer_hyp[ob, oc, od] / n2,
            eps=eps,
            m=max(px.size, py.size, pz.size),
            outer_label=(int(ob), int(oc), int(od)),
        )
        box_model += inst.hyperplane_mass * T_of_box(inst)
        evaluated += 1

    nu_mask = nu_set.mask()
    report = {
        "group": group.spec_string(),
        "order": n,
        "density": A.density,
        "eps": eps,
        "growth": F.spec_string(),
        "seed": seed,
        "mode": mode,
        "rounds": dr.rounds,
        "degenerate": dr.degenerate,
        "outer_partition": {
            "parts": M,
            "width": str(width),
            "frequencies": len(freqs),
            "radius": str(dr.bohr.bohr_set.radius),
            "bohr_measure": float(dr.bohr.bohr_set.measure()),
        },
        "inner_partition": {"parts": m},
        "nu": {
            "radius": str(rho_prime),
            "support": int(nu_mask.sum()),
            "measure": float(nu_set.measure()),
        },
        "weighted_count": float(exact),
        "box_sum": box_sum,
        "box_model": float(box_model),
        "gaps": {
            "count_minus_box_sum": float(exact) - box_sum,
            "count_minus_box_model": float(exact) - float(box_model),
            "box_sum_minus_box_model": box_sum - float(box_model),
        },
        "outer_boxes": {
            "total": int(M**3),
            "evaluated": evaluated,
            "zero_mass": int(M**3 - evaluated),
        },
        "f1_norms": [float(v) for v in dr.f1_norms],
        "f2_cut_estimates": [float(v) for v in dr.f2_cut_estimates],
        "cut_certified": bool(dr.cut_certified),
        "round_records": dr.round_records,
    }
    return report
