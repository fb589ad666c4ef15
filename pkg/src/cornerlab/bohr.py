"""Bohr sets, Bohr partitions, and desk-scale verifiers for their
approximate-closure properties.

A Bohr set B(S, rho) collects the group elements whose images under every
frequency in S stay within rho of zero on the torus; membership is decided
with exact rational arithmetic so that strict inequalities and half-open
interval labels are deterministic.  The companion partition splits G by
rounding each xi(x) down to a width-delta interval.

The verifiers measure, exhaustively where feasible, how often translates of a
small Bohr set escape a single part of a coarse partition, and how often a
fine part poking out of a translate spoils absorption.  They return measured
fractions; pinned multiples of the driving ratio (8 for translate
containment, 4 for absorption) are asserted only when the resulting bound is
informative (< 1) and the check was exhaustive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import BoundViolation, CapExceededError, GroupMismatchError, ValidationError
from .fourier import GroupFunction, convolve, lp_norm
from .groups import Character, Element, GroupSpec

RationalLike = Union[Fraction, int, float, str]

_EXHAUSTIVE_CAP = 2**16
_BOX_CAP = 2**10


def _as_fraction(value: RationalLike, name: str) -> Fraction:
    try:
        # Fraction(float) is exact: floats are binary rationals.
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ValidationError(f"{name} is not a rational number: {value!r}") from exc


def _canonical_freqs(group: GroupSpec, freqs: Sequence[Character]) -> tuple[Character, ...]:
    out = []
    seen = set()
    for xi in freqs:
        if xi.group != group:
            raise GroupMismatchError("frequency belongs to a different group")
        if xi.coeffs not in seen:
            seen.add(xi.coeffs)
            out.append(xi)
    return tuple(out)


@dataclass(frozen=True)
class BohrSet:
    """B(S, rho): elements x with every ||xi(x)||_{R/Z} < rho, strictly."""

    group: GroupSpec
    freqs: tuple[Character, ...]
    radius: Fraction

    def __init__(self, group: GroupSpec, freqs: Sequence[Character], radius: RationalLike):
        rho = _as_fraction(radius, "radius")
        if not (0 < rho <= Fraction(1, 2)):
            raise ValidationError(f"radius must lie in (0, 1/2], got {rho}")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "freqs", _canonical_freqs(group, freqs))
        object.__setattr__(self, "radius", rho)

    def member(self, x: Element) -> bool:
        if x.group != self.group:
            raise GroupMismatchError("element belongs to a different group")
        return all(
            torus_distance_fraction(xi.eval_fraction(x)) < self.radius for xi in self.freqs
        )

    def __contains__(self, x: Element) -> bool:
        return self.member(x)

    def mask(self, cap: int = _EXHAUSTIVE_CAP) -> np.ndarray:
        """Boolean membership array over the whole group, exact integer tests."""
        n = self.group.order
        if n > cap:
            raise CapExceededError(f"group order {n} exceeds enumeration cap {cap}")
        keep = np.ones(n, dtype=bool)
        L = self.group.exponent_lcm
        p, q = self.radius.numerator, self.radius.denominator
        for xi in self.freqs:
            r = xi.residue_vector()
            dist = np.minimum(r, L - r)  # torus distance in units of 1/L
            keep &= dist * q < p * L
        return keep

    def indices(self, cap: int = _EXHAUSTIVE_CAP) -> np.ndarray:
        return np.nonzero(self.mask(cap))[0]

    def measure(self, cap: int = _EXHAUSTIVE_CAP) -> Fraction:
        """mu(B) = |B| / |G| as an exact fraction."""
        return Fraction(int(self.mask(cap).sum()), self.group.order)

    def mu(self, cap: int = _EXHAUSTIVE_CAP) -> GroupFunction:
        """The mean-one normalized indicator used as a convolution kernel."""
        return GroupFunction.normalized_indicator(self.group, self.mask(cap))


def torus_distance_fraction(t: Fraction) -> Fraction:
    t = t % 1
    return min(t, 1 - t)


def bohr_membership(B: BohrSet, x: Element) -> bool:
    return B.member(x)


def bohr_measure(B: BohrSet, cap: int = _EXHAUSTIVE_CAP) -> Fraction:
    return B.measure(cap)


def volume_lower_bound(s: int, rho: RationalLike) -> Fraction:
    """N^{-s} with N the least integer satisfying 1/N < rho.

    Covering G by N^{|S|} translates of B(S, rho) forces mu(B) >= N^{-|S|}.
    """
    if s < 0:
        raise ValidationError("frequency count must be nonnegative")
    r = _as_fraction(rho, "rho")
    if not (0 < r <= Fraction(1, 2)):
        raise ValidationError(f"rho must lie in (0, 1/2], got {r}")
    N = r.denominator // r.numerator + 1
    return Fraction(1, N**s)


@dataclass(frozen=True)
class BohrPartition:
    """The partition of G by the half-open interval [(s_i-1)/N, s_i/N) each
    xi_i(x) falls in; N = 1/width must be a positive integer."""

    group: GroupSpec
    freqs: tuple[Character, ...]
    width: Fraction

    def __init__(self, group: GroupSpec, freqs: Sequence[Character], width: RationalLike):
        delta = _as_fraction(width, "width")
        if delta.numerator != 1 or delta.denominator < 1:
            raise ValidationError(f"width must be 1/N for an integer N >= 1, got {delta}")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "freqs", _canonical_freqs(group, freqs))
        object.__setattr__(self, "width", delta)

    @property
    def resolution(self) -> int:
        """N = 1/width."""
        return self.width.denominator

    @property
    def nominal_part_count(self) -> int:
        return self.resolution ** len(self.freqs)

    def label_of(self, x: Element) -> tuple[int, ...]:
        """s_i = 1 + floor(N * xi_i(x)), exact; labels live in [N]^{|S|}."""
        if x.group != self.group:
            raise GroupMismatchError("element belongs to a different group")
        N = self.resolution
        out = []
        for xi in self.freqs:
            t = xi.eval_fraction(x) % 1
            out.append(1 + (N * t.numerator) // t.denominator)
        return tuple(out)

    def label_matrix(self, cap: int = _EXHAUSTIVE_CAP) -> np.ndarray:
        """(|G|, |S|) int64 array of interval labels, whole group at once."""
        n = self.group.order
        if n > cap:
            raise CapExceededError(f"group order {n} exceeds enumeration cap {cap}")
        N = self.resolution
        L = self.group.exponent_lcm
        cols = [1 + (N * xi.residue_vector()) // L for xi in self.freqs]
        if not cols:
            return np.zeros((n, 0), dtype=np.int64)
        return np.stack(cols, axis=1)

    def part_ids(self, cap: int = _EXHAUSTIVE_CAP) -> tuple[np.ndarray, list[tuple[int, ...]], np.ndarray]:
        """Compact ids: (ids over G, sorted distinct labels, part sizes)."""
        mat = self.label_matrix(cap)
        if mat.shape[1] == 0:
            return (
                np.zeros(self.group.order, dtype=np.int64),
                [()],
                np.array([self.group.order], dtype=np.int64),
            )
        uniq, inverse, counts = np.unique(mat, axis=0, return_inverse=True, return_counts=True)
        labels = [tuple(int(v) for v in row) for row in uniq]
        return inverse.ravel().astype(np.int64), labels, counts.astype(np.int64)

    def parts(self, cap: int = _EXHAUSTIVE_CAP) -> list[tuple[tuple[int, ...], np.ndarray]]:
        """Nonempty parts as (label, element indices), label-lexicographic."""
        ids, labels, _ = self.part_ids(cap)
        return [(lab, np.nonzero(ids == k)[0]) for k, lab in enumerate(labels)]

    def project(self, f: GroupFunction, cap: int = _EXHAUSTIVE_CAP) -> GroupFunction:
        """Conditional expectation of f given the partition (per-part mean)."""
        if f.group != self.group:
            raise GroupMismatchError("function lives on a different group")
        ids, _, counts = self.part_ids(cap)
        vals = np.asarray(f.values)
        if np.iscomplexobj(vals):
            means = (
                np.bincount(ids, weights=vals.real) + 1j * np.bincount(ids, weights=vals.imag)
            ) / counts
        else:
            means = np.bincount(ids, weights=vals) / counts
        return GroupFunction(self.group, means[ids])


def partition_label(P: BohrPartition, x: Element) -> tuple[int, ...]:
    return P.label_of(x)


def translate_containment_bound(s: int, rho: RationalLike, delta: RationalLike) -> Fraction:
    """Pinned prediction 8 * rho * |S| / delta for the translate check."""
    return 8 * _as_fraction(rho, "rho") * s / _as_fraction(delta, "delta")


def part_absorption_bound(s: int, rho: RationalLike, delta_prime: RationalLike) -> Fraction:
    """Pinned prediction 4 * delta' * |S| / (rho * C) with C the covering
    constant N^{-|S|} from volume_lower_bound."""
    r = _as_fraction(rho, "rho")
    C = volume_lower_bound(s, r)
    return 4 * _as_fraction(delta_prime, "delta_prime") * s / (r * C)


def _sample_indices(n: int, sample_size, seed: int) -> tuple[np.ndarray, bool]:
    """All indices, or a seeded subset; second item flags exhaustiveness."""
    if sample_size is None or sample_size >= n:
        return np.arange(n, dtype=np.int64), True
    if sample_size <= 0:
        raise ValidationError("sample_size must be positive")
    rng = np.random.default_rng(seed)
    picked = rng.choice(n, size=sample_size, replace=False)
    return np.sort(picked.astype(np.int64)), False


def verify_translate_containment(
    group: GroupSpec,
    freqs: Sequence[Character],
    delta: RationalLike,
    rho: RationalLike,
    sample_size: int | None = None,
    seed: int = 0,
    cap: int = _EXHAUSTIVE_CAP,
) -> Fraction:
    """Fraction of x whose translate x + B(S, rho) meets two parts of
    the width-delta partition.

    Exhaustive over x when sample_size is None.  When exhaustive and the
    pinned prediction 8*rho*|S|/delta is < 1, a violation of it raises
    BoundViolation rather than passing silently.
    """
    S = _canonical_freqs(group, freqs)
    B = BohrSet(group, S, rho)
    partition = BohrPartition(group, S, delta)
    ids, _, _ = partition.part_ids(cap)
    b_idx = B.indices(cap)
    xs, exhaustive = _sample_indices(group.order, sample_size, seed)
    bad = 0
    for x in xs:
        perm = group.translate_permutation(int(x))
        labs = ids[perm[b_idx]]
        if labs.min() != labs.max():
            bad += 1
    fraction = Fraction(bad, len(xs))
    bound = translate_containment_bound(len(S), rho, delta)
    if exhaustive and bound < 1 and fraction > bound:
        raise BoundViolation(
            f"translate containment failed on {fraction} of translates; "
            f"pinned bound 8*rho*|S|/delta = {bound}"
        )
    return fraction


def verify_part_absorption(
    group: GroupSpec,
    freqs: Sequence[Character],
    fine_freqs: Sequence[Character],
    rho: RationalLike,
    delta_prime: RationalLike,
    sample_size: int | None = None,
    seed: int = 0,
    cap: int = _EXHAUSTIVE_CAP,
) -> Fraction:
    """Worst case over x of the fraction of y in B(S, rho) for which the fine
    part containing x + y is not a subset of x + B(S, rho).

    Requires S to be a subset of S'.  Exhaustive over x when sample_size is
    None; the pinned prediction 4*delta'*|S|/(rho*C) is asserted when < 1.
    """
    S = _canonical_freqs(group, freqs)
    S_fine = _canonical_freqs(group, fine_freqs)
    fine_coeffs = {xi.coeffs for xi in S_fine}
    if any(xi.coeffs not in fine_coeffs for xi in S):
        raise ValidationError("the fine frequency set must contain the coarse one")
    B = BohrSet(group, S, rho)
    fine = BohrPartition(group, S_fine, delta_prime)
    ids, labels, _ = fine.part_ids(cap)
    n_parts = len(labels)
    mask_B = B.mask(cap)
    b_idx = np.nonzero(mask_B)[0]
    neg = group.negation_permutation()
    xs, exhaustive = _sample_indices(group.order, sample_size, seed)
    worst = Fraction(0)
    for x in xs:
        fwd = group.translate_permutation(int(x))
        back = group.translate_permutation(int(neg[x]))
        in_translate = mask_B[back]  # g in x + B  <=>  g - x in B
        uncovered = np.bincount(ids[~in_translate], minlength=n_parts) > 0
        bad = int(uncovered[ids[fwd[b_idx]]].sum())
        frac = Fraction(bad, len(b_idx))
        if frac > worst:
            worst = frac
    bound = part_absorption_bound(len(S), rho, delta_prime)
    if exhaustive and bound < 1 and worst > bound:
        raise BoundViolation(
            f"part absorption failed on a {worst} fraction; "
            f"pinned bound 4*delta'*|S|/(rho*C) = {bound}"
        )
    return worst


@dataclass(frozen=True, eq=False)
class BoxDecomposition:
    """Disjoint product boxes inside a planar target, plus what is left over.

    Each box is a (row element indices, column element indices) pair; boxes
    are products of distinct fine-part pairs, hence pairwise disjoint.
    Measures are relative to G x G.
    """

    boxes: tuple[tuple[np.ndarray, np.ndarray], ...]
    residual_measure: float
    target_measure: float

    def __post_init__(self):
        if self.residual_measure < -1e-12:
            raise ValidationError("residual measure cannot be negative")

    @property
    def box_count(self) -> int:
        return len(self.boxes)

    @property
    def covered_measure(self) -> float:
        return self.target_measure - self.residual_measure


def box_approximation(
    target: Union[BohrSet, tuple[BohrPartition, tuple[int, ...]]],
    z0: Element,
    eps0: float,
    delta_prime: RationalLike,
    cap: int = _BOX_CAP,
) -> BoxDecomposition:
    """Cover {(x, y): x + y + z0 in B} by product boxes of fine parts.

    The fine partition uses the target's own frequency set at width delta'.
    Every box returned is fully inside the planar set (checked exhaustively).
    When delta' <= eps0 * C_{|S|,rho} / |S| holds (with the part variant's
    smaller constant when the target is a partition part), the leftover is
    asserted to be at most eps0 * mu(B).
    """
    if not (0 < eps0 < 1):
        raise ValidationError("eps0 must lie in (0, 1)")
    if isinstance(target, BohrSet):
        group, S = target.group, target.freqs
        mask_B = target.mask(cap)
        smallness = (
            float(volume_lower_bound(len(S), target.radius)) * eps0 / max(1, len(S))
        )
    else:
        partition, label = target
        group, S = partition.group, partition.freqs
        ids, labels, _ = partition.part_ids(cap)
        try:
            k = labels.index(tuple(label))
        except ValueError:
            raise ValidationError(f"partition has no nonempty part labeled {label}")
        mask_B = ids == k
        # the part variant replaces C_{|S|,rho} by eps0 * width^{|S|}
        smallness = (
            eps0 * float(partition.width) ** len(S) * eps0 / max(1, len(S))
        )
    n = group.order
    if n > cap:
        raise CapExceededError(f"group order {n} exceeds box-approximation cap {cap}")
    if z0.group != group:
        raise GroupMismatchError("z0 belongs to a different group")

    fine = BohrPartition(group, S, delta_prime)
    ids_fine, labels_fine, counts = fine.part_ids(cap)
    P = len(labels_fine)

    # inside[x, y] <=> x + y + z0 in B; built one row at a time.
    inside = np.empty((n, n), dtype=bool)
    for x in range(n):
        shift = group.translate_permutation(int((group.element(x) + z0).index))
        inside[x] = mask_B[shift]

    comb = ids_fine[:, None] * P + ids_fine[None, :]
    bad_per_pair = np.bincount(comb[~inside].ravel(), minlength=P * P).reshape(P, P)
    full = bad_per_pair == 0

    part_indices = [np.nonzero(ids_fine == k)[0] for k in range(P)]
    boxes = []
    covered_cells = 0
    for a in range(P):
        for b in range(P):
            if full[a, b]:
                boxes.append((part_indices[a], part_indices[b]))
                covered_cells += int(counts[a]) * int(counts[b])

    target_cells = int(inside.sum())
    target_measure = target_cells / n**2
    residual = (target_cells - covered_cells) / n**2
    mu_B = mask_B.sum() / n
    if float(_as_fraction(delta_prime, "delta_prime")) <= smallness and residual > eps0 * mu_B + 1e-12:
        raise BoundViolation(
            f"box residual {residual} exceeds eps0 * mu(B) = {eps0 * mu_B} "
            "despite the fine-width hypothesis"
        )
    return BoxDecomposition(tuple(boxes), residual, target_measure)


class SmoothingCheck(NamedTuple):
    """L2 deviations of the two convolution-smoothing identities, plus the
    smallest eps0 each hypothesis supports (0 when S is empty)."""

    e1: float
    e2: float
    eps0_coarse: float
    eps0_fine: float


def check_convolution_smoothing(
    f: GroupFunction,
    freqs: Sequence[Character],
    fine_freqs: Sequence[Character],
    delta: RationalLike,
    delta_prime: RationalLike,
    rho: RationalLike,
    cap: int = _EXHAUSTIVE_CAP,
) -> SmoothingCheck:
    """Measure both smoothing deviations for f: G -> [0, 1].

    e1 = || f|_B - mu_B * f|_B ||_{L2}   (coarse projection is conv-stable)
    e2 = || mu_B * f - mu_B * f|_B' ||_{L2}   (fine projection then convolve)

    eps0_coarse solves rho = eps0^2 * delta / |S|; eps0_fine solves
    delta' = eps0 * C_{|S|,rho} / |S|.  Values are reported, not enforced.
    """
    group = f.group
    S = _canonical_freqs(group, freqs)
    S_fine = _canonical_freqs(group, fine_freqs)
    fine_coeffs = {xi.coeffs for xi in S_fine}
    if any(xi.coeffs not in fine_coeffs for xi in S):
        raise ValidationError("the fine frequency set must contain the coarse one")
    B = BohrSet(group, S, rho)
    coarse = BohrPartition(group, S, delta)
    fine = BohrPartition(group, S_fine, delta_prime)
    mu_B = B.mu(cap)
    f_coarse = coarse.project(f, cap)
    f_fine = fine.project(f, cap)
    e1 = lp_norm(
        GroupFunction(group, f_coarse.values - convolve(mu_B, f_coarse).values), 2
    )
    e2 = lp_norm(
        GroupFunction(group, convolve(mu_B, f).values - convolve(mu_B, f_fine).values), 2
    )
    s = len(S)
    rho_f = _as_fraction(rho, "rho")
    delta_f = _as_fraction(delta, "delta")
    dp_f = _as_fraction(delta_prime, "delta_prime")
    eps0_coarse = math.sqrt(float(rho_f * s / delta_f)) if s else 0.0
    eps0_fine = float(dp_f * s / volume_lower_bound(s, rho_f)) if s else 0.0
    return SmoothingCheck(e1, e2, eps0_coarse, eps0_fine)
