"""Corner counting in G x G.

A corner is a triple {(x, y), (x, y+d), (x+d, y)}; the profile N(d) counts,
for every difference d, the pairs (x, y) completing such a triple inside a
set A.  The production path packs rows into machine words and popcounts the
AND of three shifted views; a literal triple loop serves as the oracle it is
checked against.

Weighted counts integrate the profile against a mean-one measure nu on the
differences, which equals the triple integral over the hyperplane
x + y + z = 0 of the three pairwise projections of A.  The integer-grid scan
reuses the cyclic machinery but discards triples that wrap around the edge
of [n]^2.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .bohr import BohrSet, RationalLike, _as_fraction
from .errors import CapExceededError, GroupMismatchError, ValidationError
from .fourier import GroupFunction
from .groups import Character, Element, GroupSpec, parse_group_spec
from .parallel import deterministic_map

PROFILE_CAP = 2**12
_NAIVE_CAP = 2**7
_TRIPLE_SUM_CAP = 2**8
_MEAN_ONE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PlaneSet:
    """A subset of G x G as a bit matrix; rows are x, columns are y."""

    group: GroupSpec
    bits: np.ndarray

    def __post_init__(self):
        n = self.group.order
        if n > PROFILE_CAP:
            raise CapExceededError(f"plane sets are capped at |G| <= {PROFILE_CAP}, got {n}")
        bits = np.asarray(self.bits)
        if bits.shape != (n, n):
            raise ValidationError(f"bit matrix must be {n} x {n}, got {bits.shape}")
        object.__setattr__(self, "bits", bits.astype(bool))

    @classmethod
    def random(cls, group: GroupSpec, density: float, seed: int) -> "PlaneSet":
        """Bernoulli(density) per cell from numpy's default PCG64 stream."""
        if not (0 <= density <= 1):
            raise ValidationError(f"density must lie in [0, 1], got {density}")
        if group.order > PROFILE_CAP:
            raise CapExceededError(
                f"plane sets are capped at |G| <= {PROFILE_CAP}, got {group.order}"
            )
        rng = np.random.default_rng(seed)
        bits = rng.random((group.order, group.order)) < density
        return cls(group, bits)

    @classmethod
    def empty(cls, group: GroupSpec) -> "PlaneSet":
        return cls(group, np.zeros((group.order, group.order), dtype=bool))

    @classmethod
    def full(cls, group: GroupSpec) -> "PlaneSet":
        return cls(group, np.ones((group.order, group.order), dtype=bool))

    @property
    def size(self) -> int:
        return int(self.bits.sum())

    @property
    def density(self) -> float:
        return self.size / self.group.order**2

    def transpose(self) -> "PlaneSet":
        return PlaneSet(self.group, self.bits.T)

    def to_text(self) -> str:
        header = f"group {self.group.spec_string()} density {self.density!r}"
        rows = ["".join("1" if b else "0" for b in row) for row in self.bits]
        return "\n".join([header] + rows) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "PlaneSet":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValidationError("empty plane-set file")
        head = lines[0].split()
        if len(head) != 4 or head[0] != "group" or head[2] != "density":
            raise ValidationError(
                "header must read 'group <spec> density <alpha>', got " + lines[0]
            )
        group = parse_group_spec(head[1])
        declared = float(head[3])
        n = group.order
        if len(lines) - 1 != n:
            raise ValidationError(f"expected {n} rows, found {len(lines) - 1}")
        bits = np.zeros((n, n), dtype=bool)
        for x, line in enumerate(lines[1:]):
            row = line.strip()
            if len(row) != n or set(row) - {"0", "1"}:
                raise ValidationError(f"row {x} must be {n} characters of 0/1")
            bits[x] = np.frombuffer(row.encode("ascii"), dtype=np.uint8) == ord("1")
        result = cls(group, bits)
        if abs(result.density - declared) > 1e-9:
            raise ValidationError(
                f"header density {declared} does not match the bits ({result.density})"
            )
        return result

    @classmethod
    def load(cls, path) -> "PlaneSet":
        with open(path, "r", encoding="ascii") as fh:
            return cls.from_text(fh.read())


@dataclass(frozen=True, eq=False)
class CornerProfile:
    """Per-difference corner counts N(d), indexed by element enumeration."""

    group: GroupSpec
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (self.group.order,):
            raise ValidationError("profile length must equal the group order")
        if counts.min(initial=0) < 0:
            raise ValidationError("corner counts cannot be negative")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def total_density(self) -> float:
        return self.total / self.group.order**3


def corner_count_by_difference(
    A: PlaneSet, cap: int = PROFILE_CAP, threads: int | None = None
) -> CornerProfile:
    """Exact N(d) for every d, via packed-row AND/popcount.

    For fixed d the three constraints are the bit matrix itself, its columns
    permuted by y -> y+d, and its rows permuted by x -> x+d.  The column
    permutation is applied before packing; the row permutation rides on the
    packed rows for free.  This is the dominant cost center: O(|G|^3 / w).
    """
    group = A.group
    n = group.order
    if n > cap:
        raise CapExceededError(f"group order {n} exceeds profile cap {cap}")
    packed = np.packbits(A.bits, axis=1)

    def count_one(d: int) -> int:
        perm = group.translate_permutation(d)
        shifted_cols = np.packbits(A.bits[:, perm], axis=1)
        both = packed & shifted_cols & packed[perm]
        return int(np.bitwise_count(both).sum())

    counts = deterministic_map(count_one, range(n), threads)
    profile = CornerProfile(group, np.asarray(counts, dtype=np.int64))
    if profile.counts[0] != A.size:
        raise AssertionError("N(0) must equal |A|; packed path is inconsistent")
    return profile


def corner_count_naive(A: PlaneSet, cap: int = _NAIVE_CAP) -> CornerProfile:
    """Literal triple loop over (d, x, y); the oracle for the packed path."""
    group = A.group
    n = group.order
    if n > cap:
        raise CapExceededError(f"group order {n} exceeds naive-oracle cap {cap}")
    bits = A.bits
    counts = np.zeros(n, dtype=np.int64)
    perms = [group.translate_permutation(d) for d in range(n)]
    for d in range(n):
        perm = perms[d]
        total = 0
        for x in range(n):
            xd = perm[x]
            for y in range(n):
                if bits[x, y] and bits[x, perm[y]] and bits[xd, y]:
                    total += 1
        counts[d] = total
    return CornerProfile(group, counts)


def popular_difference(A: PlaneSet, profile: CornerProfile | None = None) -> tuple[Element, int]:
    """The d != 0 maximizing N(d); ties go to the smallest element index."""
    group = A.group
    if group.order < 2:
        raise ValidationError("popular difference needs a nontrivial group")
    if profile is None:
        profile = corner_count_by_difference(A)
    elif profile.group != group:
        raise GroupMismatchError("profile belongs to a different group")
    tail = profile.counts[1:]
    d = int(np.argmax(tail)) + 1  # argmax returns the first (smallest) index
    return group.element(d), int(tail[d - 1])


def weighted_corner_count(
    A: PlaneSet,
    nu: GroupFunction,
    profile: CornerProfile | None = None,
    cap: int = PROFILE_CAP,
) -> float:
    """(1/|G|^3) sum_d nu(d) N(d) for a mean-one difference measure nu."""
    group = A.group
    if nu.group != group:
        raise GroupMismatchError("nu lives on a different group")
    mean = nu.mean()
    if abs(mean - 1.0) > _MEAN_ONE_TOL:
        raise ValidationError(f"nu must have mean 1 (got {mean})")
    if profile is None:
        profile = corner_count_by_difference(A, cap=cap)
    values = np.asarray(nu.values, dtype=np.float64)
    return float(values @ profile.counts) / group.order**3


def hyperplane_views(A: PlaneSet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three pairwise projections of A embedded in x + y + z = 0.

    f(x, y) = 1_A(x, y); g(x, z) = 1_A(x, -x-z); h(y, z) = 1_A(-y-z, y).
    """
    group = A.group
    n = group.order
    neg = group.negation_permutation()
    f = A.bits.copy()
    g = np.zeros((n, n), dtype=bool)
    h = np.zeros((n, n), dtype=bool)
    for a in range(n):
        # row a of g: columns are -a-z as z runs over G
        shift = group.translate_permutation(a)
        cols = neg[shift]  # index of -(z + a)
        g[a] = A.bits[a, cols]
        h[a] = A.bits[cols, a]  # row a of h: rows are -a-z, column a
    return f, g, h


def triple_sum_from_views(
    views: tuple[np.ndarray, np.ndarray, np.ndarray],
    group: GroupSpec,
    nu: GroupFunction,
    cap: int = _TRIPLE_SUM_CAP,
) -> float:
    """(1/|G|^3) sum_{x,y,z} f(x,y) g(x,z) h(y,z) nu(-x-y-z), literally."""
    n = group.order
    if n > cap:
        raise CapExceededError(f"group order {n} exceeds triple-sum cap {cap}")
    if nu.group != group:
        raise GroupMismatchError("nu lives on a different group")
    f, g, h = (np.asarray(v, dtype=np.float64) for v in views)
    neg = group.negation_permutation()
    negsum = np.zeros((n, n), dtype=np.int64)
    for x in range(n):
        shift = group.translate_permutation(x)
        negsum[x] = neg[shift]  # index of -(x + y)
    nu_vals = np.asarray(nu.values, dtype=np.float64)
    total = 0.0
    for z in range(n):
        back = group.translate_permutation(int(neg[z]))
        w = nu_vals[back[negsum]]  # nu(-x-y-z)
        total += float(np.einsum("xy,x,y,xy->", f, g[:, z], h[:, z], w))
    return total / n**3


def weighted_corner_count_direct(A: PlaneSet, nu: GroupFunction, cap: int = _TRIPLE_SUM_CAP) -> float:
    """Independent evaluation of the weighted count through the hyperplane
    triple sum; the oracle for weighted_corner_count."""
    mean = nu.mean()
    if abs(mean - 1.0) > _MEAN_ONE_TOL:
        raise ValidationError(f"nu must have mean 1 (got {mean})")
    return triple_sum_from_views(hyperplane_views(A), A.group, nu, cap=cap)


def corner_count_fourier_check(A: PlaneSet, nu: GroupFunction, cap: int = _TRIPLE_SUM_CAP) -> float:
    """Second independent path: per-d correlations in float arithmetic.

    N(d) is the inner product of the row-wise product A . A_colshift with the
    row-shifted matrix; everything stays below 2^53 so the float sums are
    exact integers.
    """
    group = A.group
    n = group.order
    if n > cap:
        raise CapExceededError(f"group order {n} exceeds check cap {cap}")
    if nu.group != group:
        raise GroupMismatchError("nu lives on a different group")
    mean = nu.mean()
    if abs(mean - 1.0) > _MEAN_ONE_TOL:
        raise ValidationError(f"nu must have mean 1 (got {mean})")
    bits = A.bits.astype(np.float64)
    nu_vals = np.asarray(nu.values, dtype=np.float64)
    total = 0.0
    for d in range(n):
        perm = group.translate_permutation(d)
        pair = bits * bits[:, perm]
        total += nu_vals[d] * float(np.einsum("xy,xy->", pair, bits[perm]))
    return total / n**3


class IntegerScan(NamedTuple):
    """Best wraparound-free difference on the integer grid.

    difference is the signed pullback d-tilde in (-rho*n, rho*n); count is
    the number of corners whose three points all land inside [n]^2; profile
    maps every candidate signed difference to its valid count.
    """

    difference: int
    count: int
    profile: dict[int, int]


def _signed_candidates(
    n: int, extra_freqs: Sequence[Character], rho: Fraction
) -> tuple[GroupSpec, list[int]]:
    """Nonzero members of B({x -> x/n} union extras, rho), as signed ints."""
    group = GroupSpec((n,))
    freqs = [Character(group, (1,))]
    for xi in extra_freqs:
        if xi.group != group:
            raise GroupMismatchError(f"extra frequency must live on Z{n}")
        freqs.append(xi)
    B = BohrSet(group, freqs, rho)
    out = []
    for d in range(1, n):
        if B.member(group.element(d)):
            out.append(d if 2 * d <= n else d - n)
    return group, out


def _valid_count(bits: np.ndarray, d: int) -> int:
    n = bits.shape[0]
    if d == 0:
        return int(bits.sum())
    e = abs(d)
    if e >= n:
        return 0
    if d > 0:
        block = bits[: n - e, : n - e] & bits[: n - e, e:] & bits[e:, : n - e]
    else:
        block = bits[e:, e:] & bits[e:, : n - e] & bits[: n - e, e:]
    return int(block.sum())


def integer_corner_scan(
    bits: np.ndarray,
    extra_freqs: Sequence[Character] = (),
    rho: RationalLike = Fraction(1, 4),
) -> IntegerScan:
    """Scan A in [n]^2 for the best difference among Bohr-set candidates.

    The grid embeds into (Z/nZ)^2 and candidate differences are the nonzero
    members of a Bohr set whose frequencies always include x -> x/n, so every
    candidate pulls back to a signed integer of magnitude below rho*n.
    Corners are then counted directly on the grid, which silently drops every
    triple that would wrap around an edge.
    """
    bits = np.asarray(bits).astype(bool)
    if bits.ndim != 2 or bits.shape[0] != bits.shape[1]:
        raise ValidationError("the integer scan needs a square bit matrix")
    n = bits.shape[0]
    if n < 2:
        raise ValidationError("grid side must be at least 2")
    r = _as_fraction(rho, "rho")
    if not (0 < r <= Fraction(1, 4)):
        raise ValidationError(f"rho must lie in (0, 1/4], got {r}")
    _, candidates = _signed_candidates(n, extra_freqs, r)
    profile = {d: _valid_count(bits, d) for d in candidates}
    best_d, best_count = 0, -1
    # candidate order follows element enumeration, so the first maximum wins
    for d in candidates:
        if profile[d] > best_count:
            best_d, best_count = d, profile[d]
    if best_count < 0:
        best_d, best_count = 0, 0  # no nonzero candidate at this radius
    return IntegerScan(best_d, best_count, profile)


def integer_corner_scan_naive(bits: np.ndarray, rho: RationalLike = Fraction(1, 4)) -> IntegerScan:
    """Brute-force oracle: triple loop over the grid, differences restricted
    to ||d/n|| < rho by direct rational comparison (no Bohr machinery)."""
    bits = np.asarray(bits).astype(bool)
    n = bits.shape[0]
    r = _as_fraction(rho, "rho")
    if not (0 < r <= Fraction(1, 4)):
        raise ValidationError(f"rho must lie in (0, 1/4], got {r}")
    candidates = []
    for d in range(1, n):
        signed = d if 2 * d <= n else d - n
        if Fraction(abs(signed), n) < r:
            candidates.append(signed)
    profile = {}
    for d in candidates:
        total = 0
        for x in range(n):
            for y in range(n):
                xd, yd = x + d, y + d
                if 0 <= xd < n and 0 <= yd < n:
                    if bits[x, y] and bits[x, yd] and bits[xd, y]:
                        total += 1
        profile[d] = total
    best_d, best_count = 0, -1
    for d in candidates:
        if profile[d] > best_count:
            best_d, best_count = d, profile[d]
    if best_count < 0:
        best_d, best_count = 0, 0
    return IntegerScan(best_d, best_count, profile)
