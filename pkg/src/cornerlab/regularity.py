"""Regularity engines: spectral (Bohr) regularization, Frieze-Kannan weak
regularity under the cut norm, and the combined double-regularity driver.

The spectral engine decomposes [0,1]-valued functions on G into a part that
is constant on a Bohr partition, an L2-small part, and a part whose restricted
Fourier coefficients are uniformly small.  The weak engine refines a partition
of G until every target function on G x G is within eps of its box averages in
cut norm.  The double driver alternates the two until the box averages
stabilize, so the final partition is simultaneously graph-regular for the
plane functions and Fourier-pseudorandom as a family of subsets of G.

Implicit multiplicative constants are pinned to explicit values so the claims
are testable: 4 for the restricted-spectrum smallness (2 from the triangle
inequality off the frequency set, 2*sin(pi*rho) <= 4*threshold on it, checked
as a hypothesis), and radii/widths are rounded to exact unit fractions by
taking ceilings of the growth function.  Widths finer than the group exponent
L are capped at the smallest admissible multiple at or beyond L: every width
1/N with N >= L already induces the finest partition the frequency set can
express, so the cap changes nothing except keeping integers bounded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bohr import BohrPartition, BohrSet
from .errors import BoundViolation, CapExceededError, ValidationError
from .fourier import GroupFunction, convolve, dft, large_spectrum, lp_norm
from .groups import Character, GroupSpec

CUT_EXACT_CAP = 22
_CUT_AUTO_EXACT = 16
_WEAK_CAP = 2**8
_BOHR_CAP = 2**10
_DOUBLE_CAP = 2**7
_SPECTRUM_FLOOR = 1e-15
_ALTERNATING_RESTARTS = 32


@dataclass(frozen=True)
class GrowthFunction:
    """A named growth rate from a small catalog.

    polynomial: F(t) = c * t^k;  exponential: F(t) = c * 2^t.
    Parameters are constrained so that F(t) >= 1 and F is nondecreasing on
    t >= 1.
    """

    kind: str
    c: float = 1.0
    k: float = 1.0

    def __post_init__(self):
        if self.kind not in ("polynomial", "exponential"):
            raise ValidationError(f"unknown growth kind {self.kind!r}")
        if self.c < 1:
            raise ValidationError("growth coefficient c must be >= 1")
        if self.kind == "polynomial" and self.k < 0:
            raise ValidationError("polynomial exponent k must be >= 0")

    def __call__(self, t: float) -> float:
        t = float(t)
        try:
            if self.kind == "polynomial":
                return self.c * t**self.k
            return self.c * 2.0**t
        except OverflowError:
            return math.inf

    def ceil_value(self, t: float) -> int:
        """ceil(F(t)) clamped to a machine-sized integer."""
        value = self(t)
        if not math.isfinite(value) or value > 2**62:
            return 2**62
        return max(1, math.ceil(value))

    def spec_string(self) -> str:
        if self.kind == "polynomial":
            return f"poly:{self.c!r},{self.k!r}"
        return f"exp:{self.c!r}"


def parse_growth_spec(text: str) -> GrowthFunction:
    """Parse "poly:c,k" or "exp:c" (e.g. "poly:4,1" for F(t) = 4t)."""
    cleaned = text.strip().lower()
    if ":" not in cleaned:
        raise ValidationError(f"growth spec needs 'kind:params', got {text!r}")
    kind, _, params = cleaned.partition(":")
    try:
        values = [float(p) for p in params.split(",") if p]
    except ValueError:
        raise ValidationError(f"growth parameters must be numbers: {text!r}")
    if kind in ("poly", "polynomial"):
        if len(values) != 2:
            raise ValidationError("polynomial growth needs c,k")
        return GrowthFunction("polynomial", values[0], values[1])
    if kind in ("exp", "exponential"):
        if len(values) != 1:
            raise ValidationError("exponential growth needs c")
        return GrowthFunction("exponential", values[0])
    raise ValidationError(f"unknown growth kind {kind!r}")


class Partition:
    """A partition of G as compact integer labels over the enumeration."""

    __slots__ = ("group", "labels", "_sizes")

    def __init__(self, group: GroupSpec, labels: np.ndarray):
        labels = np.asarray(labels)
        if labels.shape != (group.order,):
            raise ValidationError("labels must cover the group exactly once")
        _, inverse = np.unique(labels, return_inverse=True)
        self.group = group
        self.labels = inverse.ravel().astype(np.int64)
        self._sizes = np.bincount(self.labels)

    @classmethod
    def trivial(cls, group: GroupSpec) -> "Partition":
        return cls(group, np.zeros(group.order, dtype=np.int64))

    @classmethod
    def discrete(cls, group: GroupSpec) -> "Partition":
        return cls(group, np.arange(group.order, dtype=np.int64))

    @classmethod
    def from_bohr(cls, bp: BohrPartition) -> "Partition":
        ids, _, _ = bp.part_ids()
        return cls(bp.group, ids)

    @property
    def part_count(self) -> int:
        return len(self._sizes)

    @property
    def sizes(self) -> np.ndarray:
        return self._sizes.copy()

    def part_indices(self) -> list[np.ndarray]:
        return [np.nonzero(self.labels == k)[0] for k in range(self.part_count)]

    def common_refinement(self, other: "Partition") -> "Partition":
        if other.group != self.group:
            raise ValidationError("partitions live on different groups")
        combined = self.labels * other.part_count + other.labels
        return Partition(self.group, combined)

    def refine_with_mask(self, mask: np.ndarray) -> "Partition":
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.group.order,):
            raise ValidationError("mask must cover the group")
        return Partition(self.group, 2 * self.labels + mask)

    def is_refinement_of(self, other: "Partition") -> bool:
        for k in range(self.part_count):
            if len(np.unique(other.labels[self.labels == k])) != 1:
                return False
        return True

    def project_line(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64)
        means = np.bincount(self.labels, weights=values) / self._sizes
        return means[self.labels]

    def project_plane(self, f: np.ndarray) -> np.ndarray:
        """Box averages f|_{P x P} on G x G."""
        f = np.asarray(f, dtype=np.float64)
        n = self.group.order
        if f.shape != (n, n):
            raise ValidationError(f"plane function must be {n} x {n}")
        P = self.part_count
        comb = self.labels[:, None] * P + self.labels[None, :]
        sums = np.bincount(comb.ravel(), weights=f.ravel(), minlength=P * P)
        cell = np.outer(self._sizes, self._sizes).ravel().astype(np.float64)
        means = sums / cell
        return means[comb]

    def plane_energy(self, f: np.ndarray) -> float:
        """||f|_{P x P}||_{L2}^2 with the mean normalization."""
        proj = self.project_plane(f)
        return float((proj**2).mean())

    def indicator_functions(self) -> list[GroupFunction]:
        return [
            GroupFunction(self.group, (self.labels == k).astype(np.float64))
            for k in range(self.part_count)
        ]


def _check_plane_inputs(fs: Sequence[np.ndarray], group: GroupSpec, cap: int) -> list[np.ndarray]:
    n = group.order
    if n > cap:
        raise CapExceededError(f"group order {n} exceeds cap {cap}")
    out = []
    for j, f in enumerate(fs):
        arr = np.asarray(f, dtype=np.float64)
        if arr.shape != (n, n):
            raise ValidationError(f"function {j} must be {n} x {n}")
        if arr.min() < -1e-12 or arr.max() > 1 + 1e-12:
            raise ValidationError(f"function {j} must take values in [0, 1]")
        out.append(np.clip(arr, 0.0, 1.0))
    if not out:
        raise ValidationError("need at least one function")
    return out


def _exact_witness(A: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Best (g, h) in {0,1}^n x {0,1}^n for (1/n^2) sum A g h, exactly.

    Enumerates every g; the optimal h given g keeps exactly the columns with
    positive g-weighted sums.  First maximum wins, so results are stable.
    """
    n = A.shape[0]
    powers = np.arange(n, dtype=np.uint64)
    best_val = -math.inf
    best_g = 0
    chunk = 1 << 13
    for lo in range(0, 1 << n, chunk):
        hi = min(lo + chunk, 1 << n)
        idx = np.arange(lo, hi, dtype=np.uint64)
        bits = ((idx[:, None] >> powers[None, :]) & 1).astype(np.float64)
        colsums = bits @ A
        vals = np.clip(colsums, 0.0, None).sum(axis=1)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val = float(vals[j])
            best_g = lo + j
    g = ((best_g >> np.arange(n)) & 1).astype(bool)
    h = (g.astype(np.float64) @ A) > 0
    return best_val / n**2, g, h


def _alternating_witness(
    A: np.ndarray, restarts: int, rng: np.random.Generator
) -> tuple[float, np.ndarray, np.ndarray]:
    """Seeded alternating ascent; a lower bound on the exact witness value."""
    n = A.shape[0]
    best = (0.0, np.zeros(n, dtype=bool), np.zeros(n, dtype=bool))
    for r in range(restarts):
        h = np.ones(n, dtype=bool) if r == 0 else rng.random(n) < 0.5
        g = np.zeros(n, dtype=bool)
        for _ in range(64):
            g_new = (A @ h.astype(np.float64)) > 0
            h_new = (g_new.astype(np.float64) @ A) > 0
            if np.array_equal(g_new, g) and np.array_equal(h_new, h):
                break
            g, h = g_new, h_new
        val = float(g.astype(np.float64) @ A @ h.astype(np.float64)) / n**2
        if val > best[0]:
            best = (val, g, h)
    return best


def cut_norm_witness(
    M: np.ndarray,
    mode: str = "auto",
    restarts: int = _ALTERNATING_RESTARTS,
    seed: int = 0,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Two-sided cut-norm witness: value, row set g, column set h.

    The value is max over the sign of M of sup_{g,h in {0,1}} of the
    normalized box sum (1/n^2) sum_{x,y} (+-M)(x,y) g(x) h(y); taking both
    signs certifies smallness of |box sums|.  Exact mode enumerates the 2^n
    row selections with the closed-form optimal column response; alternating
    mode is a seeded lower bound.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError("cut norm needs a square matrix")
    if not np.all(np.isfinite(M)):
        raise ValidationError("cut norm input must be finite")
    n = M.shape[0]
    if mode == "auto":
        mode = "exact" if n <= _CUT_AUTO_EXACT else "alternating"
    if mode == "exact":
        if n > CUT_EXACT_CAP:
            raise CapExceededError(f"exact cut norm is limited to n <= {CUT_EXACT_CAP}")
        best = (-math.inf, None, None)
        for sign in (1.0, -1.0):
            val, g, h = _exact_witness(sign * M)
            if val > best[0]:
                best = (val, g, h)
        return best
    if mode == "alternating":
        rng = np.random.default_rng(seed)
        best = (-math.inf, None, None)
        for sign in (1.0, -1.0):
            val, g, h = _alternating_witness(sign * M, restarts, rng)
            if val > best[0]:
                best = (val, g, h)
        return best
    raise ValidationError(f"unknown cut-norm mode {mode!r}")


def cut_norm_estimate(
    M: np.ndarray,
    mode: str = "auto",
    restarts: int = _ALTERNATING_RESTARTS,
    seed: int = 0,
) -> float:
    value, _, _ = cut_norm_witness(M, mode=mode, restarts=restarts, seed=seed)
    return value


@dataclass
class WeakRegularityResult:
    """Partition certified (or estimated) to make all residual cut norms
    small, with the per-round energy bookkeeping that bounds the rounds."""

    partition: Partition
    rounds: int
    energy_history: list[list[float]]
    residuals: list[float]
    certified: bool
    round_records: list[dict] = field(default_factory=list)


def weak_regularity(
    fs: Sequence[np.ndarray],
    eps: float,
    group: GroupSpec,
    initial: Partition | None = None,
    mode: str = "auto",
    restarts: int = _ALTERNATING_RESTARTS,
    seed: int = 0,
    cap: int = _WEAK_CAP,
) -> WeakRegularityResult:
    """Refine a partition until every f is eps-close to its box averages.

    Each round finds the worst (function, box) witness; if its normalized box
    sum exceeds eps, the partition is split by the witness row and column
    sets.  That split raises the witness function's projection energy by more
    than eps^2, and energies are bounded by 1, so the total number of rounds
    is at most sum_f ceil(1/eps^2); exceeding it raises AssertionError.
    """
    if eps <= 0:
        raise ValidationError("eps must be positive")
    arrays = _check_plane_inputs(fs, group, cap)
    part = initial if initial is not None else Partition.trivial(group)
    if part.group != group:
        raise ValidationError("initial partition lives on a different group")
    n = group.order
    exact_used = mode == "exact" or (mode == "auto" and n <= _CUT_AUTO_EXACT)
    round_bound = len(arrays) * math.ceil(1.0 / eps**2)
    energy_history = [[part.plane_energy(f) for f in arrays]]
    records: list[dict] = []
    rounds = 0
    while True:
        worst_val, worst_j, worst_g, worst_h = -math.inf, -1, None, None
        for j, f in enumerate(arrays):
            D = f - part.project_plane(f)
            val, g, h = cut_norm_witness(
                D, mode=mode, restarts=restarts, seed=seed + 131 * rounds + j
            )
            if val > worst_val:
                worst_val, worst_j, worst_g, worst_h = val, j, g, h
        records.append(
            {
                "round": rounds,
                "part_count": part.part_count,
                "worst_value": worst_val,
                "worst_function": worst_j,
                "energies": energy_history[-1],
            }
        )
        if worst_val <= eps:
            break
        part = part.refine_with_mask(worst_g).refine_with_mask(worst_h)
        rounds += 1
        energy_history.append([part.plane_energy(f) for f in arrays])
        if rounds > round_bound:
            raise AssertionError(
                f"weak regularity exceeded its energy-increment bound of {round_bound} rounds"
            )
    residuals = [
        cut_norm_estimate(
            f - part.project_plane(f), mode=mode, restarts=restarts, seed=seed + 7919 + j
        )
        for j, f in enumerate(arrays)
    ]
    return WeakRegularityResult(part, rounds, energy_history, residuals, exact_used, records)


def _capped_width_denominator(required: int, prev: int | None, finest: int) -> tuple[int, bool]:
    """Smallest multiple of prev at or above required, capped near finest.

    Any denominator >= finest (the group exponent) induces the finest
    partition the frequency set can express, so larger requirements are
    capped at the first admissible value past finest.
    """
    base = prev if prev is not None else 1
    target = min(required, finest) if required > finest else required
    den = base * math.ceil(target / base)
    capped = required > den
    if den < 1:
        den = base
    return den, capped


@dataclass
class BohrDecomposition:
    """Output of the spectral regularization loop.

    components[j] = (I0, I1, I2) for the j-th input, where I0 is the exact
    average over the final Bohr partition, I1 = I * mu_B - I0 is L2-small, and
    I2 = I - I * mu_B has small Fourier coefficients on every part.
    """

    partition: BohrPartition
    bohr_set: BohrSet
    components: list[tuple[GroupFunction, GroupFunction, GroupFunction]]
    achieved_l2: float
    achieved_linf: float
    linf_bound: float
    linf_hypothesis: bool
    exit_gap: float
    exit_tolerance: float
    rounds: int
    history: list[dict]
    degenerate: bool


def bohr_regularize(
    fns: Sequence[GroupFunction],
    F: GrowthFunction,
    eps: float = 1.0,
    m: int | None = None,
    cap: int = _BOHR_CAP,
) -> BohrDecomposition:
    """Iteratively regularize [0,1]-valued functions against Bohr partitions.

    Round i: take the partition P_i of width delta_i (an integer reciprocal,
    refining the previous width), collect the products I * 1_p over inputs
    and parts, harvest every frequency whose coefficient on some product
    reaches 1/F(|F_i|/delta_i), set the next radius to 1/F(|S_{i+1}|/delta_i),
    and stop as soon as every input moves by at most 1/F(1) in L2 between
    consecutive projections.  Telescoping orthogonality forces termination
    within m*F(1)^2 rounds, which is asserted.

    eps plays no computational role here: the growth function is chosen in
    terms of it by the caller.  It is recorded in the history for traceability.
    """
    if not fns:
        raise ValidationError("need at least one function")
    group = fns[0].group
    n = group.order
    if n > cap:
        raise CapExceededError(f"group order {n} exceeds cap {cap}")
    for f in fns:
        if f.group != group:
            raise ValidationError("all functions must live on the same group")
        vals = np.asarray(f.values)
        if np.iscomplexobj(vals) or vals.min() < -1e-12 or vals.max() > 1 + 1e-12:
            raise ValidationError("inputs must take values in [0, 1]")
    if m is None:
        m = len(fns)
    elif m != len(fns):
        raise ValidationError(f"m = {m} does not match the {len(fns)} inputs")

    L = group.exponent_lcm
    exit_tol = 1.0 / F(1.0)
    max_rounds = m * F(1.0) ** 2

    S: list[Character] = []
    S_coeffs: set = set()
    rho = Fraction(1)  # rho_0 = 1; only 1/rho enters the width rule
    N_i, width_capped = _capped_width_denominator(F.ceil_value(1.0), None, L)
    history: list[dict] = []
    i = 0
    degenerate = False
    while True:
        P_i = BohrPartition(group, S, Fraction(1, N_i))
        ids, labels, counts = P_i.part_ids()
        part_count = len(labels)
        products = [
            GroupFunction(group, np.asarray(I.values) * (ids == k))
            for I in fns
            for k in range(part_count)
        ]
        n_products = len(products)
        threshold = max(1.0 / F(n_products * N_i), _SPECTRUM_FLOOR)
        harvested: set = set()
        for f in products:
            for xi in large_spectrum(f, threshold):
                harvested.add(xi.coeffs)
        new_coeffs = sorted(
            (c for c in harvested if c not in S_coeffs),
            key=lambda c: Character(group, c).index,
        )
        S_next = S + [Character(group, c) for c in new_coeffs]
        coeffs_next = S_coeffs | set(new_coeffs)

        rho_den_req = F.ceil_value(len(S_next) * N_i)
        rho_den = min(max(rho_den_req, 2), 2 * L)
        radius_capped = rho_den_req > rho_den
        rho_next = Fraction(1, rho_den)
        B_next = BohrSet(group, S_next, rho_next)

        N_next, next_capped = _capped_width_denominator(F.ceil_value(rho_den), N_i, L)
        P_next = BohrPartition(group, S_next, Fraction(1, N_next))

        projections_i = [P_i.project(I) for I in fns]
        projections_next = [P_next.project(I) for I in fns]
        gaps = [
            lp_norm(GroupFunction(group, b.values - a.values), 2)
            for a, b in zip(projections_i, projections_next)
        ]
        gap = max(gaps)
        history.append(
            {
                "round": i,
                "eps": eps,
                "freq_count": len(S),
                "rho": str(rho),
                "delta": f"1/{N_i}",
                "part_count": part_count,
                "threshold": threshold,
                "new_frequencies": len(new_coeffs),
                "rho_next": str(rho_next),
                "delta_next": f"1/{N_next}",
                "energies": [float((p.values**2).mean()) for p in projections_i],
                "gap": gap,
                "width_capped": width_capped or next_capped,
                "radius_capped": radius_capped,
            }
        )
        degenerate = degenerate or width_capped or next_capped or radius_capped
        if gap <= exit_tol + 1e-12:
            break
        i += 1
        if i > max_rounds + 1e-9:
            raise AssertionError(
                f"regularization ran {i} rounds, beyond the telescoping bound {max_rounds}"
            )
        S, S_coeffs, rho, N_i, width_capped = S_next, coeffs_next, rho_next, N_next, next_capped

    mu = B_next.mu()
    components = []
    worst_l2 = 0.0
    worst_linf = 0.0
    for I, proj in zip(fns, projections_i):
        conv = convolve(mu, I)
        I0 = proj
        I1 = GroupFunction(group, conv.values - proj.values)
        I2 = GroupFunction(group, np.asarray(I.values, dtype=np.float64) - conv.values)
        components.append((I0, I1, I2))
        worst_l2 = max(worst_l2, lp_norm(I1, 2))
        for k in range(part_count):
            restricted = GroupFunction(group, I2.values * (ids == k))
            coeffs = dft(restricted).coefficients
            worst_linf = max(worst_linf, float(np.abs(coeffs).max()))
    linf_bound = 4.0 * threshold
    hypothesis = 2.0 * math.sin(math.pi * float(rho_next)) <= linf_bound
    if hypothesis and worst_linf > linf_bound + 1e-12:
        raise BoundViolation(
            f"restricted spectrum {worst_linf} exceeded the pinned bound {linf_bound} "
            "although the radius hypothesis held"
        )
    degenerate = degenerate or part_count == n or len(S_next) == n
    return BohrDecomposition(
        partition=P_i,
        bohr_set=B_next,
        components=components,
        achieved_l2=worst_l2,
        achieved_linf=worst_linf,
        linf_bound=linf_bound,
        linf_hypothesis=hypothesis,
        exit_gap=gap,
        exit_tolerance=exit_tol,
        rounds=i,
        history=history,
        degenerate=degenerate,
    )


@dataclass
class DoubleRegularityResult:
    """Joint output: partitions, plane decompositions, and the spectral
    decomposition of the final inner partition's indicators."""

    bohr: BohrDecomposition
    pi_entry: Partition
    pi: Partition
    pi_next: Partition
    f_components: list[tuple[np.ndarray, np.ndarray, np.ndarray]]
    f1_norms: list[float]
    f2_cut_estimates: list[float]
    cut_certified: bool
    rounds: int
    round_records: list[dict]
    degenerate: bool


def double_regularity(
    fs: Sequence[np.ndarray],
    eps: float,
    F: GrowthFunction,
    group: GroupSpec,
    t: int | None = None,
    mode: str = "auto",
    restarts: int = _ALTERNATING_RESTARTS,
    seed: int = 0,
    cap: int = _DOUBLE_CAP,
) -> DoubleRegularityResult:
    """Alternate spectral and weak regularity until box averages stabilize.

    Each outer round regularizes the current partition's part indicators
    spectrally (so parts behave pseudorandomly in G), refines by the Bohr
    partition, then applies weak regularity at threshold 1/F(|Pi|) to the
    plane functions.  The loop exits when no f moves more than 1/F(1/eps)
    in L2 between consecutive box averages; the telescoping argument bounds
    the outer rounds by t*F(1/eps)^2, which is asserted.
    """
    if eps <= 0:
        raise ValidationError("eps must be positive")
    arrays = _check_plane_inputs(fs, group, cap)
    if t is None:
        t = len(arrays)
    elif len(arrays) > t:
        raise ValidationError(f"at most t = {t} functions allowed, got {len(arrays)}")
    exit_tol = 1.0 / F(1.0 / eps)
    max_rounds = t * F(1.0 / eps) ** 2
    pi_i = Partition.trivial(group)
    records: list[dict] = []
    i = 0
    while True:
        indicators = pi_i.indicator_functions()
        bohr = bohr_regularize(indicators, F, eps=eps, m=len(indicators))
        pi = pi_i.common_refinement(Partition.from_bohr(bohr.partition))
        weak = weak_regularity(
            arrays,
            eps=1.0 / F(float(pi.part_count)),
            group=group,
            initial=pi,
            mode=mode,
            restarts=restarts,
            seed=seed + 31 * i,
        )
        pi_next = weak.partition
        gaps = [
            float(np.sqrt(((pi_next.project_plane(f) - pi.project_plane(f)) ** 2).mean()))
            for f in arrays
        ]
        gap = max(gaps)
        records.append(
            {
                "round": i,
                "pi_entry_parts": pi_i.part_count,
                "bohr_rounds": bohr.rounds,
                "bohr_parts": len(bohr.partition.part_ids()[1]),
                "pi_parts": pi.part_count,
                "pi_next_parts": pi_next.part_count,
                "weak_rounds": weak.rounds,
                "gap": gap,
                "degenerate": bohr.degenerate,
            }
        )
        if gap <= exit_tol + 1e-12:
            break
        pi_i = pi_next
        i += 1
        if i > max_rounds + 1e-9:
            raise AssertionError(
                f"double regularity ran {i} rounds, beyond the bound {max_rounds}"
            )
    f_components = []
    f1_norms = []
    f2_cut = []
    for j, f in enumerate(arrays):
        f0 = pi.project_plane(f)
        fp = pi_next.project_plane(f)
        f1 = fp - f0
        f2 = f - fp
        f_components.append((f0, f1, f2))
        f1_norms.append(float(np.sqrt((f1**2).mean())))
        f2_cut.append(
            cut_norm_estimate(f2, mode=mode, restarts=restarts, seed=seed + 104729 + j)
        )
    n = group.order
    exact_used = mode == "exact" or (mode == "auto" and n <= _CUT_AUTO_EXACT)
    return DoubleRegularityResult(
        bohr=bohr,
        pi_entry=pi_i,
        pi=pi,
        pi_next=pi_next,
        f_components=f_components,
        f1_norms=f1_norms,
        f2_cut_estimates=f2_cut,
        cut_certified=exact_used,
        rounds=i,
        round_records=records,
        degenerate=bohr.degenerate or pi_next.part_count == n,
    )
