"""Discrete Fourier analysis over a finite abelian group.

Normalization follows the compact-group convention: transforms integrate
(average) over the group and sum over the dual,

    fhat(xi) = (1/|G|) sum_x f(x) e(-xi(x)),      f(x) = sum_xi fhat(xi) e(xi(x)),

so Plancherel reads ||f||_{L2} = ||fhat||_{l2} with L^p means over G and l^p
sums over the dual.  Convolution carries the same 1/|G| mean factor:
(f*g)(x) = (1/|G|) sum_y f(y) g(x-y), hence mu_B * f is the average of f over
translates of B when mu_B is a mean-one normalized indicator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError, GroupMismatchError, ValidationError
from .groups import Character, GroupSpec

DEFAULT_TRANSFORM_CAP = 2**20
_DIRECT_ORACLE_CAP = 2**12


@dataclass(frozen=True, eq=False)
class GroupFunction:
    """A function G -> R (or C), stored as values in enumeration order."""

    group: GroupSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != (self.group.order,):
            raise ValidationError(
                f"expected {self.group.order} values, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValidationError("function values must be finite")
        if not np.iscomplexobj(vals):
            vals = vals.astype(np.float64)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, group: GroupSpec, c: float) -> "GroupFunction":
        return cls(group, np.full(group.order, c, dtype=np.float64))

    @classmethod
    def indicator(cls, group: GroupSpec, mask: np.ndarray) -> "GroupFunction":
        mask = np.asarray(mask, dtype=bool)
        return cls(group, mask.astype(np.float64))

    @classmethod
    def normalized_indicator(cls, group: GroupSpec, mask: np.ndarray) -> "GroupFunction":
        """mu_X = 1_X / mu(X): the indicator scaled to have mean exactly 1."""
        mask = np.asarray(mask, dtype=bool)
        size = int(mask.sum())
        if size == 0:
            raise ValidationError("cannot normalize the indicator of the empty set")
        return cls(group, mask.astype(np.float64) * (group.order / size))

    def mean(self) -> float:
        return complex(self.values.mean()).real if np.iscomplexobj(self.values) else float(self.values.mean())


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Fourier coefficients on the full dual group, mixed-radix indexed."""

    group: GroupSpec
    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=np.complex128)
        if coeffs.shape != (self.group.order,):
            raise ValidationError(
                f"expected {self.group.order} coefficients, got shape {coeffs.shape}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise ValidationError("spectrum coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    def __getitem__(self, xi: Character) -> complex:
        if xi.group != self.group:
            raise GroupMismatchError("character belongs to a different group")
        return complex(self.coefficients[xi.index])


def _check_transform_cap(group: GroupSpec, cap: int) -> None:
    if group.order > cap:
        raise CapExceededError(f"group order {group.order} exceeds transform cap {cap}")


def dft(f: GroupFunction, cap: int = DEFAULT_TRANSFORM_CAP) -> Spectrum:
    """Mean-normalized transform, factored per cyclic axis via an FFT."""
    _check_transform_cap(f.group, cap)
    cube = f.values.reshape(f.group.moduli)
    coeffs = np.fft.fftn(cube).ravel() / f.group.order
    return Spectrum(f.group, coeffs)


def inverse_dft(spectrum: Spectrum, cap: int = DEFAULT_TRANSFORM_CAP) -> GroupFunction:
    """f(x) = sum_xi fhat(xi) e(xi(x)); exact inverse of dft up to rounding."""
    _check_transform_cap(spectrum.group, cap)
    cube = spectrum.coefficients.reshape(spectrum.group.moduli)
    values = np.fft.ifftn(cube).ravel() * spectrum.group.order
    if np.abs(values.imag).max(initial=0.0) < 1e-12 * max(1.0, np.abs(values.real).max(initial=0.0)):
        values = values.real
    return GroupFunction(spectrum.group, values)


def dft_direct(f: GroupFunction) -> Spectrum:
    """O(|G|^2) direct summation; the oracle the fast path is checked against."""
    _check_transform_cap(f.group, _DIRECT_ORACLE_CAP)
    group = f.group
    coords = group.coords_matrix().astype(np.float64)
    scaled = coords / np.asarray(group.moduli, dtype=np.float64)
    phase = scaled @ coords.T  # phase[x, xi] = sum_i x_i a_i / n_i
    kernel = np.exp(-2j * np.pi * phase)
    coeffs = kernel.T @ f.values / group.order
    return Spectrum(group, coeffs)


def convolve(f: GroupFunction, g: GroupFunction, cap: int = DEFAULT_TRANSFORM_CAP) -> GroupFunction:
    """(f*g)(x) = (1/|G|) sum_y f(y) g(x-y), evaluated through the transform."""
    if f.group != g.group:
        raise GroupMismatchError("convolution operands live on different groups")
    _check_transform_cap(f.group, cap)
    shape = f.group.moduli
    fc = np.fft.fftn(f.values.reshape(shape))
    gc = np.fft.fftn(g.values.reshape(shape))
    values = np.fft.ifftn(fc * gc).ravel() / f.group.order
    if not (np.iscomplexobj(f.values) or np.iscomplexobj(g.values)):
        values = values.real
    return GroupFunction(f.group, values)


def convolve_direct(f: GroupFunction, g: GroupFunction) -> GroupFunction:
    """Double-loop convolution oracle (small groups only)."""
    if f.group != g.group:
        raise GroupMismatchError("convolution operands live on different groups")
    group = f.group
    if group.order > _DIRECT_ORACLE_CAP:
        raise CapExceededError("direct convolution oracle is limited to small groups")
    n = group.order
    out = np.zeros(n, dtype=np.complex128)
    neg = group.negation_permutation()
    for y in range(n):
        # x - y ranges over translate_permutation(-y) applied to x
        perm = group.translate_permutation(int(neg[y]))
        out += f.values[y] * np.asarray(g.values)[perm]
    out /= n
    if not (np.iscomplexobj(f.values) or np.iscomplexobj(g.values)):
        out = out.real
    return GroupFunction(group, out)


def large_spectrum(f: GroupFunction, threshold: float, cap: int = DEFAULT_TRANSFORM_CAP) -> set[Character]:
    """Frequencies with |fhat(xi)| >= threshold.

    Plancherel forces |result| <= ||f||_{L2}^2 / threshold^2; this is asserted.
    """
    if threshold <= 0:
        raise ValidationError("large-spectrum threshold must be positive")
    spec = dft(f, cap=cap)
    hits = np.nonzero(np.abs(spec.coefficients) >= threshold)[0]
    bound = lp_norm(f, 2) ** 2 / threshold**2
    if len(hits) > bound + 1e-9:
        raise AssertionError(
            f"large spectrum of size {len(hits)} exceeds Plancherel bound {bound}"
        )
    coords = f.group.coords_matrix()
    return {Character(f.group, tuple(int(c) for c in coords[i])) for i in hits}


def lp_norm(f: GroupFunction, p) -> float:
    """L^p norm with the mean normalization; p in {1, 2, inf}."""
    absvals = np.abs(f.values)
    if p == 1:
        return float(absvals.mean())
    if p == 2:
        return float(np.sqrt((absvals**2).mean()))
    if p in (np.inf, "inf", float("inf")):
        return float(absvals.max(initial=0.0))
    raise ValidationError(f"unsupported exponent {p!r}; use 1, 2 or inf")


def lp_dual_norm(spectrum: Spectrum, p) -> float:
    """l^p norm with the sum normalization; p in {1, 2, inf}."""
    absvals = np.abs(spectrum.coefficients)
    if p == 1:
        return float(absvals.sum())
    if p == 2:
        return float(np.sqrt((absvals**2).sum()))
    if p in (np.inf, "inf", float("inf")):
        return float(absvals.max(initial=0.0))
    raise ValidationError(f"unsupported exponent {p!r}; use 1, 2 or inf")
