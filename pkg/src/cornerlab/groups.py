"""Finite abelian groups G = Z_{n1} x ... x Z_{nk}, their elements and characters.

Conventions used throughout the package:

* Elements are residue vectors; enumeration order is mixed-radix with the
  *last* coordinate fastest, so index <-> element is a fixed bijection.
* A character with coefficients (a_1, ..., a_k) maps x to
  sum_i a_i * x_i / n_i  (mod 1), a value in the torus R/Z.
* Character values are computed as exact rationals over L = lcm(n_i), which
  makes torus comparisons (Bohr membership, partition labels) deterministic.
* The Haar probability measure is uniform: integrals over G are means.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterator, Sequence

import numpy as np

from .errors import CapExceededError, GroupMismatchError, ValidationError

MAX_GROUP_ORDER = 2**32
DEFAULT_ENUMERATION_CAP = 2**24


def torus_norm(t: float) -> float:
    """Distance from t to the nearest integer, a value in [0, 1/2]."""
    frac = t - math.floor(t)
    return min(frac, 1.0 - frac)


def torus_norm_fraction(t: Fraction) -> Fraction:
    """Exact torus norm of a rational point."""
    frac = t - math.floor(t)
    return min(frac, 1 - frac)


@dataclass(frozen=True)
class GroupSpec:
    """A finite abelian group given as an explicit product of cyclic factors."""

    moduli: tuple[int, ...]
    _strides: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __init__(self, moduli: Sequence[int]):
        moduli = tuple(int(n) for n in moduli)
        if not moduli:
            raise ValidationError("group needs at least one cyclic factor")
        if any(n < 1 for n in moduli):
            raise ValidationError(f"cyclic factor orders must be >= 1, got {moduli}")
        order = math.prod(moduli)
        if order > MAX_GROUP_ORDER:
            raise ValidationError(
                f"group order {order} exceeds the supported maximum {MAX_GROUP_ORDER}"
            )
        object.__setattr__(self, "moduli", moduli)
        # mixed radix, last coordinate fastest
        strides = [1] * len(moduli)
        for i in range(len(moduli) - 2, -1, -1):
            strides[i] = strides[i + 1] * moduli[i + 1]
        object.__setattr__(self, "_strides", tuple(strides))

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def exponent_lcm(self) -> int:
        """lcm of the factor orders; common denominator for character values."""
        return reduce(math.lcm, self.moduli)

    def zero(self) -> "Element":
        return Element(self, (0,) * self.rank)

    def element(self, index: int) -> "Element":
        """Element at a given enumeration index (inverse of Element.index)."""
        if not 0 <= index < self.order:
            raise ValidationError(f"index {index} out of range for group of order {self.order}")
        coords = []
        for n, s in zip(self.moduli, self._strides):
            coords.append((index // s) % n)
        return Element(self, tuple(coords))

    def enumerate(self, cap: int = DEFAULT_ENUMERATION_CAP) -> list["Element"]:
        """All elements in mixed-radix order; raises if the order exceeds cap."""
        if self.order > cap:
            raise CapExceededError(f"group order {self.order} exceeds enumeration cap {cap}")
        return [self.element(i) for i in range(self.order)]

    def __iter__(self) -> Iterator["Element"]:
        return iter(self.enumerate())

    def coords_matrix(self) -> np.ndarray:
        """(order, rank) int64 array: row i holds the coordinates of element i."""
        idx = np.arange(self.order, dtype=np.int64)
        cols = [
            (idx // s) % n for n, s in zip(self.moduli, self._strides)
        ]
        return np.stack(cols, axis=1)

    def index_of_coords(self, coords: np.ndarray) -> np.ndarray:
        """Vectorized inverse of coords_matrix (coords already reduced mod n_i)."""
        strides = np.asarray(self._strides, dtype=np.int64)
        return coords @ strides

    def translate_permutation(self, d_index: int) -> np.ndarray:
        """Permutation array P with P[i] = index(element(i) + element(d_index))."""
        coords = self.coords_matrix()
        d = self.element(d_index).coords
        moduli = np.asarray(self.moduli, dtype=np.int64)
        shifted = (coords + np.asarray(d, dtype=np.int64)) % moduli
        return self.index_of_coords(shifted)

    def negation_permutation(self) -> np.ndarray:
        """Permutation array N with N[i] = index(-element(i))."""
        coords = self.coords_matrix()
        moduli = np.asarray(self.moduli, dtype=np.int64)
        return self.index_of_coords((-coords) % moduli)

    def characters(self) -> list["Character"]:
        """The full dual group, indexed in the same mixed-radix order."""
        return [Character(self, self.element(i).coords) for i in range(self.order)]

    def spec_string(self) -> str:
        return "x".join(f"Z{n}" for n in self.moduli)

    def __str__(self) -> str:
        return self.spec_string()


_FACTOR_RE = re.compile(r"^Z(\d+)$", re.IGNORECASE)


def parse_group_spec(text: str) -> GroupSpec:
    """Parse a group spec string like "Z12" or "Z2xZ3xZ5" (case/space insensitive)."""
    cleaned = re.sub(r"\s+", "", text).lower()
    if not cleaned:
        raise ValidationError("empty group spec string")
    moduli = []
    for part in cleaned.split("x"):
        m = _FACTOR_RE.match(part)
        if not m:
            raise ValidationError(f"cannot parse group factor {part!r} in {text!r}")
        moduli.append(int(m.group(1)))
    return GroupSpec(moduli)


def _check_same_group(a, b) -> None:
    if a.group != b.group:
        raise GroupMismatchError(f"operands live on different groups: {a.group} vs {b.group}")


@dataclass(frozen=True)
class Element:
    """A group element, stored as a reduced residue vector."""

    group: GroupSpec
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.group.rank:
            raise ValidationError(
                f"element has {len(self.coords)} coordinates, group has rank {self.group.rank}"
            )
        reduced = tuple(c % n for c, n in zip(self.coords, self.group.moduli))
        object.__setattr__(self, "coords", reduced)

    def __add__(self, other: "Element") -> "Element":
        _check_same_group(self, other)
        return Element(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Element":
        return Element(self.group, tuple(-c for c in self.coords))

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    @property
    def index(self) -> int:
        return sum(c * s for c, s in zip(self.coords, self.group._strides))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)


@dataclass(frozen=True)
class Character:
    """A frequency xi in the dual group; xi(x) = sum a_i x_i / n_i mod 1."""

    group: GroupSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.group.rank:
            raise ValidationError(
                f"character has {len(self.coeffs)} coefficients, group has rank {self.group.rank}"
            )
        reduced = tuple(a % n for a, n in zip(self.coeffs, self.group.moduli))
        object.__setattr__(self, "coeffs", reduced)

    def is_trivial(self) -> bool:
        return all(a == 0 for a in self.coeffs)

    @property
    def index(self) -> int:
        return sum(a * s for a, s in zip(self.coeffs, self.group._strides))

    def eval_fraction(self, x: Element) -> Fraction:
        """Exact value of xi(x) in [0, 1), over the common denominator lcm(n_i)."""
        _check_same_group(self, x)
        L = self.group.exponent_lcm
        total = 0
        for a, c, n in zip(self.coeffs, x.coords, self.group.moduli):
            total += a * c * (L // n)
        return Fraction(total % L, L)

    def __call__(self, x: Element) -> float:
        return float(self.eval_fraction(x))

    def residue_vector(self) -> np.ndarray:
        """int64 array r with xi(element(i)) = r[i] / L exactly, r[i] in [0, L).

        Overflows are impossible at supported sizes: every addend is below
        L * n_i and L <= |G| <= 2^32 is rejected long before int64 saturates
        for enumerable groups.
        """
        L = self.group.exponent_lcm
        coords = self.group.coords_matrix()
        weights = np.asarray(
            [a * (L // n) for a, n in zip(self.coeffs, self.group.moduli)], dtype=np.int64
        )
        return (coords @ weights) % L


def char_eval(xi: Character, x: Element) -> float:
    """xi(x) as a float in [0, 1), computed from the exact rational value."""
    return float(xi.eval_fraction(x))


def add(x: Element, y: Element) -> Element:
    """Group law; componentwise sum mod n_i."""
    return x + y
