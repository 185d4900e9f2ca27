"""Exact sample data: Pythagorean points, rational points and rational rotors."""

from fractions import Fraction

import numpy as np

SAMPLE_TABLE_VERSION = 1

PYTHAGOREAN: dict[int, list[tuple[int, ...]]] = {
    3: [(3, 4, 0), (2, 3, 6), (1, 2, 2), (0, 3, 4), (2, 6, 9), (4, 4, 7)],
    4: [(1, 1, 1, 1), (1, 2, 2, 4), (2, 4, 5, 6), (3, 4, 0, 0), (2, 3, 6, 0), (1, 1, 3, 5)],
    5: [(1, 2, 2, 0, 4), (2, 1, 2, 4, 0), (1, 1, 1, 1, 0), (3, 4, 0, 0, 0), (1, 1, 3, 5, 0), (2, 4, 5, 6, 0)],
}

# rational unit vectors (a, b) as index -> coordinate maps; the rotor is a * b
ROTOR_FACTORS: list[tuple[dict[int, Fraction], dict[int, Fraction]]] = [
    ({1: Fraction(1)}, {2: Fraction(1)}),
    ({1: Fraction(3, 5), 2: Fraction(4, 5)}, {1: Fraction(1)}),
    ({2: Fraction(5, 13), 3: Fraction(12, 13)}, {2: Fraction(1)}),
    ({1: Fraction(3, 5), 3: Fraction(4, 5)}, {2: Fraction(1)}),
    ({1: Fraction(8, 17), 2: Fraction(15, 17)}, {3: Fraction(1)}),
]


def pythagorean_points(m: int, count: int | None = None) -> list[tuple[int, ...]]:
    """Integer points with integer norm, padded with zeros above the tabulated dimensions."""
    base = PYTHAGOREAN[min(m, max(PYTHAGOREAN))]
    points = [p[:m] + (0,) * (m - len(p)) for p in base]
    points = [p for p in points if any(p)]
    return points[:count] if count else points


def point_pairs(m: int, count: int | None = None) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """(x, y) with rational ||x||, ||y||, ||x - y||: y flips the first nonzero coordinate of x."""
    pairs = []
    for x in pythagorean_points(m):
        i = next(i for i, c in enumerate(x) if c)
        y = x[:i] + (-x[i],) + x[i + 1 :]
        pairs.append((x, y))
    return pairs[:count] if count else pairs


def rational_points(m: int, count: int, seed: int, denominator: int = 5) -> list[tuple[Fraction, ...]]:
    rng = np.random.default_rng(seed)
    values = rng.integers(-denominator, denominator + 1, size=(count, m))
    points = []
    for row in values:
        if not row.any():
            row[0] = 1
        points.append(tuple(Fraction(int(v), denominator) for v in row))
    return points


def rotor_factors(m: int) -> list[tuple[dict[int, Fraction], dict[int, Fraction]]]:
    return [(a, b) for a, b in ROTOR_FACTORS if max(a | b) <= m]
