"""Small 3D vector toolkit used by the B-Rep model.

Everything works on plain ``Vec3`` values (immutable, hashable); lengths are
millimetres throughout. Tolerances follow the part scale: coordinates are
O(10..100) mm, so 1e-6 mm separates authoring noise from float noise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

# Coincidence tolerance for points/lengths (mm).
TOL = 1e-6
# Angular tolerance for parallel / anti-parallel tests (rad).
ANGULAR_TOL = 1e-6
# "Facing the same direction" test for feature heights: dot product floor.
FACING_DOT = 1.0 - 1e-6

_COS_ANGULAR_TOL = math.cos(ANGULAR_TOL)


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n <= TOL * TOL:
            raise ValueError("cannot normalize a near-zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


def vec(x: float, y: float, z: float) -> Vec3:
    return Vec3(float(x), float(y), float(z))


def unit(x: float, y: float, z: float) -> Vec3:
    """Build a unit vector, normalizing the input; rejects near-zero input."""
    return vec(x, y, z).normalized()


def distance(a: Vec3, b: Vec3) -> float:
    return (a - b).norm()


def is_parallel(a: Vec3, b: Vec3) -> bool:
    """True when unit vectors a, b point the same way within ANGULAR_TOL."""
    return a.dot(b) >= _COS_ANGULAR_TOL


def is_anti_parallel(a: Vec3, b: Vec3) -> bool:
    return a.dot(b) <= -_COS_ANGULAR_TOL


def plane_basis(normal: Vec3) -> tuple[Vec3, Vec3]:
    """Right-handed in-plane axes (u, v) with u x v = normal."""
    ax = abs(normal.x)
    ay = abs(normal.y)
    az = abs(normal.z)
    if ax <= ay and ax <= az:
        seed = Vec3(1.0, 0.0, 0.0)
    elif ay <= az:
        seed = Vec3(0.0, 1.0, 0.0)
    else:
        seed = Vec3(0.0, 0.0, 1.0)
    u = seed.cross(normal).normalized()
    v = normal.cross(u)
    return u, v
