"""Rigid-body transform algebra on SE(3).

Rotations are unit quaternions in (w, x, y, z) order; twists are 6-vectors
(omega, v) with the rotation part first.  All geometry here is computed in
64-bit floats regardless of what the network side uses.

Euler convention for data generation is intrinsic Z-Y-X: for per-axis angles
(a, b, c) in degrees the rotation matrix is Rz(c) @ Ry(b) @ Rx(a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Quaternions with norm below this are considered degenerate (no direction).
DEGENERATE_QUAT_NORM = 1e-12


class DegeneratePoseError(ValueError):
    """Raised when a pose cannot be normalized into a valid rotation."""


def _vec3(v, name: str = "vector") -> np.ndarray:
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if v.shape != (3,):
        raise ValueError(f"{name} must have 3 components, got shape {v.shape}")
    return v


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product of two (w, x, y, z) quaternions."""
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    """Rotation matrix of a unit quaternion (w, x, y, z)."""
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def matrix_to_quat(rot: np.ndarray) -> np.ndarray:
    """Unit quaternion (w, x, y, z) of a rotation matrix (Shepperd's method)."""
    m = np.asarray(rot, dtype=np.float64)
    if m[2, 2] < 0:
        if m[0, 0] > m[1, 1]:
            t = 1.0 + m[0, 0] - m[1, 1] - m[2, 2]
            q = [m[2, 1] - m[1, 2], t, m[0, 1] + m[1, 0], m[2, 0] + m[0, 2]]
        else:
            t = 1.0 - m[0, 0] + m[1, 1] - m[2, 2]
            q = [m[0, 2] - m[2, 0], m[0, 1] + m[1, 0], t, m[1, 2] + m[2, 1]]
    else:
        if m[0, 0] < -m[1, 1]:
            t = 1.0 - m[0, 0] - m[1, 1] + m[2, 2]
            q = [m[1, 0] - m[0, 1], m[0, 2] + m[2, 0], m[1, 2] + m[2, 1], t]
        else:
            t = 1.0 + m[0, 0] + m[1, 1] + m[2, 2]
            q = [t, m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]]
    q = np.array(q)
    return q * (0.5 / math.sqrt(t))


@dataclass(frozen=True, eq=False)
class Rotation:
    """Unit-quaternion rotation.  The stored quaternion always has norm 1."""

    quat: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.quat, dtype=np.float64).reshape(-1)
        if q.shape != (4,):
            raise ValueError(f"quaternion must have 4 components, got {q.shape}")
        norm = float(np.linalg.norm(q))
        if norm < DEGENERATE_QUAT_NORM:
            raise DegeneratePoseError(
                f"quaternion norm {norm:.3e} below {DEGENERATE_QUAT_NORM:.0e}; "
                "direction is undefined"
            )
        q = q / norm
        q.setflags(write=False)
        object.__setattr__(self, "quat", q)

    @staticmethod
    def identity() -> "Rotation":
        return Rotation(np.array([1.0, 0.0, 0.0, 0.0]))

    @staticmethod
    def from_matrix(rot: np.ndarray) -> "Rotation":
        return Rotation(matrix_to_quat(rot))

    @staticmethod
    def from_axis_angle(axis, angle_rad: float) -> "Rotation":
        axis = _vec3(axis, "axis")
        n = np.linalg.norm(axis)
        if n < DEGENERATE_QUAT_NORM:
            raise DegeneratePoseError("rotation axis has zero length")
        axis = axis / n
        half = 0.5 * angle_rad
        return Rotation(np.concatenate([[math.cos(half)], math.sin(half) * axis]))

    def canonicalize(self) -> "Rotation":
        """Resolve the quaternion double cover by forcing w >= 0."""
        if self.quat[0] < 0:
            return Rotation(-self.quat)
        return self

    def matrix(self) -> np.ndarray:
        return quat_to_matrix(self.quat)

    def inverse(self) -> "Rotation":
        w, x, y, z = self.quat
        return Rotation(np.array([w, -x, -y, -z]))

    def compose(self, other: "Rotation") -> "Rotation":
        return Rotation(quat_multiply(self.quat, other.quat))

    def apply(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        return pts @ self.matrix().T


@dataclass(frozen=True, eq=False)
class Transform:
    """Rigid-body transform: rotate then translate."""

    rotation: Rotation
    translation: np.ndarray

    def __post_init__(self):
        t = _vec3(self.translation, "translation").copy()
        t.setflags(write=False)
        object.__setattr__(self, "translation", t)

    @staticmethod
    def identity() -> "Transform":
        return Transform(Rotation.identity(), np.zeros(3))

    @staticmethod
    def from_matrix(mat: np.ndarray) -> "Transform":
        m = np.asarray(mat, dtype=np.float64)
        if m.shape != (4, 4):
            raise ValueError(f"expected 4x4 matrix, got {m.shape}")
        if not np.allclose(m[3], [0.0, 0.0, 0.0, 1.0], atol=1e-9):
            raise ValueError("last row of a homogeneous transform must be 0 0 0 1")
        return Transform(Rotation.from_matrix(m[:3, :3]), m[:3, 3])

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation.matrix()
        m[:3, 3] = self.translation
        return m

    def compose(self, other: "Transform") -> "Transform":
        return compose(self, other)

    def inverse(self) -> "Transform":
        return inverse(self)

    def apply(self, cloud: np.ndarray) -> np.ndarray:
        return apply(self, cloud)

    def is_finite(self) -> bool:
        return bool(
            np.all(np.isfinite(self.rotation.quat))
            and np.all(np.isfinite(self.translation))
        )


def compose(a: Transform, b: Transform) -> Transform:
    """Transform equal to applying b first, then a."""
    rot = a.rotation.compose(b.rotation)
    trans = a.rotation.apply(b.translation) + a.translation
    return Transform(rot, trans)


def inverse(t: Transform) -> Transform:
    rot_inv = t.rotation.inverse()
    return Transform(rot_inv, -rot_inv.apply(t.translation))


def apply(t: Transform, cloud: np.ndarray) -> np.ndarray:
    pts = np.asarray(cloud, dtype=np.float64)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.size == 0:
        raise ValueError("cannot transform an empty point cloud")
    if pts.shape[1] != 3:
        raise ValueError(f"points must be Nx3, got shape {pts.shape}")
    out = pts @ t.rotation.matrix().T + t.translation
    return out[0] if single else out


@dataclass(frozen=True, eq=False)
class PoseVector:
    """Raw pose parameterization: 'quaternion7' (qw qx qy qz tx ty tz) or
    'twist6' (omega, v)."""

    kind: str
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in ("quaternion7", "twist6"):
            raise ValueError(f"unknown pose kind {self.kind!r}")
        v = np.asarray(self.values, dtype=np.float64).reshape(-1)
        expected = 7 if self.kind == "quaternion7" else 6
        if v.shape != (expected,):
            raise ValueError(
                f"{self.kind} pose needs {expected} values, got shape {v.shape}"
            )
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def pose_to_transform(pose: PoseVector) -> Transform:
    """Convert a raw pose vector to a Transform.

    The quaternion7 path normalizes the (possibly non-unit) quaternion part;
    the twist6 path goes through the exact SE(3) exponential.
    """
    if pose.kind == "quaternion7":
        return Transform(Rotation(pose.values[:4]), pose.values[4:])
    return exp_twist(pose.values)


def _so3_exp(omega: np.ndarray) -> np.ndarray:
    theta = np.linalg.norm(omega)
    k = np.array([
        [0.0, -omega[2], omega[1]],
        [omega[2], 0.0, -omega[0]],
        [-omega[1], omega[0], 0.0],
    ])
    if theta < 1e-8:
        # second-order Taylor; error O(theta^3)
        return np.eye(3) + k + 0.5 * (k @ k)
    a = math.sin(theta) / theta
    b = (1.0 - math.cos(theta)) / (theta * theta)
    return np.eye(3) + a * k + b * (k @ k)


def exp_twist(xi: np.ndarray) -> Transform:
    """SE(3) exponential of a twist (omega, v)."""
    xi = np.asarray(xi, dtype=np.float64).reshape(-1)
    if xi.shape != (6,):
        raise ValueError(f"twist must have 6 components, got shape {xi.shape}")
    omega, v = xi[:3], xi[3:]
    theta = np.linalg.norm(omega)
    k = np.array([
        [0.0, -omega[2], omega[1]],
        [omega[2], 0.0, -omega[0]],
        [-omega[1], omega[0], 0.0],
    ])
    if theta < 1e-8:
        vmat = np.eye(3) + 0.5 * k + (k @ k) / 6.0
    else:
        t2 = theta * theta
        vmat = (
            np.eye(3)
            + ((1.0 - math.cos(theta)) / t2) * k
            + ((theta - math.sin(theta)) / (t2 * theta)) * (k @ k)
        )
    return Transform(Rotation.from_matrix(_so3_exp(omega)), vmat @ v)


def log_twist(t: Transform) -> np.ndarray:
    """Inverse of exp_twist; valid away from the pi-rotation singularity."""
    rot = t.rotation.canonicalize()
    w = rot.quat[0]
    vec = rot.quat[1:]
    s = np.linalg.norm(vec)
    theta = 2.0 * math.atan2(s, w)
    if s < 1e-12:
        omega = 2.0 * vec  # small angle: q = (1, omega/2)
    else:
        omega = (theta / s) * vec
    theta = np.linalg.norm(omega)
    k = np.array([
        [0.0, -omega[2], omega[1]],
        [omega[2], 0.0, -omega[0]],
        [-omega[1], omega[0], 0.0],
    ])
    if theta < 1e-8:
        vinv = np.eye(3) - 0.5 * k + (k @ k) / 12.0
    else:
        half = 0.5 * theta
        coeff = (1.0 - half * math.cos(half) / math.sin(half)) / (theta * theta)
        vinv = np.eye(3) - 0.5 * k + coeff * (k @ k)
    return np.concatenate([omega, vinv @ t.translation])


def euler_to_transform(angles_deg, translation) -> Transform:
    """Transform with rotation Rz(c) @ Ry(b) @ Rx(a) for angles (a, b, c)."""
    a, b, c = np.radians(_vec3(angles_deg, "angles"))
    rx = Rotation.from_axis_angle([1, 0, 0], a)
    ry = Rotation.from_axis_angle([0, 1, 0], b)
    rz = Rotation.from_axis_angle([0, 0, 1], c)
    return Transform(rz.compose(ry).compose(rx), _vec3(translation, "translation"))


def rotation_error(pred: Transform, gt: Transform) -> float:
    """Axis-angle magnitude of the relative rotation, in degrees, in [0, 180]."""
    rel = pred.rotation.compose(gt.rotation.inverse()).canonicalize()
    w = rel.quat[0]
    s = float(np.linalg.norm(rel.quat[1:]))
    return math.degrees(2.0 * math.atan2(s, w))


def translation_error(pred: Transform, gt: Transform) -> float:
    """Euclidean norm of the translation difference."""
    return float(np.linalg.norm(pred.translation - gt.translation))


def frobenius_deviation(a: Transform, b: Transform) -> float:
    """|| M(a) @ M(b)^-1 - I ||_F on 4x4 homogeneous matrices."""
    delta = a.matrix() @ np.linalg.inv(b.matrix()) - np.eye(4)
    return float(np.linalg.norm(delta))
