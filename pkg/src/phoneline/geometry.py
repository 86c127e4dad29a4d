"""Pinhole back-projection of pick points from image pixels into the robot
base frame, via calibrated intrinsics and a rigid camera-to-base transform."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DomainError


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole parameters in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int = 1920
    height: int = 1080

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise DomainError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise DomainError("principal point must lie inside the image")


class RigidTransform:
    """Rotation + translation mapping camera-frame points to the base frame."""

    def __init__(self, rotation, translation):
        r = np.asarray(rotation, dtype=float)
        t = np.asarray(translation, dtype=float)
        if r.shape != (3, 3) or t.shape != (3,):
            raise DomainError("expected a 3x3 rotation and a 3-vector translation")
        if np.abs(r.T @ r - np.eye(3)).max() > 1e-9:
            raise DomainError("rotation must be orthonormal")
        if abs(np.linalg.det(r) - 1.0) > 1e-9:
            raise DomainError("rotation must be proper (det = 1)")
        self.rotation = r
        self.translation = t

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    def apply(self, point: np.ndarray) -> np.ndarray:
        return self.rotation @ point + self.translation

    def inverse_apply(self, point: np.ndarray) -> np.ndarray:
        return self.rotation.T @ (point - self.translation)


def pixel_to_base(u: float, v: float, depth_m: float, intrinsics: CameraIntrinsics,
                  transform: RigidTransform) -> np.ndarray:
    """Back-project pixel (u, v) at a measured depth into the base frame.

    The camera-frame point is depth * ((u-cx)/fx, (v-cy)/fy, 1); the rigid
    transform then carries it into robot coordinates.
    """
    if depth_m <= 0:
        raise DomainError("depth must be positive")
    if not (0 <= u < intrinsics.width and 0 <= v < intrinsics.height):
        raise DomainError(f"pixel ({u}, {v}) outside the {intrinsics.width}x{intrinsics.height} image")
    p_cam = np.array([
        depth_m * (u - intrinsics.cx) / intrinsics.fx,
        depth_m * (v - intrinsics.cy) / intrinsics.fy,
        depth_m,
    ])
    return transform.apply(p_cam)


def base_to_pixel(point_base: np.ndarray, intrinsics: CameraIntrinsics,
                  transform: RigidTransform) -> tuple[float, float, float]:
    """Inverse of pixel_to_base: returns (u, v, depth)."""
    p_cam = transform.inverse_apply(np.asarray(point_base, dtype=float))
    z = p_cam[2]
    if z <= 0:
        raise DomainError("point is behind the camera")
    u = intrinsics.fx * p_cam[0] / z + intrinsics.cx
    v = intrinsics.fy * p_cam[1] / z + intrinsics.cy
    return float(u), float(v), float(z)
