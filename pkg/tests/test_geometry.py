import math

import numpy as np
import pytest

from phoneline.geometry import CameraIntrinsics, RigidTransform, base_to_pixel, pixel_to_base
from phoneline.model import DomainError


@pytest.fixture
def intrinsics():
    return CameraIntrinsics(fx=1400.0, fy=1400.0, cx=960.0, cy=540.0)


def _rotation(axis, angle):
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    k = np.array([[0, -axis[2], axis[1]],
                  [axis[2], 0, -axis[0]],
                  [-axis[1], axis[0], 0]])
    return np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * (k @ k)


def test_principal_ray_maps_to_optical_axis(intrinsics):
    p = pixel_to_base(intrinsics.cx, intrinsics.cy, 1.0, intrinsics, RigidTransform.identity())
    assert p == pytest.approx([0.0, 0.0, 1.0])


def test_pure_translation_adds(intrinsics):
    t = RigidTransform(np.eye(3), [0.5, 0.0, 0.0])
    p = pixel_to_base(intrinsics.cx, intrinsics.cy, 1.0, intrinsics, t)
    assert p == pytest.approx([0.5, 0.0, 1.0])


def test_round_trip_recovers_pixel(intrinsics):
    # oracle: forward projection composed with the back-projection
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(1000):
        rot = _rotation(rng.normal(size=3), rng.uniform(0, 2 * math.pi))
        transform = RigidTransform(rot, rng.uniform(-2, 2, size=3))
        u = rng.uniform(0, intrinsics.width - 1e-9)
        v = rng.uniform(0, intrinsics.height - 1e-9)
        depth = rng.uniform(0.05, 10.0)
        point = pixel_to_base(u, v, depth, intrinsics, transform)
        u2, v2, d2 = base_to_pixel(point, intrinsics, transform)
        worst = max(worst, abs(u - u2), abs(v - v2))
        assert d2 == pytest.approx(depth, rel=1e-9)
    assert worst < 1e-6


def test_depth_must_be_positive(intrinsics):
    with pytest.raises(DomainError):
        pixel_to_base(10, 10, 0.0, intrinsics, RigidTransform.identity())
    with pytest.raises(DomainError):
        pixel_to_base(10, 10, -1.0, intrinsics, RigidTransform.identity())


def test_pixel_outside_image_rejected(intrinsics):
    with pytest.raises(DomainError):
        pixel_to_base(-1, 10, 1.0, intrinsics, RigidTransform.identity())
    with pytest.raises(DomainError):
        pixel_to_base(10, 2000, 1.0, intrinsics, RigidTransform.identity())


def test_rotation_validation():
    with pytest.raises(DomainError, match="orthonormal"):
        RigidTransform(np.eye(3) * 2.0, np.zeros(3))
    reflection = np.diag([1.0, 1.0, -1.0])
    with pytest.raises(DomainError, match="proper"):
        RigidTransform(reflection, np.zeros(3))


def test_intrinsics_validation():
    with pytest.raises(DomainError):
        CameraIntrinsics(fx=0.0, fy=1.0, cx=10, cy=10)
    with pytest.raises(DomainError):
        CameraIntrinsics(fx=1.0, fy=1.0, cx=5000, cy=10)
