"""Random sample generators shared by the self-test command and the test suite."""

from __future__ import annotations

import numpy as np

from .algebra import Quaternion, TridentQuaternion


def random_unit_quaternion(rng: np.random.Generator) -> Quaternion:
    q = rng.standard_normal(4)
    return Quaternion(q / np.linalg.norm(q))


def random_unit_trident(
    rng: np.random.Generator, translation_scale: float = 1.0
) -> TridentQuaternion:
    """Random element with exact unit structure: q1 = u1 o q / 2, q2 = u2 o q / 2."""
    q = random_unit_quaternion(rng)
    u1 = Quaternion.vector(translation_scale * rng.standard_normal(3))
    u2 = Quaternion.vector(translation_scale * rng.standard_normal(3))
    return TridentQuaternion(q, 0.5 * u1.mul(q), 0.5 * u2.mul(q))
