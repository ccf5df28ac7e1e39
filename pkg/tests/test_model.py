"""Domain type validation: hand frames, joint state, episode frames."""

import math

import numpy as np
import pytest

from dexkit import skeleton
from dexkit.errors import NonFiniteValue, NonUnitQuaternion, WrongVertexCount
from dexkit.model import (
    AllegroState,
    EpisodeFrame,
    HandFrame,
    JointCommand,
    Pose,
    clamp_to_limits,
    frame_positions_transformed,
    identity_frame,
    validate_hand_frame,
)


def test_identity_frame_is_valid():
    frame = identity_frame(t=1.25)
    validate_hand_frame(frame)
    assert frame.t == 1.25
    assert len(frame.vertices) == 26


def test_positions_shape_and_lookup():
    frame = identity_frame()
    assert frame.positions().shape == (26, 3)
    assert np.array_equal(frame.position(skeleton.PALM), [0.0, 0.0, 0.0])


def test_wrong_vertex_count_rejected():
    frame = HandFrame(t=0.0, vertices=tuple(Pose((0.0, 0.0, 0.0)) for _ in range(25)))
    with pytest.raises(WrongVertexCount):
        validate_hand_frame(frame)


def test_non_finite_position_rejected():
    verts = list(identity_frame().vertices)
    verts[3] = Pose((0.0, math.nan, 0.0))
    with pytest.raises(NonFiniteValue):
        validate_hand_frame(HandFrame(t=0.0, vertices=tuple(verts)))


def test_negative_timestamp_rejected():
    with pytest.raises(NonFiniteValue):
        validate_hand_frame(identity_frame(t=-0.001))


def test_non_unit_quaternion_rejected():
    verts = list(identity_frame().vertices)
    verts[0] = Pose((0.0, 0.0, 0.0), (0.0, 0.0, 0.0, 1.001))
    with pytest.raises(NonUnitQuaternion):
        validate_hand_frame(HandFrame(t=0.0, vertices=tuple(verts)))


def test_quaternion_tolerance_accepts_near_unit():
    verts = list(identity_frame().vertices)
    verts[0] = Pose((0.0, 0.0, 0.0), (0.0, 0.0, 0.0, 1.0 + 5e-7))
    validate_hand_frame(HandFrame(t=0.0, vertices=tuple(verts)))


def test_allegro_state_requires_16_joints():
    AllegroState(t=0.0, q=(0.0,) * 16)
    with pytest.raises(WrongVertexCount):
        AllegroState(t=0.0, q=(0.0,) * 15)
    with pytest.raises(WrongVertexCount):
        AllegroState(t=0.0, q=(0.0,) * 16, tau=(0.0,) * 17)


def test_joint_command_requires_16_deltas():
    JointCommand(t=0.0, dq=(0.0,) * 16)
    with pytest.raises(WrongVertexCount):
        JointCommand(t=0.0, dq=(0.0,) * 3)


def test_episode_frame_record_round_trip():
    frame = EpisodeFrame(
        t=0.5,
        q=tuple(float(i) for i in range(16)),
        tau=(0.1,) * 16,
        dq=(-0.02,) * 16,
        image_top="top/000007.png",
        image_wrist="wrist/000007.png",
    )
    assert EpisodeFrame.from_record(frame.to_record()) == frame


def test_clamp_to_limits():
    limits = [(-0.5, 0.5)] * 3
    out = clamp_to_limits([-1.0, 0.2, 9.0], limits)
    assert np.allclose(out, [-0.5, 0.2, 0.5])


def test_rigid_transform_preserves_pairwise_distances():
    frame = identity_frame()
    verts = [Pose((0.01 * i, 0.02 * i, 0.005 * i)) for i in range(26)]
    frame = HandFrame(t=0.0, vertices=tuple(verts))
    c, s = math.cos(0.7), math.sin(0.7)
    rot = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
    moved = frame_positions_transformed(frame, rot, (0.3, -0.1, 0.2))
    p0, p1 = frame.positions(), moved.positions()
    for i in range(0, 26, 5):
        for j in range(i + 1, 26, 7):
            assert math.isclose(
                np.linalg.norm(p0[i] - p0[j]), np.linalg.norm(p1[i] - p1[j]),
                abs_tol=1e-12,
            )
