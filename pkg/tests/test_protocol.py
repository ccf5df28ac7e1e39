"""Wire protocol: every message round-trips through one JSON line."""

import json

import pytest

from dexkit.errors import MalformedMessage, UnknownTag
from dexkit.handmodel import HandParams, make_frame
from dexkit.model import AllegroState, JointCommand
from dexkit.protocol import (
    ErrorMsg,
    GestureEventMsg,
    HandFrameMsg,
    JointCommandMsg,
    JointStateMsg,
    PromptMsg,
    RecordStatusMsg,
    decode_message,
    encode_message,
)
from dexkit.recorder import PlacementPrompt


def roundtrip(msg):
    return decode_message(encode_message(msg))


SAMPLES = [
    HandFrameMsg(frame=make_frame(0.25, HandParams()), hand="left"),
    HandFrameMsg(frame=make_frame(1.75, HandParams(thumb_curl=0.3))),
    JointStateMsg(AllegroState(t=2.0, q=(0.125,) * 16, tau=(-0.5,) * 16)),
    JointCommandMsg(JointCommand(t=3.5, dq=(0.01,) * 16)),
    GestureEventMsg(t=4.0, kind="start"),
    GestureEventMsg(t=4.5, kind="stop"),
    RecordStatusMsg(recording=True, episode_id="ep0002"),
    RecordStatusMsg(recording=False, episode_id=None),
    PromptMsg(PlacementPrompt(center=(0.05, -0.02), rot=1.25)),
    ErrorMsg(error="bad_message", detail="unreadable line"),
    ErrorMsg(error="shutdown"),
]


@pytest.mark.parametrize("msg", SAMPLES, ids=lambda m: type(m).__name__)
def test_messages_roundtrip_exactly(msg):
    assert roundtrip(msg) == msg


def test_encoding_is_one_compact_line():
    for msg in SAMPLES:
        line = encode_message(msg)
        assert "\n" not in line
        assert ": " not in line and ", " not in line
        assert json.loads(line)["tag"]  # every message carries its tag


def test_hand_defaults_to_right():
    line = encode_message(HandFrameMsg(frame=make_frame(0.0, HandParams())))
    payload = json.loads(line)
    del payload["hand"]
    decoded = decode_message(json.dumps(payload))
    assert decoded.hand == "right"


def test_floats_survive_exactly():
    # shortest-repr floats make the wire value-exact, not just approximate
    q = tuple((i + 1) / 3.0 for i in range(16))
    msg = JointStateMsg(AllegroState(t=0.1, q=q, tau=q))
    assert roundtrip(msg).state.q == q


def test_encode_rejects_foreign_objects():
    with pytest.raises(TypeError):
        encode_message({"tag": "joint_state"})


def test_unknown_tag():
    with pytest.raises(UnknownTag):
        decode_message('{"tag":"telemetry","value":1}')


def test_invalid_json():
    with pytest.raises(MalformedMessage, match="invalid JSON"):
        decode_message("{nope")


def test_non_object_payload():
    with pytest.raises(MalformedMessage):
        decode_message("[1,2,3]")


def test_missing_tag():
    with pytest.raises(MalformedMessage):
        decode_message('{"t":1.0}')


def test_wrong_vertex_count():
    line = encode_message(HandFrameMsg(frame=make_frame(0.0, HandParams())))
    payload = json.loads(line)
    payload["vertices"] = payload["vertices"][:10]
    with pytest.raises(MalformedMessage, match="vertices"):
        decode_message(json.dumps(payload))


def test_short_vertex_row():
    line = encode_message(HandFrameMsg(frame=make_frame(0.0, HandParams())))
    payload = json.loads(line)
    payload["vertices"][4] = payload["vertices"][4][:5]
    with pytest.raises(MalformedMessage, match="vertex 4"):
        decode_message(json.dumps(payload))


def test_bad_hand_value():
    line = encode_message(HandFrameMsg(frame=make_frame(0.0, HandParams())))
    payload = json.loads(line)
    payload["hand"] = "both"
    with pytest.raises(MalformedMessage, match="hand"):
        decode_message(json.dumps(payload))


def test_bad_gesture_kind():
    with pytest.raises(MalformedMessage, match="kind"):
        decode_message('{"tag":"gesture_event","t":0.0,"kind":"wave"}')


def test_wrong_vector_length():
    with pytest.raises(MalformedMessage, match="dq must have 16"):
        decode_message('{"tag":"joint_command","t":0.0,"dq":[0.1,0.2]}')


def test_missing_field():
    with pytest.raises(MalformedMessage, match="joint_state"):
        decode_message('{"tag":"joint_state","t":0.0,"q":%s}' % ([0.0] * 16))


def test_bad_prompt_center():
    with pytest.raises(MalformedMessage, match="center"):
        decode_message('{"tag":"prompt","center":[1.0],"rot":0.0}')


def test_non_numeric_values():
    with pytest.raises(MalformedMessage):
        decode_message('{"tag":"gesture_event","t":"soon","kind":"start"}')
