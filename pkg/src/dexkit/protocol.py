"""Newline-delimited JSON wire protocol for the teleop loop.

Every message is one JSON object per line carrying a ``tag`` field; the
payload schema per tag is the contract shared with UI clients.  Encoding
uses Python's shortest round-trip float representation, so encode/decode
is value-exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import skeleton
from .errors import MalformedMessage, UnknownTag
from .model import AllegroState, HandFrame, JointCommand, Pose
from .recorder import PlacementPrompt

HANDS = ("left", "right")
GESTURE_KINDS = ("start", "stop")


@dataclass(frozen=True)
class HandFrameMsg:
    """Tracked hand sample; ``hand`` routes gesture vs control streams."""

    frame: HandFrame
    hand: str = "right"


@dataclass(frozen=True)
class JointStateMsg:
    state: AllegroState


@dataclass(frozen=True)
class JointCommandMsg:
    command: JointCommand


@dataclass(frozen=True)
class GestureEventMsg:
    t: float
    kind: str


@dataclass(frozen=True)
class RecordStatusMsg:
    recording: bool
    episode_id: str | None


@dataclass(frozen=True)
class PromptMsg:
    prompt: PlacementPrompt


@dataclass(frozen=True)
class ErrorMsg:
    error: str
    detail: str = ""


Message = (HandFrameMsg, JointStateMsg, JointCommandMsg, GestureEventMsg,
           RecordStatusMsg, PromptMsg, ErrorMsg)


def encode_message(msg) -> str:
    """One JSON line (without trailing newline) for any protocol message."""
    if isinstance(msg, HandFrameMsg):
        payload = {
            "tag": "hand_frame",
            "t": msg.frame.t,
            "hand": msg.hand,
            "vertices": [list(v.position) + list(v.orientation) for v in msg.frame.vertices],
        }
    elif isinstance(msg, JointStateMsg):
        payload = {"tag": "joint_state", "t": msg.state.t,
                   "q": list(msg.state.q), "tau": list(msg.state.tau)}
    elif isinstance(msg, JointCommandMsg):
        payload = {"tag": "joint_command", "t": msg.command.t, "dq": list(msg.command.dq)}
    elif isinstance(msg, GestureEventMsg):
        payload = {"tag": "gesture_event", "t": msg.t, "kind": msg.kind}
    elif isinstance(msg, RecordStatusMsg):
        payload = {"tag": "record_status", "recording": msg.recording,
                   "episode_id": msg.episode_id}
    elif isinstance(msg, PromptMsg):
        payload = {"tag": "prompt", "center": list(msg.prompt.center), "rot": msg.prompt.rot}
    elif isinstance(msg, ErrorMsg):
        payload = {"tag": "error", "error": msg.error, "detail": msg.detail}
    else:
        raise TypeError(f"not a protocol message: {type(msg).__name__}")
    return json.dumps(payload, separators=(",", ":"))


def decode_message(line: str):
    """Parse one line into a typed message.

    Raises:
        UnknownTag: the line is valid JSON but carries an unrecognized tag.
        MalformedMessage: not valid JSON, or the payload breaks the schema.
    """
    try:
        payload = json.loads(line)
    except ValueError as exc:
        raise MalformedMessage(f"invalid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "tag" not in payload:
        raise MalformedMessage("message must be an object with a 'tag' field")
    tag = payload["tag"]
    try:
        if tag == "hand_frame":
            return _decode_hand_frame(payload)
        if tag == "joint_state":
            return JointStateMsg(AllegroState(
                t=float(payload["t"]),
                q=_vector(payload["q"], skeleton.NUM_JOINTS, "q"),
                tau=_vector(payload["tau"], skeleton.NUM_JOINTS, "tau"),
            ))
        if tag == "joint_command":
            return JointCommandMsg(JointCommand(
                t=float(payload["t"]),
                dq=_vector(payload["dq"], skeleton.NUM_JOINTS, "dq"),
            ))
        if tag == "gesture_event":
            kind = payload["kind"]
            if kind not in GESTURE_KINDS:
                raise MalformedMessage(f"gesture kind must be one of {GESTURE_KINDS}, got {kind!r}")
            return GestureEventMsg(t=float(payload["t"]), kind=kind)
        if tag == "record_status":
            episode_id = payload["episode_id"]
            if episode_id is not None:
                episode_id = str(episode_id)
            return RecordStatusMsg(recording=bool(payload["recording"]), episode_id=episode_id)
        if tag == "prompt":
            center = payload["center"]
            if len(center) != 2:
                raise MalformedMessage(f"prompt center must have 2 values, got {len(center)}")
            return PromptMsg(PlacementPrompt(
                center=(float(center[0]), float(center[1])), rot=float(payload["rot"])
            ))
        if tag == "error":
            return ErrorMsg(error=str(payload["error"]), detail=str(payload.get("detail", "")))
    except MalformedMessage:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedMessage(f"bad {tag} payload: {exc}") from exc
    raise UnknownTag(str(tag))


def _vector(values, length: int, name: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if len(out) != length:
        raise MalformedMessage(f"{name} must have {length} values, got {len(out)}")
    return out


def _decode_hand_frame(payload: dict) -> HandFrameMsg:
    hand = payload.get("hand", "right")
    if hand not in HANDS:
        raise MalformedMessage(f"hand must be one of {HANDS}, got {hand!r}")
    vertices = payload["vertices"]
    if len(vertices) != skeleton.VERTEX_COUNT:
        raise MalformedMessage(
            f"expected {skeleton.VERTEX_COUNT} vertices, got {len(vertices)}"
        )
    poses = []
    for i, row in enumerate(vertices):
        if len(row) != 7:
            raise MalformedMessage(f"vertex {i} must have 7 values, got {len(row)}")
        values = [float(v) for v in row]
        poses.append(Pose(position=tuple(values[:3]), orientation=tuple(values[3:])))
    return HandFrameMsg(
        frame=HandFrame(t=float(payload["t"]), vertices=tuple(poses)), hand=hand
    )
