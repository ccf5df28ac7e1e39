"""Regenerate the golden wire fixtures shared with UI clients.

The files in this directory are frozen snapshots of the ndjson protocol;
clients in other languages test against them byte-for-byte (message
structure) or value-for-value (poses).  Rerun only when the wire schema
changes intentionally:

    python3 fixtures/regen.py
"""

from pathlib import Path

from dexkit.handmodel import FINGERS, HandParams, make_frame
from dexkit.model import AllegroState, JointCommand
from dexkit.protocol import (
    ErrorMsg,
    GestureEventMsg,
    HandFrameMsg,
    JointCommandMsg,
    JointStateMsg,
    PromptMsg,
    RecordStatusMsg,
    encode_message,
)
from dexkit.recorder import PlacementPrompt

HERE = Path(__file__).parent

OPEN_HAND = HandParams()
FIST = HandParams(curl={f: 1.0 for f in FINGERS}, thumb_curl=1.0, thumb_sweep=0.6)
MID_CURL = HandParams(
    curl={f: 0.25 for f in FINGERS}, thumb_curl=0.125, thumb_sweep=0.25
)


def stream_messages():
    q = tuple((i + 1) / 32.0 for i in range(16))
    tau = tuple(-(i + 1) / 64.0 for i in range(16))
    dq = tuple((-1.0) ** i / 256.0 for i in range(16))
    return [
        HandFrameMsg(frame=make_frame(0.125, MID_CURL), hand="right"),
        HandFrameMsg(frame=make_frame(0.25, FIST), hand="left"),
        JointStateMsg(AllegroState(t=0.375, q=q, tau=tau)),
        JointCommandMsg(JointCommand(t=0.375, dq=dq)),
        GestureEventMsg(t=0.5, kind="start"),
        GestureEventMsg(t=3.5, kind="stop"),
        RecordStatusMsg(recording=True, episode_id="ep0000"),
        RecordStatusMsg(recording=False, episode_id=None),
        PromptMsg(PlacementPrompt(center=(0.0625, -0.03125), rot=0.78125)),
        ErrorMsg(error="malformed", detail="vertex 3 must have 7 values, got 6"),
    ]


def main() -> None:
    lines = [encode_message(m) for m in stream_messages()]
    (HERE / "stream_messages.jsonl").write_text("\n".join(lines) + "\n")
    (HERE / "open_hand.json").write_text(
        encode_message(HandFrameMsg(frame=make_frame(0.0, OPEN_HAND))) + "\n"
    )
    (HERE / "ui_fist_frame.json").write_text(
        encode_message(HandFrameMsg(frame=make_frame(0.0, FIST))) + "\n"
    )
    print(f"wrote 3 fixture files under {HERE}")


if __name__ == "__main__":
    main()
