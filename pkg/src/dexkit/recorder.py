"""Gesture-gated demonstration recording.

The operator's left hand starts and stops recording with a fist gesture;
the right hand drives the robot.  This module owns the gesture state
machine, the on-disk episode format (``meta.json`` + append-only
``frames.jsonl`` + per-camera image directories), and the seeded placement
prompt generator used to vary object placement between demonstrations.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import skeleton
from .errors import ClosedWriter, CorruptFrameLine, MissingMeta, NonMonotonicTime
from .model import EpisodeFrame, HandFrame

DEFAULT_FIST_THRESHOLD = 0.06  # meters, fingertip to palm
DEFAULT_HOLD_TIME = 0.5        # seconds of continuous fist before an event fires

META_NAME = "meta.json"
FRAMES_NAME = "frames.jsonl"
CAMERA_DIRS = ("top", "wrist")


def detect_fist(frame: HandFrame, threshold: float = DEFAULT_FIST_THRESHOLD) -> bool:
    """True iff all four non-thumb fingertips are within ``threshold`` of the palm."""
    palm = frame.position(skeleton.PALM)
    for tip in skeleton.FIST_FINGERTIPS:
        if np.linalg.norm(frame.position(tip) - palm) >= threshold:
            return False
    return True


@dataclass(frozen=True)
class GestureState:
    """Debounced fist-gesture state.

    ``debounce`` is both the minimum continuous hold before an event fires
    and, because a release is required between events, the minimum spacing
    between consecutive events.
    """

    recording: bool = False
    fist_held_since: float | None = None
    armed: bool = True
    debounce: float = DEFAULT_HOLD_TIME


def step_gesture(state: GestureState, fist: bool, t: float) -> tuple[GestureState, str | None]:
    """Advance the gesture machine one observation.

    Returns the new state and one of ``None``, ``"start"``, ``"stop"``.
    The fist must be held continuously for at least ``state.debounce``
    seconds to emit an event; the hand must open again before the next
    event can fire.
    """
    if not fist:
        return replace(state, fist_held_since=None, armed=True), None
    held_since = t if state.fist_held_since is None else state.fist_held_since
    if state.armed and t - held_since >= state.debounce:
        event = "stop" if state.recording else "start"
        next_state = replace(
            state, recording=not state.recording, fist_held_since=held_since, armed=False
        )
        return next_state, event
    return replace(state, fist_held_since=held_since), None


@dataclass(frozen=True)
class PlacementPrompt:
    """Randomized target rectangle shown to the operator before a demo."""

    center: tuple[float, float]
    rot: float

    def to_record(self) -> dict:
        return {"center": [self.center[0], self.center[1]], "rot": self.rot}

    @classmethod
    def from_record(cls, rec: dict) -> "PlacementPrompt":
        cx, cy = rec["center"]
        return cls(center=(float(cx), float(cy)), rot=float(rec["rot"]))


# Desk-scale default workspace: a 30 x 20 cm box in front of the robot.
DEFAULT_WORKSPACE = ((-0.15, 0.15), (-0.10, 0.10))


class PromptGenerator:
    """Seeded stream of placement prompts inside a workspace box."""

    def __init__(self, seed: int, workspace=DEFAULT_WORKSPACE,
                 rot_range: tuple[float, float] = (-math.pi, math.pi)):
        (x_lo, x_hi), (y_lo, y_hi) = workspace
        if not (x_lo < x_hi and y_lo < y_hi):
            raise ValueError(f"workspace box must have positive extent, got {workspace}")
        self.workspace = ((float(x_lo), float(x_hi)), (float(y_lo), float(y_hi)))
        self.rot_range = (float(rot_range[0]), float(rot_range[1]))
        self._rng = random.Random(seed)

    def next(self) -> PlacementPrompt:
        (x_lo, x_hi), (y_lo, y_hi) = self.workspace
        return PlacementPrompt(
            center=(self._rng.uniform(x_lo, x_hi), self._rng.uniform(y_lo, y_hi)),
            rot=self._rng.uniform(*self.rot_range),
        )

    def take(self, n: int) -> list[PlacementPrompt]:
        return [self.next() for _ in range(n)]


def save_prompts(prompts, path) -> None:
    """Write prompts as a JSON list of {center: [x, y], rot} records."""
    records = [p.to_record() for p in prompts]
    Path(path).write_text(json.dumps(records, indent=2) + "\n")


def load_prompts(path) -> list[PlacementPrompt]:
    records = json.loads(Path(path).read_text())
    return [PlacementPrompt.from_record(rec) for rec in records]


class EpisodeWriter:
    """Append-only writer for one episode directory.

    Frames are flushed line by line so a crash mid-episode leaves a valid
    shorter episode on disk.  Image files are written by the caller; the
    writer only hands out canonical relative paths.
    """

    def __init__(self, directory, episode_id: str, rig_hash: str,
                 prompt: PlacementPrompt, start_time: float = 0.0):
        self.directory = Path(directory)
        self.episode_id = episode_id
        self.directory.mkdir(parents=True, exist_ok=True)
        for cam in CAMERA_DIRS:
            (self.directory / cam).mkdir(exist_ok=True)
        meta = {
            "id": episode_id,
            "start_time": start_time,
            "rig_hash": rig_hash,
            "prompt": prompt.to_record(),
        }
        (self.directory / META_NAME).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        self._file = open(self.directory / FRAMES_NAME, "w")
        self._last_t: float | None = None
        self._count = 0

    def image_name(self, camera: str, index: int | None = None) -> str:
        """Relative image path for the given camera and frame index."""
        if camera not in CAMERA_DIRS:
            raise ValueError(f"unknown camera {camera!r}")
        if index is None:
            index = self._count
        return f"{camera}/{index:06d}.png"

    def append_frame(self, frame: EpisodeFrame) -> None:
        if self._file is None:
            raise ClosedWriter(f"episode {self.episode_id} already closed")
        if self._last_t is not None and frame.t <= self._last_t:
            raise NonMonotonicTime(f"frame t={frame.t} not after previous t={self._last_t}")
        self._file.write(json.dumps(frame.to_record()) + "\n")
        self._file.flush()
        self._last_t = frame.t
        self._count += 1

    @property
    def frame_count(self) -> int:
        return self._count

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None

    def __enter__(self) -> "EpisodeWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


@dataclass(frozen=True)
class Episode:
    """Parsed episode: metadata plus frames in recorded order."""

    directory: Path
    episode_id: str
    start_time: float
    rig_hash: str
    prompt: PlacementPrompt
    frames: tuple[EpisodeFrame, ...]

    def duration(self) -> float:
        if len(self.frames) < 2:
            return 0.0
        return self.frames[-1].t - self.frames[0].t


def load_episode(path) -> Episode:
    """Parse an episode directory, validating the frame-line format.

    Raises:
        MissingMeta: no ``meta.json`` or it fails to parse.
        CorruptFrameLine: a frames.jsonl line that is not valid JSON, lacks
            a required field, or breaks monotonic time (1-based line number).
    """
    directory = Path(path)
    meta_path = directory / META_NAME
    try:
        meta = json.loads(meta_path.read_text())
        episode_id = str(meta["id"])
        start_time = float(meta["start_time"])
        rig_hash = str(meta["rig_hash"])
        prompt = PlacementPrompt.from_record(meta["prompt"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise MissingMeta(f"{meta_path}: {exc}") from exc

    frames: list[EpisodeFrame] = []
    frames_path = directory / FRAMES_NAME
    if frames_path.exists():
        last_t = None
        with open(frames_path) as fh:
            for number, line in enumerate(fh, start=1):
                if line.strip() == "":
                    continue
                try:
                    frame = EpisodeFrame.from_record(json.loads(line))
                except (ValueError, KeyError, TypeError) as exc:
                    raise CorruptFrameLine(number, str(exc)) from exc
                if last_t is not None and frame.t <= last_t:
                    raise CorruptFrameLine(number, f"t={frame.t} not after previous t={last_t}")
                last_t = frame.t
                frames.append(frame)
    return Episode(
        directory=directory,
        episode_id=episode_id,
        start_time=start_time,
        rig_hash=rig_hash,
        prompt=prompt,
        frames=tuple(frames),
    )


class SessionRecorder:
    """Ties the gesture channel to episode lifecycle in a dataset directory.

    Feed left-hand frames to :meth:`process_gesture_frame`; while recording,
    robot-side frames passed to :meth:`append` land in the active episode.
    """

    def __init__(self, root, rig_hash: str, prompts: PromptGenerator,
                 fist_threshold: float = DEFAULT_FIST_THRESHOLD,
                 hold_time: float = DEFAULT_HOLD_TIME):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.rig_hash = rig_hash
        self.prompts = prompts
        self.fist_threshold = fist_threshold
        self.state = GestureState(debounce=hold_time)
        self.writer: EpisodeWriter | None = None
        self.episode_dirs: list[str] = []
        self._next_index = 0
        self._prompt: PlacementPrompt | None = None

    @property
    def recording(self) -> bool:
        return self.writer is not None

    @property
    def current_prompt(self) -> PlacementPrompt | None:
        return self._prompt if self.writer is not None else None

    def process_gesture_frame(self, frame: HandFrame) -> str | None:
        """Advance the gesture machine; opens/closes episodes on events."""
        fist = detect_fist(frame, self.fist_threshold)
        self.state, event = step_gesture(self.state, fist, frame.t)
        if event == "start":
            self._open_episode(frame.t)
        elif event == "stop":
            self._close_episode()
        return event

    def append(self, frame: EpisodeFrame) -> bool:
        """Record one frame if an episode is active; returns whether it was."""
        if self.writer is None:
            return False
        self.writer.append_frame(frame)
        return True

    def image_name(self, camera: str) -> str | None:
        if self.writer is None:
            return None
        return self.writer.image_name(camera)

    def episode_dir(self) -> Path | None:
        return self.writer.directory if self.writer is not None else None

    def finish(self) -> list[str]:
        """Close any open episode and return recorded directory names."""
        self._close_episode()
        return list(self.episode_dirs)

    def _open_episode(self, t: float) -> None:
        episode_id = f"ep{self._next_index:04d}"
        self._next_index += 1
        self._prompt = self.prompts.next()
        self.writer = EpisodeWriter(
            self.root / episode_id, episode_id, self.rig_hash, self._prompt, start_time=t
        )
        self.episode_dirs.append(episode_id)

    def _close_episode(self) -> None:
        if self.writer is not None:
            self.writer.close()
            self.writer = None
