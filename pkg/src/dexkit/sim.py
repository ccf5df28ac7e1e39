"""Hardware-free teleop loop: synthetic operator streams and a simulated hand.

The simulated robot integrates clamped joint deltas and reports a simple
spring-model effort; the synthetic operator produces deterministic
two-handed streams (right hand drives motion, left hand gates recording
with fist gestures).  ``simulate_dataset`` runs the whole pipeline headless
and emits a complete dataset tree: episodes with placeholder camera images,
a manifest, the curation report, and policy-training samples.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from . import skeleton
from .handmodel import FINGERS, HandParams, make_frame
from .model import AllegroState, EpisodeFrame, HandFrame, JointCommand, clamp_to_limits
from .recorder import (
    PlacementPrompt,
    PromptGenerator,
    SessionRecorder,
    save_prompts,
)
from .retargeting import retarget_frame
from .rig import RigConfig, default_rig

DEFAULT_TICK_HZ = 30.0
PROFILES = ("unscrew", "open-close", "hold")

Q_ZERO = (0.0,) * skeleton.NUM_JOINTS


@dataclass(frozen=True)
class SimParams:
    tick: float = 1.0 / DEFAULT_TICK_HZ
    k_spring: float = 2.0
    q_rest: tuple[float, ...] = Q_ZERO


@dataclass(frozen=True)
class SimState:
    """Simulated robot state: joint positions and spring-model efforts."""

    t: float
    q: tuple[float, ...]
    tau: tuple[float, ...]

    def as_allegro(self) -> AllegroState:
        return AllegroState(t=self.t, q=self.q, tau=self.tau)


def initial_state(params: SimParams = SimParams()) -> SimState:
    tau = tuple(-params.k_spring * (qi - ri) for qi, ri in zip(Q_ZERO, params.q_rest))
    return SimState(t=0.0, q=Q_ZERO, tau=tau)


def step_sim(state: SimState, cmd: JointCommand, limits,
             params: SimParams = SimParams()) -> SimState:
    """Apply one command tick: q' = clamp(q + dq), spring-model tau."""
    q = tuple(float(v) for v in clamp_to_limits(
        [qi + di for qi, di in zip(state.q, cmd.dq)], limits
    ))
    tau = tuple(-params.k_spring * (qi - ri) for qi, ri in zip(q, params.q_rest))
    return SimState(t=state.t + params.tick, q=q, tau=tau)


# -- synthetic operator -------------------------------------------------------

# Profile motion stays inside the band of curls whose retargeted fingertip
# targets the robot fingers can actually reach; open-close intentionally
# sweeps wider and rides through the boundary region.
def _profile_params(profile: str, phase: float) -> HandParams:
    c = 0.5 - 0.5 * math.cos(2.0 * math.pi * phase)
    if profile == "unscrew":
        return HandParams(
            curl={f: 0.10 + 0.14 * c for f in FINGERS},
            thumb_curl=0.7 * c,
            thumb_sweep=0.9 * c,
        )
    if profile == "open-close":
        return HandParams(
            curl={f: 0.12 + 0.46 * c for f in FINGERS},
            spread=0.05 * (1.0 - c),
            thumb_curl=0.5 * c,
            thumb_sweep=0.6 * c,
        )
    if profile == "hold":
        return HandParams(
            curl={f: 0.18 for f in FINGERS}, thumb_curl=0.35, thumb_sweep=0.45
        )
    raise ValueError(f"unknown profile {profile!r}; expected one of {PROFILES}")


def synth_trajectory(seed: int, duration: float, profile: str,
                     tick_hz: float = DEFAULT_TICK_HZ) -> list[HandFrame]:
    """Deterministic right-hand stream at the tick rate.

    The seed perturbs cycle period and phase so different seeds give
    different but repeatable motion; frame count is round(duration * hz).
    """
    if duration <= 0:
        raise ValueError(f"duration must be positive, got {duration}")
    rng = random.Random(seed)
    period = 3.0 * (1.0 + 0.1 * (rng.random() - 0.5))
    phase0 = rng.random()
    count = int(round(duration * tick_hz))
    frames = []
    for i in range(count):
        t = i / tick_hz
        phase = phase0 + t / period
        if profile == "hold" and i > 0:
            phase = phase0  # constant after the first frame by contract
        frames.append(make_frame(t, _profile_params(profile, phase % 1.0)))
    return frames


FIST_PARAMS = HandParams(curl={f: 1.0 for f in FINGERS}, thumb_curl=1.0, thumb_sweep=0.6)
OPEN_PARAMS = HandParams()


def gesture_timeline(episodes: int, demo_ticks: int, tick_hz: float,
                     hold_time: float) -> list[bool]:
    """Per-tick fist flags for the left hand: one start/stop pair per episode."""
    fist_ticks = int(math.ceil(hold_time * tick_hz)) + 3
    gap_ticks = int(math.ceil(0.5 * tick_hz))
    flags: list[bool] = []
    for _ in range(episodes):
        flags.extend([True] * fist_ticks)   # hold to start
        flags.extend([False] * demo_ticks)  # demo runs with an open left hand
        flags.extend([True] * fist_ticks)   # hold to stop
        flags.extend([False] * gap_ticks)   # release gap before the next episode
    return flags


# -- placeholder cameras ------------------------------------------------------

IMAGE_SIZE = (96, 72)
BACKGROUNDS = {"top": (38, 46, 58), "wrist": (58, 50, 40)}
RECT_COLOR = (226, 140, 44)
MARKER_COLOR = (90, 200, 120)


def render_frame(prompt: PlacementPrompt, q, camera: str,
                 size: tuple[int, int] = IMAGE_SIZE) -> Image.Image:
    """Colored rectangle at the prompt pose plus a joint-driven marker.

    Purely procedural and deterministic; stands in for the real cameras so
    curation and sampling have bytes to work on.
    """
    w, h = size
    img = Image.new("RGB", size, BACKGROUNDS[camera])
    draw = ImageDraw.Draw(img)
    # prompt center is in the workspace box; map it into the image
    cx = (prompt.center[0] + 0.15) / 0.30 * (w - 20) + 10
    cy = (prompt.center[1] + 0.10) / 0.20 * (h - 20) + 10
    half_w, half_h = 9.0, 5.0
    cos_r, sin_r = math.cos(prompt.rot), math.sin(prompt.rot)
    corners = []
    for sx, sy in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
        x = cx + sx * half_w * cos_r - sy * half_h * sin_r
        y = cy + sx * half_w * sin_r + sy * half_h * cos_r
        corners.append((round(x), round(y)))
    draw.polygon(corners, fill=RECT_COLOR)
    mean_q = sum(q) / len(q)
    mx = round((w / 2) + (w / 2 - 6) * math.sin(mean_q * 2.0))
    my = h - 10 if camera == "top" else 10
    draw.ellipse([mx - 3, my - 3, mx + 3, my + 3], fill=MARKER_COLOR)
    return img


# -- headless end-to-end session ----------------------------------------------

@dataclass
class SessionResult:
    root: Path
    episode_dirs: list[str]
    ticks: int


def simulate_dataset(root, seed: int = 7, episodes: int = 3, seconds: float = 2.0,
                     profile: str = "unscrew", tick_hz: float = DEFAULT_TICK_HZ,
                     rig: RigConfig | None = None,
                     params: SimParams | None = None) -> SessionResult:
    """Run a seeded two-handed session and write a complete dataset tree.

    Output layout under ``root``: one directory per episode, dataset
    ``manifest.json``, ``prompts.json``, ``curation_report.json``, and
    ``samples.jsonl``.  Fixed arguments give byte-identical trees.
    """
    from .curation import save_manifest, score_dataset
    from .sampler import SampleSpec, dataset_samples, save_samples

    rig = default_rig() if rig is None else rig
    params = SimParams(tick=1.0 / tick_hz) if params is None else params
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)

    demo_ticks = int(round(seconds * tick_hz))
    fist_flags = gesture_timeline(episodes, demo_ticks, tick_hz, hold_time=0.5)
    control = synth_trajectory(seed, duration=len(fist_flags) / tick_hz,
                               profile=profile, tick_hz=tick_hz)

    recorder = SessionRecorder(root, rig.config_hash(), PromptGenerator(seed))
    state = initial_state(params)
    warm: dict = {}
    for i, control_frame in enumerate(control):
        t = control_frame.t
        fist = fist_flags[i] if i < len(fist_flags) else False
        gesture_frame = make_frame(t, FIST_PARAMS if fist else OPEN_PARAMS)
        recorder.process_gesture_frame(gesture_frame)

        _, cmd = retarget_frame(control_frame, state.q, rig, warm_starts=warm)
        state = step_sim(state, cmd, rig.joint_limits, params)

        if recorder.recording:
            episode_dir = recorder.episode_dir()
            refs = {}
            for camera in ("top", "wrist"):
                ref = recorder.image_name(camera)
                render_frame(recorder.current_prompt, state.q, camera).save(
                    episode_dir / ref, format="PNG"
                )
                refs[camera] = ref
            recorder.append(EpisodeFrame(
                t=t, q=state.q, tau=state.tau, dq=cmd.dq,
                image_top=refs["top"], image_wrist=refs["wrist"],
            ))

    episode_dirs = recorder.finish()
    save_manifest(root, episode_dirs)
    prompts = [  # one per recorded episode, in recording order
        _episode_prompt(root / name) for name in episode_dirs
    ]
    save_prompts(prompts, root / "prompts.json")
    if len(episode_dirs) >= 3:  # curation is defined for >= 3 demos
        report = score_dataset(root)
        report.save(root / "curation_report.json")
    save_samples(dataset_samples(root), root / "samples.jsonl")
    return SessionResult(root=root, episode_dirs=episode_dirs, ticks=len(control))


def _episode_prompt(episode_dir: Path) -> PlacementPrompt:
    from .recorder import load_episode

    return load_episode(episode_dir).prompt
