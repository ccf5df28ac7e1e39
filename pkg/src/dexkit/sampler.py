"""Episode-to-training-sample conversion with observation/action windowing.

Every frame of an episode becomes one sample: a short window of past
observations (replicate-first padding at the episode start) and a fixed
horizon of future joint deltas (zero padding past the episode end).  A
modality mask selects which observation channels appear, matching the
ablation variants that drop a camera or the effort signal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import skeleton
from .errors import EmptyEpisode
from .recorder import Episode

MODALITIES = ("top", "wrist", "effort", "position")
OBS_KEYS = {"top": "image_top", "wrist": "image_wrist", "effort": "tau", "position": "q"}

ZERO_DQ = (0.0,) * skeleton.NUM_JOINTS


@dataclass(frozen=True)
class SampleSpec:
    """Windowing parameters plus the observation modality mask."""

    obs_steps: int = 3
    action_horizon: int = 8
    prediction_horizon: int = 16
    mask: frozenset = field(default_factory=lambda: frozenset(MODALITIES))

    def __post_init__(self):
        if self.obs_steps < 1:
            raise ValueError(f"obs_steps must be >= 1, got {self.obs_steps}")
        if not (0 < self.action_horizon <= self.prediction_horizon):
            raise ValueError(
                f"need 0 < action_horizon <= prediction_horizon, got "
                f"{self.action_horizon} > {self.prediction_horizon}"
            )
        mask = frozenset(self.mask)
        if not mask:
            raise ValueError("modality mask must be non-empty")
        unknown = mask - set(MODALITIES)
        if unknown:
            raise ValueError(f"unknown modalities {sorted(unknown)}")
        object.__setattr__(self, "mask", mask)


@dataclass(frozen=True)
class TrainingSample:
    """One policy-training sample anchored at episode frame ``t``."""

    episode_id: str
    t: int
    obs: tuple[dict, ...]
    actions: tuple[tuple[float, ...], ...]
    pad_obs: tuple[bool, ...]
    pad_act: tuple[bool, ...]

    def to_record(self) -> dict:
        return {
            "episode": self.episode_id,
            "t": self.t,
            "obs": [dict(o) for o in self.obs],
            "actions": [list(a) for a in self.actions],
            "pad_obs": list(self.pad_obs),
            "pad_act": list(self.pad_act),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "TrainingSample":
        return cls(
            episode_id=str(rec["episode"]),
            t=int(rec["t"]),
            obs=tuple(dict(o) for o in rec["obs"]),
            actions=tuple(tuple(float(v) for v in a) for a in rec["actions"]),
            pad_obs=tuple(bool(b) for b in rec["pad_obs"]),
            pad_act=tuple(bool(b) for b in rec["pad_act"]),
        )


def _observe(frame, mask) -> dict:
    obs = {}
    if "position" in mask:
        obs["q"] = list(frame.q)
    if "effort" in mask:
        obs["tau"] = list(frame.tau)
    if "top" in mask:
        obs["image_top"] = frame.image_top
    if "wrist" in mask:
        obs["image_wrist"] = frame.image_wrist
    return obs


def build_samples(episode: Episode, spec: SampleSpec = SampleSpec()) -> list[TrainingSample]:
    """One sample per base index t in [0, L).

    Observations are frames[t - obs_steps + 1 .. t] with the first frame
    replicated before the episode start; actions are dq[t .. t + H - 1]
    zero-padded past the episode end.  Padding flags mark both.
    """
    frames = episode.frames
    if not frames:
        raise EmptyEpisode(f"episode {episode.episode_id} has no frames")
    length = len(frames)
    samples = []
    for t in range(length):
        obs, pad_obs = [], []
        for i in range(t - spec.obs_steps + 1, t + 1):
            obs.append(_observe(frames[max(i, 0)], spec.mask))
            pad_obs.append(i < 0)
        actions, pad_act = [], []
        for k in range(spec.prediction_horizon):
            if t + k < length:
                actions.append(tuple(frames[t + k].dq))
                pad_act.append(False)
            else:
                actions.append(ZERO_DQ)
                pad_act.append(True)
        samples.append(TrainingSample(
            episode_id=episode.episode_id,
            t=t,
            obs=tuple(obs),
            actions=tuple(actions),
            pad_obs=tuple(pad_obs),
            pad_act=tuple(pad_act),
        ))
    return samples


@dataclass(frozen=True)
class ActionValidation:
    """Outcome of checking a sample's action sequence against rig limits."""

    ok: bool
    index: int | None = None
    reason: str | None = None


def validate_actions(sample: TrainingSample, limits, max_step: float) -> ActionValidation:
    """Check per-step magnitude and clamp-free integration within limits.

    Integration starts from the sample's latest observed q when the
    position modality is present, otherwise only the magnitude check runs.
    """
    q = sample.obs[-1].get("q")
    current = list(q) if q is not None else None
    for idx, dq in enumerate(sample.actions):
        for j, d in enumerate(dq):
            if abs(d) > max_step:
                return ActionValidation(False, idx, f"joint {j} step {d} exceeds {max_step}")
        if current is not None:
            for j, d in enumerate(dq):
                current[j] += d
                lo, hi = limits[j]
                if not (lo <= current[j] <= hi):
                    return ActionValidation(
                        False, idx, f"joint {j} integrates to {current[j]} outside [{lo}, {hi}]"
                    )
    return ActionValidation(True)


def save_samples(samples, path) -> None:
    """Write samples as one JSON object per line."""
    with open(path, "w") as fh:
        for sample in samples:
            fh.write(json.dumps(sample.to_record()) + "\n")


def load_samples(path) -> list[TrainingSample]:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                out.append(TrainingSample.from_record(json.loads(line)))
    return out


def dataset_samples(dataset_root, spec: SampleSpec = SampleSpec()) -> list[TrainingSample]:
    """Samples for every manifest episode, ordered by (episode id, t)."""
    from .curation import load_manifest
    from .recorder import load_episode

    root = Path(dataset_root)
    out = []
    for name in sorted(load_manifest(root)):
        out.extend(build_samples(load_episode(root / name), spec))
    return out
