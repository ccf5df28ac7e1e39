"""Teleoperation, recording, curation, and sampling toolkit for a
four-fingered robot hand."""

from .errors import DexkitError
from .model import AllegroState, EpisodeFrame, HandFrame, JointCommand, Pose
from .rig import RigConfig, default_rig
from .retargeting import retarget_frame
from .kinematics import fk, jacobian, solve_ik
from .recorder import SessionRecorder, load_episode
from .curation import CurationReport, filter_percentile, score_dataset
from .sampler import SampleSpec, TrainingSample, build_samples
from .protocol import decode_message, encode_message
from .sim import simulate_dataset

__version__ = "0.1.0"

__all__ = [
    "AllegroState",
    "CurationReport",
    "DexkitError",
    "EpisodeFrame",
    "HandFrame",
    "JointCommand",
    "Pose",
    "RigConfig",
    "SampleSpec",
    "SessionRecorder",
    "TrainingSample",
    "build_samples",
    "decode_message",
    "default_rig",
    "encode_message",
    "filter_percentile",
    "fk",
    "jacobian",
    "load_episode",
    "retarget_frame",
    "score_dataset",
    "simulate_dataset",
    "solve_ik",
    "__version__",
]
