"""Observation/action windowing over recorded episodes."""

import pytest

from dexkit.errors import EmptyEpisode
from dexkit.model import EpisodeFrame
from dexkit.recorder import Episode, PlacementPrompt
from dexkit.sampler import (
    MODALITIES,
    ZERO_DQ,
    SampleSpec,
    TrainingSample,
    build_samples,
    load_samples,
    save_samples,
    validate_actions,
)


def frame(i):
    """Frame whose fields encode its index, so windows are checkable."""
    return EpisodeFrame(
        t=i / 30.0,
        q=(i / 100.0,) * 16,
        tau=(i / 10.0,) * 16,
        dq=(i / 1000.0,) * 16,
        image_top=f"top/{i:06d}.png",
        image_wrist=f"wrist/{i:06d}.png",
    )


def episode(length, name="ep0000"):
    return Episode(directory=None, episode_id=name, start_time=0.0, rig_hash="h",
                   prompt=PlacementPrompt((0.0, 0.0), 0.0),
                   frames=tuple(frame(i) for i in range(length)))


# -- spec validation -----------------------------------------------------------

def test_spec_defaults():
    spec = SampleSpec()
    assert (spec.obs_steps, spec.action_horizon, spec.prediction_horizon) == (3, 8, 16)
    assert spec.mask == frozenset(MODALITIES)


def test_spec_rejects_bad_windows():
    with pytest.raises(ValueError):
        SampleSpec(obs_steps=0)
    with pytest.raises(ValueError):
        SampleSpec(action_horizon=0)
    with pytest.raises(ValueError):
        SampleSpec(action_horizon=20, prediction_horizon=16)


def test_spec_rejects_unknown_modality():
    with pytest.raises(ValueError):
        SampleSpec(mask=frozenset({"top", "lidar"}))
    with pytest.raises(ValueError):
        SampleSpec(mask=frozenset())


# -- windowing ------------------------------------------------------------------

def test_one_sample_per_frame():
    for length in (1, 2, 5, 37):
        assert len(build_samples(episode(length))) == length


def test_windows_match_direct_indexing():
    spec = SampleSpec(obs_steps=3, action_horizon=8, prediction_horizon=16)
    length = 40
    samples = build_samples(episode(length), spec)
    for t, s in enumerate(samples):
        assert s.t == t
        # observation window: frames[t-2 .. t] clamped at the episode start
        for slot, i in enumerate(range(t - 2, t + 1)):
            src = frame(max(i, 0))
            assert s.obs[slot]["q"] == list(src.q)
            assert s.obs[slot]["image_top"] == src.image_top
            assert s.pad_obs[slot] == (i < 0)
        # action window: dq[t .. t+15] zero padded past the end
        for k in range(16):
            if t + k < length:
                assert s.actions[k] == frame(t + k).dq
                assert s.pad_act[k] is False
            else:
                assert s.actions[k] == ZERO_DQ
                assert s.pad_act[k] is True


def test_padding_flags_at_episode_start():
    s = build_samples(episode(5))[0]
    assert s.pad_obs == (True, True, False)
    assert s.obs[0] == s.obs[1] == s.obs[2]  # first frame replicated


def test_padding_flags_at_episode_end():
    samples = build_samples(episode(5))
    last = samples[-1]
    assert last.pad_act == (False,) + (True,) * 15
    assert all(a == ZERO_DQ for a in last.actions[1:])


def test_single_frame_episode():
    s = build_samples(episode(1))[0]
    assert s.pad_obs == (True, True, False)
    assert s.pad_act == (False,) + (True,) * 15


def test_mask_controls_observation_keys():
    spec = SampleSpec(mask=frozenset({"position"}))
    s = build_samples(episode(4), spec)[2]
    assert set(s.obs[-1]) == {"q"}
    spec = SampleSpec(mask=frozenset({"top", "effort"}))
    s = build_samples(episode(4), spec)[2]
    assert set(s.obs[-1]) == {"image_top", "tau"}


def test_empty_episode_rejected():
    with pytest.raises(EmptyEpisode):
        build_samples(episode(0))


# -- persistence ------------------------------------------------------------------

def test_samples_jsonl_round_trip(tmp_path):
    samples = build_samples(episode(6))
    path = tmp_path / "samples.jsonl"
    save_samples(samples, path)
    again = load_samples(path)
    assert again == samples


def test_sample_record_field_names():
    rec = build_samples(episode(3))[1].to_record()
    assert set(rec) == {"episode", "t", "obs", "actions", "pad_obs", "pad_act"}
    assert TrainingSample.from_record(rec) == build_samples(episode(3))[1]


# -- action validation ---------------------------------------------------------------

LIMITS = tuple((-1.6, 1.6) for _ in range(16))


def test_validate_actions_accepts_recorded_motion():
    for s in build_samples(episode(10)):
        check = validate_actions(s, LIMITS, max_step=0.2)
        assert check.ok, check.reason


def test_validate_actions_flags_oversized_step():
    s = build_samples(episode(3))[0]
    bad = TrainingSample(
        episode_id=s.episode_id, t=s.t, obs=s.obs,
        actions=((0.5,) * 16,) + s.actions[1:],
        pad_obs=s.pad_obs, pad_act=s.pad_act,
    )
    check = validate_actions(bad, LIMITS, max_step=0.2)
    assert not check.ok and check.index == 0


def test_validate_actions_flags_limit_escape():
    s = build_samples(episode(3))[0]
    bad = TrainingSample(
        episode_id=s.episode_id, t=s.t, obs=s.obs,
        actions=((0.15,) * 16,) * 16,
        pad_obs=s.pad_obs, pad_act=s.pad_act,
    )
    # q starts at 0; step 11 integrates to 11 * 0.15 = 1.65 > 1.6
    check = validate_actions(bad, LIMITS, max_step=0.2)
    assert not check.ok
    assert check.index == 10
