import { describe, expect, it } from "vitest";

import {
  applyMessage,
  initialState,
  isStale,
  setConnection,
  setFistToggle,
  setPose,
} from "../src/state.js";
import { restPose } from "../src/handmodel.js";
import type { GestureEventMsg, JointStateMsg, StreamMessage } from "../src/protocol.js";

const Q = Array.from({ length: 16 }, (_, i) => i / 100);
const TAU = Array.from({ length: 16 }, (_, i) => -i / 200);

function jointState(t: number): JointStateMsg {
  return { tag: "joint_state", t, q: Q, tau: TAU };
}

describe("initialState", () => {
  it("starts disconnected with no telemetry", () => {
    const s = initialState();
    expect(s.connection).toBe("connecting");
    expect(s.jointState).toBeNull();
    expect(s.jointStateAtMs).toBeNull();
    expect(s.lastCommand).toBeNull();
    expect(s.recordStatus).toBeNull();
    expect(s.prompt).toBeNull();
    expect(s.gestureLog).toEqual([]);
    expect(s.errorLog).toEqual([]);
    expect(s.pose).toEqual(restPose());
    expect(s.fistToggle).toBe(false);
  });
});

describe("applyMessage", () => {
  it("stores joint state together with its arrival clock", () => {
    const s = applyMessage(initialState(), jointState(2.5), 1234.0);
    expect(s.jointState?.t).toBe(2.5);
    expect(s.jointStateAtMs).toBe(1234.0);
  });

  it("tracks the last command, record status, and prompt", () => {
    let s = initialState();
    s = applyMessage(s, { tag: "joint_command", t: 1.0, dq: Q }, 0);
    s = applyMessage(s, { tag: "record_status", recording: true, episodeId: "ep0003" }, 0);
    s = applyMessage(s, { tag: "prompt", center: [0.05, -0.02], rot: 0.4 }, 0);
    expect(s.lastCommand?.t).toBe(1.0);
    expect(s.recordStatus).toEqual({ tag: "record_status", recording: true, episodeId: "ep0003" });
    expect(s.prompt?.center).toEqual([0.05, -0.02]);
    expect(s.prompt?.rot).toBe(0.4);
  });

  it("appends gesture events and errors to their logs", () => {
    let s = initialState();
    s = applyMessage(s, { tag: "gesture_event", t: 1.0, kind: "start" }, 0);
    s = applyMessage(s, { tag: "gesture_event", t: 4.0, kind: "stop" }, 0);
    s = applyMessage(s, { tag: "error", error: "malformed", detail: "bad line" }, 0);
    expect(s.gestureLog.map((g) => g.kind)).toEqual(["start", "stop"]);
    expect(s.errorLog).toHaveLength(1);
    expect(s.errorLog[0].detail).toBe("bad line");
  });

  it("caps the event logs at fifty entries, dropping the oldest", () => {
    let s = initialState();
    for (let i = 0; i < 60; i++) {
      const kind = i % 2 === 0 ? "start" : "stop";
      s = applyMessage(s, { tag: "gesture_event", t: i, kind } as GestureEventMsg, 0);
    }
    expect(s.gestureLog).toHaveLength(50);
    expect(s.gestureLog[0].t).toBe(10);
    expect(s.gestureLog[49].t).toBe(59);
  });

  it("ignores echoed hand frames: they are operator input, not robot truth", () => {
    const before = applyMessage(initialState(), jointState(1.0), 10.0);
    const frame: StreamMessage = {
      tag: "hand_frame",
      hand: "right",
      frame: {
        t: 9.0,
        vertices: Array.from({ length: 26 }, () => ({
          position: [0, 0, 0] as const,
          orientation: [0, 0, 0, 1] as const,
        })),
      },
    };
    expect(applyMessage(before, frame, 99.0)).toBe(before);
  });
});

describe("isStale", () => {
  it("treats a session with no telemetry as stale", () => {
    expect(isStale(initialState(), 0)).toBe(true);
  });

  it("uses a one second default window", () => {
    const s = applyMessage(initialState(), jointState(0.0), 5000.0);
    expect(isStale(s, 5999.0)).toBe(false);
    expect(isStale(s, 6000.0)).toBe(false);
    expect(isStale(s, 6001.0)).toBe(true);
  });

  it("honours a custom window", () => {
    const s = applyMessage(initialState(), jointState(0.0), 100.0);
    expect(isStale(s, 180.0, 50)).toBe(true);
    expect(isStale(s, 120.0, 50)).toBe(false);
  });
});

describe("local ui setters", () => {
  it("update connection, pose, and the fist toggle without touching telemetry", () => {
    let s = applyMessage(initialState(), jointState(1.0), 7.0);
    s = setConnection(s, "open");
    s = setFistToggle(s, true);
    const pose = { ...restPose(), thumbCurl: 0.5 };
    s = setPose(s, pose);
    expect(s.connection).toBe("open");
    expect(s.fistToggle).toBe(true);
    expect(s.pose).toEqual(pose);
    expect(s.jointState?.t).toBe(1.0);
    expect(s.jointStateAtMs).toBe(7.0);
  });
});
