/**
 * Message-driven session state.
 *
 * The reducer below is the only place robot truth enters the UI: displayed
 * joint positions and efforts always come from a received `joint_state`,
 * never from local extrapolation.  Slider pose and the fist toggle are
 * operator inputs and live alongside, but nothing here feeds them back
 * into robot state.
 */

import type {
  ErrorMsg,
  GestureEventMsg,
  JointCommandMsg,
  JointStateMsg,
  PromptMsg,
  RecordStatusMsg,
  StreamMessage,
} from "./protocol.js";
import { restPose, type HandPoseParams } from "./handmodel.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

const EVENT_LOG_LIMIT = 50;

export interface UiSessionState {
  readonly connection: ConnectionStatus;
  readonly jointState: JointStateMsg | null;
  readonly jointStateAtMs: number | null; // wall clock of last joint_state
  readonly lastCommand: JointCommandMsg | null;
  readonly recordStatus: RecordStatusMsg | null;
  readonly prompt: PromptMsg | null;
  readonly gestureLog: readonly GestureEventMsg[];
  readonly errorLog: readonly ErrorMsg[];
  readonly pose: HandPoseParams; // operator sliders, not robot truth
  readonly fistToggle: boolean;
}

export function initialState(): UiSessionState {
  return {
    connection: "connecting",
    jointState: null,
    jointStateAtMs: null,
    lastCommand: null,
    recordStatus: null,
    prompt: null,
    gestureLog: [],
    errorLog: [],
    pose: restPose(),
    fistToggle: false,
  };
}

export function applyMessage(
  state: UiSessionState,
  msg: StreamMessage,
  receivedAtMs: number,
): UiSessionState {
  switch (msg.tag) {
    case "joint_state":
      return { ...state, jointState: msg, jointStateAtMs: receivedAtMs };
    case "joint_command":
      return { ...state, lastCommand: msg };
    case "record_status":
      return { ...state, recordStatus: msg };
    case "prompt":
      return { ...state, prompt: msg };
    case "gesture_event":
      return { ...state, gestureLog: appendCapped(state.gestureLog, msg) };
    case "error":
      return { ...state, errorLog: appendCapped(state.errorLog, msg) };
    case "hand_frame":
      // our own echo or another operator's stream; not robot truth
      return state;
  }
}

export function setConnection(state: UiSessionState, connection: ConnectionStatus): UiSessionState {
  return { ...state, connection };
}

export function setPose(state: UiSessionState, pose: HandPoseParams): UiSessionState {
  return { ...state, pose };
}

export function setFistToggle(state: UiSessionState, on: boolean): UiSessionState {
  return { ...state, fistToggle: on };
}

/** True when no joint_state arrived within the staleness window. */
export function isStale(state: UiSessionState, nowMs: number, windowMs = 1000): boolean {
  if (state.jointStateAtMs === null) {
    return true;
  }
  return nowMs - state.jointStateAtMs > windowMs;
}

function appendCapped<T>(log: readonly T[], item: T): T[] {
  const out = [...log, item];
  return out.length > EVENT_LOG_LIMIT ? out.slice(out.length - EVENT_LOG_LIMIT) : out;
}
