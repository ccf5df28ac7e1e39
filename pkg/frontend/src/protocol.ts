/**
 * Wire protocol shared with the teleop server: one JSON object per line,
 * discriminated by `tag`.  Decoding validates the full schema so malformed
 * server data can never reach the view layer; encoding produces the same
 * compact single-line form the server emits.
 */

export const VERTEX_COUNT = 26;
export const NUM_JOINTS = 16;

export const HANDS = ["left", "right"] as const;
export const GESTURE_KINDS = ["start", "stop"] as const;

export type Hand = (typeof HANDS)[number];
export type GestureKind = (typeof GESTURE_KINDS)[number];

export type Vec3 = readonly [number, number, number];
export type Quat = readonly [number, number, number, number];

export interface VertexPose {
  readonly position: Vec3;
  readonly orientation: Quat;
}

export interface HandFrame {
  readonly t: number;
  readonly vertices: readonly VertexPose[]; // exactly VERTEX_COUNT entries
}

export interface HandFrameMsg {
  readonly tag: "hand_frame";
  readonly hand: Hand;
  readonly frame: HandFrame;
}

export interface JointStateMsg {
  readonly tag: "joint_state";
  readonly t: number;
  readonly q: readonly number[];
  readonly tau: readonly number[];
}

export interface JointCommandMsg {
  readonly tag: "joint_command";
  readonly t: number;
  readonly dq: readonly number[];
}

export interface GestureEventMsg {
  readonly tag: "gesture_event";
  readonly t: number;
  readonly kind: GestureKind;
}

export interface RecordStatusMsg {
  readonly tag: "record_status";
  readonly recording: boolean;
  readonly episodeId: string | null;
}

export interface PromptMsg {
  readonly tag: "prompt";
  readonly center: readonly [number, number];
  readonly rot: number;
}

export interface ErrorMsg {
  readonly tag: "error";
  readonly error: string;
  readonly detail: string;
}

export type StreamMessage =
  | HandFrameMsg
  | JointStateMsg
  | JointCommandMsg
  | GestureEventMsg
  | RecordStatusMsg
  | PromptMsg
  | ErrorMsg;

export class MalformedMessage extends Error {}
export class UnknownTag extends Error {}

export function encodeMessage(msg: StreamMessage): string {
  switch (msg.tag) {
    case "hand_frame":
      return JSON.stringify({
        tag: "hand_frame",
        t: msg.frame.t,
        hand: msg.hand,
        vertices: msg.frame.vertices.map((v) => [...v.position, ...v.orientation]),
      });
    case "joint_state":
      return JSON.stringify({ tag: "joint_state", t: msg.t, q: msg.q, tau: msg.tau });
    case "joint_command":
      return JSON.stringify({ tag: "joint_command", t: msg.t, dq: msg.dq });
    case "gesture_event":
      return JSON.stringify({ tag: "gesture_event", t: msg.t, kind: msg.kind });
    case "record_status":
      return JSON.stringify({
        tag: "record_status",
        recording: msg.recording,
        episode_id: msg.episodeId,
      });
    case "prompt":
      return JSON.stringify({ tag: "prompt", center: msg.center, rot: msg.rot });
    case "error":
      return JSON.stringify({ tag: "error", error: msg.error, detail: msg.detail });
  }
}

export function decodeMessage(line: string): StreamMessage {
  let payload: unknown;
  try {
    payload = JSON.parse(line);
  } catch (exc) {
    throw new MalformedMessage(`invalid JSON: ${String(exc)}`);
  }
  if (!isRecord(payload) || !("tag" in payload)) {
    throw new MalformedMessage("message must be an object with a 'tag' field");
  }
  const tag = payload["tag"];
  switch (tag) {
    case "hand_frame":
      return decodeHandFrame(payload);
    case "joint_state":
      return {
        tag: "joint_state",
        t: num(payload["t"], "t"),
        q: vector(payload["q"], NUM_JOINTS, "q"),
        tau: vector(payload["tau"], NUM_JOINTS, "tau"),
      };
    case "joint_command":
      return {
        tag: "joint_command",
        t: num(payload["t"], "t"),
        dq: vector(payload["dq"], NUM_JOINTS, "dq"),
      };
    case "gesture_event": {
      const kind = payload["kind"];
      if (kind !== "start" && kind !== "stop") {
        throw new MalformedMessage(
          `gesture kind must be one of ${GESTURE_KINDS.join(", ")}, got ${JSON.stringify(kind)}`,
        );
      }
      return { tag: "gesture_event", t: num(payload["t"], "t"), kind };
    }
    case "record_status": {
      const episodeId = payload["episode_id"];
      if (episodeId !== null && typeof episodeId !== "string") {
        throw new MalformedMessage("episode_id must be a string or null");
      }
      if (typeof payload["recording"] !== "boolean") {
        throw new MalformedMessage("recording must be a boolean");
      }
      return { tag: "record_status", recording: payload["recording"], episodeId };
    }
    case "prompt": {
      const center = payload["center"];
      if (!Array.isArray(center) || center.length !== 2) {
        throw new MalformedMessage("prompt center must have 2 values");
      }
      return {
        tag: "prompt",
        center: [num(center[0], "center[0]"), num(center[1], "center[1]")],
        rot: num(payload["rot"], "rot"),
      };
    }
    case "error":
      return {
        tag: "error",
        error: str(payload["error"], "error"),
        detail: typeof payload["detail"] === "string" ? payload["detail"] : "",
      };
    default:
      throw new UnknownTag(String(tag));
  }
}

function decodeHandFrame(payload: Record<string, unknown>): HandFrameMsg {
  const hand = payload["hand"] ?? "right";
  if (hand !== "left" && hand !== "right") {
    throw new MalformedMessage(`hand must be one of ${HANDS.join(", ")}, got ${JSON.stringify(hand)}`);
  }
  const rows = payload["vertices"];
  if (!Array.isArray(rows) || rows.length !== VERTEX_COUNT) {
    throw new MalformedMessage(
      `expected ${VERTEX_COUNT} vertices, got ${Array.isArray(rows) ? rows.length : typeof rows}`,
    );
  }
  const vertices = rows.map((row, i) => {
    if (!Array.isArray(row) || row.length !== 7) {
      throw new MalformedMessage(`vertex ${i} must have 7 values`);
    }
    const vals = row.map((v, j) => num(v, `vertex ${i}[${j}]`));
    return {
      position: [vals[0], vals[1], vals[2]] as Vec3,
      orientation: [vals[3], vals[4], vals[5], vals[6]] as Quat,
    };
  });
  return {
    tag: "hand_frame",
    hand,
    frame: { t: num(payload["t"], "t"), vertices },
  };
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function num(value: unknown, name: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new MalformedMessage(`${name} must be a finite number, got ${JSON.stringify(value)}`);
  }
  return value;
}

function str(value: unknown, name: string): string {
  if (typeof value !== "string") {
    throw new MalformedMessage(`${name} must be a string`);
  }
  return value;
}

function vector(value: unknown, length: number, name: string): number[] {
  if (!Array.isArray(value) || value.length !== length) {
    throw new MalformedMessage(
      `${name} must have ${length} values, got ${Array.isArray(value) ? value.length : typeof value}`,
    );
  }
  return value.map((v, i) => num(v, `${name}[${i}]`));
}
