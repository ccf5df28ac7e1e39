/**
 * Message-driven session state.
 *
 * The reducer below is the only place robot truth enters the UI: displayed
 * joint positions and efforts always come from a received `joint_state`,
 * never from local extrapolation.  Slider pose and the fist toggle are
 * operator inputs and live alongside, but nothing here feeds them back
 * into robot state.
 */
import { restPose } from "./handmodel.js";
const EVENT_LOG_LIMIT = 50;
export function initialState() {
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
export function applyMessage(state, msg, receivedAtMs) {
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
export function setConnection(state, connection) {
    return { ...state, connection };
}
export function setPose(state, pose) {
    return { ...state, pose };
}
export function setFistToggle(state, on) {
    return { ...state, fistToggle: on };
}
/** True when no joint_state arrived within the staleness window. */
export function isStale(state, nowMs, windowMs = 1000) {
    if (state.jointStateAtMs === null) {
        return true;
    }
    return nowMs - state.jointStateAtMs > windowMs;
}
function appendCapped(log, item) {
    const out = [...log, item];
    return out.length > EVENT_LOG_LIMIT ? out.slice(out.length - EVENT_LOG_LIMIT) : out;
}
