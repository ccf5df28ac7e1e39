/**
 * Browser entry point. Wires the WebSocket bridge to the pose sliders, the
 * fist toggle, the joint panel, and the curation table. Everything testable
 * lives in the sibling modules; this file is DOM plumbing only.
 */
import { decodeMessage, encodeMessage, MalformedMessage, UnknownTag } from "./protocol.js";
import { clampParams, detectFist, fistPose, poseToHandFrame, restPose } from "./handmodel.js";
import { applyMessage, initialState, isStale, setConnection, setFistToggle, setPose } from "./state.js";
import { renderJointPanel } from "./panel.js";
import { loadCurationReport } from "./curation.js";
const TICK_MS = 50; // 20 Hz pose stream, comfortably under the server tick
let state = initialState();
let socket = null;
function el(id) {
    const node = document.getElementById(id);
    if (node === null) {
        throw new Error(`missing #${id}`);
    }
    return node;
}
function slider(id) {
    return el(id);
}
function readPose() {
    return clampParams({
        curl: {
            index: Number(slider("curl-index").value),
            middle: Number(slider("curl-middle").value),
            ring: Number(slider("curl-ring").value),
            little: Number(slider("curl-little").value),
        },
        spread: Number(slider("spread").value),
        thumbCurl: Number(slider("thumb-curl").value),
        thumbSweep: Number(slider("thumb-sweep").value),
    });
}
function connect() {
    const ws = new WebSocket(`ws://${location.host}/ws`);
    socket = ws;
    state = setConnection(state, "connecting");
    ws.onopen = () => {
        state = setConnection(state, "open");
        render();
    };
    ws.onclose = () => {
        state = setConnection(state, "closed");
        socket = null;
        render();
        setTimeout(connect, 1000);
    };
    ws.onmessage = (event) => {
        try {
            state = applyMessage(state, decodeMessage(String(event.data)), performance.now());
        }
        catch (err) {
            if (!(err instanceof MalformedMessage) && !(err instanceof UnknownTag)) {
                throw err;
            }
        }
        render();
    };
}
function tick() {
    if (socket === null || socket.readyState !== WebSocket.OPEN) {
        return;
    }
    const t = performance.now() / 1000.0;
    state = setPose(state, readPose());
    socket.send(encodeMessage(poseToHandFrame(state.pose, t, "right")));
    // The left hand carries the recording gesture: fist arms, open release fires.
    const gesture = state.fistToggle ? fistPose() : restPose();
    socket.send(encodeMessage(poseToHandFrame(gesture, t, "left")));
}
function render() {
    el("connection").textContent = state.connection;
    el("recording").textContent = state.recordStatus === null
        ? "idle"
        : state.recordStatus.recording
            ? `recording ${state.recordStatus.episodeId}`
            : `stopped ${state.recordStatus.episodeId}`;
    el("prompt").textContent = state.prompt === null
        ? "no prompt"
        : `center (${state.prompt.center.map((v) => v.toFixed(3)).join(", ")}) rot ${state.prompt.rot.toFixed(3)}`;
    el("fist-state").textContent = state.fistToggle ? "fist held" : "hand open";
    const panel = renderJointPanel(state.jointState, isStale(state, performance.now()));
    const rows = panel.gauges.map((g, i) => {
        const effort = panel.efforts[i];
        const pin = g.pinned ? " (pinned)" : "";
        return `<tr><td>${g.label}${pin}</td><td>${g.radians.toFixed(3)} rad</td>` +
            `<td>${effort.effort.toFixed(3)} Nm</td></tr>`;
    });
    el("joints").innerHTML = `<table><tbody>${rows.join("")}</tbody></table>`;
    el("joint-warnings").textContent = panel.warnings.join("; ");
    el("stale").textContent = panel.stale ? "STALE" : "live";
    el("events").innerHTML = state.gestureLog
        .map((g) => `<li>${g.kind} @ ${g.t.toFixed(2)}s</li>`)
        .join("");
    el("errors").innerHTML = state.errorLog.map((e) => `<li>${e.detail}</li>`).join("");
}
async function renderCurationTable() {
    const target = el("curation");
    try {
        const report = await loadCurationReport();
        const rows = report.demos.map((d) => `<tr><td>${d.id}</td><td>${d.outlierScore.toFixed(4)}</td>` +
            `<td>${d.retainedAt.map((p) => `p${p}`).join(" ")}</td></tr>`);
        target.innerHTML =
            "<table><thead><tr><th>demo</th><th>outlier score</th><th>retained at</th></tr></thead>" +
                `<tbody>${rows.join("")}</tbody></table>`;
    }
    catch {
        target.textContent = "no curation report published";
    }
}
export function main() {
    el("fist-toggle").onclick = () => {
        state = setFistToggle(state, !state.fistToggle);
        // Sanity: the toggle pose must actually read as a fist.
        if (state.fistToggle && !detectFist(poseToHandFrame(fistPose(), 0, "left").frame)) {
            throw new Error("fist pose failed self-check");
        }
        render();
    };
    connect();
    setInterval(tick, TICK_MS);
    setInterval(render, 250);
    void renderCurationTable();
}
main();
