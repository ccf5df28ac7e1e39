/**
 * Canonical 26-vertex human hand driven by slider parameters.
 *
 * The rest-pose table and pose math replicate the server's synthetic hand
 * verbatim so the all-zero pose is identical on both sides of the wire and
 * a full-curl pose lands inside the server's fist detector.  Keeping the
 * model slider-parameterized (rather than free vertex editing) means every
 * emitted frame is anatomically plausible: the palm anchors stay
 * non-collinear, which retargeting requires.
 */
// Skeleton vertex indices (wire contract order).
export const WRIST = 0;
export const PALM = 1;
export const THUMB_METACARPAL = 2;
export const THUMB_PROXIMAL = 3;
export const THUMB_DISTAL = 4;
export const THUMB_TIP = 5;
export const FINGERS = ["index", "middle", "ring", "little"];
// proximal, intermediate, distal, tip per finger
export const FINGER_CHAINS = {
    index: [7, 8, 9, 10],
    middle: [12, 13, 14, 15],
    ring: [17, 18, 19, 20],
    little: [22, 23, 24, 25],
};
export const FIST_FINGERTIPS = [10, 15, 20, 25];
export const FIST_THRESHOLD = 0.06; // meters, fingertip to palm
// Rest-pose vertex positions, meters.
export const REST_POSITIONS = [
    [0.0, 0.0, 0.0], // wrist
    [0.0, 0.045, 0.0], // palm
    [0.022, 0.02, 0.0], // thumb metacarpal
    [0.048, 0.042, 0.0], // thumb proximal
    [0.075, 0.062, 0.0], // thumb distal
    [0.094, 0.077, 0.0], // thumb tip
    [0.028, 0.052, 0.0], // index metacarpal
    [0.03, 0.095, 0.0], // index proximal
    [0.03, 0.135, 0.0], // index intermediate
    [0.03, 0.158, 0.0], // index distal
    [0.03, 0.18, 0.0], // index tip
    [0.01, 0.054, 0.0], // middle metacarpal
    [0.01, 0.1, 0.0], // middle proximal
    [0.01, 0.145, 0.0], // middle intermediate
    [0.01, 0.171, 0.0], // middle distal
    [0.01, 0.195, 0.0], // middle tip
    [-0.01, 0.052, 0.0], // ring metacarpal
    [-0.01, 0.095, 0.0], // ring proximal
    [-0.01, 0.138, 0.0], // ring intermediate
    [-0.01, 0.163, 0.0], // ring distal
    [-0.01, 0.185, 0.0], // ring tip
    [-0.028, 0.048, 0.0], // little metacarpal
    [-0.03, 0.088, 0.0], // little proximal
    [-0.03, 0.12, 0.0], // little intermediate
    [-0.03, 0.139, 0.0], // little distal
    [-0.03, 0.156, 0.0], // little tip
];
// Joint bend at full curl, radians, proximal/intermediate/distal.
const CURL_BEND = [1.45, 1.6, 1.1];
// Spread fan per finger at spread=1, radians about +z at the proximal joint.
// Signed so positive spread fans the fingers apart (index toward +x).
const SPREAD_FAN = {
    index: -0.14,
    middle: -0.03,
    ring: 0.07,
    little: 0.17,
};
const THUMB_SWEEP_MAX = 0.9; // rad about +z at the thumb metacarpal
const THUMB_BEND = [0.6, 0.9]; // rad at proximal/distal at full curl
export function restPose() {
    return {
        curl: { index: 0, middle: 0, ring: 0, little: 0 },
        spread: 0,
        thumbCurl: 0,
        thumbSweep: 0,
    };
}
export function fistPose() {
    return {
        curl: { index: 1, middle: 1, ring: 1, little: 1 },
        spread: 0,
        thumbCurl: 1,
        thumbSweep: 0.6,
    };
}
export function clampParams(params) {
    const unit = (v) => Math.min(1, Math.max(0, v));
    return {
        curl: {
            index: unit(params.curl.index),
            middle: unit(params.curl.middle),
            ring: unit(params.curl.ring),
            little: unit(params.curl.little),
        },
        spread: Math.min(1, Math.max(-1, params.spread)),
        thumbCurl: unit(params.thumbCurl),
        thumbSweep: unit(params.thumbSweep),
    };
}
function cross(a, v) {
    return [a[1] * v[2] - a[2] * v[1], a[2] * v[0] - a[0] * v[2], a[0] * v[1] - a[1] * v[0]];
}
function dot(a, v) {
    return a[0] * v[0] + a[1] * v[1] + a[2] * v[2];
}
/** Rodrigues rotation of v about a unit axis; term order matches the server. */
function rotateAboutAxis(v, axis, angle) {
    const c = Math.cos(angle);
    const s = Math.sin(angle);
    const cp = cross(axis, v);
    const d = dot(axis, v);
    return [
        v[0] * c + cp[0] * s + axis[0] * d * (1.0 - c),
        v[1] * c + cp[1] * s + axis[1] * d * (1.0 - c),
        v[2] * c + cp[2] * s + axis[2] * d * (1.0 - c),
    ];
}
function sub(a, b) {
    return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}
function add(a, b) {
    return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}
export function poseVertices(params) {
    const pts = REST_POSITIONS.map((p) => [p[0], p[1], p[2]]);
    for (const finger of FINGERS) {
        const chain = FINGER_CHAINS[finger]; // proximal..tip
        const spreadAngle = params.spread * SPREAD_FAN[finger];
        if (spreadAngle !== 0.0) {
            const pivot = [...pts[chain[0]]];
            for (const v of chain.slice(1)) {
                pts[v] = add(pivot, rotateAboutAxis(sub(pts[v], pivot), [0, 0, 1], spreadAngle));
            }
        }
        const c = params.curl[finger];
        if (c !== 0.0) {
            const axis = rotateAboutAxis([1, 0, 0], [0, 0, 1], spreadAngle);
            for (let j = 0; j < 3; j++) {
                const pivot = [...pts[chain[j]]];
                for (const v of chain.slice(j + 1)) {
                    pts[v] = add(pivot, rotateAboutAxis(sub(pts[v], pivot), axis, -c * CURL_BEND[j]));
                }
            }
        }
    }
    // thumb: sweep the whole chain about +z at the metacarpal, then curl
    const sweep = params.thumbSweep * THUMB_SWEEP_MAX;
    const tchain = [THUMB_METACARPAL, THUMB_PROXIMAL, THUMB_DISTAL, THUMB_TIP];
    if (sweep !== 0.0) {
        const pivot = [...pts[tchain[0]]];
        for (const v of tchain.slice(1)) {
            pts[v] = add(pivot, rotateAboutAxis(sub(pts[v], pivot), [0, 0, 1], sweep));
        }
    }
    if (params.thumbCurl !== 0.0) {
        const d = sub(pts[THUMB_TIP], pts[THUMB_METACARPAL]);
        d[2] = 0.0;
        const n = Math.sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        if (n > 0.0) {
            d[0] /= n;
            d[1] /= n;
            d[2] /= n;
            const axis = cross([0, 0, 1], d);
            const joints = [THUMB_PROXIMAL, THUMB_DISTAL];
            for (let i = 0; i < joints.length; i++) {
                const j = joints[i];
                const pivot = [...pts[j]];
                for (let v = j + 1; v <= THUMB_TIP; v++) {
                    pts[v] = add(pivot, rotateAboutAxis(sub(pts[v], pivot), axis, params.thumbCurl * THUMB_BEND[i]));
                }
            }
        }
    }
    return pts;
}
/** Emit a hand_frame message for the posed skeleton at time t. */
export function poseToHandFrame(params, t, hand) {
    const frame = {
        t,
        vertices: poseVertices(params).map((p) => ({
            position: [p[0], p[1], p[2]],
            orientation: [0, 0, 0, 1],
        })),
    };
    return { tag: "hand_frame", hand, frame };
}
/** Same rule the recorder applies: all non-thumb fingertips near the palm. */
export function detectFist(frame, threshold = FIST_THRESHOLD) {
    const palm = frame.vertices[PALM].position;
    for (const tip of FIST_FINGERTIPS) {
        const p = frame.vertices[tip].position;
        const dx = p[0] - palm[0];
        const dy = p[1] - palm[1];
        const dz = p[2] - palm[2];
        if (Math.sqrt(dx * dx + dy * dy + dz * dz) >= threshold) {
            return false;
        }
    }
    return true;
}
