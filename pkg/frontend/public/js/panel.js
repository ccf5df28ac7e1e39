/**
 * Joint panel view model: 16 labeled gauges (radians) and 16 effort bars.
 *
 * Root joints of the three fingers are rendered pinned at zero; if a
 * message claims otherwise the discrepancy is surfaced as a warning rather
 * than silently drawn, so protocol violations stay visible.
 */
import { NUM_JOINTS } from "./protocol.js";
export const JOINT_LABELS = [
    "index root",
    "index proximal",
    "index middle",
    "index distal",
    "middle root",
    "middle proximal",
    "middle middle",
    "middle distal",
    "ring root",
    "ring proximal",
    "ring middle",
    "ring distal",
    "thumb base",
    "thumb proximal",
    "thumb middle",
    "thumb distal",
];
export const ROOT_JOINTS = [0, 4, 8];
const ROOT_TOLERANCE = 1e-9;
export function renderJointPanel(state, stale) {
    if (state === null) {
        return {
            gauges: JOINT_LABELS.map((label, j) => ({
                label,
                radians: 0,
                pinned: ROOT_JOINTS.includes(j),
            })),
            efforts: JOINT_LABELS.map((label) => ({ label, effort: 0 })),
            stale: true,
            warnings: [],
        };
    }
    const warnings = [];
    const gauges = [];
    for (let j = 0; j < NUM_JOINTS; j++) {
        const pinned = ROOT_JOINTS.includes(j);
        let radians = state.q[j];
        if (pinned) {
            if (Math.abs(radians) > ROOT_TOLERANCE) {
                warnings.push(`${JOINT_LABELS[j]} reported ${radians.toPrecision(3)} rad but is pinned at 0`);
            }
            radians = 0;
        }
        gauges.push({ label: JOINT_LABELS[j], radians, pinned });
    }
    const efforts = JOINT_LABELS.map((label, j) => ({ label, effort: state.tau[j] }));
    return { gauges, efforts, stale, warnings };
}
