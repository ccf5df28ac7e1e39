/**
 * Curation report browser: parses the dataset's report file (served by the
 * teleop server under /data/) into a ranked view with per-demo scores and
 * percentile retention badges.
 */
export class BadReport extends Error {
}
export function parseCurationReport(data) {
    if (typeof data !== "object" || data === null) {
        throw new BadReport("report must be a JSON object");
    }
    const root = data;
    const demosRaw = root["demos"];
    const rankingRaw = root["ranking"];
    const percentilesRaw = root["percentiles"];
    if (!Array.isArray(demosRaw) || !Array.isArray(rankingRaw)) {
        throw new BadReport("report needs 'demos' and 'ranking' arrays");
    }
    if (typeof percentilesRaw !== "object" || percentilesRaw === null) {
        throw new BadReport("report needs a 'percentiles' object");
    }
    const percentiles = new Map();
    for (const [key, ids] of Object.entries(percentilesRaw)) {
        const p = Number(key.replace(/^p/, ""));
        if (!Number.isFinite(p) || !Array.isArray(ids)) {
            throw new BadReport(`bad percentile entry ${key}`);
        }
        percentiles.set(p, ids.map(String));
    }
    const byId = new Map();
    for (const entry of demosRaw) {
        if (typeof entry !== "object" || entry === null || typeof entry["id"] !== "string") {
            throw new BadReport("each demo needs a string 'id'");
        }
        const rec = entry;
        byId.set(rec["id"], rec);
    }
    const ranking = rankingRaw.map(String);
    if (ranking.length !== byId.size || !ranking.every((id) => byId.has(id))) {
        throw new BadReport("ranking must be a permutation of the demo ids");
    }
    const demos = ranking.map((id) => {
        const rec = byId.get(id);
        return {
            id,
            scoreTop: scoreField(rec, "score_top"),
            scoreWrist: scoreField(rec, "score_wrist"),
            outlierScore: scoreField(rec, "outlier_score"),
            labelTop: scoreField(rec, "label_top"),
            labelWrist: scoreField(rec, "label_wrist"),
            retainedAt: [...percentiles.entries()]
                .filter(([, ids]) => ids.includes(id))
                .map(([p]) => p)
                .sort((a, b) => a - b),
        };
    });
    return { demos, percentiles };
}
function scoreField(rec, name) {
    const v = rec[name];
    if (typeof v !== "number" || !Number.isFinite(v)) {
        throw new BadReport(`demo ${String(rec["id"])} missing numeric '${name}'`);
    }
    return v;
}
/** Fetch and parse the report for a dataset served under /data/. */
export async function loadCurationReport(baseUrl = "") {
    const resp = await fetch(`${baseUrl}/data/curation_report.json`);
    if (!resp.ok) {
        throw new BadReport(`report fetch failed: ${resp.status}`);
    }
    return parseCurationReport(await resp.json());
}
