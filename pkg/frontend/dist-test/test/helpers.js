/** Spawns the real backend in live mode for integration tests. */
import { spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
const BOT_DESCRIPTION = "Charlie is a fictional barista who pulls espresso shots by day and studies " +
    "computer science at night. He reads privacy newsletters the way other people " +
    "read sports scores and has opinions about every permission screen. He grew up " +
    "over his family's laundromat, fixes his roommates' laptops for free, tapes " +
    "over his webcam, and will gently tell you that you should too. Friendly, " +
    "wary, extremely online, and impossible to rush when the espresso machine " +
    "needs cleaning.";
const CLAIMS = [
    {
        id: 1,
        canonical_text: "Prop 86 would compel social media companies to share minors' data with the government.",
        keyword_groups: [["minors' data", "minors data"], ["government"]],
    },
    {
        id: 3,
        canonical_text: "Prop 86 would require all users to submit a government-issued ID to social media companies for age verification, leading to a national database of all social media users.",
        keyword_groups: [["database"], ["id", "identification", "social media users"]],
    },
];
function scenarioDocument() {
    return {
        name: "web-client-live-test",
        proposition_text: "Proposition 86 (test copy)",
        claims: CLAIMS,
        bots: [
            {
                persona: {
                    name: "Charlie",
                    handle: "charlie",
                    description: BOT_DESCRIPTION,
                    style_rules: ["lowercase-i"],
                    stance: "You oppose Proposition 86 in every post.",
                    claims: [1, 3],
                },
                backend: { kind: "mock", seed: 11 },
                base_interval_ms: 400,
                jitter_fraction: 0,
            },
        ],
        humans: [
            {
                handle: "paul",
                kind: "facilitator",
                script: [
                    { at_ms: 100, action: { type: "post", body: "facilitator seed post: read the measure." } },
                    { at_ms: 900, action: { type: "post", body: "@charlie the text says nothing like that." } },
                ],
            },
            { handle: "visitor", kind: "human", script: [] },
        ],
        duration_ms: 120000,
        seed: 7,
        clock_mode: "realtime",
    };
}
async function tryStart(port) {
    const dir = mkdtempSync(join(tmpdir(), "botroom-web-"));
    const scenarioPath = join(dir, "scenario.json");
    writeFileSync(scenarioPath, JSON.stringify(scenarioDocument()));
    const proc = spawn("python3", [
        "-m",
        "botroom.cli",
        "serve",
        "--scenario",
        scenarioPath,
        "--port",
        String(port),
        "--out",
        join(dir, "out"),
    ], { stdio: ["ignore", "ignore", "pipe"] });
    let exited = false;
    proc.on("exit", () => {
        exited = true;
    });
    const baseUrl = `http://127.0.0.1:${port}`;
    for (let attempt = 0; attempt < 100 && !exited; attempt++) {
        try {
            const response = await fetch(`${baseUrl}/api/v1/timelines/home`, {
                headers: { Authorization: "Bearer t-visitor" },
            });
            if (response.ok) {
                await response.json();
                return {
                    baseUrl,
                    visitorToken: "t-visitor",
                    stop: () => proc.kill("SIGKILL"),
                };
            }
        }
        catch {
            // not accepting connections yet
        }
        await new Promise((resolve) => setTimeout(resolve, 100));
    }
    proc.kill("SIGKILL");
    return null;
}
export async function startLiveServer() {
    for (let i = 0; i < 3; i++) {
        const port = 20000 + Math.floor(Math.random() * 30000);
        const server = await tryStart(port);
        if (server)
            return server;
    }
    throw new Error("could not start the backend for integration tests");
}
export function collectKeys(value, into = new Set()) {
    if (Array.isArray(value)) {
        for (const item of value)
            collectKeys(item, into);
    }
    else if (value !== null && typeof value === "object") {
        for (const [key, sub] of Object.entries(value)) {
            into.add(key);
            collectKeys(sub, into);
        }
    }
    return into;
}
