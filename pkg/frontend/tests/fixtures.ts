// Shared state-message builder: a 5x5 pocket world with a grass floor at
// y=1, one log, one item drop, and the agent standing at the origin.

import { existsSync, readFileSync } from "node:fs";
import { resolve } from "node:path";
import type { StateMessage } from "../src/protocol.js";

export function makeState(overrides: Partial<StateMessage> = {}): StateMessage {
  const blocks = [];
  for (let x = -2; x <= 2; x++) {
    for (let z = -2; z <= 2; z++) {
      blocks.push({ x, y: 1, z, type: "grass" });
    }
  }
  blocks.push({ x: 1, y: 2, z: 0, type: "log" });
  return {
    v: 1,
    session: "s-fixture",
    seq: null,
    outcome: null,
    reason: null,
    task: "move-easy",
    world: {
      bounds: { min: { x: -2, y: 0, z: -2 }, max: { x: 2, y: 4, z: 2 } },
      agent: { x: 0, y: 2, z: 0, alive: true },
      inventory: {},
      blocks,
      items: [{ x: -1, y: 2, z: 1, type: "diamond", count: 2 }],
    },
    goal_satisfied: false,
    checklist: [{ kind: "agent", target: { x: 0, y: 2, z: -2 }, met: false }],
    trace_len: 0,
    applicable: ["move-north", "move-south", "move-west", "break-log-east", "checkgoal"],
    ...overrides,
  };
}

/** Read index.html; the jsdom environment breaks import.meta.url paths. */
export function pageHtml(): string {
  for (const candidate of ["index.html", "frontend/index.html"]) {
    const path = resolve(process.cwd(), candidate);
    if (existsSync(path)) return readFileSync(path, "utf8");
  }
  throw new Error("index.html not found from " + process.cwd());
}

/** Load the real page shell into the test document. */
export function loadShell(doc: Document, html: string): void {
  const body = /<body>([\s\S]*)<\/body>/.exec(html);
  if (body === null) throw new Error("index.html has no body");
  doc.body.innerHTML = body[1];
}
