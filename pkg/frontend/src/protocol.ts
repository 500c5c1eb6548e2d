// Wire types for the play service JSON schema (see PROTOCOL.md) plus a
// defensive parser so one malformed frame cannot wedge the client.

export const PROTOCOL_VERSION = 1;

export interface Vec3 {
  x: number;
  y: number;
  z: number;
}

export interface AgentState extends Vec3 {
  alive: boolean;
}

export interface BlockCell extends Vec3 {
  type: string;
}

export interface ItemCell extends Vec3 {
  type: string;
  count: number;
}

export interface Bounds {
  min: Vec3;
  max: Vec3;
}

export interface Snapshot {
  bounds: Bounds;
  agent: AgentState;
  inventory: Record<string, number>;
  blocks: BlockCell[];
  items: ItemCell[];
}

export type ChecklistEntry =
  | { kind: "agent"; target: Vec3; met: boolean }
  | { kind: "block"; type: string; target: Vec3; met: boolean }
  | { kind: "inventory"; type: string; quantity: number; met: boolean };

export interface StateMessage {
  v: number;
  session: string;
  seq: number | null;
  outcome: "ok" | "rejected" | null;
  reason: string | null;
  task: string;
  world: Snapshot;
  goal_satisfied: boolean;
  checklist: ChecklistEntry[];
  trace_len: number;
  applicable: string[];
}

export interface ErrorMessage {
  v: number;
  error: string;
  seq: number | null;
}

export class ProtocolFault extends Error {}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function vec3(value: unknown, where: string): Vec3 {
  if (
    !isRecord(value) ||
    typeof value.x !== "number" ||
    typeof value.y !== "number" ||
    typeof value.z !== "number"
  ) {
    throw new ProtocolFault(`${where} is not a coordinate triple`);
  }
  return { x: value.x, y: value.y, z: value.z };
}

function snapshot(value: unknown): Snapshot {
  if (!isRecord(value)) throw new ProtocolFault("world is not an object");
  const bounds = value.bounds;
  if (!isRecord(bounds)) throw new ProtocolFault("world.bounds missing");
  const agentRaw = value.agent;
  if (!isRecord(agentRaw) || typeof agentRaw.alive !== "boolean") {
    throw new ProtocolFault("world.agent malformed");
  }
  const inventory = value.inventory;
  if (!isRecord(inventory)) throw new ProtocolFault("world.inventory missing");
  if (!Array.isArray(value.blocks) || !Array.isArray(value.items)) {
    throw new ProtocolFault("world.blocks/items missing");
  }
  return {
    bounds: { min: vec3(bounds.min, "bounds.min"), max: vec3(bounds.max, "bounds.max") },
    agent: { ...vec3(agentRaw, "agent"), alive: agentRaw.alive },
    inventory: inventory as Record<string, number>,
    blocks: value.blocks as BlockCell[],
    items: value.items as ItemCell[],
  };
}

export function isErrorMessage(message: StateMessage | ErrorMessage): message is ErrorMessage {
  return "error" in message;
}

export function parseServerMessage(raw: string): StateMessage | ErrorMessage {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    throw new ProtocolFault("server frame is not JSON");
  }
  if (!isRecord(data)) throw new ProtocolFault("server frame is not an object");
  if (data.v !== PROTOCOL_VERSION) {
    throw new ProtocolFault(`unsupported protocol version ${String(data.v)}`);
  }
  if (typeof data.error === "string") {
    return { v: PROTOCOL_VERSION, error: data.error, seq: (data.seq as number | null) ?? null };
  }
  if (typeof data.session !== "string" || typeof data.task !== "string") {
    throw new ProtocolFault("state message missing session/task");
  }
  if (typeof data.goal_satisfied !== "boolean" || typeof data.trace_len !== "number") {
    throw new ProtocolFault("state message missing goal/trace fields");
  }
  if (!Array.isArray(data.checklist) || !Array.isArray(data.applicable)) {
    throw new ProtocolFault("state message missing checklist/applicable");
  }
  const outcome = data.outcome;
  if (outcome !== null && outcome !== "ok" && outcome !== "rejected") {
    throw new ProtocolFault(`unknown outcome ${String(outcome)}`);
  }
  return {
    v: PROTOCOL_VERSION,
    session: data.session,
    seq: (data.seq as number | null) ?? null,
    outcome: outcome ?? null,
    reason: (data.reason as string | null) ?? null,
    task: data.task,
    world: snapshot(data.world),
    goal_satisfied: data.goal_satisfied,
    checklist: data.checklist as ChecklistEntry[],
    trace_len: data.trace_len,
    applicable: data.applicable as string[],
  };
}

export function commandText(command: string, seq: number): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, seq, command });
}
