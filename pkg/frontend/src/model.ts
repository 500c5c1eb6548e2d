// View model: the last server-confirmed state plus pure view selections
// (layer, palette, toasts). Nothing here steps the world; the only state
// transitions are "a server message arrived" and "the user picked a knob".

import type { ChecklistEntry, ErrorMessage, Snapshot, StateMessage } from "./protocol.js";

export interface Toast {
  id: number;
  text: string;
}

export interface CellView {
  x: number;
  z: number;
  block: string | null;
  item: string | null;
  itemCount: number;
  agent: boolean;
  agentHead: boolean;
  below: string | null;
}

const MAX_TOASTS = 4;

export class ViewModel {
  state: StateMessage | null = null;
  layer = 0;
  layerPinned = false;
  selectedType: string | null = null;
  pending = false;
  toasts: Toast[] = [];
  private toastSeq = 0;

  applyState(message: StateMessage): void {
    this.state = message;
    this.pending = false;
    if (message.outcome === "rejected" && message.reason !== null) {
      this.pushToast(message.reason);
    }
    if (!this.layerPinned) this.layer = message.world.agent.y;
    this.layer = this.clampLayer(this.layer);
    const palette = this.placeableTypes();
    if (this.selectedType === null || !palette.includes(this.selectedType)) {
      this.selectedType = palette[0] ?? null;
    }
  }

  applyError(message: ErrorMessage): void {
    this.pending = false;
    this.pushToast(message.error);
  }

  pushToast(text: string): void {
    this.toasts.push({ id: ++this.toastSeq, text });
    if (this.toasts.length > MAX_TOASTS) this.toasts.shift();
  }

  dismissToast(id: number): void {
    this.toasts = this.toasts.filter((toast) => toast.id !== id);
  }

  selectLayer(y: number): void {
    this.layerPinned = true;
    this.layer = this.clampLayer(y);
  }

  followAgentLayer(): void {
    this.layerPinned = false;
    if (this.state !== null) this.layer = this.clampLayer(this.state.world.agent.y);
  }

  selectType(type: string): void {
    this.selectedType = type;
  }

  layerBounds(): { min: number; max: number } {
    const world = this.state?.world;
    return world === undefined
      ? { min: 0, max: 0 }
      : { min: world.bounds.min.y, max: world.bounds.max.y };
  }

  private clampLayer(y: number): number {
    const { min, max } = this.layerBounds();
    return Math.min(max, Math.max(min, y));
  }

  /** Row-major cells of the selected layer; north (z min) is the first row. */
  layerCells(): CellView[][] {
    const world = this.state?.world;
    if (world === undefined) return [];
    const blockAt = new Map<string, string>();
    for (const block of world.blocks) blockAt.set(`${block.x},${block.y},${block.z}`, block.type);
    const itemAt = new Map<string, { type: string; count: number }>();
    for (const item of world.items) {
      itemAt.set(`${item.x},${item.y},${item.z}`, { type: item.type, count: item.count });
    }
    const rows: CellView[][] = [];
    for (let z = world.bounds.min.z; z <= world.bounds.max.z; z++) {
      const row: CellView[] = [];
      for (let x = world.bounds.min.x; x <= world.bounds.max.x; x++) {
        const item = itemAt.get(`${x},${this.layer},${z}`);
        row.push({
          x,
          z,
          block: blockAt.get(`${x},${this.layer},${z}`) ?? null,
          item: item?.type ?? null,
          itemCount: item?.count ?? 0,
          agent: world.agent.x === x && world.agent.z === z && world.agent.y === this.layer,
          agentHead:
            world.agent.x === x && world.agent.z === z && world.agent.y + 1 === this.layer,
          below: blockAt.get(`${x},${this.layer - 1},${z}`) ?? null,
        });
      }
      rows.push(row);
    }
    return rows;
  }

  inventoryRows(): Array<[string, number]> {
    const inventory = this.state?.world.inventory ?? {};
    return Object.entries(inventory).sort(([a], [b]) => a.localeCompare(b));
  }

  /** Palette candidates: anything the agent holds at least one unit of. */
  placeableTypes(): string[] {
    return this.inventoryRows()
      .filter(([, count]) => count > 0)
      .map(([type]) => type);
  }

  checklist(): ChecklistEntry[] {
    return this.state?.checklist ?? [];
  }

  goalSatisfied(): boolean {
    return this.state?.goal_satisfied ?? false;
  }

  applicable(): readonly string[] {
    return this.state?.applicable ?? [];
  }

  traceLen(): number {
    return this.state?.trace_len ?? 0;
  }

  world(): Snapshot | null {
    return this.state?.world ?? null;
  }
}
