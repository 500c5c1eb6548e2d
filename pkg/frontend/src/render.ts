// DOM rendering. Pure functions of the ViewModel: every frame rebuilds the
// dynamic regions, so the page always shows exactly the server-confirmed
// state and nothing speculative.

import type { ViewModel } from "./model.js";
import type { ChecklistEntry } from "./protocol.js";

export interface Refs {
  taskName: HTMLElement;
  status: HTMLElement;
  grid: HTMLElement;
  layerLabel: HTMLElement;
  layerSlider: HTMLInputElement;
  followButton: HTMLButtonElement;
  inventory: HTMLElement;
  palette: HTMLElement;
  checklist: HTMLElement;
  toasts: HTMLElement;
  downloadButton: HTMLButtonElement;
  traceLen: HTMLElement;
}

/** Collect the fixed elements by id; throws when the page shell is broken. */
export function collectRefs(root: Document | HTMLElement): Refs {
  const pick = <T extends HTMLElement>(id: string): T => {
    const node = (root instanceof Document ? root : root.ownerDocument).getElementById(id);
    if (node === null) throw new Error(`missing element #${id}`);
    return node as T;
  };
  return {
    taskName: pick("task-name"),
    status: pick("conn-status"),
    grid: pick("grid"),
    layerLabel: pick("layer-label"),
    layerSlider: pick<HTMLInputElement>("layer-slider"),
    followButton: pick<HTMLButtonElement>("follow-agent"),
    inventory: pick("inventory"),
    palette: pick("palette"),
    checklist: pick("checklist"),
    toasts: pick("toasts"),
    downloadButton: pick<HTMLButtonElement>("download-plan"),
    traceLen: pick("trace-len"),
  };
}

function clear(node: HTMLElement): void {
  while (node.firstChild !== null) node.removeChild(node.firstChild);
}

const BLOCK_GLYPHS: Record<string, string> = {
  grass: "▩",
  dirt: "▨",
  stone: "▧",
  log: "▦",
  leaves: "♣",
  planks: "▤",
  bricks: "▥",
  obsidian: "■",
};

function blockGlyph(type: string): string {
  return BLOCK_GLYPHS[type] ?? type.charAt(0).toUpperCase();
}

function renderGrid(vm: ViewModel, refs: Refs): void {
  clear(refs.grid);
  const world = vm.world();
  if (world === null) {
    refs.grid.textContent = "no session";
    return;
  }
  const rows = vm.layerCells();
  const width = rows.length > 0 ? rows[0].length : 0;
  refs.grid.style.setProperty("--grid-cols", String(width));
  for (const row of rows) {
    for (const cell of row) {
      const div = document.createElement("div");
      div.className = "cell";
      div.dataset.x = String(cell.x);
      div.dataset.z = String(cell.z);
      if (cell.block !== null) {
        div.classList.add("block", `type-${cell.block}`);
        div.textContent = blockGlyph(cell.block);
        div.title = `${cell.block} (${cell.x}, ${vm.layer}, ${cell.z})`;
      } else if (cell.item !== null) {
        div.classList.add("item", `type-${cell.item}`);
        div.textContent = "♦";
        div.title = `${cell.item} x${cell.itemCount} (${cell.x}, ${vm.layer}, ${cell.z})`;
      } else if (cell.below !== null) {
        div.classList.add("floor");
        div.title = `air over ${cell.below}`;
      } else {
        div.classList.add("air");
      }
      if (cell.agent) {
        div.classList.add("agent");
        div.textContent = "@";
        div.title = "agent (feet)";
      } else if (cell.agentHead) {
        div.classList.add("agent-head");
        div.title = "agent (head)";
      }
      refs.grid.appendChild(div);
    }
  }
}

function renderLayerControls(vm: ViewModel, refs: Refs): void {
  const bounds = vm.layerBounds();
  refs.layerSlider.min = String(bounds.min);
  refs.layerSlider.max = String(bounds.max);
  refs.layerSlider.value = String(vm.layer);
  refs.layerSlider.disabled = vm.world() === null;
  refs.layerLabel.textContent = `y = ${vm.layer}`;
  refs.followButton.classList.toggle("active", !vm.layerPinned);
}

function renderInventory(vm: ViewModel, refs: Refs): void {
  clear(refs.inventory);
  const rows = vm.inventoryRows();
  if (rows.length === 0) {
    const li = document.createElement("li");
    li.className = "empty";
    li.textContent = "empty";
    refs.inventory.appendChild(li);
    return;
  }
  for (const [type, count] of rows) {
    const li = document.createElement("li");
    li.dataset.type = type;
    li.textContent = `${type}: ${count}`;
    refs.inventory.appendChild(li);
  }
}

function renderPalette(vm: ViewModel, refs: Refs): void {
  clear(refs.palette);
  for (const type of vm.placeableTypes()) {
    const button = document.createElement("button");
    button.type = "button";
    button.className = "palette-entry";
    button.dataset.type = type;
    button.textContent = type;
    if (type === vm.selectedType) button.classList.add("selected");
    refs.palette.appendChild(button);
  }
}

function checklistText(entry: ChecklistEntry): string {
  if (entry.kind === "agent") {
    return `agent at (${entry.target.x}, ${entry.target.y}, ${entry.target.z})`;
  }
  if (entry.kind === "block") {
    return `${entry.type} at (${entry.target.x}, ${entry.target.y}, ${entry.target.z})`;
  }
  return `hold ${entry.quantity} ${entry.type}`;
}

function renderChecklist(vm: ViewModel, refs: Refs): void {
  clear(refs.checklist);
  for (const entry of vm.checklist()) {
    const li = document.createElement("li");
    li.className = entry.met ? "met" : "unmet";
    li.textContent = `${entry.met ? "✓" : "○"} ${checklistText(entry)}`;
    refs.checklist.appendChild(li);
  }
}

function renderToasts(vm: ViewModel, refs: Refs): void {
  clear(refs.toasts);
  for (const toast of vm.toasts) {
    const div = document.createElement("div");
    div.className = "toast";
    div.dataset.toastId = String(toast.id);
    const span = document.createElement("span");
    span.textContent = toast.text;
    const button = document.createElement("button");
    button.type = "button";
    button.className = "toast-dismiss";
    button.textContent = "×";
    div.appendChild(span);
    div.appendChild(button);
    refs.toasts.appendChild(div);
  }
}

export function render(vm: ViewModel, refs: Refs, status: string): void {
  const state = vm.state;
  refs.taskName.textContent = state === null ? "voxelplan" : state.task;
  refs.status.textContent = status;
  refs.status.dataset.status = status;
  refs.traceLen.textContent = `trace: ${vm.traceLen()}`;
  refs.downloadButton.disabled = state === null;
  refs.downloadButton.classList.toggle("complete", vm.goalSatisfied());
  refs.downloadButton.textContent = vm.goalSatisfied() ? "download plan (goal met)" : "download plan";
  renderGrid(vm, refs);
  renderLayerControls(vm, refs);
  renderInventory(vm, refs);
  renderPalette(vm, refs);
  renderChecklist(vm, refs);
  renderToasts(vm, refs);
}
