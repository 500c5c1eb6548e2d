import { describe, expect, it } from "vitest";
import { ViewModel } from "../src/model.js";
import type { Snapshot } from "../src/protocol.js";
import { makeState } from "./fixtures.js";

function worldWith(extra: Partial<Snapshot>): Snapshot {
  return { ...makeState().world, ...extra };
}

describe("applyState", () => {
  it("mirrors the server state and clears the in-flight flag", () => {
    const vm = new ViewModel();
    vm.pending = true;
    const message = makeState({ seq: 4, outcome: "ok", trace_len: 4 });
    vm.applyState(message);
    expect(vm.state).toBe(message);
    expect(vm.pending).toBe(false);
    expect(vm.traceLen()).toBe(4);
    expect(vm.toasts).toEqual([]);
  });

  it("turns rejections into toasts with the server's exact words", () => {
    const vm = new ViewModel();
    vm.applyState(makeState({ seq: 2, outcome: "rejected", reason: "no-support" }));
    expect(vm.toasts.map((toast) => toast.text)).toEqual(["no-support"]);
  });

  it("follows the agent's layer until the user pins one", () => {
    const vm = new ViewModel();
    vm.applyState(makeState());
    expect(vm.layer).toBe(2);
    vm.selectLayer(1);
    expect(vm.layerPinned).toBe(true);
    vm.applyState(makeState({ world: worldWith({ agent: { x: 0, y: 3, z: 0, alive: true } }) }));
    expect(vm.layer).toBe(1);
    vm.followAgentLayer();
    expect(vm.layer).toBe(3);
    expect(vm.layerPinned).toBe(false);
  });

  it("clamps layer selection to the world bounds", () => {
    const vm = new ViewModel();
    vm.applyState(makeState());
    vm.selectLayer(99);
    expect(vm.layer).toBe(4);
    vm.selectLayer(-9);
    expect(vm.layer).toBe(0);
  });

  it("auto-picks and repairs the palette selection", () => {
    const vm = new ViewModel();
    vm.applyState(makeState({ world: worldWith({ inventory: { stone: 0, planks: 3 } }) }));
    expect(vm.selectedType).toBe("planks");
    vm.applyState(
      makeState({ world: worldWith({ inventory: { planks: 1, bricks: 2 } }) }),
    );
    expect(vm.selectedType).toBe("planks");
    vm.applyState(makeState({ world: worldWith({ inventory: { bricks: 2 } }) }));
    expect(vm.selectedType).toBe("bricks");
  });
});

describe("toasts and errors", () => {
  it("applyError clears pending and reports the text", () => {
    const vm = new ViewModel();
    vm.pending = true;
    vm.applyError({ v: 1, error: "unknown-session", seq: null });
    expect(vm.pending).toBe(false);
    expect(vm.toasts[0].text).toBe("unknown-session");
  });

  it("keeps only the newest toasts", () => {
    const vm = new ViewModel();
    for (let i = 1; i <= 6; i++) vm.pushToast(`warning ${i}`);
    expect(vm.toasts.map((toast) => toast.text)).toEqual([
      "warning 3",
      "warning 4",
      "warning 5",
      "warning 6",
    ]);
  });

  it("dismisses by id", () => {
    const vm = new ViewModel();
    vm.pushToast("first");
    vm.pushToast("second");
    vm.dismissToast(vm.toasts[0].id);
    expect(vm.toasts.map((toast) => toast.text)).toEqual(["second"]);
  });
});

describe("layerCells", () => {
  it("covers the bounds row-major with north first", () => {
    const vm = new ViewModel();
    vm.applyState(makeState());
    const rows = vm.layerCells();
    expect(rows).toHaveLength(5);
    expect(rows[0]).toHaveLength(5);
    expect(rows[0][0]).toMatchObject({ x: -2, z: -2 });
    expect(rows[4][4]).toMatchObject({ x: 2, z: 2 });
  });

  it("projects blocks, items, and the agent onto the selected layer", () => {
    const vm = new ViewModel();
    vm.applyState(makeState());
    const at = (rows: ReturnType<ViewModel["layerCells"]>, x: number, z: number) =>
      rows[z + 2][x + 2];

    const feet = vm.layerCells();
    expect(at(feet, 0, 0)).toMatchObject({ agent: true, block: null, below: "grass" });
    expect(at(feet, 1, 0)).toMatchObject({ block: "log", agent: false });
    expect(at(feet, -1, 1)).toMatchObject({ item: "diamond", itemCount: 2 });

    vm.selectLayer(3);
    expect(at(vm.layerCells(), 0, 0)).toMatchObject({ agent: false, agentHead: true });

    vm.selectLayer(1);
    const floor = vm.layerCells();
    expect(floor.flat().filter((cell) => cell.block === "grass")).toHaveLength(25);
  });
});

describe("empty defaults", () => {
  it("stays inert before the first state arrives", () => {
    const vm = new ViewModel();
    expect(vm.layerCells()).toEqual([]);
    expect(vm.layerBounds()).toEqual({ min: 0, max: 0 });
    expect(vm.inventoryRows()).toEqual([]);
    expect(vm.placeableTypes()).toEqual([]);
    expect(vm.checklist()).toEqual([]);
    expect(vm.applicable()).toEqual([]);
    expect(vm.goalSatisfied()).toBe(false);
    expect(vm.traceLen()).toBe(0);
    expect(vm.world()).toBeNull();
  });

  it("sorts inventory rows and filters empty stacks from the palette", () => {
    const vm = new ViewModel();
    vm.applyState(makeState({ world: worldWith({ inventory: { stone: 2, dirt: 0, log: 5 } }) }));
    expect(vm.inventoryRows()).toEqual([
      ["dirt", 0],
      ["log", 5],
      ["stone", 2],
    ]);
    expect(vm.placeableTypes()).toEqual(["log", "stone"]);
  });
});
