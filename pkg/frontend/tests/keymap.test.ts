import { describe, expect, it, vi } from "vitest";
import { bindKeyboard, resolveCommand, type KeyChord, type KeyContext } from "../src/keymap.js";

function chord(key: string, extra: Partial<KeyChord> = {}): KeyChord {
  return { key, shift: false, breakHeld: false, placeHeld: false, ...extra };
}

function ctx(applicable: string[] = [], selectedType: string | null = null): KeyContext {
  return { applicable, selectedType };
}

describe("resolveCommand", () => {
  it.each([
    ["w", "move-north"],
    ["ArrowUp", "move-north"],
    ["s", "move-south"],
    ["ArrowDown", "move-south"],
    ["d", "move-east"],
    ["ArrowRight", "move-east"],
    ["a", "move-west"],
    ["ArrowLeft", "move-west"],
  ])("maps plain %s to %s", (key, expected) => {
    expect(resolveCommand(chord(key), ctx())).toBe(expected);
  });

  it("upgrades a move to the fused pickup the server offers", () => {
    const context = ctx(["move_and_pickup-diamond-north", "move-south"]);
    expect(resolveCommand(chord("w"), context)).toBe("move_and_pickup-diamond-north");
    expect(resolveCommand(chord("s"), context)).toBe("move-south");
  });

  it("resolves shift against whichever jump variant applies", () => {
    expect(resolveCommand(chord("d", { shift: true }), ctx(["jumpup-east"]))).toBe("jumpup-east");
    expect(resolveCommand(chord("w", { shift: true }), ctx(["jumpdown-north"]))).toBe(
      "jumpdown-north",
    );
    expect(
      resolveCommand(chord("w", { shift: true }), ctx(["jumpdown_and_pickup-diamond-north"])),
    ).toBe("jumpdown_and_pickup-diamond-north");
  });

  it("falls back to a bare jump so the server states the rejection", () => {
    expect(resolveCommand(chord("w", { shift: true }), ctx())).toBe("jumpup-north");
  });

  it("breaks whatever the server says is breakable in that direction", () => {
    expect(resolveCommand(chord("d", { breakHeld: true }), ctx(["break-log-east"]))).toBe(
      "break-log-east",
    );
  });

  it("breaks the selected type when the server offers nothing", () => {
    expect(resolveCommand(chord("w", { breakHeld: true }), ctx([], "stone"))).toBe(
      "break-stone-north",
    );
    expect(resolveCommand(chord("w", { breakHeld: true }), ctx([], null))).toBeNull();
  });

  it("places the palette selection", () => {
    expect(resolveCommand(chord("s", { placeHeld: true }), ctx([], "planks"))).toBe(
      "place-planks-south",
    );
    expect(resolveCommand(chord("s", { placeHeld: true }), ctx([], null))).toBeNull();
  });

  it("maps u to undo and ignores unbound keys", () => {
    expect(resolveCommand(chord("u"), ctx())).toBe("undo");
    expect(resolveCommand(chord("U"), ctx())).toBe("undo");
    expect(resolveCommand(chord("x"), ctx())).toBeNull();
    expect(resolveCommand(chord("Enter"), ctx())).toBeNull();
  });
});

describe("bindKeyboard", () => {
  function press(target: EventTarget, key: string, init: KeyboardEventInit = {}): KeyboardEvent {
    const event = new KeyboardEvent("keydown", { key, cancelable: true, ...init });
    target.dispatchEvent(event);
    return event;
  }

  function release(target: EventTarget, key: string): void {
    target.dispatchEvent(new KeyboardEvent("keyup", { key }));
  }

  it("tracks held modifier keys across events", () => {
    const dispatch = vi.fn();
    const detach = bindKeyboard(document, {
      context: () => ctx(["break-log-east"]),
      dispatch,
    });
    press(document, "b");
    press(document, "d");
    release(document, "b");
    press(document, "d");
    expect(dispatch.mock.calls.map(([command]) => command)).toEqual([
      "break-log-east",
      "move-east",
    ]);
    detach();
  });

  it("consumes resolved keys and leaves the rest alone", () => {
    const dispatch = vi.fn();
    const detach = bindKeyboard(document, { context: () => ctx(), dispatch });
    const handled = press(document, "w");
    expect(handled.defaultPrevented).toBe(true);
    const ignored = press(document, "x");
    expect(ignored.defaultPrevented).toBe(false);
    expect(dispatch).toHaveBeenCalledTimes(1);
    detach();
  });

  it("stops dispatching after detach", () => {
    const dispatch = vi.fn();
    const detach = bindKeyboard(document, { context: () => ctx(), dispatch });
    detach();
    press(document, "w");
    expect(dispatch).not.toHaveBeenCalled();
  });

  it("reads shift from the event", () => {
    const dispatch = vi.fn();
    const detach = bindKeyboard(document, { context: () => ctx(), dispatch });
    press(document, "W", { shiftKey: true });
    expect(dispatch).toHaveBeenCalledWith("jumpup-north");
    detach();
  });
});
