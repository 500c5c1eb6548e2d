// Keyboard to canonical action names. WASD and arrows move, Shift jumps,
// held B breaks, held P places the palette selection, U undoes.
//
// The grammar is directional, so modifiers resolve against the server's
// applicable-action list instead of any local world model: a jump becomes
// whichever jump variant the server offers in that direction, a plain move
// upgrades to its fused pickup form when an item sits in the way. When
// nothing applies the bare name is sent anyway; the server's rejection
// reason is the user feedback.

export type Direction = "north" | "south" | "east" | "west";

const DIRECTION_KEYS: Record<string, Direction> = {
  w: "north",
  arrowup: "north",
  s: "south",
  arrowdown: "south",
  d: "east",
  arrowright: "east",
  a: "west",
  arrowleft: "west",
};

export const UNDO_KEY = "u";

export interface KeyChord {
  key: string;
  shift: boolean;
  breakHeld: boolean;
  placeHeld: boolean;
}

export interface KeyContext {
  applicable: readonly string[];
  selectedType: string | null;
}

function applicableMatch(
  applicable: readonly string[],
  templates: readonly string[],
  direction: Direction,
): string | null {
  for (const template of templates) {
    const exact = `${template}-${direction}`;
    if (applicable.includes(exact)) return exact;
    const fused = applicable.find(
      (name) => name.startsWith(`${template}-`) && name.endsWith(`-${direction}`),
    );
    if (fused) return fused;
  }
  return null;
}

export function resolveCommand(chord: KeyChord, ctx: KeyContext): string | null {
  const key = chord.key.toLowerCase();
  if (key === UNDO_KEY) return "undo";
  const direction = DIRECTION_KEYS[key];
  if (direction === undefined) return null;

  if (chord.placeHeld) {
    return ctx.selectedType === null ? null : `place-${ctx.selectedType}-${direction}`;
  }
  if (chord.breakHeld) {
    const ahead = applicableMatch(ctx.applicable, ["break"], direction);
    if (ahead !== null) return ahead;
    return ctx.selectedType === null ? null : `break-${ctx.selectedType}-${direction}`;
  }
  if (chord.shift) {
    return (
      applicableMatch(
        ctx.applicable,
        ["jumpup", "jumpdown", "jumpup_and_pickup", "jumpdown_and_pickup"],
        direction,
      ) ?? `jumpup-${direction}`
    );
  }
  return (
    applicableMatch(ctx.applicable, ["move", "move_and_pickup"], direction) ??
    `move-${direction}`
  );
}

export interface KeyboardDeps {
  context(): KeyContext;
  dispatch(command: string): void;
}

/** Attach listeners; returns the detach function. */
export function bindKeyboard(target: EventTarget, deps: KeyboardDeps): () => void {
  const held = { b: false, p: false };

  const down = (event: Event) => {
    const ev = event as KeyboardEvent;
    const key = ev.key.toLowerCase();
    if (key === "b" || key === "p") {
      held[key] = true;
      return;
    }
    const command = resolveCommand(
      { key, shift: ev.shiftKey, breakHeld: held.b, placeHeld: held.p },
      deps.context(),
    );
    if (command !== null) {
      ev.preventDefault();
      deps.dispatch(command);
    }
  };

  const up = (event: Event) => {
    const key = (event as KeyboardEvent).key.toLowerCase();
    if (key === "b" || key === "p") held[key] = false;
  };

  target.addEventListener("keydown", down);
  target.addEventListener("keyup", up);
  return () => {
    target.removeEventListener("keydown", down);
    target.removeEventListener("keyup", up);
  };
}
