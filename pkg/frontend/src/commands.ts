/**
 * Low-level command picker model.  Rendering mirrors the server's sentences
 * so the option list the annotator sees matches what gets stored.
 */

export type CommandArm = "left" | "right";
export type CommandVerb =
  | "move"
  | "rotate"
  | "open_gripper"
  | "close_gripper"
  | "hold_still"
  | "reset_to_initial";
export type MoveDirection = "left" | "right" | "forward" | "backward" | "up" | "down";
export type Rotation = "clockwise" | "counterclockwise";
export type CmdMagnitude = "slight" | "significant";

export interface CommandDraft {
  arm: CommandArm;
  verb: CommandVerb;
  direction?: MoveDirection;
  rotation?: Rotation;
  magnitude?: CmdMagnitude;
}

const DIRECTION_PHRASE: Record<MoveDirection, string> = {
  left: "to the left",
  right: "to the right",
  forward: "forward",
  backward: "backward",
  up: "upward",
  down: "downward",
};

const MAGNITUDE_ADVERB: Record<CmdMagnitude, string> = {
  slight: "slightly",
  significant: "significantly",
};

export function renderCommand(cmd: CommandDraft): string {
  switch (cmd.verb) {
    case "move": {
      let text = `Move the ${cmd.arm} gripper ${DIRECTION_PHRASE[cmd.direction!]}`;
      if (cmd.magnitude) text += ` ${MAGNITUDE_ADVERB[cmd.magnitude]}`;
      return text;
    }
    case "rotate":
      return `Rotate the ${cmd.arm} gripper ${cmd.rotation}`;
    case "open_gripper":
      return `Open the ${cmd.arm} gripper`;
    case "close_gripper":
      return `Close the ${cmd.arm} gripper`;
    case "hold_still":
      return `Hold the ${cmd.arm} arm still`;
    case "reset_to_initial":
      return `Move the ${cmd.arm} arm back to its initial pose`;
  }
}

export function commandProblems(cmd: CommandDraft): string[] {
  const problems: string[] = [];
  if (cmd.verb === "move" && !cmd.direction) problems.push("move needs a direction");
  if (cmd.verb !== "move" && cmd.direction) problems.push("only move takes a direction");
  if (cmd.verb === "rotate" && !cmd.rotation) problems.push("rotate needs a direction");
  if (cmd.verb !== "rotate" && cmd.rotation) problems.push("only rotate takes a rotation");
  if (cmd.magnitude && cmd.verb !== "move") problems.push("only move takes a magnitude");
  return problems;
}

/** Everything the picker can offer for one arm. */
export function commandChoices(arm: CommandArm): CommandDraft[] {
  const out: CommandDraft[] = [];
  const directions: MoveDirection[] = ["left", "right", "forward", "backward", "up", "down"];
  const magnitudes: (CmdMagnitude | undefined)[] = [undefined, "slight", "significant"];
  for (const direction of directions) {
    for (const magnitude of magnitudes) {
      out.push({ arm, verb: "move", direction, magnitude });
    }
  }
  out.push({ arm, verb: "rotate", rotation: "clockwise" });
  out.push({ arm, verb: "rotate", rotation: "counterclockwise" });
  out.push({ arm, verb: "open_gripper" });
  out.push({ arm, verb: "close_gripper" });
  out.push({ arm, verb: "hold_still" });
  out.push({ arm, verb: "reset_to_initial" });
  return out;
}
