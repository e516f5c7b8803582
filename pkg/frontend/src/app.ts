/**
 * Annotation tool bootstrap: trajectory browser, stage forms, drawing
 * canvases, draft review, finalize.  All state flows through ApiClient; the
 * server remains authoritative and 422 violations surface as inline messages.
 */

import { ApiClient, ApiError, type TrajectoryDetail } from "./api.js";
import { DrawingCanvas } from "./canvas.js";
import { commandChoices, renderCommand, type CommandDraft } from "./commands.js";
import { sliderToFrame, type FrameRef } from "./scrub.js";
import { DEFAULT_STYLE } from "./style.js";
import {
  draftsBBox,
  serializeSymbolSet,
  type Purpose,
  type ToolState,
} from "./symbols.js";

const FAILURE_TYPES = [
  ["task_planning", "Task planning"],
  ["gripper_6d_pose", "Gripper 6d-pose"],
  ["gripper_state", "Gripper state"],
  ["human_intervention", "Human intervention"],
] as const;

interface AppState {
  trajectory: TrajectoryDetail | null;
  frames: FrameRef[];
  selectedFrame: FrameRef | null;
  subtasks: string[];
  failureType: string | null;
  success: boolean;
  avoidanceCommands: CommandDraft[];
  correctionCommands: CommandDraft[];
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function message(text: string, isError = false): void {
  const box = el<HTMLDivElement>("messages");
  const line = document.createElement("div");
  line.className = isError ? "msg error" : "msg";
  line.textContent = text;
  box.prepend(line);
  while (box.children.length > 6) box.removeChild(box.lastChild!);
}

function reportError(err: unknown): void {
  if (err instanceof ApiError) {
    message(`${err.error}: ${err.message}`, true);
    for (const violation of err.violations) {
      message(`· ${violation.code}: ${violation.message}`, true);
    }
  } else {
    message(String(err), true);
  }
}

export function startApp(baseUrl: string): void {
  const api = new ApiClient(baseUrl);
  const state: AppState = {
    trajectory: null,
    frames: [],
    selectedFrame: null,
    subtasks: [],
    failureType: null,
    success: false,
    avoidanceCommands: [],
    correctionCommands: [],
  };

  const avoidCanvas = new DrawingCanvas(el<HTMLCanvasElement>("avoid-canvas"), {
    onDraft: () => refreshCodes(),
    onRejected: (msgs) => msgs.forEach((m) => message(m, true)),
  });
  const correctCanvas = new DrawingCanvas(el<HTMLCanvasElement>("correct-canvas"), {
    onDraft: () => refreshCodes(),
    onRejected: (msgs) => msgs.forEach((m) => message(m, true)),
  });

  api
    .style()
    .then((style) => {
      avoidCanvas.style = style;
      correctCanvas.style = style;
    })
    .catch(() => {
      avoidCanvas.style = DEFAULT_STYLE;
      correctCanvas.style = DEFAULT_STYLE;
    });

  function currentTool(): ToolState {
    return {
      kind: el<HTMLSelectElement>("tool-kind").value as ToolState["kind"],
      arm: el<HTMLSelectElement>("tool-arm").value as ToolState["arm"],
      color: (el<HTMLSelectElement>("tool-color").value || undefined) as ToolState["color"],
      rotationDir: (el<HTMLSelectElement>("tool-rotation").value ||
        undefined) as ToolState["rotationDir"],
      gripperState: (el<HTMLSelectElement>("tool-state").value ||
        undefined) as ToolState["gripperState"],
      magnitude: (el<HTMLSelectElement>("tool-magnitude").value ||
        undefined) as ToolState["magnitude"],
    };
  }

  for (const id of ["tool-kind", "tool-arm", "tool-color", "tool-rotation", "tool-state", "tool-magnitude"]) {
    el<HTMLSelectElement>(id).addEventListener("change", () => {
      avoidCanvas.tool = currentTool();
      correctCanvas.tool = currentTool();
    });
  }

  function codeFor(canvas: DrawingCanvas, purpose: Purpose, frame: FrameRef | null): string {
    const drafts = canvas.getDrafts();
    if (!frame || drafts.length === 0) return "";
    return serializeSymbolSet(frame.frame_index, purpose, drafts);
  }

  function refreshCodes(): void {
    const avoid = codeFor(avoidCanvas, "avoidance", state.selectedFrame);
    el<HTMLTextAreaElement>("avoid-code").value = avoid;
    const correctFrame = state.frames.length > 0 ? state.frames[state.frames.length - 1] : null;
    el<HTMLTextAreaElement>("correct-code").value = codeFor(
      correctCanvas,
      "correction",
      correctFrame,
    );
    const bbox = draftsBBox(avoidCanvas.getDrafts(), avoidCanvas.style.glyph_radius);
    el<HTMLSpanElement>("bbox-readout").textContent = bbox ? `bbox ${bbox.join(", ")}` : "";
  }

  async function loadTrajectories(): Promise<void> {
    const list = el<HTMLUListElement>("trajectory-list");
    list.innerHTML = "";
    const rows = await api.listTrajectories();
    for (const row of rows) {
      const item = document.createElement("li");
      const stage = row.annotation_stage ? ` [${row.annotation_stage}]` : "";
      item.textContent = `${row.id} — task ${row.task_id}: ${row.task_instruction}${stage}`;
      item.addEventListener("click", () => {
        void openTrajectory(row.id);
      });
      list.appendChild(item);
    }
  }

  async function openTrajectory(id: string): Promise<void> {
    try {
      state.trajectory = await api.getTrajectory(id);
      state.frames = await api.frames(id);
      state.selectedFrame = state.frames[0] ?? null;
      await api.acquireLease(id, el<HTMLInputElement>("annotator").value || "annotator");
      el<HTMLSpanElement>("current-id").textContent = id;
      el<HTMLSpanElement>("instruction").textContent = state.trajectory.task_instruction;
      const slider = el<HTMLInputElement>("keyframe-slider");
      slider.value = "0";
      updateFrameView();
      updateWristView();
      message(`opened ${id} (lease acquired)`);
    } catch (err) {
      reportError(err);
    }
  }

  function updateFrameView(): void {
    if (!state.trajectory || !state.selectedFrame) return;
    const image = new Image();
    image.onload = () => {
      avoidCanvas.setFrame(image);
      refreshCodes();
    };
    image.src = api.frameUrl(state.trajectory.id, state.selectedFrame.frame_index);
    const last = state.frames[state.frames.length - 1];
    const correctImage = new Image();
    correctImage.onload = () => correctCanvas.setFrame(correctImage);
    correctImage.src = api.frameUrl(state.trajectory.id, last.frame_index);
    el<HTMLSpanElement>("frame-readout").textContent =
      `t=${state.selectedFrame.timestamp_s}s (frame ${state.selectedFrame.frame_index}, ` +
      `${state.selectedFrame.origin})`;
  }

  function updateWristView(): void {
    const panel = el<HTMLDivElement>("wrist-panel");
    const show = el<HTMLInputElement>("wrist-toggle").checked;
    const available = (state.trajectory?.wrist_views ?? 0) > 0;
    panel.style.display = show && available ? "block" : "none";
    panel.textContent = available
      ? `wrist views available: ${state.trajectory?.wrist_views}`
      : "no wrist view for this trajectory";
  }

  el<HTMLInputElement>("wrist-toggle").addEventListener("change", updateWristView);

  el<HTMLInputElement>("keyframe-slider").addEventListener("input", (event) => {
    if (!state.trajectory || state.frames.length === 0) return;
    const position = Number((event.target as HTMLInputElement).value) / 1000;
    state.selectedFrame = sliderToFrame(position, state.trajectory.duration_s, state.frames);
    updateFrameView();
  });

  el<HTMLButtonElement>("add-keyframe").addEventListener("click", () => {
    void (async () => {
      if (!state.trajectory) return;
      const slider = el<HTMLInputElement>("keyframe-slider");
      const t = (Number(slider.value) / 1000) * state.trajectory.duration_s;
      try {
        const payload = await api.registerKeyframe(state.trajectory.id, Number(t.toFixed(2)));
        state.frames = payload.frames;
        message(`registered keyframe at ${t.toFixed(2)}s`);
      } catch (err) {
        reportError(err);
      }
    })();
  });

  // -- stage 1 -----------------------------------------------------------------

  const typeBox = el<HTMLDivElement>("failure-types");
  for (const [value, label] of FAILURE_TYPES) {
    const button = document.createElement("button");
    button.textContent = label;
    button.addEventListener("click", () => {
      state.failureType = value;
      for (const sibling of Array.from(typeBox.children)) sibling.classList.remove("active");
      button.classList.add("active");
    });
    typeBox.appendChild(button);
  }

  el<HTMLButtonElement>("save-plan").addEventListener("click", () => {
    void (async () => {
      if (!state.trajectory) return;
      state.subtasks = el<HTMLTextAreaElement>("subtasks")
        .value.split("\n")
        .map((s) => s.trim())
        .filter(Boolean);
      try {
        await api.putPlan(state.trajectory.id, state.subtasks);
        const picker = el<HTMLSelectElement>("subtask-picker");
        picker.innerHTML = "";
        state.subtasks.forEach((text, index) => {
          const option = document.createElement("option");
          option.value = String(index);
          option.textContent = `${index + 1}. ${text}`;
          picker.appendChild(option);
        });
        message("subtask plan saved");
      } catch (err) {
        reportError(err);
      }
    })();
  });

  el<HTMLButtonElement>("save-stage1").addEventListener("click", () => {
    void (async () => {
      if (!state.trajectory) return;
      state.success = el<HTMLInputElement>("success-toggle").checked;
      try {
        const body = state.success
          ? { success: true }
          : {
              success: false,
              keyframe_ts: state.selectedFrame?.timestamp_s,
              subtask_index: Number(el<HTMLSelectElement>("subtask-picker").value),
              failure_type: state.failureType ?? undefined,
            };
        await api.putStage1(state.trajectory.id, body);
        message("stage 1 saved");
      } catch (err) {
        reportError(err);
      }
    })();
  });

  // -- stage 2 ---------------------------------------------------------------------

  function fillCommandPicker(selectId: string): void {
    const select = el<HTMLSelectElement>(selectId);
    select.innerHTML = "";
    for (const arm of ["left", "right"] as const) {
      for (const cmd of commandChoices(arm)) {
        const option = document.createElement("option");
        option.value = JSON.stringify(cmd);
        option.textContent = renderCommand(cmd);
        select.appendChild(option);
      }
    }
  }
  fillCommandPicker("avoid-command-picker");
  fillCommandPicker("correct-command-picker");

  function bindAddCommand(buttonId: string, pickerId: string, listId: string, target: CommandDraft[]): void {
    el<HTMLButtonElement>(buttonId).addEventListener("click", () => {
      const cmd = JSON.parse(el<HTMLSelectElement>(pickerId).value) as CommandDraft;
      target.push(cmd);
      const item = document.createElement("li");
      item.textContent = renderCommand(cmd);
      el<HTMLUListElement>(listId).appendChild(item);
    });
  }
  bindAddCommand("avoid-add-command", "avoid-command-picker", "avoid-command-list", state.avoidanceCommands);
  bindAddCommand("correct-add-command", "correct-command-picker", "correct-command-list", state.correctionCommands);

  el<HTMLButtonElement>("avoid-undo").addEventListener("click", () => {
    avoidCanvas.undo();
    refreshCodes();
  });
  el<HTMLButtonElement>("correct-undo").addEventListener("click", () => {
    correctCanvas.undo();
    refreshCodes();
  });

  el<HTMLButtonElement>("save-stage2").addEventListener("click", () => {
    void (async () => {
      if (!state.trajectory) return;
      const avoidCode = el<HTMLTextAreaElement>("avoid-code").value;
      const correctCode = el<HTMLTextAreaElement>("correct-code").value;
      try {
        const result = await api.putStage2(state.trajectory.id, {
          low_level_avoidance: state.avoidanceCommands,
          low_level_correction: state.correctionCommands,
          avoidance_code: avoidCode || undefined,
          correction_code: correctCode || undefined,
        });
        if (result.avoidance_code && result.avoidance_code !== avoidCode) {
          message("server canonicalized the avoidance code", true);
        }
        message("stage 2 saved");
      } catch (err) {
        reportError(err);
      }
    })();
  });

  // -- stage 3 ------------------------------------------------------------------------

  el<HTMLButtonElement>("assist").addEventListener("click", () => {
    void (async () => {
      if (!state.trajectory) return;
      try {
        const payload = await api.assistStage3(state.trajectory.id);
        const record = payload.record as {
          diagnosis?: { failure_reason?: string };
          guidance?: { high_level_avoidance?: string; high_level_correction?: string };
        };
        el<HTMLTextAreaElement>("draft-reason").value = record.diagnosis?.failure_reason ?? "";
        el<HTMLTextAreaElement>("draft-avoid").value =
          record.guidance?.high_level_avoidance ?? "";
        el<HTMLTextAreaElement>("draft-correct").value =
          record.guidance?.high_level_correction ?? "";
        message("assist drafts loaded — review before finalizing");
      } catch (err) {
        reportError(err);
      }
    })();
  });

  el<HTMLButtonElement>("save-stage3").addEventListener("click", () => {
    void (async () => {
      if (!state.trajectory) return;
      try {
        await api.putStage3(state.trajectory.id, {
          failure_reason: el<HTMLTextAreaElement>("draft-reason").value,
          high_level_avoidance: el<HTMLTextAreaElement>("draft-avoid").value,
          high_level_correction: el<HTMLTextAreaElement>("draft-correct").value,
        });
        message("stage 3 drafts saved");
      } catch (err) {
        reportError(err);
      }
    })();
  });

  el<HTMLButtonElement>("finalize").addEventListener("click", () => {
    void (async () => {
      if (!state.trajectory) return;
      try {
        await api.finalize(state.trajectory.id);
        message(`${state.trajectory.id} finalized`);
        await loadTrajectories();
      } catch (err) {
        reportError(err);
      }
    })();
  });

  void loadTrajectories().catch(reportError);
}

declare global {
  interface Window {
    failvisStart: typeof startApp;
  }
}

if (typeof window !== "undefined") {
  window.failvisStart = startApp;
}
