/**
 * Typed client for the annotation service.
 *
 * Every 422 from the server carries the library's violation list; the client
 * surfaces it as an `ApiError` so forms can show inline messages verbatim.
 */

import type { GlyphStyle } from "./style.js";
import type { BBox } from "./symbols.js";
import type { CommandDraft } from "./commands.js";
import type { FrameRef } from "./scrub.js";

export interface Violation {
  code: string;
  message: string;
  symbol_index: number | null;
  severity: "error" | "warning";
}

export class ApiError extends Error {
  status: number;
  error: string;
  violations: Violation[];

  constructor(status: number, error: string, detail: string, violations: Violation[] = []) {
    super(`${error}: ${detail}`);
    this.status = status;
    this.error = error;
    this.violations = violations;
  }
}

export interface TrajectorySummary {
  id: string;
  task_id: number;
  task_instruction: string;
  source: string;
  duration_s: number;
  fps_native: number;
  success: boolean;
  annotation_stage: string | null;
}

export interface TrajectoryDetail extends Omit<TrajectorySummary, "annotation_stage"> {
  frame_width: number;
  frame_height: number;
  wrist_views: number;
  registered_keyframes: number[];
}

export interface SymbolCheckResult {
  canonical_code: string | null;
  violations: Violation[];
  bbox: BBox | null;
}

export interface Stage2Payload {
  low_level_avoidance?: CommandDraft[];
  low_level_correction?: CommandDraft[];
  avoidance_code?: string;
  correction_code?: string;
}

export interface Stage2Result {
  record: Record<string, unknown>;
  avoidance_code?: string;
  correction_code?: string;
}

type FetchLike = typeof fetch;

export class ApiClient {
  private leaseToken: string | null = null;

  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.leaseToken) headers["X-Lease-Token"] = this.leaseToken;
    const resp = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await resp.json()) as Record<string, unknown>;
    if (!resp.ok) {
      throw new ApiError(
        resp.status,
        String(payload.error ?? "HttpError"),
        String(payload.detail ?? resp.statusText),
        (payload.violations as Violation[] | undefined) ?? [],
      );
    }
    return payload as T;
  }

  health(): Promise<{ status: string; schema_version: number }> {
    return this.request("GET", "/health");
  }

  async style(): Promise<GlyphStyle> {
    const payload = await this.request<{ style: GlyphStyle }>("GET", "/style");
    return payload.style;
  }

  async listTrajectories(): Promise<TrajectorySummary[]> {
    const payload = await this.request<{ trajectories: TrajectorySummary[] }>(
      "GET",
      "/trajectories",
    );
    return payload.trajectories;
  }

  getTrajectory(id: string): Promise<TrajectoryDetail> {
    return this.request("GET", `/trajectories/${id}`);
  }

  async frames(id: string): Promise<FrameRef[]> {
    const payload = await this.request<{ frames: FrameRef[] }>(
      "GET",
      `/trajectories/${id}/frames`,
    );
    return payload.frames;
  }

  frameUrl(id: string, frameIndex: number): string {
    return `${this.baseUrl}/trajectories/${id}/frames/${frameIndex}`;
  }

  async acquireLease(id: string, annotatorId: string): Promise<string> {
    const payload = await this.request<{ token: string }>(
      "POST",
      `/trajectories/${id}/lease`,
      { annotator_id: annotatorId },
    );
    this.leaseToken = payload.token;
    return payload.token;
  }

  releaseLease(id: string): Promise<unknown> {
    const result = this.request("DELETE", `/trajectories/${id}/lease`);
    this.leaseToken = null;
    return result;
  }

  registerKeyframe(id: string, timestampS: number): Promise<{ frames: FrameRef[] }> {
    return this.request("POST", `/trajectories/${id}/keyframes`, { timestamp_s: timestampS });
  }

  putPlan(id: string, subtasks: string[]): Promise<{ subtasks: string[] }> {
    return this.request("PUT", `/trajectories/${id}/plan`, { subtasks });
  }

  putStage1(
    id: string,
    body: {
      success: boolean;
      keyframe_ts?: number;
      subtask_index?: number;
      failure_type?: string;
    },
  ): Promise<{ record: Record<string, unknown> }> {
    return this.request("PUT", `/trajectories/${id}/stage1`, body);
  }

  putStage2(id: string, body: Stage2Payload): Promise<Stage2Result> {
    return this.request("PUT", `/trajectories/${id}/stage2`, body);
  }

  assistStage3(id: string): Promise<{ record: Record<string, unknown> }> {
    return this.request("POST", `/trajectories/${id}/assist-stage3`);
  }

  putStage3(
    id: string,
    body: { failure_reason: string; high_level_avoidance: string; high_level_correction: string },
  ): Promise<{ record: Record<string, unknown> }> {
    return this.request("PUT", `/trajectories/${id}/stage3`, body);
  }

  finalize(id: string): Promise<{ record: Record<string, unknown> }> {
    return this.request("POST", `/trajectories/${id}/finalize`, {});
  }

  getAnnotation(id: string): Promise<{ record: Record<string, unknown> }> {
    return this.request("GET", `/annotations/${id}`);
  }

  checkSymbols(code: string, width: number, height: number): Promise<SymbolCheckResult> {
    return this.request("POST", "/symbols/check", { code, width, height });
  }
}
