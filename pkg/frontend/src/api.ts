// Typed client for the annotation REST API. The UI never touches the dataset
// except through these calls; all validation is server-authoritative.

import type {
  ContextKindName,
  KeypointPayload,
  SceneDetail,
  SceneList,
  SceneSummary,
  TaskSchemaPayload,
  ViolationPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: unknown,
    message: string,
  ) {
    super(message);
  }

  get violations(): ViolationPayload[] {
    const body = this.body as { violations?: ViolationPayload[] } | null;
    return body?.violations ?? [];
  }

  get currentVersion(): number | null {
    const body = this.body as { current_version?: number } | null;
    return body?.current_version ?? null;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    let body: unknown = null;
    const text = await response.text();
    if (text.length > 0) {
      try {
        body = JSON.parse(text);
      } catch {
        body = text;
      }
    }
    if (!response.ok) {
      const message =
        (body as { message?: string } | null)?.message ??
        `${init?.method ?? "GET"} ${path} failed with ${response.status}`;
      throw new ApiError(response.status, body, message);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  listScenes(params: { page?: number; pageSize?: number; kind?: string } = {}): Promise<SceneList> {
    const query = new URLSearchParams();
    if (params.page) query.set("page", String(params.page));
    if (params.pageSize) query.set("page_size", String(params.pageSize));
    if (params.kind) query.set("kind", params.kind);
    const suffix = query.toString() ? `?${query.toString()}` : "";
    return this.request<SceneList>(`/scenes${suffix}`);
  }

  getScene(recordId: string): Promise<SceneDetail> {
    return this.request<SceneDetail>(`/scenes/${encodeURIComponent(recordId)}`);
  }

  imageUrl(recordId: string): string {
    return `${this.baseUrl}/scenes/${encodeURIComponent(recordId)}/image`;
  }

  contextUrl(recordId: string, kind: ContextKindName = "soft_edge"): string {
    return `${this.baseUrl}/scenes/${encodeURIComponent(recordId)}/context?kind=${kind}`;
  }

  getSchema(taskId: string): Promise<TaskSchemaPayload> {
    return this.request<TaskSchemaPayload>(`/schema/${encodeURIComponent(taskId)}`);
  }

  putKeypoints(
    recordId: string,
    version: number,
    keypoints: Record<string, KeypointPayload>,
  ): Promise<{ record_id: string; version: number }> {
    return this.request(`/scenes/${encodeURIComponent(recordId)}/keypoints`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ version, keypoints }),
    });
  }

  async reviewNext(): Promise<SceneSummary | null> {
    const body = await this.request<{ record: SceneSummary | null }>("/review/next");
    return body.record;
  }

  postReview(
    recordId: string,
    verdict: "accept" | "reject",
    note = "",
  ): Promise<{ record_id: string; review: string }> {
    return this.post(`/review/${encodeURIComponent(recordId)}`, { verdict, note });
  }

  postScene(payload: {
    task_id: string;
    instruction: string;
    objects: string[];
    image: string;
    object_set?: string;
  }): Promise<{ record_id: string; version: number }> {
    return this.post("/scenes", payload);
  }
}
