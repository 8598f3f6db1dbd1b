// Thin typed client over the service's HTTP interface. Every number the
// console displays comes out of these responses — nothing is recomputed here.

import type {
  ApiErrorBody,
  Binding,
  BindingOutcome,
  ConfigField,
  DeviceDescriptor,
  EntityDetail,
  MatchResult,
  ModelDescriptor,
  ProjectResponse,
  Recipe,
  SearchHit,
  TargetDescriptor,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly httpStatus: number,
    readonly code: string,
    message: string,
    readonly details?: unknown,
  ) {
    super(message);
  }
}

export interface ProjectRequest {
  model: string;
  device: string;
  target: string;
  config: Record<string, unknown>;
}

export class ApiClient {
  constructor(
    readonly base: string,
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      let body: ApiErrorBody | null = null;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        // not an envelope; fall through
      }
      if (body && body.code) {
        throw new ApiError(response.status, body.code, body.message, body.details);
      }
      throw new ApiError(response.status, "HttpError", `HTTP ${response.status}`);
    }
    return (await response.json()) as T;
  }

  listModels(): Promise<ModelDescriptor[]> {
    return this.request("/models");
  }

  listDevices(): Promise<DeviceDescriptor[]> {
    return this.request("/devices");
  }

  modelDetail(uuid: string): Promise<EntityDetail<ModelDescriptor>> {
    return this.request(`/models/${encodeURIComponent(uuid)}`);
  }

  deviceDetail(id: string): Promise<EntityDetail<DeviceDescriptor>> {
    return this.request(`/devices/${encodeURIComponent(id)}`);
  }

  matchModels(deviceId: string): Promise<MatchResult[]> {
    return this.request(`/match/models?device=${encodeURIComponent(deviceId)}`);
  }

  matchDevices(modelUuid: string): Promise<MatchResult[]> {
    return this.request(`/match/devices?model=${encodeURIComponent(modelUuid)}`);
  }

  search(text: string, filters?: Record<string, unknown>, k?: number): Promise<SearchHit[]> {
    return this.request("/search", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text, filters: filters ?? {}, k: k ?? 20 }),
    });
  }

  targets(): Promise<TargetDescriptor[]> {
    return this.request("/targets");
  }

  projectConfig(model: string, device: string, target: string): Promise<ConfigField[]> {
    const params = new URLSearchParams({ model, device, target });
    return this.request(`/projects/config?${params}`);
  }

  generateProject(body: ProjectRequest): Promise<ProjectResponse> {
    return this.request("/projects", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async downloadProjectZip(body: ProjectRequest): Promise<Blob> {
    const response = await this.fetchFn(this.base + "/projects", {
      method: "POST",
      headers: { "content-type": "application/json", accept: "application/zip" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      const envelope = (await response.json()) as ApiErrorBody;
      throw new ApiError(response.status, envelope.code, envelope.message, envelope.details);
    }
    return response.blob();
  }

  recipes(): Promise<Recipe[]> {
    return this.request("/recipes");
  }

  proposeBinding(recipeId: string, deviceIds: string[]): Promise<BindingOutcome> {
    return this.request(`/recipes/${encodeURIComponent(recipeId)}/bindings`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ deviceIds }),
    });
  }

  acknowledgeBinding(bindingId: string, decision: "accept" | "reject"): Promise<Binding> {
    return this.request(`/bindings/${encodeURIComponent(bindingId)}/ack`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ decision }),
    });
  }

  streamUrl(bindingId: string): string {
    return `${this.base}/bindings/${encodeURIComponent(bindingId)}/stream`;
  }
}
