// HTTP client for the campaign service. All state lives server-side; every
// method returns the server's view and never caches.

import type {
  CampaignListEntry,
  CampaignSummary,
  ComparisonOutcome,
  CreateCampaignPayload,
  TraceJson,
} from './types.js'

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`)
    this.name = 'ApiError'
  }
}

/** The server refused because the campaign moved on (stale expected_iteration,
 * out-of-turn action). The client must refetch before retrying. */
export class ConflictError extends ApiError {
  constructor(detail: string) {
    super(409, detail)
    this.name = 'ConflictError'
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return
  let detail = response.statusText
  try {
    const body = (await response.json()) as { detail?: unknown }
    if (body && body.detail !== undefined) detail = String(body.detail)
  } catch {
    // non-JSON error body; keep the status text
  }
  if (response.status === 409) throw new ConflictError(detail)
  throw new ApiError(response.status, detail)
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async requestJson<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init)
    await raiseForStatus(response)
    return (await response.json()) as T
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.requestJson<T>(path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    })
  }

  async listCampaigns(): Promise<CampaignListEntry[]> {
    const data = await this.requestJson<{ campaigns: CampaignListEntry[] }>('/campaigns')
    return data.campaigns
  }

  createCampaign(payload: CreateCampaignPayload): Promise<CampaignSummary> {
    return this.post('/campaigns', payload)
  }

  getCampaign(id: string): Promise<CampaignSummary> {
    return this.requestJson(`/campaigns/${id}`)
  }

  postComparison(
    id: string,
    priorIndex: number,
    outcome: ComparisonOutcome,
    expectedIteration?: number,
  ): Promise<CampaignSummary> {
    return this.post(`/campaigns/${id}/comparisons`, {
      prior_index: priorIndex,
      outcome,
      ...(expectedIteration === undefined ? {} : { expected_iteration: expectedIteration }),
    })
  }

  postRecommendation(id: string, expectedIteration?: number): Promise<CampaignSummary> {
    return this.post(`/campaigns/${id}/recommendation`, {
      ...(expectedIteration === undefined ? {} : { expected_iteration: expectedIteration }),
    })
  }

  postResult(
    id: string,
    point: number[],
    medianLength: number,
    medianDiameter: number,
    imageRefs: string[] = [],
    expectedIteration?: number,
  ): Promise<CampaignSummary> {
    return this.post(`/campaigns/${id}/results`, {
      point,
      median_length: medianLength,
      median_diameter: medianDiameter,
      image_refs: imageRefs,
      ...(expectedIteration === undefined ? {} : { expected_iteration: expectedIteration }),
    })
  }

  getTraceJson(id: string): Promise<TraceJson> {
    return this.requestJson(`/campaigns/${id}/trace`, {
      headers: { accept: 'application/json' },
    })
  }

  async getTraceCsv(id: string): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/campaigns/${id}/trace`, {
      headers: { accept: 'text/csv' },
    })
    await raiseForStatus(response)
    return response.text()
  }

  async uploadImage(id: string, blob: Blob | Uint8Array): Promise<string> {
    const body = blob instanceof Uint8Array ? new Blob([blob as BlobPart]) : blob
    const response = await this.fetchImpl(`${this.baseUrl}/campaigns/${id}/images`, {
      method: 'POST',
      headers: { 'content-type': 'application/octet-stream' },
      body,
    })
    await raiseForStatus(response)
    const data = (await response.json()) as { ref: string }
    return data.ref
  }

  imageUrl(id: string, ref: string): string {
    return `${this.baseUrl}/campaigns/${id}/images/${ref}`
  }
}
