// Wire shapes of the campaign service JSON API.

export interface DiscreteDimDto {
  name: string
  unit: string
  kind: 'discrete'
  levels: number[]
}

export interface ContinuousDimDto {
  name: string
  unit: string
  kind: 'continuous'
  lower: number
  upper: number
}

export type SpaceDimDto = DiscreteDimDto | ContinuousDimDto

export interface SpaceDto {
  dims: SpaceDimDto[]
}

export interface TargetsDto {
  target_length: number
  target_diameter: number
  max_length: number
  max_diameter: number
}

export interface ObservationView {
  index: number
  point: number[]
  point_named: Record<string, number>
  image_refs: string[]
  batch: string
}

export interface PendingComparison {
  current_index: number
  prior_index: number
  current: ObservationView
  prior: ObservationView
}

export interface RecommendationView {
  point: number[]
  point_named: Record<string, number>
  acquisition_value: number
  iteration: number
  duplicate_flag: boolean
}

export type CampaignStatus =
  | 'awaiting_seed'
  | 'ready'
  | 'awaiting_result'
  | 'awaiting_comparisons'
  | 'converged'
  | 'budget_exhausted'

export interface CampaignSummary {
  id: string
  status: CampaignStatus
  iteration: number
  iterations_done: number
  iteration_budget: number
  seed_count: number
  best_found: number | null
  space: SpaceDto
  targets: TargetsDto
  pending_comparisons: PendingComparison[]
  recommendation: RecommendationView | null
  links: Record<string, string>
}

export interface CampaignListEntry {
  id: string
  status: CampaignStatus | 'unreadable'
  iteration?: number
  best_found?: number | null
  error?: string
}

export interface TraceJson {
  columns: string[]
  rows: number[][]
}

export type ComparisonOutcome = 'current_better' | 'prior_better' | 'difficult_to_tell'

export interface SeedObservationDto {
  point: number[]
  measurement: { median_length: number; median_diameter: number }
}

export interface CreateCampaignPayload {
  id?: string
  config: Record<string, unknown>
  seed_observations: SeedObservationDto[]
}
