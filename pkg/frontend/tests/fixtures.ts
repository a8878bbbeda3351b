// Deterministic campaign material shared by the scripted-session and
// headless drivers. Both sides must derive identical inputs from identical
// server responses, or the trace-equality check would be vacuous.

import type { ComparisonOutcome, SeedObservationDto } from '../src/types.js'

export function campaignConfig(overrides: {
  seedCount?: number
  budget?: number
  rngSeed?: number
} = {}): Record<string, unknown> {
  return {
    space: {
      dims: [
        { name: 'position', unit: 'mm', kind: 'discrete', levels: [0.0, 15.0, 30.0] },
        { name: 'angle', unit: 'deg', kind: 'discrete', levels: [10.0, 25.0] },
        { name: 'width', unit: 'mm', kind: 'discrete', levels: [3.0, 6.0, 9.0] },
        { name: 'flow', unit: 'ml/h', kind: 'discrete', levels: [80.0, 110.0, 140.0] },
        { name: 'speed', unit: 'cm/s', kind: 'discrete', levels: [43.0, 68.0, 93.0] },
      ],
    },
    targets: { target_length: 70.0, target_diameter: 1.0, max_length: 210.0, max_diameter: 3.0 },
    weights: [1 / 3, 1 / 3, 1 / 3],
    gp: {
      kernel: { lengthscale: 0.2, signal_variance: 1.0 },
      obs_noise_variance: 0.0001,
      select_lengthscale: false,
      center_prior: true,
      scale_signal: true,
    },
    pref: {
      noise_sigma: 0.1,
      kernel: { lengthscale: 0.2, signal_variance: 1.0 },
      newton_tol: 1e-10,
      newton_max_iter: 100,
    },
    acquisition_mode: 'exhaustive',
    direct_budget: 1000,
    iteration_budget: overrides.budget ?? 8,
    seed_count: overrides.seedCount ?? 1,
    stop_tolerance: 0.2,
    rng_seed: overrides.rngSeed ?? 3,
  }
}

const SEED_POINTS: number[][] = [
  [15.0, 10.0, 6.0, 110.0, 68.0],
  [0.0, 25.0, 3.0, 80.0, 43.0],
  [30.0, 10.0, 9.0, 140.0, 93.0],
]

export function gridSeeds(count: number): SeedObservationDto[] {
  return SEED_POINTS.slice(0, count).map((point, i) => ({
    point,
    measurement: { median_length: 100.0 + 5.0 * i, median_diameter: 2.0 + 0.1 * i },
  }))
}

/** Operator rule for the simulated lab: positive, deterministic in the
 * recommended setting, and diameter always above 1.2x target so a scripted
 * campaign never converges before its budget. */
export function measurementFor(named: Record<string, number>): {
  length: number
  diameter: number
} {
  const length = 40.0 + 0.6 * named['position']! + 2.0 * named['width']! + 0.2 * named['speed']!
  const diameter = 1.6 + 0.01 * named['angle']! + 0.002 * named['flow']!
  return { length, diameter }
}

/** Deterministic judge shared by both sessions; mixes all three outcomes. */
export function outcomeForPair(currentIndex: number, priorIndex: number): ComparisonOutcome {
  const spin = currentIndex * 7 + priorIndex * 3
  if (spin % 5 === 0) return 'difficult_to_tell'
  return spin % 2 === 0 ? 'current_better' : 'prior_better'
}

export const OUTCOME_KEYS: Record<ComparisonOutcome, string> = {
  current_better: '1',
  prior_better: '2',
  difficult_to_tell: '3',
}

/** Scheduled comparisons for the t-th experiment: floor(log2(t-1)) + 1. */
export function expectedComparisons(t: number): number {
  return Math.floor(Math.log2(t - 1)) + 1
}
