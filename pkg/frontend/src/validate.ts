// Client-side screening of the measurement form. Invalid entries must never
// reach the network; the server would reject them anyway, but a round trip
// for a typo wastes the operator's time.

export interface MeasurementFormValues {
  length: string
  diameter: string
}

export type MeasurementValidation =
  | { ok: true; length: number; diameter: number }
  | { ok: false; errors: string[] }

function parsePositive(label: string, raw: string, errors: string[]): number {
  const text = raw.trim()
  if (text === '') {
    errors.push(`${label}: required`)
    return NaN
  }
  const value = Number(text)
  if (!Number.isFinite(value)) {
    errors.push(`${label}: not a number`)
    return NaN
  }
  if (value <= 0) {
    errors.push(`${label}: must be positive`)
    return NaN
  }
  return value
}

export function validateMeasurement(values: MeasurementFormValues): MeasurementValidation {
  const errors: string[] = []
  const length = parsePositive('median length', values.length, errors)
  const diameter = parsePositive('median diameter', values.diameter, errors)
  if (errors.length > 0) return { ok: false, errors }
  return { ok: true, length, diameter }
}
