// Native-unit rendering of design points. Discrete parameters must display
// the exact configured level, never an interpolated or re-rounded value.

import type { SpaceDimDto, SpaceDto } from './types.js'

export function formatNumber(value: number): string {
  // JS shortest round-trip form: 15 -> "15", 1.05 -> "1.05"
  return String(value)
}

export function formatValue(dim: SpaceDimDto, value: number): string {
  let shown = value
  if (dim.kind === 'discrete') {
    const exact = dim.levels.find((level) => level === value)
    if (exact === undefined) {
      throw new Error(`${dim.name}: ${value} is not one of the configured levels`)
    }
    shown = exact
  }
  const unit = dim.unit ? ` ${dim.unit}` : ''
  return `${formatNumber(shown)}${unit}`
}

export interface NamedValue {
  name: string
  text: string
}

export function formatPoint(space: SpaceDto, coords: number[]): NamedValue[] {
  if (coords.length !== space.dims.length) {
    throw new Error(`point has ${coords.length} coordinates, space has ${space.dims.length}`)
  }
  return space.dims.map((dim, i) => ({ name: dim.name, text: formatValue(dim, coords[i]!) }))
}

export function formatPercent(value: number): string {
  return `${value.toFixed(1)}%`
}
