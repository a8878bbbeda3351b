// DOM-free units: form validation, native-unit formatting, montage
// grouping, and chart geometry.

import { expect, test } from 'vitest'

import { buildChartModel, renderChart } from '../src/chart.js'
import { montageTiers } from '../src/comparison.js'
import { formatPoint, formatValue } from '../src/format.js'
import type { SpaceDto, TraceJson } from '../src/types.js'
import { validateMeasurement } from '../src/validate.js'

const SPACE: SpaceDto = {
  dims: [
    { name: 'width', unit: 'mm', kind: 'discrete', levels: [3, 6, 9] },
    { name: 'ratio', unit: '', kind: 'discrete', levels: [0.5, 1.05] },
    { name: 'temp', unit: 'C', kind: 'continuous', lower: 20, upper: 80 },
  ],
}

test('measurement validation accepts positive numbers only', () => {
  expect(validateMeasurement({ length: '70.4', diameter: '1.05' })).toEqual({
    ok: true,
    length: 70.4,
    diameter: 1.05,
  })
  expect(validateMeasurement({ length: ' 1e2 ', diameter: '0.5' })).toEqual({
    ok: true,
    length: 100,
    diameter: 0.5,
  })

  const negative = validateMeasurement({ length: '-1', diameter: '1' })
  expect(negative.ok).toBe(false)
  if (!negative.ok) expect(negative.errors).toEqual(['median length: must be positive'])

  const zero = validateMeasurement({ length: '70', diameter: '0' })
  expect(zero.ok).toBe(false)

  const both = validateMeasurement({ length: 'abc', diameter: '' })
  expect(both.ok).toBe(false)
  if (!both.ok) {
    expect(both.errors).toEqual(['median length: not a number', 'median diameter: required'])
  }

  expect(validateMeasurement({ length: 'Infinity', diameter: '1' }).ok).toBe(false)
  expect(validateMeasurement({ length: 'NaN', diameter: '1' }).ok).toBe(false)
})

test('discrete values render their exact configured level', () => {
  expect(formatValue(SPACE.dims[0]!, 6)).toBe('6 mm')
  expect(formatValue(SPACE.dims[1]!, 1.05)).toBe('1.05')
  expect(formatValue(SPACE.dims[2]!, 37.5)).toBe('37.5 C')
  expect(() => formatValue(SPACE.dims[0]!, 4.5)).toThrow('not one of the configured levels')
})

test('formatPoint pairs every dimension with its unit', () => {
  expect(formatPoint(SPACE, [9, 0.5, 20])).toEqual([
    { name: 'width', text: '9 mm' },
    { name: 'ratio', text: '0.5' },
    { name: 'temp', text: '20 C' },
  ])
  expect(() => formatPoint(SPACE, [9, 0.5])).toThrow('3')
})

test('montage groups images three per magnification tier', () => {
  expect(montageTiers([])).toEqual([])
  expect(montageTiers(['a'])).toEqual([['a']])
  expect(montageTiers(['a', 'b', 'c', 'd', 'e', 'f', 'g'])).toEqual([
    ['a', 'b', 'c'],
    ['d', 'e', 'f'],
    ['g'],
  ])
})

const TRACE: TraceJson = {
  columns: ['iteration', 'width', 'y', 'BFV'],
  rows: [
    [1, 3, 0.8, 0.8],
    [2, 6, 0.5, 0.5],
    [3, 9, 0.7, 0.5],
    [4, 3, 0.2, 0.2],
  ],
}

test('chart model mirrors the trace series without recomputation', () => {
  const model = buildChartModel(TRACE)
  expect(model.circles.map((c) => c.value)).toEqual([0.8, 0.5, 0.7, 0.2])
  expect(model.bfvSeries).toEqual([0.8, 0.5, 0.5, 0.2])
  expect(model.lastBfv).toBe(0.2)

  for (let i = 1; i < model.bfvSeries.length; i++) {
    expect(model.bfvSeries[i]!).toBeLessThanOrEqual(model.bfvSeries[i - 1]!)
  }
  const xs = model.circles.map((c) => c.x)
  for (let i = 1; i < xs.length; i++) {
    expect(xs[i]!).toBeGreaterThan(xs[i - 1]!)
  }
  // circle for y == BFV sits on the line
  expect(model.circles[3]!.y).toBe(model.bfvPoints[3]!.y)
})

test('chart model rejects traces without the expected columns', () => {
  expect(() => buildChartModel({ columns: ['iteration', 'y'], rows: [] })).toThrow('BFV')
  expect(buildChartModel({ columns: TRACE.columns, rows: [] }).lastBfv).toBeNull()
})

test('rendered chart contains one circle per experiment and the BFV line', () => {
  const svg = renderChart(document, buildChartModel(TRACE))
  expect(svg.querySelectorAll('circle').length).toBe(4)
  const line = svg.querySelector('polyline[data-testid="bfv-line"]')
  expect(line).not.toBeNull()
  expect(line!.getAttribute('points')!.split(' ').length).toBe(4)
  const empty = renderChart(document, buildChartModel({ columns: TRACE.columns, rows: [] }))
  expect(empty.querySelectorAll('circle').length).toBe(0)
  expect(empty.querySelector('polyline')).toBeNull()
})
