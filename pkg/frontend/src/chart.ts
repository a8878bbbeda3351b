// Campaign progress chart: one circle per experiment's combined utility and
// a line through the running best-found value, which the trace guarantees to
// be non-increasing. All series come straight from the trace endpoint; the
// client never recomputes utilities.

import type { TraceJson } from './types.js'

export interface ChartPoint {
  x: number
  y: number
  iteration: number
  value: number
}

export interface ChartModel {
  width: number
  height: number
  circles: ChartPoint[]
  bfvPoints: ChartPoint[]
  bfvSeries: number[]
  lastBfv: number | null
  yTicks: { y: number; label: string }[]
}

const MARGIN = { left: 44, right: 10, top: 10, bottom: 24 }

function column(trace: TraceJson, name: string): number[] {
  const index = trace.columns.indexOf(name)
  if (index < 0) throw new Error(`trace has no ${name} column`)
  return trace.rows.map((row) => {
    const value = row[index]
    if (typeof value !== 'number') throw new Error(`non-numeric ${name} value`)
    return value
  })
}

export function buildChartModel(trace: TraceJson, width = 640, height = 240): ChartModel {
  const iterations = column(trace, 'iteration')
  const utilities = column(trace, 'y')
  const bfv = column(trace, 'BFV')

  const innerWidth = width - MARGIN.left - MARGIN.right
  const innerHeight = height - MARGIN.top - MARGIN.bottom
  const xMax = Math.max(1, ...iterations)
  const yMax = Math.max(0.1, ...utilities)

  const toX = (iteration: number) =>
    MARGIN.left + (xMax === 1 ? innerWidth / 2 : ((iteration - 1) / (xMax - 1)) * innerWidth)
  const toY = (value: number) => MARGIN.top + (1 - value / yMax) * innerHeight

  const circles = iterations.map((iteration, i) => ({
    x: toX(iteration),
    y: toY(utilities[i]!),
    iteration,
    value: utilities[i]!,
  }))
  const bfvPoints = iterations.map((iteration, i) => ({
    x: toX(iteration),
    y: toY(bfv[i]!),
    iteration,
    value: bfv[i]!,
  }))

  const yTicks = [0, 0.25, 0.5, 0.75, 1.0]
    .filter((v) => v <= yMax + 1e-9)
    .map((v) => ({ y: toY(v), label: v.toFixed(2) }))

  return {
    width,
    height,
    circles,
    bfvPoints,
    bfvSeries: bfv,
    lastBfv: bfv.length > 0 ? bfv[bfv.length - 1]! : null,
    yTicks,
  }
}

const SVG_NS = 'http://www.w3.org/2000/svg'

export function renderChart(doc: Document, model: ChartModel): SVGSVGElement {
  const svg = doc.createElementNS(SVG_NS, 'svg') as SVGSVGElement
  svg.setAttribute('viewBox', `0 0 ${model.width} ${model.height}`)
  svg.setAttribute('width', String(model.width))
  svg.setAttribute('height', String(model.height))
  svg.setAttribute('data-testid', 'campaign-chart')

  for (const tick of model.yTicks) {
    const line = doc.createElementNS(SVG_NS, 'line')
    line.setAttribute('x1', String(MARGIN.left))
    line.setAttribute('x2', String(model.width - MARGIN.right))
    line.setAttribute('y1', String(tick.y))
    line.setAttribute('y2', String(tick.y))
    line.setAttribute('stroke', '#ddd')
    svg.appendChild(line)
    const label = doc.createElementNS(SVG_NS, 'text')
    label.setAttribute('x', String(MARGIN.left - 6))
    label.setAttribute('y', String(tick.y + 4))
    label.setAttribute('text-anchor', 'end')
    label.setAttribute('font-size', '10')
    label.textContent = tick.label
    svg.appendChild(label)
  }

  if (model.bfvPoints.length > 0) {
    const polyline = doc.createElementNS(SVG_NS, 'polyline')
    polyline.setAttribute(
      'points',
      model.bfvPoints.map((p) => `${p.x},${p.y}`).join(' '),
    )
    polyline.setAttribute('fill', 'none')
    polyline.setAttribute('stroke', '#c0392b')
    polyline.setAttribute('stroke-width', '2')
    polyline.setAttribute('data-testid', 'bfv-line')
    svg.appendChild(polyline)
  }

  for (const point of model.circles) {
    const circle = doc.createElementNS(SVG_NS, 'circle')
    circle.setAttribute('cx', String(point.x))
    circle.setAttribute('cy', String(point.y))
    circle.setAttribute('r', '4')
    circle.setAttribute('fill', 'none')
    circle.setAttribute('stroke', '#2c3e50')
    circle.setAttribute('stroke-width', '1.5')
    circle.setAttribute('data-iteration', String(point.iteration))
    circle.setAttribute('data-utility', String(point.value))
    svg.appendChild(circle)
  }

  return svg
}
