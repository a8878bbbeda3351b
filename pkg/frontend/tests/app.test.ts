// Operator-console behaviors against the live service: client-side
// validation, conflict handling, chart/BFV fidelity, keyboard judging, and
// image display.

import { afterAll, afterEach, beforeAll, expect, test } from 'vitest'

import { ApiClient } from '../src/api.js'
import { App } from '../src/app.js'
import { byTestId, pendingShown, pressKey, setValue, shownParam, statusOf, submitForm } from './dom.js'
import { driveHeadless } from './driver.js'
import { campaignConfig, gridSeeds, measurementFor } from './fixtures.js'
import { startServer, type TestServer } from './server.js'

let server: TestServer
let headless: ApiClient

beforeAll(async () => {
  server = await startServer()
  headless = new ApiClient(server.baseUrl)
})

afterAll(async () => {
  await window.happyDOM?.abort?.()
  await server.stop()
})

interface Harness {
  root: HTMLElement
  app: App
  requests: { method: string; path: string; body: unknown }[]
}

const open: Harness[] = []

function newHarness(): Harness {
  const requests: Harness['requests'] = []
  const spy: typeof fetch = (input, init) => {
    const url = String(input)
    requests.push({
      method: init?.method ?? 'GET',
      path: url.replace(server.baseUrl, ''),
      body: typeof init?.body === 'string' ? JSON.parse(init.body) : null,
    })
    return fetch(input, init)
  }
  const root = document.createElement('div')
  document.body.appendChild(root)
  const app = new App(root, new ApiClient(server.baseUrl, spy))
  const harness = { root, app, requests }
  open.push(harness)
  return harness
}

afterEach(() => {
  for (const harness of open.splice(0)) {
    harness.app.dispose()
    harness.root.remove()
  }
})

async function openCampaign(harness: Harness, id: string): Promise<void> {
  setValue(harness.root, 'campaign-id-input', id)
  submitForm(harness.root, 'load-form')
  await harness.app.idle()
}

function resultPosts(harness: Harness): number {
  return harness.requests.filter((r) => r.method === 'POST' && r.path.endsWith('/results')).length
}

test('invalid measurements are blocked client-side and never sent', async () => {
  await headless.createCampaign({
    id: 'val-camp',
    config: campaignConfig({ seedCount: 1, budget: 3, rngSeed: 5 }),
    seed_observations: gridSeeds(1),
  })
  const harness = newHarness()
  const { root, app } = harness
  await openCampaign(harness, 'val-camp')
  expect(statusOf(root)).toBe('ready')

  byTestId<HTMLButtonElement>(root, 'recommend-button').click()
  await app.idle()
  expect(statusOf(root)).toBe('awaiting_result')
  const before = resultPosts(harness)

  const attempts: [string, string, string][] = [
    ['-1', '1.05', 'must be positive'],
    ['0', '1.05', 'must be positive'],
    ['abc', '1.05', 'not a number'],
    ['', '1.05', 'required'],
    ['70.4', '-0.2', 'must be positive'],
  ]
  for (const [length, diameter, message] of attempts) {
    setValue(root, 'length-input', length)
    setValue(root, 'diameter-input', diameter)
    submitForm(root, 'measurement-form')
    await app.idle()
    expect(byTestId(root, 'form-error').textContent).toContain(message)
    expect(statusOf(root)).toBe('awaiting_result')
  }
  expect(resultPosts(harness)).toBe(before)

  setValue(root, 'length-input', '70.4')
  setValue(root, 'diameter-input', '1.05')
  submitForm(root, 'measurement-form')
  await app.idle()
  expect(resultPosts(harness)).toBe(before + 1)
  expect(statusOf(root)).toBe('awaiting_comparisons')
  expect(pendingShown(root)).toBe(1)
})

test('a stale submission surfaces a conflict and reload recovers', async () => {
  await headless.createCampaign({
    id: 'conf-camp',
    config: campaignConfig({ seedCount: 1, budget: 3, rngSeed: 6 }),
    seed_observations: gridSeeds(1),
  })
  const harness = newHarness()
  const { root, app } = harness
  await openCampaign(harness, 'conf-camp')
  byTestId<HTMLButtonElement>(root, 'recommend-button').click()
  await app.idle()
  expect(statusOf(root)).toBe('awaiting_result')

  // another operator lands the result first
  const fresh = await headless.getCampaign('conf-camp')
  const rec = fresh.recommendation!
  const { length, diameter } = measurementFor(rec.point_named)
  await headless.postResult('conf-camp', rec.point, length, diameter, [], fresh.iteration)
  const snapshot = await headless.getCampaign('conf-camp')

  setValue(root, 'length-input', '70.4')
  setValue(root, 'diameter-input', '1.05')
  submitForm(root, 'measurement-form')
  await app.idle()
  const prompt = byTestId(root, 'conflict-prompt')
  expect(prompt.hidden).toBe(false)
  // the rejected submission must not have advanced the campaign
  expect(await headless.getCampaign('conf-camp')).toEqual(snapshot)

  byTestId<HTMLButtonElement>(root, 'reload-button').click()
  await app.idle()
  expect(byTestId(root, 'conflict-prompt').hidden).toBe(true)
  expect(statusOf(root)).toBe('awaiting_comparisons')
})

test('dashboard BFV and chart come straight from the trace endpoint', async () => {
  await driveHeadless(
    headless,
    'chart-camp',
    campaignConfig({ seedCount: 2, budget: 4, rngSeed: 7 }),
    gridSeeds(2),
  )
  const harness = newHarness()
  const { root } = harness
  await openCampaign(harness, 'chart-camp')

  const trace = await headless.getTraceJson('chart-camp')
  const bfvIndex = trace.columns.indexOf('BFV')
  const yIndex = trace.columns.indexOf('y')
  const lastBfv = trace.rows[trace.rows.length - 1]![bfvIndex]!

  expect(byTestId(root, 'bfv').textContent).toBe(String(lastBfv))

  const circles = root.querySelectorAll('svg[data-testid="campaign-chart"] circle')
  expect(circles.length).toBe(trace.rows.length)
  const utilities = Array.from(circles, (c) => Number(c.getAttribute('data-utility')))
  expect(utilities).toEqual(trace.rows.map((row) => row[yIndex]!))

  // the plotted BFV line never rises (pixel y grows as value falls)
  const line = byTestId<SVGPolylineElement>(root, 'bfv-line')
  const ys = (line.getAttribute('points') ?? '')
    .split(' ')
    .map((pair) => Number(pair.split(',')[1]))
  expect(ys.length).toBe(trace.rows.length)
  for (let i = 1; i < ys.length; i++) {
    expect(ys[i]!).toBeGreaterThanOrEqual(ys[i - 1]!)
  }
})

test('recommendation panel shows exact levels in native units', async () => {
  await headless.createCampaign({
    id: 'unit-camp',
    config: campaignConfig({ seedCount: 1, budget: 3, rngSeed: 4 }),
    seed_observations: gridSeeds(1),
  })
  const harness = newHarness()
  const { root, app } = harness
  await openCampaign(harness, 'unit-camp')
  byTestId<HTMLButtonElement>(root, 'recommend-button').click()
  await app.idle()

  const summary = await headless.getCampaign('unit-camp')
  const point = summary.recommendation!.point
  const expectations: [string, number[], string][] = [
    ['position', [0, 15, 30], 'mm'],
    ['angle', [10, 25], 'deg'],
    ['width', [3, 6, 9], 'mm'],
    ['flow', [80, 110, 140], 'ml/h'],
    ['speed', [43, 68, 93], 'cm/s'],
  ]
  expectations.forEach(([name, levels, unit], i) => {
    const shown = shownParam(root, name)
    expect(shown.text).toBe(`${shown.value} ${unit}`)
    expect(levels).toContain(shown.value)
    expect(shown.value).toBe(point[i]!)
  })
})

test('keyboard shortcuts judge one pair at a time and ignore typing', async () => {
  await headless.createCampaign({
    id: 'key-camp',
    config: campaignConfig({ seedCount: 3, budget: 3, rngSeed: 8 }),
    seed_observations: gridSeeds(3),
  })
  const harness = newHarness()
  const { root, app, requests } = harness
  await openCampaign(harness, 'key-camp')
  expect(statusOf(root)).toBe('awaiting_comparisons')
  expect(pendingShown(root)).toBe(3)

  const outcomesSent = () =>
    requests
      .filter((r) => r.method === 'POST' && r.path.endsWith('/comparisons'))
      .map((r) => (r.body as { outcome: string }).outcome)

  // keystrokes while typing in a field must not judge anything
  const idInput = byTestId<HTMLInputElement>(root, 'campaign-id-input')
  idInput.dispatchEvent(new KeyboardEvent('keydown', { key: '1', bubbles: true }))
  await app.idle()
  expect(outcomesSent()).toEqual([])
  expect(pendingShown(root)).toBe(3)

  pressKey('1')
  await app.idle()
  expect(outcomesSent()).toEqual(['current_better'])
  expect(pendingShown(root)).toBe(2)

  pressKey('3')
  await app.idle()
  expect(outcomesSent()).toEqual(['current_better', 'difficult_to_tell'])
  expect(pendingShown(root)).toBe(1)

  pressKey('2')
  await app.idle()
  expect(outcomesSent()).toEqual(['current_better', 'difficult_to_tell', 'prior_better'])
  expect(statusOf(root)).toBe('ready')
  expect(byTestId(root, 'comparison-panel').hidden).toBe(true)

  // an unused key changes nothing
  pressKey('9')
  await app.idle()
  expect(outcomesSent().length).toBe(3)
})

test('comparison cards show uploaded sample images', async () => {
  await headless.createCampaign({
    id: 'img-camp',
    config: campaignConfig({ seedCount: 1, budget: 3, rngSeed: 9 }),
    seed_observations: gridSeeds(1),
  })
  let summary = await headless.getCampaign('img-camp')
  summary = await headless.postRecommendation('img-camp', summary.iteration)
  const rec = summary.recommendation!
  const refA = await headless.uploadImage('img-camp', new Uint8Array([1, 2, 3, 4]))
  const refB = await headless.uploadImage('img-camp', new Uint8Array([9, 8, 7]))
  const { length, diameter } = measurementFor(rec.point_named)
  await headless.postResult('img-camp', rec.point, length, diameter, [refA, refB], summary.iteration)

  const harness = newHarness()
  const { root } = harness
  await openCampaign(harness, 'img-camp')
  expect(statusOf(root)).toBe('awaiting_comparisons')

  const leftImages = root.querySelectorAll('[data-side="left"] img')
  expect(leftImages.length).toBe(2)
  const sources = Array.from(leftImages, (img) => img.getAttribute('src'))
  expect(sources).toEqual([
    `${server.baseUrl}/campaigns/img-camp/images/${refA}`,
    `${server.baseUrl}/campaigns/img-camp/images/${refB}`,
  ])
  // the seed observation has no images and says so
  const rightNote = root.querySelector('[data-side="right"] .no-images')
  expect(rightNote?.textContent).toContain('no images')
})
