// Wires the operator console together. The server is the single source of
// truth: every mutation refetches the summary and trace, and a conflict
// (someone else advanced the campaign) switches to a reload prompt instead
// of guessing at local state.

import { ApiClient, ApiError, ConflictError } from './api.js'
import { ComparisonPanel } from './comparison.js'
import { Dashboard } from './dashboard.js'
import type { CampaignSummary, ComparisonOutcome, TraceJson } from './types.js'

const FORM_TAGS = new Set(['INPUT', 'TEXTAREA', 'SELECT'])

export class App {
  private summary: CampaignSummary | null = null
  private trace: TraceJson | null = null
  private pendingOps = 0
  private idleWaiters: (() => void)[] = []
  private readonly keyHandler = (event: KeyboardEvent) => this.onKeyDown(event)

  private readonly doc: Document
  private readonly dashboard: Dashboard
  private readonly comparisons: ComparisonPanel
  private readonly errorBanner: HTMLElement
  private readonly conflictPrompt: HTMLElement
  private readonly campaignIdInput: HTMLInputElement
  private readonly createIdInput: HTMLInputElement
  private readonly configInput: HTMLTextAreaElement
  private readonly seedsInput: HTMLTextAreaElement

  constructor(
    root: HTMLElement,
    readonly client: ApiClient,
  ) {
    this.doc = root.ownerDocument
    const doc = this.doc

    const loader = doc.createElement('section')
    loader.className = 'loader'
    const title = doc.createElement('h1')
    title.textContent = 'expopt operator console'
    loader.appendChild(title)

    const loadForm = doc.createElement('form')
    loadForm.setAttribute('data-testid', 'load-form')
    this.campaignIdInput = doc.createElement('input')
    this.campaignIdInput.type = 'text'
    this.campaignIdInput.placeholder = 'campaign id'
    this.campaignIdInput.setAttribute('data-testid', 'campaign-id-input')
    loadForm.appendChild(this.campaignIdInput)
    const loadButton = doc.createElement('button')
    loadButton.type = 'submit'
    loadButton.textContent = 'Open campaign'
    loadForm.appendChild(loadButton)
    loadForm.addEventListener('submit', (event) => {
      event.preventDefault()
      this.openCampaign(this.campaignIdInput.value.trim())
    })
    loader.appendChild(loadForm)

    const createForm = doc.createElement('form')
    createForm.setAttribute('data-testid', 'create-form')
    this.createIdInput = doc.createElement('input')
    this.createIdInput.type = 'text'
    this.createIdInput.placeholder = 'new campaign id (optional)'
    this.createIdInput.setAttribute('data-testid', 'create-id-input')
    createForm.appendChild(this.createIdInput)
    this.configInput = doc.createElement('textarea')
    this.configInput.placeholder = 'campaign config JSON'
    this.configInput.setAttribute('data-testid', 'config-json')
    createForm.appendChild(this.configInput)
    this.seedsInput = doc.createElement('textarea')
    this.seedsInput.placeholder = 'seed observations JSON'
    this.seedsInput.setAttribute('data-testid', 'seeds-json')
    createForm.appendChild(this.seedsInput)
    const createButton = doc.createElement('button')
    createButton.type = 'submit'
    createButton.textContent = 'Create campaign'
    createForm.appendChild(createButton)
    createForm.addEventListener('submit', (event) => {
      event.preventDefault()
      this.createCampaign()
    })
    loader.appendChild(createForm)
    root.appendChild(loader)

    this.errorBanner = doc.createElement('p')
    this.errorBanner.className = 'error-banner'
    this.errorBanner.setAttribute('data-testid', 'error-banner')
    root.appendChild(this.errorBanner)

    this.conflictPrompt = doc.createElement('div')
    this.conflictPrompt.className = 'conflict-prompt'
    this.conflictPrompt.setAttribute('data-testid', 'conflict-prompt')
    this.conflictPrompt.hidden = true
    const conflictText = doc.createElement('span')
    conflictText.textContent = 'The campaign changed on the server; reload to continue. '
    this.conflictPrompt.appendChild(conflictText)
    const reloadButton = doc.createElement('button')
    reloadButton.type = 'button'
    reloadButton.textContent = 'Reload'
    reloadButton.setAttribute('data-testid', 'reload-button')
    reloadButton.addEventListener('click', () => this.reload())
    this.conflictPrompt.appendChild(reloadButton)
    root.appendChild(this.conflictPrompt)

    this.dashboard = new Dashboard(doc, {
      computeRecommendation: () => this.computeRecommendation(),
      submitMeasurement: (length, diameter) => this.submitMeasurement(length, diameter),
    })
    this.dashboard.element.hidden = true
    root.appendChild(this.dashboard.element)

    this.comparisons = new ComparisonPanel(
      doc,
      { submit: (priorIndex, outcome) => this.submitComparison(priorIndex, outcome) },
      (ref) => this.client.imageUrl(this.summary?.id ?? '', ref),
    )
    root.appendChild(this.comparisons.element)

    doc.defaultView?.addEventListener('keydown', this.keyHandler)
  }

  /** Detach global listeners; the instance must not be used afterwards. */
  dispose(): void {
    this.doc.defaultView?.removeEventListener('keydown', this.keyHandler)
  }

  /** Resolves once all in-flight requests (and their re-renders) settle. */
  idle(): Promise<void> {
    if (this.pendingOps === 0) return Promise.resolve()
    return new Promise((resolve) => this.idleWaiters.push(resolve))
  }

  get currentSummary(): CampaignSummary | null {
    return this.summary
  }

  openCampaign(id: string): void {
    if (!id) return
    this.run(async () => {
      await this.refresh(id)
    })
  }

  private createCampaign(): void {
    let config: Record<string, unknown>
    let seeds: unknown
    try {
      config = JSON.parse(this.configInput.value) as Record<string, unknown>
      seeds = this.seedsInput.value.trim() === '' ? [] : JSON.parse(this.seedsInput.value)
    } catch (err) {
      this.errorBanner.textContent = `invalid JSON: ${String(err)}`
      return
    }
    const id = this.createIdInput.value.trim()
    this.run(async () => {
      const summary = await this.client.createCampaign({
        ...(id === '' ? {} : { id }),
        config,
        seed_observations: seeds as never,
      })
      await this.refresh(summary.id)
    })
  }

  private computeRecommendation(): void {
    const summary = this.summary
    if (summary === null) return
    this.run(async () => {
      await this.client.postRecommendation(summary.id, summary.iteration)
      await this.refresh(summary.id)
    })
  }

  private submitMeasurement(length: number, diameter: number): void {
    const summary = this.summary
    const point = this.dashboard.recommendedPoint
    if (summary === null || point === null) return
    this.run(async () => {
      await this.client.postResult(summary.id, point, length, diameter, [], summary.iteration)
      await this.refresh(summary.id)
    })
  }

  private submitComparison(priorIndex: number, outcome: ComparisonOutcome): void {
    const summary = this.summary
    if (summary === null) return
    this.run(async () => {
      await this.client.postComparison(summary.id, priorIndex, outcome, summary.iteration)
      await this.refresh(summary.id)
    })
  }

  private reload(): void {
    const summary = this.summary
    if (summary === null) return
    this.conflictPrompt.hidden = true
    this.run(async () => {
      await this.refresh(summary.id)
    })
  }

  private async refresh(id: string): Promise<void> {
    const summary = await this.client.getCampaign(id)
    const trace = await this.client.getTraceJson(id)
    this.summary = summary
    this.trace = trace
    this.conflictPrompt.hidden = true
    this.errorBanner.textContent = ''
    this.campaignIdInput.value = id
    this.dashboard.element.hidden = false
    this.dashboard.update(summary, trace)
    this.comparisons.update(summary)
  }

  private onKeyDown(event: KeyboardEvent): void {
    const target = event.target as HTMLElement | null
    if (target && (FORM_TAGS.has(target.tagName) || target.isContentEditable)) return
    if (this.comparisons.handleKey(event.key)) event.preventDefault()
  }

  private run(op: () => Promise<void>): void {
    this.pendingOps++
    void op()
      .catch((err) => this.handleError(err))
      .finally(() => {
        this.pendingOps--
        if (this.pendingOps === 0) {
          const waiters = this.idleWaiters
          this.idleWaiters = []
          for (const resolve of waiters) resolve()
        }
      })
  }

  private handleError(err: unknown): void {
    if (err instanceof ConflictError) {
      this.conflictPrompt.hidden = false
      return
    }
    if (err instanceof ApiError) {
      this.errorBanner.textContent = err.message
      return
    }
    this.errorBanner.textContent = String(err)
  }
}
