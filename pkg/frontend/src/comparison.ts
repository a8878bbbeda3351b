// Pairwise comparison workflow: pending pairs are presented strictly one at
// a time, side by side, with a three-way judgement. Keyboard: 1 left better,
// 2 right better, 3 difficult to tell.

import { formatPoint } from './format.js'
import type {
  CampaignSummary,
  ComparisonOutcome,
  ObservationView,
  PendingComparison,
} from './types.js'

const KEY_OUTCOMES: Record<string, ComparisonOutcome> = {
  '1': 'current_better',
  '2': 'prior_better',
  '3': 'difficult_to_tell',
}

/** Three images per magnification tier, mirroring the side-by-side montage. */
export function montageTiers(refs: string[]): string[][] {
  const tiers: string[][] = []
  for (let i = 0; i < refs.length; i += 3) {
    tiers.push(refs.slice(i, i + 3))
  }
  return tiers
}

export interface ComparisonHandlers {
  submit(priorIndex: number, outcome: ComparisonOutcome): void
}

export class ComparisonPanel {
  readonly element: HTMLElement
  private pending: PendingComparison | null = null

  constructor(
    private readonly doc: Document,
    private readonly handlers: ComparisonHandlers,
    private readonly imageUrl: (ref: string) => string,
  ) {
    this.element = doc.createElement('section')
    this.element.className = 'comparison-panel'
    this.element.setAttribute('data-testid', 'comparison-panel')
    this.element.hidden = true
  }

  get active(): boolean {
    return this.pending !== null
  }

  /** The pair currently on screen, if any. */
  get currentPair(): PendingComparison | null {
    return this.pending
  }

  update(summary: CampaignSummary): void {
    const queue = summary.pending_comparisons
    this.pending = queue.length > 0 ? queue[0]! : null
    this.element.hidden = this.pending === null
    this.element.textContent = ''
    if (this.pending === null) return

    const heading = this.doc.createElement('h2')
    heading.textContent = 'Which sample is better?'
    this.element.appendChild(heading)

    const progress = this.doc.createElement('p')
    progress.setAttribute('data-testid', 'comparison-progress')
    progress.textContent = `pair 1 of ${queue.length}`
    this.element.appendChild(progress)

    const row = this.doc.createElement('div')
    row.className = 'comparison-row'
    row.appendChild(this.card(summary, this.pending.current, 'left'))
    row.appendChild(this.card(summary, this.pending.prior, 'right'))
    this.element.appendChild(row)

    const controls = this.doc.createElement('div')
    controls.className = 'comparison-controls'
    controls.appendChild(this.button('Left is better', '1', 'current_better'))
    controls.appendChild(this.button('Right is better', '2', 'prior_better'))
    controls.appendChild(this.button('Difficult to tell', '3', 'difficult_to_tell'))
    this.element.appendChild(controls)
  }

  /** Returns true when the key resolved the on-screen pair. */
  handleKey(key: string): boolean {
    const outcome = KEY_OUTCOMES[key]
    if (!outcome || this.pending === null) return false
    this.handlers.submit(this.pending.prior_index, outcome)
    return true
  }

  private button(label: string, key: string, outcome: ComparisonOutcome): HTMLButtonElement {
    const button = this.doc.createElement('button')
    button.type = 'button'
    button.textContent = `${label} [${key}]`
    button.setAttribute('data-outcome', outcome)
    button.addEventListener('click', () => {
      if (this.pending !== null) this.handlers.submit(this.pending.prior_index, outcome)
    })
    return button
  }

  private card(summary: CampaignSummary, view: ObservationView, side: string): HTMLElement {
    const card = this.doc.createElement('div')
    card.className = 'comparison-card'
    card.setAttribute('data-side', side)
    card.setAttribute('data-observation', String(view.index))

    const title = this.doc.createElement('h3')
    title.textContent = `experiment ${view.index + 1} (${view.batch})`
    card.appendChild(title)

    if (view.image_refs.length > 0) {
      for (const tier of montageTiers(view.image_refs)) {
        const tierRow = this.doc.createElement('div')
        tierRow.className = 'montage-tier'
        for (const ref of tier) {
          const img = this.doc.createElement('img')
          img.src = this.imageUrl(ref)
          img.alt = `sample image ${ref}`
          tierRow.appendChild(img)
        }
        card.appendChild(tierRow)
      }
    } else {
      const note = this.doc.createElement('p')
      note.className = 'no-images'
      note.textContent = 'no images uploaded; judge from the lab bench'
      card.appendChild(note)
    }

    const settings = this.doc.createElement('dl')
    for (const { name, text } of formatPoint(summary.space, view.point)) {
      const dt = this.doc.createElement('dt')
      dt.textContent = name
      const dd = this.doc.createElement('dd')
      dd.textContent = text
      settings.appendChild(dt)
      settings.appendChild(dd)
    }
    card.appendChild(settings)
    return card
  }
}
