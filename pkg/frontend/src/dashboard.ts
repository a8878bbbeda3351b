// Campaign dashboard: status banner, the recommended next setting in native
// units, the measurement entry form, and the utility/BFV chart. The BFV
// readout always comes from the trace endpoint, never from arithmetic here.

import { buildChartModel, renderChart } from './chart.js'
import { formatNumber, formatPoint } from './format.js'
import type { CampaignSummary, TraceJson } from './types.js'
import { validateMeasurement } from './validate.js'

export interface DashboardHandlers {
  computeRecommendation(): void
  submitMeasurement(length: number, diameter: number): void
}

export class Dashboard {
  readonly element: HTMLElement
  private readonly banner: HTMLElement
  private readonly recommendationPanel: HTMLElement
  private readonly form: HTMLFormElement
  private readonly lengthInput: HTMLInputElement
  private readonly diameterInput: HTMLInputElement
  private readonly formError: HTMLElement
  private readonly recommendButton: HTMLButtonElement
  private readonly chartHost: HTMLElement
  private readonly bfvReadout: HTMLElement
  private summary: CampaignSummary | null = null

  constructor(
    private readonly doc: Document,
    private readonly handlers: DashboardHandlers,
  ) {
    this.element = doc.createElement('section')
    this.element.className = 'dashboard'

    this.banner = doc.createElement('p')
    this.banner.className = 'status-banner'
    this.banner.setAttribute('data-testid', 'status-banner')
    this.element.appendChild(this.banner)

    this.recommendButton = doc.createElement('button')
    this.recommendButton.type = 'button'
    this.recommendButton.textContent = 'Compute next recommendation'
    this.recommendButton.setAttribute('data-testid', 'recommend-button')
    this.recommendButton.addEventListener('click', () => handlers.computeRecommendation())
    this.element.appendChild(this.recommendButton)

    this.recommendationPanel = doc.createElement('div')
    this.recommendationPanel.className = 'recommendation-panel'
    this.recommendationPanel.setAttribute('data-testid', 'recommendation-panel')
    this.element.appendChild(this.recommendationPanel)

    this.form = doc.createElement('form')
    this.form.setAttribute('data-testid', 'measurement-form')
    this.lengthInput = this.numberField('median length (µm)', 'length-input')
    this.diameterInput = this.numberField('median diameter (µm)', 'diameter-input')
    this.formError = doc.createElement('p')
    this.formError.className = 'form-error'
    this.formError.setAttribute('data-testid', 'form-error')
    this.form.appendChild(this.formError)
    const submit = doc.createElement('button')
    submit.type = 'submit'
    submit.textContent = 'Record measurement'
    this.form.appendChild(submit)
    this.form.addEventListener('submit', (event) => {
      event.preventDefault()
      this.trySubmit()
    })
    this.element.appendChild(this.form)

    this.bfvReadout = doc.createElement('p')
    this.bfvReadout.className = 'bfv-readout'
    this.element.appendChild(this.bfvReadout)

    this.chartHost = doc.createElement('div')
    this.chartHost.className = 'chart-host'
    this.element.appendChild(this.chartHost)
  }

  private numberField(label: string, testId: string): HTMLInputElement {
    const wrapper = this.doc.createElement('label')
    wrapper.textContent = label
    const input = this.doc.createElement('input')
    input.type = 'text'
    input.setAttribute('data-testid', testId)
    wrapper.appendChild(input)
    this.form.appendChild(wrapper)
    return input
  }

  private trySubmit(): void {
    const checked = validateMeasurement({
      length: this.lengthInput.value,
      diameter: this.diameterInput.value,
    })
    if (!checked.ok) {
      this.formError.textContent = checked.errors.join('; ')
      return
    }
    this.formError.textContent = ''
    this.handlers.submitMeasurement(checked.length, checked.diameter)
  }

  update(summary: CampaignSummary, trace: TraceJson): void {
    this.summary = summary
    this.banner.textContent =
      `${summary.id}: ${summary.status} — iteration ${summary.iterations_done}` +
      ` of ${summary.iteration_budget}, ${summary.iteration} experiments recorded`
    this.banner.setAttribute('data-status', summary.status)

    this.recommendButton.hidden = summary.status !== 'ready'

    this.recommendationPanel.textContent = ''
    const rec = summary.recommendation
    const showRec = summary.status === 'awaiting_result' && rec !== null
    this.recommendationPanel.hidden = !showRec
    if (showRec && rec !== null) {
      const heading = this.doc.createElement('h2')
      heading.textContent = `Recommended setting for experiment ${rec.iteration + 1}`
      this.recommendationPanel.appendChild(heading)
      const list = this.doc.createElement('dl')
      for (const { name, text } of formatPoint(summary.space, rec.point)) {
        const dt = this.doc.createElement('dt')
        dt.textContent = name
        const dd = this.doc.createElement('dd')
        dd.setAttribute('data-param', name)
        dd.textContent = text
        list.appendChild(dt)
        list.appendChild(dd)
      }
      this.recommendationPanel.appendChild(list)
      if (rec.duplicate_flag) {
        const warning = this.doc.createElement('p')
        warning.textContent = 'note: this setting repeats an earlier experiment'
        this.recommendationPanel.appendChild(warning)
      }
    }

    this.form.hidden = summary.status !== 'awaiting_result'
    if (this.form.hidden) {
      this.lengthInput.value = ''
      this.diameterInput.value = ''
      this.formError.textContent = ''
    }

    const model = buildChartModel(trace)
    this.bfvReadout.textContent = ''
    const label = this.doc.createElement('span')
    label.textContent = 'best found value: '
    const value = this.doc.createElement('span')
    value.setAttribute('data-testid', 'bfv')
    value.textContent = model.lastBfv === null ? 'n/a' : formatNumber(model.lastBfv)
    this.bfvReadout.appendChild(label)
    this.bfvReadout.appendChild(value)

    this.chartHost.textContent = ''
    this.chartHost.appendChild(renderChart(this.doc, model))
  }

  /** The point the form will echo back with the measurement. */
  get recommendedPoint(): number[] | null {
    const rec = this.summary?.recommendation ?? null
    return rec === null ? null : [...rec.point]
  }
}
