// Operator control: refit weights on the collected ratings and open the
// next survey round.

import { AdvanceRequest, ApiClient } from './api';
import { clear, el } from './dom';
import { advanceState, advanceSummary } from './viewmodel';

export class AdvanceControl {
  private output = el('div', { class: 'advance-output' });

  constructor(private api: ApiClient, private onAdvanced: () => void) {}

  async mount(container: HTMLElement): Promise<void> {
    const iterations = await this.api.listIterations();
    const state = advanceState(iterations);

    const strategy = el('select', {},
      el('option', { value: 'smbo' }, 'model-based (smbo)'),
      el('option', { value: 'grid' }, 'grid'),
      el('option', { value: 'random' }, 'random'));
    const budget = el('input', { type: 'number', value: '200', min: '2' });
    const seed = el('input', { type: 'number', value: '0' });
    const rater = el('input', { type: 'text', placeholder: 'reference rater (optional)' });
    const submit = el('button', {
      onclick: () => void this.advance({
        strategy: strategy.value,
        budget: Number(budget.value),
        seed: Number(seed.value),
        ...(rater.value ? { raterId: rater.value } : {}),
      }),
    }, 'advance to next iteration');
    if (!state.enabled) submit.setAttribute('disabled', 'disabled');

    clear(container).append(
      el('h3', {}, 'Advance'),
      el('p', { class: state.enabled ? 'hint' : 'hint disabled-reason' }, state.reason),
      el('div', { class: 'advance-form' },
        el('label', {}, 'strategy ', strategy),
        el('label', {}, 'budget ', budget),
        el('label', {}, 'seed ', seed),
        el('label', {}, 'rater ', rater),
        submit),
      this.output,
    );
  }

  private async advance(request: AdvanceRequest): Promise<void> {
    clear(this.output).append(el('p', {}, 'fitting weights...'));
    try {
      const result = await this.api.postAdvance(request);
      clear(this.output).append(
        el('p', { class: 'success' }, advanceSummary(result)));
      this.onAdvanced();
    } catch (err) {
      // surfaced, nothing changed server-side
      clear(this.output).append(
        el('p', { class: 'error' }, `advance failed: ${String(err)}`));
    }
  }
}
