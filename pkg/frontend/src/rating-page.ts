// The rating page: each sampled term with the five answer buttons.
// Submissions post immediately; failures land in the local queue and a
// retry banner appears until everything is delivered.

import { ApiClient, RatingLevel, SurveyPayload } from './api';
import { clear, el } from './dom';
import { RatingQueue } from './queue';
import { progress, ratingItems, StoredChoices } from './viewmodel';

const RETRY_INTERVAL_MS = 4000;

export class RatingPage {
  private stored: StoredChoices = {};
  private survey: SurveyPayload | null = null;
  private banner = el('div', { class: 'banner hidden' });
  private progressBar = el('div', { class: 'progress' });
  private list = el('div', { class: 'rating-list' });
  private queue: RatingQueue;
  private retryTimer: number | undefined;

  constructor(
    private api: ApiClient,
    private iteration: number,
    private raterId: string,
  ) {
    this.queue = new RatingQueue((rating) => this.api.postRating(rating));
  }

  async mount(container: HTMLElement): Promise<void> {
    clear(container).append(
      el('h2', {}, `Iteration ${this.iteration} — rating as ${this.raterId}`),
      this.banner,
      this.progressBar,
      this.list,
    );
    try {
      this.survey = await this.api.getSurvey(this.iteration, this.raterId);
    } catch (err) {
      clear(this.list).append(
        el('p', { class: 'error' }, `could not load the survey: ${String(err)}`));
      return;
    }
    this.stored = { ...(this.survey.ratings ?? {}) };
    this.render();
  }

  private render(): void {
    if (!this.survey) return;
    const state = progress(this.survey, this.stored);
    clear(this.progressBar).append(
      el('span', {}, `${state.rated} / ${state.total} rated`),
      state.done ? el('span', { class: 'done' }, ' — all done, thank you!') : '',
    );

    clear(this.list);
    for (const item of ratingItems(this.survey, this.stored)) {
      const buttons = this.survey.levels.map((level) =>
        this.choiceButton(item.cui, level, item.selected));
      this.list.append(
        el('div', { class: 'rating-row' },
          el('div', { class: 'term' }, item.term),
          el('div', { class: 'choices' }, ...buttons)));
    }
  }

  private choiceButton(
    cui: string,
    level: RatingLevel,
    selected: number | string | null,
  ): HTMLElement {
    const isSelected = selected !== null && Number(selected) === level.level;
    return el('button', {
      class: isSelected ? 'choice selected' : 'choice',
      title: level.label,
      onclick: () => void this.choose(cui, level.level),
    }, level.label);
  }

  private async choose(cui: string, level: number): Promise<void> {
    // optimistic: show the choice at once, reconcile if delivery fails
    this.stored[cui] = level;
    this.render();
    const delivered = await this.queue.submit({
      iteration: this.iteration,
      raterId: this.raterId,
      cui,
      level,
    });
    if (delivered === null) {
      this.showBanner();
      this.scheduleRetry();
    }
  }

  private showBanner(): void {
    this.banner.classList.remove('hidden');
    this.banner.textContent =
      `${this.queue.size} rating(s) not delivered yet — retrying automatically`;
  }

  private scheduleRetry(): void {
    if (this.retryTimer !== undefined) return;
    this.retryTimer = window.setTimeout(async () => {
      this.retryTimer = undefined;
      await this.queue.flush();
      if (this.queue.size > 0) {
        this.showBanner();
        this.scheduleRetry();
      } else {
        this.banner.classList.add('hidden');
      }
    }, RETRY_INTERVAL_MS);
  }
}
