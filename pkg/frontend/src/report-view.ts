// The operator dashboard: agreement values, per-rater bucket histograms and
// the weight evolution across iterations.

import { ApiClient } from './api';
import { clear, el } from './dom';
import { alphaRows, BUCKETS, histogramBars, weightRows } from './viewmodel';

export class ReportView {
  constructor(private api: ApiClient, private iteration: number) {}

  async mount(container: HTMLElement): Promise<void> {
    clear(container).append(el('p', {}, 'loading report...'));
    try {
      const [report, iterations] = await Promise.all([
        this.api.getReport(this.iteration),
        this.api.listIterations(),
      ]);
      clear(container).append(
        el('h2', {}, `Iteration ${this.iteration} report`),
        el('p', {},
          `weights in effect: ${report.weights.join(', ')} `,
          el('small', {}, '(brevity, frequency, german, dictionary)')),
        this.alphaTable(report),
        this.histograms(report),
        el('h3', {}, 'Weight evolution'),
        this.weightTable(iterations),
        ...report.notes.map((note) => el('p', { class: 'note' }, note)),
        el('button', { onclick: () => void this.mount(container) }, 'refresh'),
      );
    } catch (err) {
      clear(container).append(
        el('p', { class: 'error' }, `could not load the report: ${String(err)}`));
    }
  }

  private alphaTable(report: Parameters<typeof alphaRows>[0]): HTMLElement {
    const rows = alphaRows(report).map((row) =>
      el('tr', {}, el('td', {}, row.label), el('td', {}, row.value)));
    return el('table', { class: 'alphas' },
      el('thead', {}, el('tr', {},
        el('th', {}, 'agreement'), el('th', {}, "Krippendorff's alpha"))),
      el('tbody', {}, ...rows));
  }

  private histograms(report: Parameters<typeof histogramBars>[0]): HTMLElement {
    const bars = histogramBars(report);
    const raters = [...new Set(bars.map((b) => b.rater))];
    const sections = raters.map((rater) => {
      const own = bars.filter((b) => b.rater === rater);
      return el('div', { class: 'histogram' },
        el('h4', {}, rater),
        ...own.map((bar) =>
          el('div', { class: 'bar-row' },
            el('span', { class: 'bucket-label' }, bar.bucket),
            el('div', { class: 'bar-track' },
              el('div', {
                class: `bar bar-${bar.bucket.toLowerCase()}`,
                style: `width: ${bar.pct}%`,
              })),
            el('span', { class: 'bar-count' },
              `${bar.count} (scores ${bar.range})`))));
    });
    return el('div', {},
      el('h3', {}, `Rating histograms (${BUCKETS.join(' / ')})`),
      ...sections);
  }

  private weightTable(
    iterations: Parameters<typeof weightRows>[0],
  ): HTMLElement {
    const rows = weightRows(iterations).map((row) =>
      el('tr', {},
        el('td', {}, String(row.iteration)),
        el('td', {}, row.weights),
        el('td', {}, row.status),
        el('td', {}, String(row.ratings))));
    return el('table', { class: 'weights' },
      el('thead', {}, el('tr', {},
        el('th', {}, 'iteration'), el('th', {}, 'weights'),
        el('th', {}, 'status'), el('th', {}, 'ratings'))),
      el('tbody', {}, ...rows));
  }
}
