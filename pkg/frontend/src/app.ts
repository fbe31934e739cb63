// Single-page app shell: hash routing between the home screen (iterations
// plus advance control), the rating page and the report dashboard.

import { ApiClient } from './api';
import { AdvanceControl } from './advance-control';
import { clear, el } from './dom';
import { RatingPage } from './rating-page';
import { ReportView } from './report-view';

const api = new ApiClient();

interface Route {
  page: 'home' | 'rate' | 'report';
  iteration: number;
  raterId: string;
}

function parseHash(hash: string): Route {
  const [path, query = ''] = hash.replace(/^#\/?/, '').split('?');
  const params = new URLSearchParams(query);
  const raterId = params.get('rater') ?? '';
  const [page, iteration] = path.split('/');
  if (page === 'rate' || page === 'report') {
    return { page, iteration: Number(iteration) || 1, raterId };
  }
  return { page: 'home', iteration: 1, raterId };
}

async function renderHome(container: HTMLElement): Promise<void> {
  const advanceHost = el('div', {});
  const listHost = el('div', {});
  clear(container).append(
    el('h2', {}, 'Survey rounds'),
    listHost, advanceHost);

  const iterations = await api.listIterations();
  if (iterations.length === 0) {
    listHost.append(el('p', {},
      'No rounds yet — score a corpus and draw a sample first.'));
    return;
  }

  const raterBox = el('input', {
    type: 'text', placeholder: 'your rater id', id: 'rater-id',
  });
  const rows = iterations.map((it) => {
    const rateLink = el('a', {
      href: '#',
      onclick: (ev: Event) => {
        ev.preventDefault();
        const rater = raterBox.value.trim();
        if (!rater) {
          raterBox.focus();
          return;
        }
        window.location.hash = `#/rate/${it.iteration}?rater=${encodeURIComponent(rater)}`;
      },
    }, it.status === 'open' ? 'rate' : 'view');
    return el('tr', {},
      el('td', {}, String(it.iteration)),
      el('td', {}, it.status),
      el('td', {}, it.weights.join(', ')),
      el('td', {}, `${it.ratingsCount} from ${it.raters.length} rater(s)`),
      el('td', {}, rateLink, ' | ',
        el('a', { href: `#/report/${it.iteration}` }, 'report')));
  });
  listHost.append(
    el('p', {}, 'rate as: ', raterBox),
    el('table', { class: 'iterations' },
      el('thead', {}, el('tr', {},
        el('th', {}, 'iteration'), el('th', {}, 'status'),
        el('th', {}, 'weights'), el('th', {}, 'ratings'), el('th', {}, ''))),
      el('tbody', {}, ...rows)));

  await new AdvanceControl(api, () => void renderHome(container)).mount(advanceHost);
}

async function route(): Promise<void> {
  const container = document.getElementById('app');
  if (!container) return;
  const { page, iteration, raterId } = parseHash(window.location.hash);
  try {
    if (page === 'rate') {
      if (!raterId) {
        window.location.hash = '#/';
        return;
      }
      await new RatingPage(api, iteration, raterId).mount(container);
    } else if (page === 'report') {
      await new ReportView(api, iteration).mount(container);
    } else {
      await renderHome(container);
    }
  } catch (err) {
    clear(container).append(
      el('p', { class: 'error' }, `something went wrong: ${String(err)}`));
  }
}

window.addEventListener('hashchange', () => void route());
window.addEventListener('DOMContentLoaded', () => void route());
