// Pure view-model functions: service payloads in, renderable rows out.
// Everything here is unit-tested against the shared API contract fixture.

import type {
  AdvanceResponse,
  IterationInfo,
  ReportPayload,
  SurveyPayload,
} from './api';

export const BUCKETS = ['Bad', 'Moderate', 'Good'] as const;

/** Choices already stored on the server (or queued), keyed by cui. */
export type StoredChoices = Record<string, number | string>;

export interface RatingItemVM {
  cui: string;
  term: string;
  selected: number | string | null;
}

export function ratingItems(
  survey: SurveyPayload,
  stored: StoredChoices,
): RatingItemVM[] {
  return survey.items.map((item) => ({
    cui: item.cui,
    term: item.term,
    selected: item.cui in stored ? stored[item.cui] : null,
  }));
}

export interface Progress {
  rated: number;
  total: number;
  done: boolean;
}

export function progress(survey: SurveyPayload, stored: StoredChoices): Progress {
  const rated = survey.items.filter((item) => item.cui in stored).length;
  return { rated, total: survey.items.length, done: rated === survey.items.length };
}

const SCORE_KEY = /score|^gs$|bucket|factor|rank|weight/i;

/**
 * Blinding guard: keys in a rating-page payload that would leak ranking
 * information to raters.  An empty result means the payload is safe.
 */
export function scoreLeaks(payload: unknown, path = ''): string[] {
  if (Array.isArray(payload)) {
    return payload.flatMap((entry, i) => scoreLeaks(entry, `${path}[${i}]`));
  }
  if (payload && typeof payload === 'object') {
    const leaks: string[] = [];
    for (const [key, value] of Object.entries(payload)) {
      if (SCORE_KEY.test(key)) leaks.push(path ? `${path}.${key}` : key);
      leaks.push(...scoreLeaks(value, path ? `${path}.${key}` : key));
    }
    return leaks;
  }
  return [];
}

export interface HistogramBarVM {
  rater: string;
  bucket: string;
  count: number;
  pct: number;
  range: string;
}

export function histogramBars(report: ReportPayload): HistogramBarVM[] {
  const bars: HistogramBarVM[] = [];
  for (const [rater, hist] of Object.entries(report.histograms)) {
    const total = Object.values(hist.counts).reduce((a, b) => a + b, 0);
    for (const bucket of BUCKETS) {
      const count = hist.counts[bucket] ?? 0;
      const range = hist.scoreRanges[bucket];
      bars.push({
        rater,
        bucket,
        count,
        pct: total > 0 ? Math.round((100 * count) / total) : 0,
        range: range ? `${range[0].toFixed(3)}..${range[1].toFixed(3)}` : '-',
      });
    }
  }
  return bars;
}

export interface AlphaRowVM {
  label: string;
  value: string;
}

export function formatAlpha(alpha: number | null): string {
  if (alpha === null) return 'n/a';
  return `${alpha.toFixed(4)} (${(alpha * 100).toFixed(2)}%)`;
}

export function alphaRows(report: ReportPayload): AlphaRowVM[] {
  const rows: AlphaRowVM[] = [
    { label: 'all raters', value: formatAlpha(report.alphaAllRaters) },
  ];
  for (const [rater, alpha] of Object.entries(report.alphaMetricVsRater)) {
    rows.push({ label: `metric vs ${rater}`, value: formatAlpha(alpha) });
  }
  return rows;
}

export interface WeightRowVM {
  iteration: number;
  weights: string;
  status: string;
  ratings: number;
}

export function weightRows(iterations: IterationInfo[]): WeightRowVM[] {
  return iterations.map((it) => ({
    iteration: it.iteration,
    weights: it.weights.join(', '),
    status: it.status,
    ratings: it.ratingsCount,
  }));
}

/** The line the advance control shows once the service returns new weights. */
export function advanceSummary(result: AdvanceResponse): string {
  return (
    `iteration ${result.iteration} opened with weights ${result.weights.join(', ')} `
    + `(objective ${result.bestValue.toFixed(4)} after `
    + `${result.evaluations} ${result.strategy} evaluations)`
  );
}

export interface AdvanceStateVM {
  enabled: boolean;
  reason: string;
  iteration: number | null;
}

/** The advance button is live only when the current round has ratings. */
export function advanceState(iterations: IterationInfo[]): AdvanceStateVM {
  if (iterations.length === 0) {
    return { enabled: false, reason: 'no survey round is open yet', iteration: null };
  }
  const current = iterations[iterations.length - 1];
  if (current.ratingsCount === 0) {
    return {
      enabled: false,
      reason: `iteration ${current.iteration} has no ratings yet`,
      iteration: current.iteration,
    };
  }
  return {
    enabled: true,
    reason: `refit on ${current.ratingsCount} ratings from iteration ${current.iteration}`,
    iteration: current.iteration,
  };
}
