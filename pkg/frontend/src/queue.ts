// Outbound rating queue: a rating that fails to send is kept locally and
// retried, so no choice is ever lost to a flaky connection.

import type { RatingRequest, RatingResponse } from './api';

export type RatingSender = (rating: RatingRequest) => Promise<RatingResponse>;

const keyOf = (r: RatingRequest) => `${r.iteration}:${r.raterId}:${r.cui}`;

export class RatingQueue {
  private pending = new Map<string, RatingRequest>();

  constructor(private sender: RatingSender) {}

  get size(): number {
    return this.pending.size;
  }

  snapshot(): RatingRequest[] {
    return [...this.pending.values()];
  }

  /**
   * Try to deliver immediately; on failure the rating is queued (replacing
   * any older pending choice for the same concept) and null is returned.
   */
  async submit(rating: RatingRequest): Promise<RatingResponse | null> {
    try {
      const response = await this.sender(rating);
      this.pending.delete(keyOf(rating));
      return response;
    } catch {
      this.pending.set(keyOf(rating), rating);
      return null;
    }
  }

  /** Retry everything pending; failures stay queued.  Returns deliveries. */
  async flush(): Promise<number> {
    let delivered = 0;
    for (const [key, rating] of [...this.pending.entries()]) {
      try {
        await this.sender(rating);
        this.pending.delete(key);
        delivered += 1;
      } catch {
        // still unreachable; keep for the next flush
      }
    }
    return delivered;
  }
}
