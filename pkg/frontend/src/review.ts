// Review queue controller: advance through pending synthetic records,
// record single-keystroke verdicts, never mutate anything locally.

import { ApiClient } from "./api.js";
import type { SceneSummary } from "./types.js";

export type Verdict = "accept" | "reject";

export const KEY_BINDINGS: Record<string, Verdict> = {
  a: "accept",
  r: "reject",
};

export class ReviewController {
  current: SceneSummary | null = null;
  reviewed = 0;
  exhausted = false;

  constructor(private readonly api: ApiClient) {}

  async advance(): Promise<SceneSummary | null> {
    this.current = await this.api.reviewNext();
    this.exhausted = this.current === null;
    return this.current;
  }

  /** Map a key press to a verdict; unbound keys do nothing. */
  verdictForKey(key: string): Verdict | null {
    return KEY_BINDINGS[key.toLowerCase()] ?? null;
  }

  async recordVerdict(verdict: Verdict, note = ""): Promise<SceneSummary | null> {
    if (this.current === null) return null;
    await this.api.postReview(this.current.record_id, verdict, note);
    this.reviewed += 1;
    return this.advance();
  }

  async handleKey(key: string): Promise<boolean> {
    const verdict = this.verdictForKey(key);
    if (verdict === null || this.current === null) return false;
    await this.recordVerdict(verdict);
    return true;
  }
}
