/**
 * Debounced price what-if: slider moves post to the service's closed-form
 * endpoint, never computing a shifted cost locally. Superseded requests are
 * dropped so a fast slider cannot interleave stale overlays.
 */

import type { ApiClient } from "./api.js";
import type { FrontPayload } from "./types.js";

export interface WhatIfState {
  overlay: FrontPayload | null;
  /** designs of the base selection that exceed the budget after the shift */
  overBudget: string[];
}

export class PriceWhatIf {
  private pending: ReturnType<typeof setTimeout> | null = null;
  private sequence = 0;

  constructor(
    private client: ApiClient,
    private jobId: string,
    private material: string,
    private onUpdate: (state: WhatIfState) => void,
    private componentClass?: string,
    private debounceMs = 150,
  ) {}

  /** Slider callback; only the last value within the debounce window runs. */
  slide(price: number, budget: number | null): void {
    if (this.pending !== null) clearTimeout(this.pending);
    this.pending = setTimeout(() => {
      this.pending = null;
      void this.fire(price, budget);
    }, this.debounceMs);
  }

  private async fire(price: number, budget: number | null): Promise<void> {
    const ticket = ++this.sequence;
    const resp = await this.client.priceWhatIf(
      this.jobId, this.material, price, this.componentClass);
    if (ticket !== this.sequence) return; // superseded while in flight
    const front = resp.value.front;
    const overBudget = budget === null ? [] : front.points
      .filter((p) => p.design.cost_usd > budget)
      .map((p) => clusterKey(p.design.materials));
    this.onUpdate({ overlay: front, overBudget });
  }
}

function clusterKey(materials: Record<string, string>): string {
  return [materials.wall, materials.foundation, materials.roof,
          materials.cover].join("/");
}
