/** Expert review queue: paginated, label entry with the same seven
 * options, and by contract no tally or distribution data anywhere.
 * Non-expert tokens land on a permission-denied view. */

import { ApiClient, ApiError, ReviewItem } from "./api.js";

export interface ReviewView {
  items: ReviewItem[];      // current page
  page: number;
  pageCount: number;
  total: number;
  denied: boolean;
  toast: string | null;
}

export class ReviewSession {
  private queue: ReviewItem[] = [];
  private view: ReviewView = {
    items: [], page: 0, pageCount: 0, total: 0, denied: false, toast: null,
  };

  constructor(
    private readonly api: ApiClient,
    private readonly pageSize = 10,
    private readonly onChange: (view: ReviewView) => void = () => {},
  ) {}

  snapshot(): ReviewView {
    return { ...this.view, items: [...this.view.items] };
  }

  private update(patch: Partial<ReviewView>): void {
    this.view = { ...this.view, ...patch };
    this.onChange(this.snapshot());
  }

  async load(): Promise<void> {
    try {
      this.queue = await this.api.reviewQueue();
    } catch (err) {
      if (err instanceof ApiError && err.code === "permission_denied") {
        this.update({ denied: true, items: [], total: 0 });
        return;
      }
      throw err;
    }
    this.setPage(Math.min(this.view.page,
      Math.max(0, Math.ceil(this.queue.length / this.pageSize) - 1)));
  }

  setPage(page: number): void {
    const pageCount = Math.ceil(this.queue.length / this.pageSize);
    const bounded = Math.max(0, Math.min(page, Math.max(0, pageCount - 1)));
    this.update({
      page: bounded,
      pageCount,
      total: this.queue.length,
      items: this.queue.slice(bounded * this.pageSize, (bounded + 1) * this.pageSize),
      denied: false,
    });
  }

  async adjudicate(imageId: string, label: string): Promise<void> {
    try {
      const result = await this.api.adjudicate(imageId, label);
      this.update({ toast: `${result.image_id} -> ${result.label}` });
    } catch (err) {
      this.update({ toast: err instanceof Error ? err.message : String(err) });
      throw err;
    }
    await this.load();
  }
}
