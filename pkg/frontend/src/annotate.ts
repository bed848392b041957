/** Annotator session: one task on screen, seven label buttons, a flag
 * dialog, and a qualification badge that mirrors the server's response.
 *
 * The server is the only source of truth: nothing updates optimistically,
 * every view change follows an acknowledged response. Duplicate and
 * image-not-open rejections surface as a toast and auto-advance.
 */

import { ApiClient, ApiError, QualificationBadge, Task } from "./api.js";

export interface AnnotateView {
  task: Task | null;          // null = idle (no work)
  badge: QualificationBadge | null;
  toast: string | null;
  lastOutcome: string | null; // e.g. "Settled(II)" after a settling submission
  busy: boolean;
}

export class AnnotatorSession {
  private view: AnnotateView = {
    task: null, badge: null, toast: null, lastOutcome: null, busy: false,
  };

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (view: AnnotateView) => void = () => {},
  ) {}

  snapshot(): AnnotateView {
    return { ...this.view };
  }

  private update(patch: Partial<AnnotateView>): void {
    this.view = { ...this.view, ...patch };
    this.onChange(this.snapshot());
  }

  async start(): Promise<void> {
    await this.advance();
  }

  private async advance(): Promise<void> {
    this.update({ busy: true });
    const { task } = await this.api.nextTask();
    this.update({ task, busy: false });
  }

  async submit(label: string): Promise<void> {
    if (!this.view.task || this.view.busy) return;
    const imageId = this.view.task.image_id;
    this.update({ busy: true, toast: null });
    try {
      const result = await this.api.submitAnnotation(imageId, label);
      const outcome = result.settled_label
        ? `${result.new_status}(${result.settled_label})`
        : result.new_status;
      this.update({ badge: result.qualification, lastOutcome: outcome });
    } catch (err) {
      if (err instanceof ApiError
          && (err.code === "duplicate_annotation" || err.code === "image_not_open")) {
        this.update({ toast: `Skipped: ${err.code.replace(/_/g, " ")}` });
      } else {
        this.update({ busy: false, toast: message(err) });
        throw err;
      }
    }
    await this.advance();
  }

  async flag(kind: string, text: string): Promise<void> {
    if (!this.view.task || this.view.busy) return;
    const imageId = this.view.task.image_id;
    this.update({ busy: true, toast: null });
    try {
      const result = await this.api.fileFlag(imageId, kind, text);
      this.update({ lastOutcome: `Flagged(${result.status})` });
    } catch (err) {
      this.update({ busy: false, toast: message(err) });
      throw err;
    }
    await this.advance();
  }
}

function message(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
