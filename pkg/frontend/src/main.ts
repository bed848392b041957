/** Browser entry point: token/role sign-in, then one of three screens.
 * All state comes from server responses; the UI never recomputes
 * qualification or consensus on its own. */

import { AnnotatorSession, AnnotateView } from "./annotate.js";
import { ApiClient } from "./api.js";
import {
  heatmapModel,
  renderConfusion,
  renderCrowdCurve,
  renderHeatmap,
  EMPTY_PLACEHOLDER,
} from "./dashboard.js";
import { FLAG_KINDS, LABEL_OPTIONS } from "./labels.js";
import { ReviewSession, ReviewView } from "./review.js";

function $(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function labelButtonsHtml(prefix: string): string {
  return LABEL_OPTIONS.map((option) =>
    `<button class="label-btn" data-role="${prefix}" data-label="${option.value}"
             title="${option.description}">
       ${option.swatch ? `<span class="swatch" style="background:${option.swatch}"></span>` : ""}
       ${option.display}
     </button>`).join("");
}

function badgeHtml(view: AnnotateView): string {
  if (!view.badge) return `<span class="badge">unscored</span>`;
  const pct = (100 * view.badge.windowed_agreement).toFixed(0);
  return `<span class="badge state-${view.badge.state}">${view.badge.state}</span>
          <span class="badge">window ${pct}% over ${view.badge.scored_total} scored</span>`;
}

function startAnnotator(api: ApiClient): void {
  const screen = $("annotate");
  const session = new AnnotatorSession(api, (view) => {
    $("badge").innerHTML = badgeHtml(view);
    $("toast").textContent = view.toast ?? "";
    $("outcome").textContent = view.lastOutcome ?? "";
    if (!view.task) {
      $("task").innerHTML = `<div class="placeholder">No work available. Check back later.</div>`;
      return;
    }
    $("task").innerHTML = `
      <img id="task-image" src="${view.task.file_url}" alt="image to annotate">
      <div class="task-meta">${view.task.image_id} (${view.task.reason})</div>`;
  });
  screen.querySelectorAll<HTMLButtonElement>("[data-role=annotate]").forEach((btn) => {
    btn.addEventListener("click", () => void session.submit(btn.dataset.label!));
  });
  $("flag-submit").addEventListener("click", () => {
    const kind = ($("flag-kind") as HTMLSelectElement).value;
    const text = ($("flag-text") as HTMLTextAreaElement).value;
    void session.flag(kind, text);
  });
  void session.start();
}

function startReviewer(api: ApiClient): void {
  const render = (view: ReviewView) => {
    if (view.denied) {
      $("queue").innerHTML = `<div class="placeholder">Expert role required.</div>`;
      return;
    }
    $("queue-meta").textContent =
      `${view.total} in queue, page ${view.page + 1}/${Math.max(view.pageCount, 1)}`;
    $("queue").innerHTML = view.items.map((item) => `
      <div class="review-item" data-image="${item.image_id}">
        <img src="${item.file_url}" alt="${item.image_id}">
        <div>${item.image_id} <span class="reason">${item.reason}</span></div>
        <div class="review-labels">${labelButtonsHtml("review")}</div>
      </div>`).join("") || EMPTY_PLACEHOLDER;
    $("queue").querySelectorAll<HTMLButtonElement>("[data-role=review]").forEach((btn) => {
      const imageId = (btn.closest(".review-item") as HTMLElement).dataset.image!;
      btn.addEventListener("click", () => void session.adjudicate(imageId, btn.dataset.label!));
    });
  };
  const session = new ReviewSession(api, 10, render);
  $("page-prev").addEventListener("click", () => session.setPage(session.snapshot().page - 1));
  $("page-next").addEventListener("click", () => session.setPage(session.snapshot().page + 1));
  void session.load();
}

async function startDashboard(api: ApiClient): Promise<void> {
  try {
    const irr = await api.irrReport();
    $("irr").innerHTML = renderHeatmap(heatmapModel(irr));
  } catch {
    $("irr").innerHTML = EMPTY_PLACEHOLDER;
  }
  const a = ($("confusion-a") as HTMLInputElement).value || "expert1";
  const b = ($("confusion-b") as HTMLInputElement).value || "consensus";
  try {
    $("confusion").innerHTML = renderConfusion(await api.confusion(a, b));
  } catch {
    $("confusion").innerHTML = EMPTY_PLACEHOLDER;
  }
  try {
    const curve = await api.crowdCurve("expert1", [3, 6, 12, 24, 48, 96]);
    $("curve").innerHTML = renderCrowdCurve(curve.points);
  } catch {
    $("curve").innerHTML = EMPTY_PLACEHOLDER;
  }
}

function boot(): void {
  $("annotate-labels").innerHTML = labelButtonsHtml("annotate");
  $("flag-kind").innerHTML = FLAG_KINDS
    .map((kind) => `<option value="${kind}">${kind}</option>`).join("");
  $("signin").addEventListener("click", () => {
    const base = ($("server") as HTMLInputElement).value.replace(/\/$/, "");
    const token = ($("token") as HTMLInputElement).value || null;
    const screenName = ($("screen") as HTMLSelectElement).value;
    const api = new ApiClient(base, token);
    document.querySelectorAll<HTMLElement>(".screen").forEach((s) => {
      s.hidden = s.id !== screenName;
    });
    if (screenName === "annotate") startAnnotator(api);
    else if (screenName === "review") startReviewer(api);
    else void startDashboard(api);
  });
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", boot);
}
