/**
 * Dispute review: side-by-side conflicting labels, resolution by a third
 * person. Resolve controls are hidden when the current user is one of the
 * disputing annotators; the server enforces the same rule, and a rejection
 * is surfaced if it disagrees.
 */

import type { Api, Dispute, LabelSubmission, RubricView } from "./api.js";
import { ApiError } from "./api.js";
import { el, escapeHtml, option, query, queryAll } from "./html.js";

export interface DisputesViewDeps {
  api: Api;
  rubric: RubricView;
  sessionId: string;
  /** Current user; resolve controls are hidden for disputing parties. */
  me: string;
  onNetworkError: (message: string, retry: () => void) => void;
}

function labelCard(side: string, label: Dispute["labels"][number]): string {
  const impacts = label.impacts.length
    ? label.impacts.map((p) => `<li>${escapeHtml(p)}</li>`).join("")
    : "<li class=\"none\">(none)</li>";
  return `<div class="label-card" data-side="${side}">
    <h4 class="annotator">${escapeHtml(label.annotator ?? "?")}</h4>
    <dl>
      <dt>AI attribute</dt><dd class="ai">${escapeHtml(label.ai)}</dd>
      <dt>Severity</dt><dd class="severity">${escapeHtml(label.severity ?? "(unset)")}</dd>
      <dt>Impacts</dt><dd><ul class="impacts">${impacts}</ul></dd>
      <dt>Rationale</dt><dd class="rationale">${escapeHtml(label.rationale ?? "(none)")}</dd>
    </dl>
  </div>`;
}

export class DisputesView {
  private attribute = "combined";

  constructor(
    private readonly container: HTMLElement,
    private readonly deps: DisputesViewDeps,
  ) {}

  async render(): Promise<void> {
    let disputes: Dispute[];
    try {
      const view = await this.deps.api.disputes(
        this.deps.sessionId,
        this.attribute,
      );
      disputes = view.disputes;
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      this.deps.onNetworkError(message, () => void this.render());
      return;
    }

    const attrPicker = `<label class="attr-picker">Disagreements on
      <select name="dispute-attribute">
        ${["combined", "ai", "severity"]
          .map(
            (a) =>
              `<option value="${a}"${a === this.attribute ? " selected" : ""}>${a}</option>`,
          )
          .join("")}
      </select></label>`;

    const body = disputes.length
      ? disputes.map((d) => this.disputeBlock(d)).join("\n")
      : `<div class="empty-state"><p>No open disputes.</p></div>`;

    const view = el(`<div class="disputes-view">
      <h2>Disputes</h2>
      ${attrPicker}
      <div class="dispute-list">${body}</div>
      <div class="severity-panel">
        <h3>Severity distribution (live)</h3>
        <div class="severity-panel-body"></div>
      </div>
    </div>`);

    query<HTMLSelectElement>(view, "select[name=dispute-attribute]").addEventListener(
      "change",
      (event) => {
        this.attribute = (event.target as HTMLSelectElement).value;
        void this.render();
      },
    );
    for (const block of queryAll(view, ".dispute")) {
      this.wireDispute(block);
    }

    this.container.replaceChildren(view);
    await this.refreshSeverityPanel();
  }

  private disputeBlock(dispute: Dispute): string {
    const [a, b] = dispute.labels;
    if (!a || !b) return "";
    const parties = [a.annotator, b.annotator];
    const isParty = parties.includes(this.deps.me);
    const difference = dispute.impact_difference.length
      ? `<p class="impact-difference">Impact paths differing:
          ${dispute.impact_difference.map(escapeHtml).join(", ")}</p>`
      : "";
    const controls = isParty
      ? `<p class="party-note">You are a party to this dispute; a third person must resolve it.</p>`
      : this.resolveControls(dispute);
    return `<section class="dispute" data-defect="${escapeHtml(dispute.defect_id)}">
      <h3>${escapeHtml(dispute.defect_id)}</h3>
      <div class="side-by-side">
        ${labelCard("left", a)}
        ${labelCard("right", b)}
      </div>
      ${difference}
      ${controls}
      <div class="resolve-error" role="alert"></div>
    </section>`;
  }

  private resolveControls(dispute: Dispute): string {
    const [a, b] = dispute.labels;
    const union = [...new Set(dispute.labels.flatMap((l) => l.impacts))];
    const checkboxes = union
      .map(
        (p) => `<label class="impact-choice">
          <input type="checkbox" value="${escapeHtml(p)}" checked> ${escapeHtml(p)}
        </label>`,
      )
      .join("");
    const severityOptions = this.deps.rubric.severities
      .map((s) => option(s.value))
      .join("");
    return `<div class="resolve-controls">
      <button type="button" class="adopt" data-adopt="0">Adopt ${escapeHtml(a?.annotator ?? "left")}</button>
      <button type="button" class="adopt" data-adopt="1">Adopt ${escapeHtml(b?.annotator ?? "right")}</button>
      <details class="author">
        <summary>Author a different label</summary>
        <label>AI attribute
          <select name="resolve-ai">
            ${this.deps.rubric.ai_attributes.map((x) => option(x.value)).join("")}
          </select></label>
        <label>Severity
          <select name="resolve-severity"><option value="">(unset)</option>${severityOptions}</select></label>
        <fieldset class="resolve-impacts"><legend>Impacts</legend>${checkboxes || "(none)"}</fieldset>
        <button type="button" class="resolve-author">Resolve with this label</button>
      </details>
      <label class="resolve-rationale">Rationale
        <input type="text" name="resolve-rationale" placeholder="why this resolution">
      </label>
    </div>`;
  }

  private wireDispute(block: HTMLElement): void {
    const defectId = block.dataset["defect"] ?? "";
    for (const button of queryAll<HTMLButtonElement>(block, ".adopt")) {
      button.addEventListener("click", () => {
        void this.adopt(block, defectId, Number(button.dataset["adopt"]));
      });
    }
    const author = block.querySelector<HTMLButtonElement>(".resolve-author");
    author?.addEventListener("click", () => void this.author(block, defectId));
  }

  private rationaleOf(block: HTMLElement): string | null {
    const input = block.querySelector<HTMLInputElement>(
      "input[name=resolve-rationale]",
    );
    const text = input?.value.trim() ?? "";
    return text === "" ? null : text;
  }

  private async adopt(
    block: HTMLElement,
    defectId: string,
    side: number,
  ): Promise<void> {
    const card = queryAll(block, ".label-card")[side];
    if (!card) return;
    const impacts = queryAll(card, ".impacts li")
      .filter((li) => !li.classList.contains("none"))
      .map((li) => li.textContent?.trim() ?? "");
    const severity = query(card, ".severity").textContent?.trim() ?? "";
    const adopted = query(card, ".annotator").textContent?.trim() ?? "";
    await this.post(block, {
      defect_id: defectId,
      ai: query(card, ".ai").textContent?.trim() ?? "",
      severity: severity === "(unset)" ? null : severity,
      impacts,
      rationale: this.rationaleOf(block) ?? `adopted ${adopted}'s label`,
    });
  }

  private async author(block: HTMLElement, defectId: string): Promise<void> {
    const ai = query<HTMLSelectElement>(block, "select[name=resolve-ai]").value;
    const severity = query<HTMLSelectElement>(
      block,
      "select[name=resolve-severity]",
    ).value;
    const impacts = queryAll<HTMLInputElement>(
      block,
      ".resolve-impacts input:checked",
    ).map((box) => box.value);
    await this.post(block, {
      defect_id: defectId,
      ai,
      severity: severity === "" ? null : severity,
      impacts,
      rationale: this.rationaleOf(block),
    });
  }

  private async post(block: HTMLElement, label: LabelSubmission): Promise<void> {
    const errorEl = query(block, ".resolve-error");
    errorEl.textContent = "";
    try {
      await this.deps.api.resolve(this.deps.sessionId, this.deps.me, label);
    } catch (err) {
      if (err instanceof ApiError && err.status >= 400 && err.status < 500) {
        errorEl.textContent = `${err.type}: ${err.detail}`;
      } else {
        const message = err instanceof Error ? err.message : String(err);
        this.deps.onNetworkError(message, () => void this.post(block, label));
      }
      return;
    }
    await this.render();
  }

  /** Severity one-way panel, refetched after every resolution. */
  private async refreshSeverityPanel(): Promise<void> {
    const panel = this.container.querySelector(".severity-panel-body");
    if (!panel) return;
    try {
      const dist = await this.deps.api.oneWay("severity", this.deps.sessionId);
      panel.innerHTML = dist.rows
        .map(
          (r) => `<div class="bar-row" data-category="${escapeHtml(r.category)}">
            <span class="bar-label">${escapeHtml(r.category)}</span>
            <span class="bar-count">${r.count}</span>
            <span class="bar-percent">${r.percent}%</span>
          </div>`,
        )
        .join("");
    } catch {
      panel.innerHTML = `<p class="stale-indicator">distribution unavailable</p>`;
    }
  }
}
