/**
 * Dashboards: agreement gauges, one-way bars, two-way heatmap.
 *
 * Every rendered number is taken verbatim from a server response field.
 * Bars and heatmap shading scale visually on those numbers, but no count,
 * percent, kappa or p-value is ever derived client-side. On fetch failure
 * the last good view stays up with a stale-data indicator.
 */
import { isWireError } from "./api.js";
import { el, escapeHtml, query } from "./html.js";
function kappaGauge(attribute, entry) {
    if (isWireError(entry)) {
        return `<div class="kappa-gauge" data-attribute="${escapeHtml(attribute)}">
      <span class="kappa-state">${escapeHtml(entry.error)}</span>
      <span class="kappa-detail">${escapeHtml(entry.detail)}</span>
    </div>`;
    }
    return `<div class="kappa-gauge" data-attribute="${escapeHtml(attribute)}">
    <span class="kappa-value">${entry.kappa}</span>
    <span class="kappa-detail">p_o=${entry.p_o} p_e=${entry.p_e} n=${entry.n}</span>
  </div>`;
}
function bars(dist) {
    const rows = dist.rows
        .map((r) => `<div class="bar-row" data-category="${escapeHtml(r.category)}">
        <span class="bar-label">${escapeHtml(r.category)}</span>
        <span class="bar" style="width:${Math.min(100, Math.max(0, r.percent))}%"></span>
        <span class="bar-count">${r.count}</span>
        <span class="bar-percent">${r.percent}%</span>
      </div>`)
        .join("");
    const excluded = dist.excluded
        ? `<p class="excluded-note">${dist.excluded} records excluded (missing this attribute)</p>`
        : "";
    return `<div class="one-way" data-attribute="${escapeHtml(dist.attribute)}">
    ${rows}
    <p class="bar-total">total: <span class="total">${dist.total}</span></p>
    ${excluded}
  </div>`;
}
function heatmap(view) {
    const max = Math.max(1, ...view.counts.flat());
    const header = view.col_categories
        .map((c) => `<th scope="col">${escapeHtml(c)}</th>`)
        .join("");
    const body = view.row_categories
        .map((rowCat, i) => {
        const cells = view.col_categories
            .map((colCat, j) => {
            const count = view.counts[i]?.[j] ?? 0;
            const heat = count / max;
            return `<td class="heat-cell" data-row="${escapeHtml(rowCat)}"
            data-col="${escapeHtml(colCat)}" data-count="${count}"
            style="--heat:${heat.toFixed(3)}">${count}</td>`;
        })
            .join("");
        const marginal = view.row_marginals[i] ?? 0;
        return `<tr><th scope="row">${escapeHtml(rowCat)}</th>${cells}
        <td class="row-marginal" data-row="${escapeHtml(rowCat)}">${marginal}</td></tr>`;
    })
        .join("");
    const footer = view.col_marginals
        .map((m, j) => `<td class="col-marginal" data-col="${escapeHtml(view.col_categories[j] ?? "")}">${m}</td>`)
        .join("");
    const independence = isWireError(view.independence)
        ? `<p class="independence degenerate">${escapeHtml(view.independence.error)}:
        ${escapeHtml(view.independence.detail)}</p>`
        : `<p class="independence">chi-square <span class="statistic">${view.independence.statistic}</span>,
        dof <span class="dof">${view.independence.dof}</span>,
        p <span class="p-value">${view.independence.p_value}</span>
        ${view.independence.warning ? '<span class="low-expected">low expected counts</span>' : ""}</p>`;
    return `<div class="heatmap-wrap">
    <table class="heatmap">
      <thead><tr><th>${escapeHtml(view.row_attribute)}\\${escapeHtml(view.col_attribute)}</th>${header}<th>total</th></tr></thead>
      <tbody>${body}</tbody>
      <tfoot><tr><th>total</th>${footer}<td class="grand-total">${view.total}</td></tr></tfoot>
    </table>
    ${independence}
  </div>`;
}
export class DashboardView {
    container;
    deps;
    last = null;
    constructor(container, deps) {
        this.container = container;
        this.deps = deps;
    }
    async render() {
        let snapshot;
        try {
            const session = this.deps.sessionId ?? undefined;
            const stats = this.deps.sessionId
                ? await this.deps.api.stats(this.deps.sessionId)
                : null;
            snapshot = {
                stats,
                oneWayAi: await this.deps.api.oneWay("ai", session),
                oneWaySeverity: await this.deps.api.oneWay("severity", session),
                twoWay: await this.deps.api.twoWay(session),
            };
        }
        catch (err) {
            this.renderStale(err);
            return;
        }
        this.last = snapshot;
        this.paint(snapshot, false);
    }
    renderStale(err) {
        const message = err instanceof Error ? err.message : String(err);
        if (this.last) {
            this.paint(this.last, true, message);
        }
        else {
            const retry = el(`<div class="dashboard-error">
        <p class="stale-indicator">Could not load dashboards: ${escapeHtml(message)}</p>
        <button type="button" class="retry">Retry</button>
      </div>`);
            query(retry, ".retry").addEventListener("click", () => void this.render());
            this.container.replaceChildren(retry);
        }
    }
    paint(snapshot, stale, message = "") {
        const { stats } = snapshot;
        const scope = this.deps.sessionId
            ? `session <strong>${escapeHtml(this.deps.sessionId)}</strong>`
            : "whole dataset (rule-classified baseline)";
        const staleBadge = stale
            ? `<p class="stale-indicator">showing stale data: ${escapeHtml(message)}
          <button type="button" class="retry">Retry</button></p>`
            : "";
        const agreement = stats
            ? `<section class="agreement">
          <h3>Inter-rater agreement (Cohen's kappa)</h3>
          ${Object.entries(stats.agreement)
                .map(([attr, entry]) => kappaGauge(attr, entry))
                .join("")}
        </section>`
            : "";
        const progress = stats
            ? `<p class="progress-line">progress:
          <span class="percent-complete">${stats.progress.percent_complete}</span>%
          (${stats.progress.labeled} labeled, ${stats.progress.disputed} disputed,
          ${stats.progress.resolved} resolved, ${stats.progress.pending} pending)</p>`
            : "";
        const view = el(`<div class="dashboard">
      ${staleBadge}
      <h2>Dashboards</h2>
      <p class="scope">Scope: ${scope}</p>
      ${progress}
      ${agreement}
      <section><h3>AI attribute</h3>${bars(snapshot.oneWayAi)}</section>
      <section><h3>Severity</h3>${bars(snapshot.oneWaySeverity)}</section>
      <section><h3>AI attribute by severity</h3>${heatmap(snapshot.twoWay)}</section>
    </div>`);
        const retry = view.querySelector(".stale-indicator .retry");
        retry?.addEventListener("click", () => void this.render());
        this.container.replaceChildren(view);
    }
}
