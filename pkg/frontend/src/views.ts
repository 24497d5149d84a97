/** Read-only renderers for the results explorer. Every cell string comes from
 * the service payload through the fixed 2/4-decimal formatters; no index is
 * recomputed client-side. */
import type { ResultsDoc } from "./api.js";
import { heatColor, heatTextColor, mobius, percent } from "./format.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function tableSkeleton(headerCells: string[]): { table: HTMLTableElement; body: HTMLElement } {
  const table = el("table", "matrix");
  const thead = el("thead");
  const headRow = el("tr");
  for (const label of headerCells) {
    headRow.appendChild(el("th", undefined, label));
  }
  thead.appendChild(headRow);
  const body = el("tbody");
  table.append(thead, body);
  return { table, body };
}

function matrixTable(
  rowLabels: string[],
  colLabels: string[],
  values: number[][],
  opts: { heat?: boolean; corner?: string } = {},
): HTMLTableElement {
  const { table, body } = tableSkeleton([opts.corner ?? "", ...colLabels]);
  values.forEach((row, r) => {
    const tr = el("tr");
    tr.appendChild(el("th", undefined, rowLabels[r]));
    row.forEach((value) => {
      const td = el("td", "cell", percent(value));
      if (opts.heat) {
        td.style.backgroundColor = heatColor(value);
        td.style.color = heatTextColor(value);
      }
      tr.appendChild(td);
    });
    body.appendChild(tr);
  });
  return table;
}

export function renderRankHeatmap(doc: ResultsDoc): HTMLTableElement {
  const ranks = doc.alternatives.map((_, r) => `r${r + 1}`);
  const table = matrixTable(doc.alternatives, ranks, doc.rank_acceptability, {
    heat: true,
    corner: "alt \\ rank",
  });
  table.dataset.view = "rank-heatmap";
  return table;
}

export function renderPreferenceMatrix(doc: ResultsDoc, which: "strict" | "indifferent"): HTMLTableElement {
  const values = which === "strict" ? doc.preference_strict : doc.preference_indifferent;
  const table = matrixTable(doc.alternatives, doc.alternatives, values, {
    heat: true,
    corner: "over",
  });
  table.dataset.view = `preference-${which}`;
  return table;
}

function mobiusHeader(doc: ResultsDoc): string[] {
  const names = doc.criteria.map((c) => `m(${c})`);
  if (doc.additivity === 2) {
    for (let i = 0; i < doc.criteria.length; i++) {
      for (let j = i + 1; j < doc.criteria.length; j++) {
        names.push(`m(${doc.criteria[i]},${doc.criteria[j]})`);
      }
    }
  }
  return names;
}

export function renderCentralCapacities(doc: ResultsDoc): HTMLTableElement {
  const { table, body } = tableSkeleton(["alt", ...mobiusHeader(doc), "confidence"]);
  table.dataset.view = "central-capacities";
  doc.central_capacities.forEach((vec, k) => {
    if (vec === null) return; // only alternatives that ranked first at least once
    const tr = el("tr");
    tr.appendChild(el("th", undefined, doc.alternatives[k]));
    for (const value of vec) {
      tr.appendChild(el("td", undefined, mobius(value)));
    }
    const conf = doc.confidence_factor[k];
    tr.appendChild(el("td", undefined, conf === null ? "n/a" : percent(conf)));
    body.appendChild(tr);
  });
  return table;
}

export function renderBarycenter(doc: ResultsDoc): HTMLTableElement {
  const { table, body } = tableSkeleton(mobiusHeader(doc));
  table.dataset.view = "barycenter";
  const tr = el("tr");
  for (const value of doc.barycenter) {
    tr.appendChild(el("td", undefined, mobius(value)));
  }
  body.appendChild(tr);
  return table;
}

export function renderExtremeRanks(doc: ResultsDoc): HTMLElement {
  const wrap = el("div", "extreme-ranks");
  wrap.dataset.view = "extreme-ranks";
  const l = doc.alternatives.length;
  doc.extreme_ranks.forEach(([best, worst], k) => {
    const row = el("div", "bar-row");
    row.appendChild(el("span", "bar-label", doc.alternatives[k]));
    const track = el("div", "bar-track");
    const fill = el("div", "bar-fill");
    fill.style.left = `${((best - 1) / l) * 100}%`;
    fill.style.width = `${((worst - best + 1) / l) * 100}%`;
    fill.title = `ranks ${best}..${worst}`;
    track.appendChild(fill);
    row.appendChild(track);
    row.appendChild(el("span", "bar-range", `[${best}, ${worst}]`));
    wrap.appendChild(row);
  });
  return wrap;
}

/** Alternatives holding the two largest first-rank shares, best first. */
export function firstRankLeaders(doc: ResultsDoc, count = 2): string[] {
  const shares = doc.rank_acceptability.map((row, k) => ({ k, share: row[0] }));
  shares.sort((a, b) => b.share - a.share || a.k - b.k);
  return shares.slice(0, count).map((s) => doc.alternatives[s.k]);
}

export function renderLeaders(doc: ResultsDoc): HTMLElement {
  const leaders = firstRankLeaders(doc);
  const shares = leaders.map((label) => {
    const k = doc.alternatives.indexOf(label);
    return `${label} (${percent(doc.rank_acceptability[k][0])}%)`;
  });
  const node = el("p", "leaders", `most frequent first ranks: ${shares.join(", ")}`);
  node.dataset.view = "leaders";
  return node;
}

export function renderResults(container: HTMLElement, doc: ResultsDoc, stale: boolean): void {
  container.replaceChildren();
  const staleNote = el("div", stale ? "stale-banner" : "fresh-banner");
  staleNote.dataset.view = "staleness";
  staleNote.textContent = stale
    ? "results are stale: statements changed since this run"
    : `computed from ${doc.iterations_feasible} counted iterations (of ${doc.iterations_total})`;
  container.appendChild(staleNote);
  container.appendChild(renderLeaders(doc));
  container.appendChild(el("h3", undefined, "rank acceptability (%)"));
  container.appendChild(renderRankHeatmap(doc));
  container.appendChild(el("h3", undefined, "strict preference frequency (%)"));
  container.appendChild(renderPreferenceMatrix(doc, "strict"));
  container.appendChild(el("h3", undefined, "indifference frequency (%)"));
  container.appendChild(renderPreferenceMatrix(doc, "indifferent"));
  container.appendChild(el("h3", undefined, "central capacities (first at least once)"));
  container.appendChild(renderCentralCapacities(doc));
  container.appendChild(el("h3", undefined, "barycenter of sampled capacities"));
  container.appendChild(renderBarycenter(doc));
  container.appendChild(el("h3", undefined, "attained rank intervals"));
  container.appendChild(renderExtremeRanks(doc));
}
