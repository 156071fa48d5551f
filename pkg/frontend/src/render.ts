// Pure HTML renderers. Rows are emitted in payload order and numbers are
// displayed verbatim (String(x)), so tables byte-match the service response.

import type {
  BookSummary,
  ExplanationResponse,
  FeatureResponse,
  RankedEntry,
} from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function ratingControl(id: string, current: number | null): string {
  const buttons = [];
  for (let value = 1; value <= 10; value++) {
    const active = value === current ? " active" : "";
    buttons.push(
      `<button type="button" class="rate${active}" data-action="rate"` +
        ` data-id="${escapeHtml(id)}" data-rating="${value}">${value}</button>`,
    );
  }
  return `<span class="rating-control">${buttons.join("")}</span>`;
}

export function searchResults(items: BookSummary[]): string {
  if (items.length === 0) {
    return `<p class="empty">No matching books.</p>`;
  }
  const rows = items.map(
    (book) =>
      `<tr><td>${escapeHtml(book.title)}</td>` +
      `<td>${ratingControl(book.id, book.rating)}</td></tr>`,
  );
  return (
    `<table class="books"><thead><tr><th>Title</th><th>Your rating</th></tr></thead>` +
    `<tbody>${rows.join("")}</tbody></table>`
  );
}

export function recommendationTable(entries: RankedEntry[], heading: string): string {
  if (entries.length === 0) {
    return `<p class="empty">Nothing to show; rate some books and retrain.</p>`;
  }
  const rows = entries.map(
    (entry) =>
      `<tr data-book="${escapeHtml(entry.id)}">` +
      `<td>${String(entry.rank)}</td>` +
      `<td><a href="#" data-action="explain" data-id="${escapeHtml(entry.id)}">` +
      `${escapeHtml(entry.title)}</a></td>` +
      `<td class="num">${String(entry.score)}</td>` +
      `<td>${ratingControl(entry.id, null)}</td></tr>`,
  );
  return (
    `<h3>${escapeHtml(heading)}</h3>` +
    `<table class="ranked"><thead><tr><th>Rank</th><th>Title</th><th>Score</th>` +
    `<th>Correct it</th></tr></thead><tbody>${rows.join("")}</tbody></table>`
  );
}

export function explanationTable(payload: ExplanationResponse): string {
  // column order Slot | Word | Strength; the strength shown is the cue's
  // full influence on the score (per-occurrence strength times count)
  const rows = payload.rows.map(
    (row) =>
      `<tr><td>${escapeHtml(row.slot.toUpperCase())}</td>` +
      `<td><a href="#" data-action="feature" data-slot="${escapeHtml(row.slot)}"` +
      ` data-token="${escapeHtml(row.token)}">${escapeHtml(row.token.toUpperCase())}</a></td>` +
      `<td class="num">${String(row.influence)}</td></tr>`,
  );
  const body =
    rows.length === 0
      ? `<p class="empty">No known cues in this book.</p>`
      : `<table class="explanation"><thead><tr><th>Slot</th><th>Word</th><th>Strength</th>` +
        `</tr></thead><tbody>${rows.join("")}</tbody></table>`;
  return `<h3>${escapeHtml(payload.title)} recommended because:</h3>${body}`;
}

export function featureTable(payload: FeatureResponse): string {
  const rows = payload.rows.map(
    (row) =>
      `<tr><td>${escapeHtml(row.title)}</td>` +
      `<td class="num">${String(row.rating)}</td>` +
      `<td class="num">${String(row.count)}</td></tr>`,
  );
  const body =
    rows.length === 0
      ? `<p class="empty">No rated book contains this word.</p>`
      : `<table class="feature"><thead><tr><th>Title</th><th>Rating</th><th>Count</th>` +
        `</tr></thead><tbody>${rows.join("")}</tbody></table>`;
  return (
    `<h3>The word ${escapeHtml(payload.token.toUpperCase())} ` +
    `(${escapeHtml(payload.slot.toUpperCase())}) is positive due to your ratings:</h3>${body}`
  );
}

export function generationBadge(generation: number, stale: boolean): string {
  const flag = stale ? ` <span class="stale">stale</span>` : "";
  return `profile #${String(generation)}${flag}`;
}

export function errorBanner(message: string): string {
  return `<div class="error-banner">${escapeHtml(message)}</div>`;
}
