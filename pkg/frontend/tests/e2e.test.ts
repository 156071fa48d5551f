// Scripted browser session against a live service: rate, retrain, verify the
// rendered recommendations against the wire payload, correct a ranking,
// retrain again, and check the staleness/generation machinery.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Client, type FetchLike, type RankedResponse } from "../src/api.js";
import { App } from "../src/app.js";

const PORT = 18750 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;
const PYTHON = process.env.BOOKREC_PYTHON ?? "python3";

// the environment's fetch performs real HTTP (with browser CORS semantics)
const nodeFetch: FetchLike = (input, init) => globalThis.fetch(input, init);

let workdir: string;
let server: ChildProcess | undefined;

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await nodeFetch(`${BASE}/status`);
      if (response.ok) {
        await response.json();
        return;
      }
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "bookrec-e2e-"));
  const catalog = join(workdir, "catalog.jsonl");
  const synth = spawnSync(
    PYTHON,
    [
      "-m", "bookrec", "synth",
      "--books", "120", "--markers", "40", "--seed", "9",
      "--out-catalog", catalog,
      "--out-ratings", join(workdir, "unused-ratings.jsonl"),
    ],
    { encoding: "utf-8" },
  );
  if (synth.status !== 0) {
    throw new Error(`synth failed: ${synth.stderr}`);
  }
  server = spawn(
    PYTHON,
    [
      "-m", "bookrec", "serve",
      "--catalog", catalog,
      "--data-dir", join(workdir, "data"),
      "--port", String(PORT),
    ],
    { stdio: ["ignore", "inherit", "inherit"] },
  );
  await waitForService();
});

afterAll(() => {
  server?.kill();
  rmSync(workdir, { recursive: true, force: true });
});

function mountApp(): App {
  document.body.innerHTML = `<div id="app"></div>`;
  const root = document.getElementById("app") as HTMLElement;
  return new App(root, new Client(BASE, nodeFetch), 10, 5);
}

function click(selector: string): void {
  const el = document.querySelector<HTMLElement>(selector);
  if (!el) throw new Error(`nothing matches ${selector}`);
  el.click();
}

function clickRating(id: string, rating: number): void {
  const control = Array.from(
    document.querySelectorAll<HTMLElement>('[data-action="rate"]'),
  ).find((el) => el.dataset.id === id && Number(el.dataset.rating) === rating);
  if (!control) throw new Error(`no rating button ${rating} for ${id}`);
  control.click();
}

describe("interactive feedback loop", () => {
  it("runs the rate -> retrain -> recommend -> correct cycle", async () => {
    const app = mountApp();
    await app.init();
    expect(document.querySelector("#recommendations")?.textContent).toContain("No profile yet");

    // search and rate five books through the UI controls
    const box = document.querySelector<HTMLInputElement>("#search-box")!;
    box.value = "planted";
    document
      .querySelector("#search-form")!
      .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    await app.whenIdle();
    expect(document.querySelectorAll("#search-results tbody tr").length).toBeGreaterThanOrEqual(5);

    const seedRatings: [string, number][] = [
      ["b00000", 10],
      ["b00001", 9],
      ["b00002", 2],
      ["b00003", 8],
      ["b00004", 1],
    ];
    for (const [id, rating] of seedRatings) {
      clickRating(id, rating);
      await app.whenIdle();
    }
    const stored = await new Client(BASE, nodeFetch).ratings();
    expect(stored.count).toBe(5);

    // retrain via the button, then compare the rendered top 3 to the wire
    click("#retrain");
    await app.whenIdle();
    expect(document.querySelector("#gen-badge")?.textContent).toContain("profile #1");

    const payload: RankedResponse = await new Client(BASE, nodeFetch).recommendations(10);
    const renderedTitles = Array.from(
      document.querySelectorAll("#recommendations tbody tr td:nth-child(2)"),
    ).map((td) => td.textContent);
    expect(renderedTitles.slice(0, 3)).toEqual(
      payload.entries.slice(0, 3).map((entry) => entry.title),
    );
    const renderedScores = Array.from(
      document.querySelectorAll("#recommendations tbody tr td:nth-child(3)"),
    ).map((td) => td.textContent);
    expect(renderedScores).toEqual(payload.entries.map((entry) => String(entry.score)));

    // corrective rating on the current top pick, then retrain
    const corrected = payload.entries[0];
    clickRating(corrected.id, 1);
    await app.whenIdle();
    click("#retrain");
    await app.whenIdle();

    expect(document.querySelector("#gen-badge")?.textContent).toContain("profile #2");
    const after = Array.from(
      document.querySelectorAll("#recommendations tbody tr"),
    ).map((tr) => tr.getAttribute("data-book"));
    expect(after).not.toContain(corrected.id);
    expect(after.length).toBeGreaterThan(0);
  });

  it("renders explanation tables byte-matching the service payloads", async () => {
    const app = mountApp();
    await app.init();
    const wire = new Client(BASE, nodeFetch);
    const top = (await wire.recommendations(1)).entries[0];

    // open the explanation drawer from the recommendation link
    const link = Array.from(
      document.querySelectorAll<HTMLElement>('[data-action="explain"]'),
    ).find((el) => el.dataset.id === top.id);
    expect(link).toBeDefined();
    link!.click();
    await app.whenIdle();

    const explanation = await wire.explain(top.id, 20);
    const explanationCells = Array.from(
      document.querySelectorAll("#explanation tbody tr"),
    ).map((tr) => Array.from(tr.querySelectorAll("td")).map((td) => td.textContent));
    expect(explanationCells).toEqual(
      explanation.rows.map((row) => [
        row.slot.toUpperCase(),
        row.token.toUpperCase(),
        String(row.influence),
      ]),
    );

    // drill into the first cue's provenance
    const cue = explanation.rows[0];
    const wordLink = Array.from(
      document.querySelectorAll<HTMLElement>('[data-action="feature"]'),
    ).find((el) => el.dataset.slot === cue.slot && el.dataset.token === cue.token);
    expect(wordLink).toBeDefined();
    wordLink!.click();
    await app.whenIdle();

    const feature = await wire.explainFeature(cue.slot, cue.token, 5);
    const featureCells = Array.from(
      document.querySelectorAll("#feature tbody tr"),
    ).map((tr) => Array.from(tr.querySelectorAll("td")).map((td) => td.textContent));
    expect(featureCells).toEqual(
      feature.rows.map((row) => [row.title, String(row.rating), String(row.count)]),
    );
  });

  it("shows an error banner when the service is unreachable", async () => {
    document.body.innerHTML = `<div id="app"></div>`;
    const root = document.getElementById("app") as HTMLElement;
    const dead = new Client("http://127.0.0.1:1", nodeFetch);
    const app = new App(root, dead);
    await app.init();
    expect(document.querySelector(".error-banner")?.textContent).toContain("offline");
  });
});
