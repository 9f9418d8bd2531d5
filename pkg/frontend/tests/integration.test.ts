/**
 * End-to-end round trip against a live service process: create a
 * live-human session, then for three batches click-suggest and advance,
 * checking the rendered state against the server after every step.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiError, SessionApi, type SessionDto } from "../src/api.js";
import { SessionController, type ControllerCallbacks } from "../src/app.js";
import { domainToScreen } from "../src/transform.js";
import { buildViewModel, defaultAxes, newObservations } from "../src/viewModel.js";
import { frameFor } from "../src/render.js";

const PORT = 8750 + (process.pid % 200);
const BASE = `http://127.0.0.1:${PORT}`;
const OPTS = { width: 480, height: 480 };

let server: ChildProcess;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const r = await fetch(`${BASE}/healthz`);
      if (r.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), "bomuse-ui-"));
  server = spawn(
    "python3",
    ["-m", "bomuse.cli", "serve", "--bind", `127.0.0.1:${PORT}`,
     "--data-dir", dataDir],
    { stdio: "ignore" },
  );
  await waitForServer();
}, 30_000);

afterAll(() => {
  server.kill("SIGTERM");
});

describe("live service round trip", () => {
  const api = new SessionApi(BASE);

  it("runs create -> click -> advance for 3 batches", async () => {
    const renders: string[] = [];
    const rejections: string[] = [];
    const callbacks: ControllerCallbacks = {
      onRender: (svg) => renders.push(svg),
      onFetchError: (msg) => {
        throw new Error(`unexpected fetch error: ${msg}`);
      },
      onRejected: (msg) => rejections.push(msg),
      confirmSuggestion: () => true,
    };

    const created = await api.createSession({
      id: "ui-roundtrip",
      benchmark: "matyas-2d",
      evaluations: 6, // 3 batches of 2
      seed: 0,
      live_human: true,
    });
    expect(created.phase).toBe("awaiting_human");
    expect(created.observations).toHaveLength(3); // dim + 1 inits

    const controller = new SessionController(api, "ui-roundtrip", OPTS, callbacks);
    await controller.refresh();
    expect(renders.at(-1)).toContain("your turn");
    expect((renders.at(-1)!.match(/class="obs /g) ?? []).length).toBe(3);

    // clicks for the three batches, chosen inside the box
    const clicks: [number, number][] = [
      [2.0, -3.0],
      [-5.0, 5.0],
      [0.5, 0.5],
    ];
    let previous: SessionDto = controller.session!;

    for (let batch = 1; batch <= 3; batch++) {
      const vm = buildViewModel(previous, defaultAxes(previous));
      const frame = frameFor(vm, OPTS);
      const [cx, cy] = clicks[batch - 1]!;
      const posted = await controller.handleClick(domainToScreen(frame, cx, cy));
      expect(posted).not.toBeNull();
      expect(posted![0]).toBeCloseTo(cx, 9);
      expect(posted![1]).toBeCloseTo(cy, 9);

      expect(await controller.advance()).toBe(true);
      const current = controller.session!;

      // exactly two new points per batch: the click and the AI's point
      const fresh = newObservations(previous, current);
      expect(fresh).toHaveLength(2);
      expect(fresh.map((o) => o.source).sort()).toEqual(["ai", "human"]);
      const human = fresh.find((o) => o.source === "human")!;
      expect(human.x[0]).toBeCloseTo(cx, 9);
      expect(human.x[1]).toBeCloseTo(cy, 9);

      // rendered markers match the server's observation count
      const svg = renders.at(-1)!;
      expect((svg.match(/class="obs /g) ?? []).length).toBe(
        current.observations.length,
      );

      // the best-so-far marker agrees with the server's best
      const serverBest = current.best!;
      expect(svg).toContain(`class="best-marker" data-t="${serverBest.t}"`);
      expect(svg).toContain(`data-value="${serverBest.y}"`);

      previous = current;
    }

    expect(controller.session!.phase).toBe("finished");
    expect(renders.at(-1)).toContain('data-click-enabled="false"');
  }, 120_000);

  it("surfaces the server's per-dimension message for out-of-bounds clicks", async () => {
    const rejections: string[] = [];
    const callbacks: ControllerCallbacks = {
      onRender: () => {},
      onFetchError: () => {},
      onRejected: (msg) => rejections.push(msg),
      confirmSuggestion: () => true,
    };
    await api.createSession({
      id: "ui-oob",
      benchmark: "matyas-2d",
      evaluations: 4,
      seed: 1,
      live_human: true,
    });
    const controller = new SessionController(api, "ui-oob", OPTS, callbacks);
    await controller.refresh();
    // a click in the margin above the plot maps beyond the upper bound
    const posted = await controller.handleClick({ px: OPTS.width / 2, py: 0 });
    expect(posted).toBeNull();
    expect(rejections).toHaveLength(1);
    expect(rejections[0]).toMatch(/coordinate 2 = .* outside bounds \[-10\.0, 10\.0\]/);
  }, 60_000);

  it("rejects a direct out-of-bounds post with the same message shape", async () => {
    await api.createSession({
      id: "ui-direct",
      benchmark: "matyas-2d",
      evaluations: 4,
      seed: 2,
      live_human: true,
    });
    const err = await api
      .postSuggestion("ui-direct", [0, 42])
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).detail).toBe(
      "coordinate 2 = 42.0 outside bounds [-10.0, 10.0]",
    );
  }, 60_000);
});
