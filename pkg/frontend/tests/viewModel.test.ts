import { describe, expect, it } from "vitest";

import type { ObservationDto, SessionDto } from "../src/api.js";
import {
  bestObservation,
  buildViewModel,
  clickToDomainPoint,
  defaultAxes,
  newObservations,
  phaseBanner,
} from "../src/viewModel.js";

function makeSession(overrides: Partial<SessionDto> = {}): SessionDto {
  const observations: ObservationDto[] = [
    { t: 1, s: 0, source: "init", x: [1, 2], y: 5.0 },
    { t: 2, s: 0, source: "init", x: [-3, 4], y: 2.5 },
    { t: 3, s: 1, source: "human", x: [0, 0], y: 0.7 },
    { t: 4, s: 1, source: "ai", x: [8, -8], y: 9.1 },
  ];
  return {
    id: "s1",
    phase: "awaiting_human",
    benchmark: "matyas-2d",
    mode: "bo_muse",
    direction: "min",
    bounds: [
      [-10, 10],
      [-10, 10],
    ],
    dim: 2,
    num_init: 2,
    batch: 1,
    budget_batches: 3,
    has_pending_suggestion: false,
    observations,
    best: { x: [0, 0], y: 0.7, t: 3 },
    created: "now",
    updated: "now",
    ...overrides,
  };
}

describe("view model", () => {
  it("renders every server observation, no more, no fewer", () => {
    const session = makeSession();
    const vm = buildViewModel(session, defaultAxes(session));
    expect(vm.points).toHaveLength(session.observations.length);
    expect(vm.points.map((p) => p.t)).toEqual([1, 2, 3, 4]);
  });

  it("marks the minimum as best for a minimization session", () => {
    const session = makeSession();
    const vm = buildViewModel(session, defaultAxes(session));
    const best = vm.points.filter((p) => p.isBest);
    expect(best).toHaveLength(1);
    expect(best[0]!.t).toBe(3);
    expect(vm.best!.value).toBe(0.7);
    expect(vm.best!.value).toBe(Math.min(...session.observations.map((o) => o.y)));
  });

  it("marks the maximum as best for a maximization session", () => {
    const session = makeSession({ direction: "max" });
    expect(bestObservation(session)!.t).toBe(4);
  });

  it("enables clicking only while awaiting the human", () => {
    expect(buildViewModel(makeSession(), defaultAxes(makeSession())).clickEnabled).toBe(true);
    const waiting = makeSession({ phase: "awaiting_advance" });
    expect(buildViewModel(waiting, defaultAxes(waiting)).clickEnabled).toBe(false);
    const done = makeSession({ phase: "finished" });
    expect(buildViewModel(done, defaultAxes(done)).clickEnabled).toBe(false);
  });

  it("has a phase banner for each phase", () => {
    expect(phaseBanner(makeSession())).toContain("your turn");
    expect(phaseBanner(makeSession({ phase: "awaiting_advance" }))).toContain("waiting");
    expect(phaseBanner(makeSession({ phase: "finished" }))).toContain("finished");
  });

  it("projects high-dimensional sessions onto an axis pair", () => {
    const session = makeSession({
      dim: 4,
      bounds: [
        [-1, 1],
        [-2, 2],
        [-3, 3],
        [-4, 4],
      ],
      observations: [{ t: 1, s: 0, source: "init", x: [0.1, 0.2, 0.3, 0.4], y: 1 }],
      best: { x: [0.1, 0.2, 0.3, 0.4], y: 1, t: 1 },
    });
    const axes = { xAxis: 1, yAxis: 3, fixed: [0, 0, 0, 0] };
    const vm = buildViewModel(session, axes);
    expect(vm.points[0]!.x).toBe(0.2);
    expect(vm.points[0]!.y).toBe(0.4);
    expect(vm.xBounds).toEqual([-2, 2]);
    expect(vm.yBounds).toEqual([-4, 4]);
  });

  it("assembles a click into a full domain point using fixed coordinates", () => {
    const session = makeSession({
      dim: 3,
      bounds: [
        [-1, 1],
        [-1, 1],
        [-1, 1],
      ],
    });
    const axes = { xAxis: 0, yAxis: 2, fixed: [9, 0.5, 9] };
    expect(clickToDomainPoint(session, axes, 0.25, -0.75)).toEqual([0.25, 0.5, -0.75]);
  });

  it("validates axis selections", () => {
    const session = makeSession();
    expect(() => buildViewModel(session, { xAxis: 0, yAxis: 0, fixed: [0, 0] })).toThrow();
    expect(() => buildViewModel(session, { xAxis: 0, yAxis: 2, fixed: [0, 0] })).toThrow();
    expect(() => buildViewModel(session, { xAxis: 0, yAxis: 1, fixed: [0] })).toThrow();
  });

  it("diffs consecutive snapshots by iteration", () => {
    const before = makeSession();
    const after = makeSession({
      observations: [
        ...before.observations,
        { t: 5, s: 2, source: "human", x: [1, 1], y: 0.2 },
        { t: 6, s: 2, source: "ai", x: [2, 2], y: 4.0 },
      ],
    });
    const fresh = newObservations(before, after);
    expect(fresh.map((o) => o.t)).toEqual([5, 6]);
    expect(newObservations(after, after)).toHaveLength(0);
  });

  it("handles an empty session", () => {
    const empty = makeSession({ observations: [], best: null });
    const vm = buildViewModel(empty, defaultAxes(empty));
    expect(vm.points).toHaveLength(0);
    expect(vm.best).toBeNull();
  });
});
