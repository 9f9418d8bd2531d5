/**
 * Pure view-model layer: derives everything the renderer needs from a
 * server session snapshot, including axis-pair projection for dim > 2 and
 * diffs between consecutive snapshots.
 */

import type { ObservationDto, SessionDto } from "./api.js";

export interface AxisSelection {
  /** Indices of the coordinates mapped to the horizontal/vertical axes. */
  xAxis: number;
  yAxis: number;
  /** Fixed values for every other coordinate (entered via number fields). */
  fixed: number[];
}

export interface PlottedPoint {
  t: number;
  s: number;
  source: ObservationDto["source"];
  x: number;
  y: number;
  value: number;
  isBest: boolean;
}

export interface SessionViewModel {
  id: string;
  phase: SessionDto["phase"];
  banner: string;
  clickEnabled: boolean;
  batch: number;
  budgetBatches: number;
  points: PlottedPoint[];
  best: { x: number[]; value: number; t: number } | null;
  xBounds: [number, number];
  yBounds: [number, number];
}

export function defaultAxes(session: SessionDto): AxisSelection {
  const fixed = session.bounds.map(([lo, hi]) => (lo + hi) / 2);
  return { xAxis: 0, yAxis: Math.min(1, session.dim - 1), fixed };
}

export function validateAxes(session: SessionDto, axes: AxisSelection): void {
  const d = session.dim;
  if (axes.xAxis < 0 || axes.xAxis >= d || axes.yAxis < 0 || axes.yAxis >= d) {
    throw new Error(`axis index out of range for dim ${d}`);
  }
  if (axes.xAxis === axes.yAxis && d > 1) {
    throw new Error("horizontal and vertical axes must differ");
  }
  if (axes.fixed.length !== d) {
    throw new Error(`fixed coordinates must have length ${d}`);
  }
}

/** The best observation under the session's direction (min or max). */
export function bestObservation(session: SessionDto): ObservationDto | null {
  if (session.observations.length === 0) return null;
  const better =
    session.direction === "max"
      ? (a: ObservationDto, b: ObservationDto) => a.y >= b.y
      : (a: ObservationDto, b: ObservationDto) => a.y <= b.y;
  let best = session.observations[0]!;
  for (const obs of session.observations) {
    if (!better(best, obs)) best = obs;
  }
  return best;
}

export function phaseBanner(session: SessionDto): string {
  switch (session.phase) {
    case "awaiting_human":
      return "your turn: click the plot to place your suggestion";
    case "awaiting_advance":
      return "waiting for the next batch to run";
    case "finished":
      return "session finished";
  }
}

export function buildViewModel(
  session: SessionDto,
  axes: AxisSelection,
): SessionViewModel {
  validateAxes(session, axes);
  const best = bestObservation(session);
  const points: PlottedPoint[] = session.observations.map((obs) => ({
    t: obs.t,
    s: obs.s,
    source: obs.source,
    x: obs.x[axes.xAxis]!,
    y: obs.x[axes.yAxis]!,
    value: obs.y,
    isBest: best !== null && obs.t === best.t,
  }));
  return {
    id: session.id,
    phase: session.phase,
    banner: phaseBanner(session),
    clickEnabled: session.phase === "awaiting_human",
    batch: session.batch,
    budgetBatches: session.budget_batches,
    points,
    best: best === null ? null : { x: best.x, value: best.y, t: best.t },
    xBounds: session.bounds[axes.xAxis]!,
    yBounds: session.bounds[axes.yAxis]!,
  };
}

/**
 * Assemble the full domain point for a plot click: clicked values on the
 * selected axes, fixed values elsewhere.
 */
export function clickToDomainPoint(
  session: SessionDto,
  axes: AxisSelection,
  clickX: number,
  clickY: number,
): number[] {
  validateAxes(session, axes);
  const point = [...axes.fixed];
  point[axes.xAxis] = clickX;
  if (session.dim > 1) point[axes.yAxis] = clickY;
  return point;
}

/** Observations present in `after` but not in `before`, by iteration. */
export function newObservations(
  before: SessionDto,
  after: SessionDto,
): ObservationDto[] {
  const seen = new Set(before.observations.map((o) => o.t));
  return after.observations.filter((o) => !seen.has(o.t));
}
