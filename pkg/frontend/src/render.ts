/**
 * SVG scatter rendering. Produces markup as a string so it can run and be
 * tested without a browser; the app layer injects it into the page and
 * attaches the click handler.
 */

import { domainToScreen, type PlotFrame } from "./transform.js";
import type { SessionViewModel } from "./viewModel.js";

export const PLOT_MARGIN = 40;

export interface RenderOptions {
  width: number;
  height: number;
}

export function frameFor(vm: SessionViewModel, opts: RenderOptions): PlotFrame {
  return {
    width: opts.width - 2 * PLOT_MARGIN,
    height: opts.height - 2 * PLOT_MARGIN,
    left: PLOT_MARGIN,
    top: PLOT_MARGIN,
    xBounds: vm.xBounds,
    yBounds: vm.yBounds,
  };
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Color scale over observed values: light (worst) to dark (best). */
export function valueColor(value: number, lo: number, hi: number, direction: "min" | "max"): string {
  let u = hi > lo ? (value - lo) / (hi - lo) : 0.5;
  if (direction === "min") u = 1 - u; // darker = better
  const channel = Math.round(230 - 170 * u);
  return `rgb(${channel},${channel},255)`;
}

export function renderScatterSvg(vm: SessionViewModel, opts: RenderOptions): string {
  const frame = frameFor(vm, opts);
  const values = vm.points.map((p) => p.value);
  const lo = Math.min(...values, Infinity);
  const hi = Math.max(...values, -Infinity);
  const direction = vm.best !== null && vm.best.value === lo ? "min" : "max";

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${opts.width}" ` +
      `height="${opts.height}" data-phase="${vm.phase}" ` +
      `data-click-enabled="${vm.clickEnabled}">`,
  );
  parts.push(
    `<rect class="plot-area" x="${frame.left}" y="${frame.top}" ` +
      `width="${frame.width}" height="${frame.height}" ` +
      `fill="white" stroke="black"/>`,
  );
  parts.push(
    `<text class="banner" x="${PLOT_MARGIN}" y="${PLOT_MARGIN - 12}">` +
      `${escapeXml(vm.banner)} (batch ${vm.batch}/${vm.budgetBatches})</text>`,
  );

  for (const point of vm.points) {
    const { px, py } = domainToScreen(frame, point.x, point.y);
    const fill = vm.points.length > 0 ? valueColor(point.value, lo, hi, direction) : "gray";
    // humans are squares, machines circles, so sources read at a glance
    if (point.source === "human") {
      parts.push(
        `<rect class="obs obs-human" data-t="${point.t}" ` +
          `x="${px - 5}" y="${py - 5}" width="10" height="10" ` +
          `fill="${fill}" stroke="black"/>`,
      );
    } else {
      parts.push(
        `<circle class="obs obs-${point.source}" data-t="${point.t}" ` +
          `cx="${px}" cy="${py}" r="5" fill="${fill}" stroke="black"/>`,
      );
    }
    if (point.isBest) {
      parts.push(
        `<circle class="best-marker" data-t="${point.t}" ` +
          `data-value="${point.value}" cx="${px}" cy="${py}" r="9" ` +
          `fill="none" stroke="red" stroke-width="2"/>`,
      );
    }
  }
  parts.push("</svg>");
  return parts.join("\n");
}
