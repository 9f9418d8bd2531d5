/**
 * Affine transform between a domain box (one axis pair of the search space)
 * and plot pixels. The y pixel axis points down, so the vertical domain
 * axis is flipped.
 */

export interface PlotFrame {
  /** Pixel size of the drawable area (excludes margins). */
  width: number;
  height: number;
  /** Pixel offset of the drawable area's top-left corner. */
  left: number;
  top: number;
  /** Domain intervals for the horizontal and vertical plot axes. */
  xBounds: [number, number];
  yBounds: [number, number];
}

export interface ScreenPoint {
  px: number;
  py: number;
}

export function validateFrame(frame: PlotFrame): void {
  if (frame.width <= 0 || frame.height <= 0) {
    throw new Error("plot area must have positive size");
  }
  for (const [lo, hi] of [frame.xBounds, frame.yBounds]) {
    if (!(lo < hi)) throw new Error(`degenerate axis bounds [${lo}, ${hi}]`);
  }
}

export function domainToScreen(frame: PlotFrame, x: number, y: number): ScreenPoint {
  validateFrame(frame);
  const [xlo, xhi] = frame.xBounds;
  const [ylo, yhi] = frame.yBounds;
  return {
    px: frame.left + ((x - xlo) / (xhi - xlo)) * frame.width,
    py: frame.top + ((yhi - y) / (yhi - ylo)) * frame.height,
  };
}

export function screenToDomain(frame: PlotFrame, p: ScreenPoint): [number, number] {
  validateFrame(frame);
  const [xlo, xhi] = frame.xBounds;
  const [ylo, yhi] = frame.yBounds;
  return [
    xlo + ((p.px - frame.left) / frame.width) * (xhi - xlo),
    yhi - ((p.py - frame.top) / frame.height) * (yhi - ylo),
  ];
}

/** Domain width of one pixel on each axis; the transform's quantization. */
export function pixelResolution(frame: PlotFrame): [number, number] {
  validateFrame(frame);
  return [
    (frame.xBounds[1] - frame.xBounds[0]) / frame.width,
    (frame.yBounds[1] - frame.yBounds[0]) / frame.height,
  ];
}

export function inDomainBox(frame: PlotFrame, x: number, y: number): boolean {
  return (
    x >= frame.xBounds[0] &&
    x <= frame.xBounds[1] &&
    y >= frame.yBounds[0] &&
    y <= frame.yBounds[1]
  );
}
