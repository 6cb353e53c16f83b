/** Pixel coordinates as [x, y], x = column. Matches the selection contour format. */
export type Point = [number, number];

function orient(a: Point, b: Point, c: Point): number {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

/** p, already collinear with segment ab, lies inside its bounding box. */
function within(a: Point, b: Point, p: Point): boolean {
  return (
    Math.min(a[0], b[0]) <= p[0] &&
    p[0] <= Math.max(a[0], b[0]) &&
    Math.min(a[1], b[1]) <= p[1] &&
    p[1] <= Math.max(a[1], b[1])
  );
}

function samePoint(a: Point, b: Point): boolean {
  return a[0] === b[0] && a[1] === b[1];
}

/** True when segments p1p2 and p3p4 share any point. */
function segmentsTouch(p1: Point, p2: Point, p3: Point, p4: Point): boolean {
  const d1 = orient(p3, p4, p1);
  const d2 = orient(p3, p4, p2);
  const d3 = orient(p1, p2, p3);
  const d4 = orient(p1, p2, p4);
  if (
    (d1 > 0) !== (d2 > 0) && d1 !== 0 && d2 !== 0 &&
    (d3 > 0) !== (d4 > 0) && d3 !== 0 && d4 !== 0
  ) {
    return true;
  }
  if (d1 === 0 && within(p3, p4, p1)) return true;
  if (d2 === 0 && within(p3, p4, p2)) return true;
  if (d3 === 0 && within(p1, p2, p3)) return true;
  if (d4 === 0 && within(p1, p2, p4)) return true;
  return false;
}

/**
 * Client-side twin of the review service's contour check, so a bad polygon
 * is rejected before it goes over the wire. A closed polygon is simple when
 * it has >= 3 vertices, no zero-length edges, and no self-intersection;
 * adjacent edges may only share their one endpoint.
 */
export function isSimplePolygon(vertices: Point[]): boolean {
  const n = vertices.length;
  if (n < 3) return false;
  const pts = vertices.map((v): Point => [Number(v[0]), Number(v[1])]);
  const edges: [Point, Point][] = pts.map((p, i) => [p, pts[(i + 1) % n]]);
  for (const [a, b] of edges) {
    if (samePoint(a, b)) return false;
  }
  for (let i = 0; i < n; i++) {
    for (let j = i + 1; j < n; j++) {
      const [a, b] = edges[i];
      const [c, d] = edges[j];
      const shared = [a, b].filter((p) => samePoint(p, c) || samePoint(p, d));
      if (shared.length >= 2) return false;
      if (shared.length === 1) {
        // consecutive edges: any contact beyond the shared endpoint
        // means a collinear fold-back
        const s = shared[0];
        const a2 = samePoint(a, s) ? b : a;
        const c2 = samePoint(c, s) ? d : c;
        if (orient(s, a2, c2) === 0 && (within(s, a2, c2) || within(s, c2, a2))) {
          return false;
        }
      } else if (segmentsTouch(a, b, c, d)) {
        return false;
      }
    }
  }
  return true;
}

/** Human-readable reason a draft contour cannot be submitted, or null if it can. */
export function polygonProblem(vertices: Point[]): string | null {
  if (vertices.length === 0) return null;
  if (vertices.length < 3) return 'polygon needs at least 3 vertices';
  if (!isSimplePolygon(vertices)) return 'polygon must be simple (no self-intersection)';
  return null;
}

/** Index of the vertex within reach of p, or -1. Used for drag-to-move editing. */
export function nearestVertex(vertices: Point[], p: Point, reach: number): number {
  let best = -1;
  let bestDist = reach * reach;
  for (let i = 0; i < vertices.length; i++) {
    const dx = vertices[i][0] - p[0];
    const dy = vertices[i][1] - p[1];
    const d = dx * dx + dy * dy;
    if (d <= bestDist) {
      best = i;
      bestDist = d;
    }
  }
  return best;
}
