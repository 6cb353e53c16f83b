import {
  ApiError,
  BundleDescriptor,
  ReviewClient,
  RoiListEntry,
  SelectionRecord,
} from './api.js';
import { Point, polygonProblem } from './geometry.js';

export interface CandidateView {
  index: number;
  threshold: number;
  pixelCount: number;
  maskUrl: string;
}

export interface CurrentRoi {
  roiId: string;
  imageUrl: string;
  biradsLabel: string;
  view: string;
  spacingMm: number;
  seedXy: [number, number];
  candidates: CandidateView[];
}

export const DEFAULT_OPACITY = 0.4;

/**
 * State of one reviewer's pass over the bundles. Holds the ROI worklist with
 * review flags, the loaded candidate stack, the chosen index, and the draft
 * polygon. All service traffic goes through the injected ReviewApi, so the
 * session itself never touches the DOM and is testable headless.
 */
export class ReviewSession {
  rois: RoiListEntry[] = [];
  current: CurrentRoi | null = null;
  chosenIndex = 0;
  polygon: Point[] = [];
  overlayOpacity = DEFAULT_OPACITY;
  /** BI-RADS label stays hidden during review unless the reviewer opts in. */
  showLabel = false;
  /** Load failures (unknown id, unreachable service) for the banner. */
  errorBanner: string | null = null;
  /** Submit-side problems shown inline next to the submit control. */
  validationMessage: string | null = null;
  /** Set after a network failure so the UI can offer a retry; draft is kept. */
  retryAvailable = false;

  private descriptor: BundleDescriptor | null = null;
  private previous: Record<string, SelectionRecord> = {};

  constructor(private api: ReviewClient) {}

  /** Re-fetch the worklist and any earlier decisions (stale-status refresh). */
  async refresh(): Promise<void> {
    this.rois = await this.api.listRois();
    const sel = await this.api.getSelections().catch(() => null);
    this.previous = sel ? sel.entries : {};
  }

  /** The candidate the slider currently points at. */
  chosenCandidate(): CandidateView | null {
    return this.current ? this.current.candidates[this.chosenIndex] : null;
  }

  /** Earlier decision for a ROI, if one is on record. */
  previousChoice(roiId: string): SelectionRecord | null {
    return this.previous[roiId] ?? null;
  }

  biradsOfCurrent(): string | null {
    return this.descriptor ? this.descriptor.birads_label : null;
  }

  /**
   * Load one bundle and make it current. On failure the banner is set and
   * the session is otherwise unchanged. Returns whether the load succeeded.
   */
  async open(roiId: string): Promise<boolean> {
    let desc: BundleDescriptor;
    try {
      desc = await this.api.getBundle(roiId);
    } catch (err) {
      this.errorBanner =
        err instanceof ApiError
          ? `cannot load ${roiId}: ${err.message}`
          : `service unreachable: ${String(err)}`;
      return false;
    }
    this.descriptor = desc;
    this.current = {
      roiId: desc.roi_id,
      imageUrl: this.api.fileUrl(desc.roi_id, desc.image),
      biradsLabel: desc.birads_label,
      view: desc.view,
      spacingMm: desc.spacing_mm,
      seedXy: desc.seed_xy,
      candidates: desc.candidates.map((c) => ({
        index: c.index,
        threshold: c.threshold,
        pixelCount: c.pixel_count,
        maskUrl: this.api.fileUrl(desc.roi_id, c.mask),
      })),
    };
    const prior = this.previous[roiId];
    this.chosenIndex =
      prior && prior.candidate_index < desc.candidates.length
        ? prior.candidate_index
        : 0;
    this.polygon = [];
    this.errorBanner = null;
    this.validationMessage = null;
    this.retryAvailable = false;
    return true;
  }

  /** Point the slider at a candidate. Out-of-range indices are a caller bug. */
  choose(index: number): void {
    if (!this.current) return;
    if (index < 0 || index >= this.current.candidates.length) {
      throw new RangeError(
        `candidate index ${index} out of range 0..${this.current.candidates.length - 1}`,
      );
    }
    this.chosenIndex = index;
  }

  /** Slider arrows: move by delta, clamped to the candidate list. */
  step(delta: number): void {
    if (!this.current) return;
    const n = this.current.candidates.length;
    this.chosenIndex = Math.min(n - 1, Math.max(0, this.chosenIndex + delta));
  }

  addVertex(p: Point): void {
    this.polygon.push([p[0], p[1]]);
    this.validationMessage = null;
  }

  moveVertex(i: number, p: Point): void {
    if (i >= 0 && i < this.polygon.length) {
      this.polygon[i] = [p[0], p[1]];
    }
  }

  removeLastVertex(): void {
    this.polygon.pop();
  }

  clearPolygon(): void {
    this.polygon = [];
    this.validationMessage = null;
  }

  /** Why the draft polygon blocks submission, or null when it does not. */
  draftProblem(): string | null {
    return polygonProblem(this.polygon);
  }

  /** First unreviewed ROI after the given one in worklist order, wrapping. */
  nextUnreviewed(afterRoiId: string | null): string | null {
    const n = this.rois.length;
    if (n === 0) return null;
    let start = 0;
    if (afterRoiId !== null) {
      const at = this.rois.findIndex((r) => r.roi_id === afterRoiId);
      start = at >= 0 ? at + 1 : 0;
    }
    for (let k = 0; k < n; k++) {
      const r = this.rois[(start + k) % n];
      if (!r.reviewed) return r.roi_id;
    }
    return null;
  }

  /**
   * Send the decision for the current ROI. A bad draft polygon is rejected
   * here, before any network traffic. On 2xx the ROI is marked reviewed and
   * the session advances to the next unreviewed one. Returns success.
   */
  async submit(reviewer: string): Promise<boolean> {
    if (!this.current) return false;
    const roiId = this.current.roiId;
    this.validationMessage = null;
    const problem = this.draftProblem();
    if (problem) {
      this.validationMessage = problem;
      return false;
    }
    const payload = {
      candidate_index: this.chosenIndex,
      reviewer,
      ...(this.polygon.length > 0
        ? { contour: this.polygon.map((p): [number, number] => [p[0], p[1]]) }
        : {}),
    };
    let ack;
    try {
      ack = await this.api.submitSelection(roiId, payload);
    } catch (err) {
      if (err instanceof ApiError) {
        this.validationMessage = err.message;
      } else {
        this.validationMessage = 'network failure, selection not sent';
        this.retryAvailable = true;
      }
      return false;
    }
    this.retryAvailable = false;
    for (const r of this.rois) {
      if (r.roi_id === roiId) r.reviewed = true;
    }
    this.previous[roiId] = {
      candidate_index: ack.candidate_index,
      contour: payload.contour ?? null,
      reviewer,
      timestamp: ack.timestamp,
    };
    const next = this.nextUnreviewed(roiId);
    if (next !== null) {
      await this.open(next);
    } else {
      this.polygon = [];
    }
    return true;
  }
}
