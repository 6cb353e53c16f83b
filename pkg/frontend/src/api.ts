/** Typed client for the review service endpoints. All payload field names
 *  follow the wire format, so they stay snake_case. */

export interface RoiListEntry {
  roi_id: string;
  candidate_count: number;
  reviewed: boolean;
}

export interface CandidateDescriptor {
  index: number;
  threshold: number;
  pixel_count: number;
  mask: string;
}

export interface BundleDescriptor {
  version: string;
  roi_id: string;
  image: string;
  bit_depth: number;
  spacing_mm: number;
  patient_age: number;
  birads_label: string;
  view: string;
  seed_xy: [number, number];
  candidate_count: number;
  candidates: CandidateDescriptor[];
}

export interface SelectionRecord {
  candidate_index: number;
  contour: [number, number][] | null;
  reviewer: string;
  timestamp: string;
}

export interface SelectionsFile {
  version: string;
  entries: Record<string, SelectionRecord>;
}

export interface SubmitPayload {
  candidate_index: number;
  contour?: [number, number][];
  reviewer?: string;
}

export interface SubmitAck {
  status: 'ok';
  roi_id: string;
  candidate_index: number;
  timestamp: string;
}

/** Non-2xx response from the service; `code` is its machine-readable error tag. */
export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function asJson<T>(resp: Response): Promise<T> {
  if (resp.ok) {
    return (await resp.json()) as T;
  }
  let code = 'error';
  let message = `${resp.status} ${resp.statusText}`;
  try {
    const body = (await resp.json()) as { error?: string; message?: string };
    if (body.error) code = body.error;
    if (body.message) message = body.message;
  } catch {
    // non-JSON error body, keep the status line
  }
  throw new ApiError(resp.status, code, message);
}

/** What the session needs from the service; ReviewApi is the live
 *  implementation, tests substitute an in-memory one. */
export interface ReviewClient {
  listRois(): Promise<RoiListEntry[]>;
  getBundle(roiId: string): Promise<BundleDescriptor>;
  getSelections(): Promise<SelectionsFile | null>;
  fileUrl(roiId: string, name: string): string;
  submitSelection(roiId: string, payload: SubmitPayload): Promise<SubmitAck>;
}

export class ReviewApi implements ReviewClient {
  constructor(private base = '') {}

  listRois(): Promise<RoiListEntry[]> {
    return fetch(`${this.base}/api/rois`).then((r) => asJson<RoiListEntry[]>(r));
  }

  getBundle(roiId: string): Promise<BundleDescriptor> {
    return fetch(`${this.base}/api/roi/${encodeURIComponent(roiId)}`).then((r) =>
      asJson<BundleDescriptor>(r),
    );
  }

  /** Earlier decisions, if the service keeps its manifest inside the bundle
   *  directory. Missing file is normal on a fresh review round. */
  async getSelections(): Promise<SelectionsFile | null> {
    const resp = await fetch(`${this.base}/files/selections.json`);
    if (resp.status === 404) return null;
    return asJson<SelectionsFile>(resp);
  }

  /** URL of a raw bundle file (ROI image, candidate mask). */
  fileUrl(roiId: string, name: string): string {
    return `${this.base}/files/${encodeURIComponent(roiId)}/${encodeURIComponent(name)}`;
  }

  submitSelection(roiId: string, payload: SubmitPayload): Promise<SubmitAck> {
    return fetch(`${this.base}/api/selection/${encodeURIComponent(roiId)}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
    }).then((r) => asJson<SubmitAck>(r));
  }
}
