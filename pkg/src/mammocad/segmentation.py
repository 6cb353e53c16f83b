"""Seeded region growing with a threshold sweep, plus the human review loop.

Growing starts from a seed pixel and admits every 8-connected pixel whose
absolute intensity difference from the seed value stays within a threshold.
Sweeping the threshold yields a nested family of candidate masks; a reviewer
picks one (optionally redrawing its outline), and the pick is recorded in a
selection manifest keyed by ROI id.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import PipelineError
from .fsio import atomic_write_text
from .imaging import GrayImage, RoiRecord, load_png, save_png

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)

BUNDLE_VERSION = 1
SELECTIONS_VERSION = 1


@dataclass
class MassMask:
    """A binary mass segmentation tagged with the threshold that produced it."""

    bits: np.ndarray
    threshold: float
    seed: tuple[int, int]

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=bool)
        if self.bits.ndim != 2:
            raise ValueError("bits must be 2D")
        r, c = self.seed
        if not (0 <= r < self.bits.shape[0] and 0 <= c < self.bits.shape[1]):
            raise ValueError("seed outside mask array")
        if not self.bits[r, c]:
            raise ValueError("seed pixel not set in mask")

    @property
    def pixel_count(self) -> int:
        return int(self.bits.sum())


@dataclass
class CandidateSet:
    """Deduplicated candidate masks from one threshold sweep, smallest first."""

    roi_id: str
    candidates: list[MassMask]
    steps: int
    seed: tuple[int, int]

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("candidate set must not be empty")
        for small, big in zip(self.candidates, self.candidates[1:]):
            if small.pixel_count >= big.pixel_count:
                raise ValueError("candidate pixel counts must strictly increase")
            if (small.bits & ~big.bits).any():
                raise ValueError("candidates must nest")

    def __len__(self) -> int:
        return len(self.candidates)


@dataclass
class SelectionEntry:
    """One reviewer decision: a candidate index, optionally a redrawn outline.

    ``contour`` vertices are (x, y) pixel coordinates, x = column.
    """

    candidate_index: int
    contour: list[tuple[float, float]] | None = None
    reviewer: str = ""
    timestamp: str = ""


def grow_region(image: GrayImage, seed: tuple[int, int], threshold: float) -> MassMask:
    """Grow an 8-connected region of pixels within ``threshold`` of the seed value.

    The admission test compares against the fixed seed intensity, not the
    running region, so the result is independent of traversal order.
    """
    r, c = seed
    if not (0 <= r < image.height and 0 <= c < image.width):
        raise PipelineError("seed-out-of-bounds", f"seed {seed} outside image")
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    levels = image.levels.astype(np.int64)
    band = np.abs(levels - levels[r, c]) <= threshold
    labels, _ = ndimage.label(band, structure=EIGHT_CONNECTED)
    bits = labels == labels[r, c]
    return MassMask(bits, float(threshold), (r, c))


def threshold_sweep(
    image: GrayImage,
    steps: int = 64,
    seed: tuple[int, int] | None = None,
    roi_id: str = "",
) -> CandidateSet:
    """Grow candidates at ``steps`` thresholds spanning the ROI's grey range.

    Thresholds are linearly spaced over [0, g_max - g_min]. Identical masks
    from adjacent thresholds collapse to one candidate tagged with the first
    threshold that produced it, so candidate pixel counts strictly increase.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    if seed is None:
        seed = (image.height // 2, image.width // 2)
    span = int(image.levels.max()) - int(image.levels.min())
    thresholds = np.linspace(0.0, float(span), steps)
    candidates: list[MassMask] = []
    for t in thresholds:
        mask = grow_region(image, seed, float(t))
        if candidates and mask.pixel_count == candidates[-1].pixel_count:
            # nesting makes equal counts imply equal masks, but verify anyway
            if np.array_equal(mask.bits, candidates[-1].bits):
                continue
        candidates.append(mask)
    return CandidateSet(roi_id, candidates, steps, seed)


def auto_select(cands: CandidateSet) -> int:
    """Fixture rule standing in for a reviewer: the largest candidate that
    covers at most half the ROI, else the smallest one."""
    area = cands.candidates[0].bits.size
    best = 0
    for i, cand in enumerate(cands.candidates):
        if cand.pixel_count <= area / 2:
            best = i
    return best


# --- review bundles -------------------------------------------------------

def emit_review_bundle(roi: RoiRecord, cands: CandidateSet, out_dir: str | Path) -> Path:
    """Write one ROI's review bundle: the ROI PNG, candidate mask PNGs, and a
    JSON descriptor. Returns the bundle directory (named after the ROI id)."""
    bundle_dir = Path(out_dir) / roi.roi_id
    bundle_dir.mkdir(parents=True, exist_ok=True)
    save_png(roi.image, bundle_dir / "roi.png")
    entries = []
    for i, cand in enumerate(cands.candidates):
        name = f"mask_{i:03d}.png"
        mask_img = GrayImage(
            np.where(cand.bits, 255, 0).astype(np.uint8), 8, roi.image.spacing_mm
        )
        save_png(mask_img, bundle_dir / name)
        entries.append(
            {
                "index": i,
                "threshold": cand.threshold,
                "pixel_count": cand.pixel_count,
                "mask": name,
            }
        )
    descriptor = {
        "version": BUNDLE_VERSION,
        "roi_id": roi.roi_id,
        "image": "roi.png",
        "bit_depth": roi.image.bit_depth,
        "spacing_mm": roi.image.spacing_mm,
        "patient_age": roi.patient_age,
        "birads_label": roi.birads_label,
        "view": roi.view,
        "seed_xy": [cands.seed[1], cands.seed[0]],
        "candidate_count": len(cands.candidates),
        "candidates": entries,
    }
    atomic_write_text(bundle_dir / "bundle.json", json.dumps(descriptor, indent=2) + "\n")
    return bundle_dir


def load_review_bundle(bundle_dir: str | Path) -> tuple[dict, RoiRecord, CandidateSet]:
    """Read back a bundle directory written by emit_review_bundle."""
    bundle_dir = Path(bundle_dir)
    desc_path = bundle_dir / "bundle.json"
    try:
        descriptor = json.loads(desc_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise PipelineError("io", f"cannot read {desc_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PipelineError("schema", f"{desc_path}: {exc}") from exc
    for key in ("roi_id", "image", "seed_xy", "candidates", "spacing_mm"):
        if key not in descriptor:
            raise PipelineError("schema", f"{desc_path}: missing key {key!r}")
    image = load_png(bundle_dir / descriptor["image"], descriptor["spacing_mm"])
    roi = RoiRecord(
        roi_id=descriptor["roi_id"],
        image=image,
        patient_age=float(descriptor.get("patient_age", 0.0)),
        birads_label=descriptor.get("birads_label", "B-2"),
        view=descriptor.get("view", "CC"),
    )
    seed = (int(descriptor["seed_xy"][1]), int(descriptor["seed_xy"][0]))
    candidates = []
    for entry in descriptor["candidates"]:
        mask_img = load_png(bundle_dir / entry["mask"])
        candidates.append(
            MassMask(mask_img.levels > 0, float(entry["threshold"]), seed)
        )
    cands = CandidateSet(descriptor["roi_id"], candidates, len(candidates), seed)
    return descriptor, roi, cands


# --- selection manifest ---------------------------------------------------

def load_selections(path: str | Path) -> dict[str, SelectionEntry]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise PipelineError("io", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PipelineError("schema", f"{path}: {exc}") from exc
    if not isinstance(doc, dict) or "entries" not in doc:
        raise PipelineError("schema", f"{path}: missing 'entries'")
    out: dict[str, SelectionEntry] = {}
    for roi_id, raw in doc["entries"].items():
        try:
            contour = raw.get("contour")
            if contour is not None:
                contour = [(float(x), float(y)) for x, y in contour]
            out[roi_id] = SelectionEntry(
                candidate_index=int(raw["candidate_index"]),
                contour=contour,
                reviewer=str(raw.get("reviewer", "")),
                timestamp=str(raw.get("timestamp", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise PipelineError("schema", f"{path}: bad entry for {roi_id}: {exc}") from exc
    return out


def save_selections(entries: dict[str, SelectionEntry], path: str | Path) -> None:
    doc = {
        "version": SELECTIONS_VERSION,
        "entries": {
            roi_id: {
                "candidate_index": e.candidate_index,
                "contour": [[float(x), float(y)] for x, y in e.contour]
                if e.contour is not None
                else None,
                "reviewer": e.reviewer,
                "timestamp": e.timestamp,
            }
            for roi_id, e in sorted(entries.items())
        },
    }
    atomic_write_text(path, json.dumps(doc, indent=2) + "\n")


# --- polygon geometry -----------------------------------------------------

def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _within(a, b, p) -> bool:
    """p, already collinear with segment ab, lies inside its bounding box."""
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _segments_cross(p1, p2, p3, p4) -> bool:
    """True when segments p1p2 and p3p4 share any point."""
    d1 = _orient(p3, p4, p1)
    d2 = _orient(p3, p4, p2)
    d3 = _orient(p1, p2, p3)
    d4 = _orient(p1, p2, p4)
    if ((d1 > 0) != (d2 > 0)) and d1 != 0 and d2 != 0 and ((d3 > 0) != (d4 > 0)) and d3 != 0 and d4 != 0:
        return True
    if d1 == 0 and _within(p3, p4, p1):
        return True
    if d2 == 0 and _within(p3, p4, p2):
        return True
    if d3 == 0 and _within(p1, p2, p3):
        return True
    if d4 == 0 and _within(p1, p2, p4):
        return True
    return False


def is_simple_polygon(vertices: list[tuple[float, float]]) -> bool:
    """Check the closed polygon has >= 3 vertices, no zero-length edges, and
    no self-intersection (adjacent edges may only share their one endpoint)."""
    n = len(vertices)
    if n < 3:
        return False
    pts = [(float(x), float(y)) for x, y in vertices]
    edges = [(pts[i], pts[(i + 1) % n]) for i in range(n)]
    for a, b in edges:
        if a == b:
            return False
    for i in range(n):
        for j in range(i + 1, n):
            a, b = edges[i]
            c, d = edges[j]
            shared = [p for p in (a, b) if p in (c, d)]
            if len(shared) >= 2:
                return False
            if len(shared) == 1:
                # consecutive edges: any contact beyond the shared endpoint
                # means a collinear fold-back
                s = shared[0]
                a2 = b if a == s else a
                c2 = d if c == s else c
                if _orient(s, a2, c2) == 0 and (_within(s, a2, c2) or _within(s, c2, a2)):
                    return False
            else:
                if _segments_cross(a, b, c, d):
                    return False
    return True


def rasterize_polygon(
    vertices: list[tuple[float, float]], shape: tuple[int, int]
) -> np.ndarray:
    """Fill a polygon onto a pixel grid by the even-odd rule.

    Pixel centres sit at integer (x, y); centres exactly on an edge count as
    inside, so an axis-aligned square with corners (0,0)..(4,4) fills a 5x5
    block.
    """
    h, w = shape
    pts = [(float(x), float(y)) for x, y in vertices]
    n = len(pts)
    xs, ys = np.meshgrid(np.arange(w, dtype=float), np.arange(h, dtype=float))
    inside = np.zeros(shape, dtype=bool)
    on_edge = np.zeros(shape, dtype=bool)
    eps = 1e-9
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        if y1 != y2:
            cond = (y1 > ys) != (y2 > ys)
            with np.errstate(invalid="ignore", divide="ignore"):
                xint = x1 + (ys - y1) * (x2 - x1) / (y2 - y1)
            inside ^= cond & (xs < xint)
        cross = (x2 - x1) * (ys - y1) - (y2 - y1) * (xs - x1)
        scale = max(abs(x2 - x1), abs(y2 - y1), 1.0)
        near = np.abs(cross) <= eps * scale
        in_box = (
            (xs >= min(x1, x2) - eps)
            & (xs <= max(x1, x2) + eps)
            & (ys >= min(y1, y2) - eps)
            & (ys <= max(y1, y2) + eps)
        )
        on_edge |= near & in_box
    return inside | on_edge


def apply_selection(cands: CandidateSet, entry: SelectionEntry) -> MassMask:
    """Resolve a reviewer decision into the final mask.

    Without an edited contour this returns the chosen candidate. With one, it
    rasterizes the polygon interior and keeps the candidate's threshold tag.
    """
    if not (0 <= entry.candidate_index < len(cands.candidates)):
        raise PipelineError(
            "bad-selection",
            f"candidate index {entry.candidate_index} out of range "
            f"(roi {cands.roi_id!r} has {len(cands.candidates)} candidates)",
        )
    chosen = cands.candidates[entry.candidate_index]
    if entry.contour is None:
        return chosen
    if not is_simple_polygon(entry.contour):
        raise PipelineError("bad-selection", "contour is not a simple polygon")
    bits = rasterize_polygon(entry.contour, chosen.bits.shape)
    if not bits.any():
        raise PipelineError("bad-selection", "contour rasterizes to an empty mask")
    seed = chosen.seed
    if not bits[seed]:
        rr, cc = np.nonzero(bits)
        seed = (int(rr[0]), int(cc[0]))
    return MassMask(bits, chosen.threshold, seed)


def resolve_selection(
    cands: CandidateSet, selections: dict[str, SelectionEntry]
) -> MassMask:
    """Look up this ROI's review decision and apply it."""
    if cands.roi_id not in selections:
        raise PipelineError("unreviewed-roi", f"no selection recorded for {cands.roi_id!r}")
    return apply_selection(cands, selections[cands.roi_id])
