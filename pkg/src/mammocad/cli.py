"""Command-line front end.

Exit codes: 0 on success, 2 when a run finished with recorded per-case
failures, 3 on input errors (bad config, unreadable files, schema problems).
"""
from __future__ import annotations

import sys
from dataclasses import replace
from functools import wraps
from pathlib import Path

import click

from .config import RunConfig, load_config
from .errors import PipelineError
from .manifest import load_manifest
from .neural import load_model
from . import demo as demo_mod
from . import pipeline
from .review_server import start_server

EXIT_OK = 0
EXIT_PARTIAL = 2
EXIT_INPUT = 3


def _run_config(config_path: str | None, seed: int | None, out: str | None) -> RunConfig:
    cfg = load_config(config_path) if config_path else RunConfig()
    if seed is not None:
        cfg = cfg.with_seed(seed)
    else:
        cfg = cfg.with_seed(cfg.seed)
    if out is not None:
        cfg = replace(cfg, out_dir=out)
    return cfg


def _fail_on_pipeline_error(fn):
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PipelineError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)

    return wrapper


def _parse_l_range(text: str) -> tuple[int, int]:
    parts = text.split("..")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise click.BadParameter(f"expected A..B or a single integer, got {text!r}")
    return lo, hi


config_option = click.option(
    "--config", "config_path", type=click.Path(), default=None,
    help="JSON run configuration; defaults apply when omitted.",
)
seed_option = click.option(
    "--seed", type=int, default=None, help="Master seed, overrides the config."
)
out_option = click.option(
    "--out", type=click.Path(), default=None, help="Output directory, overrides the config."
)


@click.group()
def main():
    """Mass segmentation, feature extraction, subset search and scoring."""


@main.command()
@click.argument("manifest_path", type=click.Path())
@config_option
@seed_option
@out_option
@_fail_on_pipeline_error
def segment(manifest_path, config_path, seed, out):
    """Crop, equalize and sweep every manifest case into review bundles."""
    cfg = _run_config(config_path, seed, out)
    manifest = load_manifest(manifest_path)
    outcome = pipeline.cmd_segment(
        manifest, cfg, Path(manifest_path).parent, cfg.out_dir
    )
    click.echo(f"segmented {len(outcome.succeeded)}/{len(manifest)} cases")
    for case_id, reason in outcome.failed:
        click.echo(f"  failed {case_id}: {reason}", err=True)
    if outcome.partial:
        sys.exit(EXIT_PARTIAL)


@main.command()
@click.argument("manifest_path", type=click.Path())
@click.option("--selections", "selections_path", type=click.Path(), required=True,
              help="Selections file from the review step (or the auto fixture).")
@click.option("--bundles", "bundles_dir", type=click.Path(), default=None,
              help="Bundle directory; defaults to <out>/bundles.")
@config_option
@seed_option
@out_option
@_fail_on_pipeline_error
def features(manifest_path, selections_path, bundles_dir, config_path, seed, out):
    """Extract and normalize the feature table for every reviewed case."""
    cfg = _run_config(config_path, seed, out)
    manifest = load_manifest(manifest_path)
    bundles = bundles_dir or str(Path(cfg.out_dir) / "bundles")
    rows = pipeline.cmd_features(manifest, selections_path, cfg, bundles, cfg.out_dir)
    click.echo(f"wrote {len(rows)} feature rows to {Path(cfg.out_dir) / 'features.csv'}")


@main.command()
@click.argument("csv_path", type=click.Path())
@click.option("--l-range", "l_range", default=None,
              help="Subset sizes to search, e.g. 2..20.")
@click.option("--fitness-split", "fitness_split",
              type=click.Choice(["validation", "paper-test"]), default=None,
              help="Where subset fitness is scored.")
@config_option
@seed_option
@out_option
@_fail_on_pipeline_error
def select(csv_path, l_range, fitness_split, config_path, seed, out):
    """Search feature subsets, retrain the winner, score it on the test split."""
    cfg = _run_config(config_path, seed, out)
    ga = cfg.ga
    if l_range is not None:
        ga = replace(ga, l_range=_parse_l_range(l_range))
    if fitness_split is not None:
        ga = replace(ga, fitness_split=fitness_split)
    cfg = replace(cfg, ga=ga)
    outcome = pipeline.cmd_select(csv_path, cfg, cfg.out_dir)
    best = outcome.search.best
    click.echo(
        f"best subset: L={best.length} fitness={best.fitness:.4f} "
        f"ids={','.join(str(g) for g in best.best)}"
    )
    click.echo(f"test accuracy: {outcome.test_accuracy:.4f}")


@main.command()
@click.argument("csv_path", type=click.Path())
@click.option("--subset", default=None,
              help="Comma-separated 1-based feature ids; all features when omitted.")
@config_option
@seed_option
@out_option
@_fail_on_pipeline_error
def train(csv_path, subset, config_path, seed, out):
    """Train a classifier on the training split and save it."""
    cfg = _run_config(config_path, seed, out)
    genes = None
    if subset:
        try:
            genes = tuple(int(s) for s in subset.split(","))
        except ValueError:
            raise click.BadParameter(f"--subset must be integers, got {subset!r}")
    model = pipeline.cmd_train(csv_path, cfg, cfg.out_dir, genes)
    click.echo(
        f"trained on {model.shape.inputs} features, "
        f"final loss {model.loss_history[-1]:.4f}; saved model.json"
    )


@main.command()
@click.argument("csv_path", type=click.Path())
@click.option("--model", "model_path", type=click.Path(), required=True)
@config_option
@seed_option
@out_option
@_fail_on_pipeline_error
def evaluate(csv_path, model_path, config_path, seed, out):
    """Score a saved model on the test split and write the metric reports."""
    cfg = _run_config(config_path, seed, out)
    model = load_model(model_path)
    report = pipeline.cmd_evaluate(csv_path, model, cfg.out_dir)
    click.echo(f"test accuracy: {report.accuracy:.4f} over {report.n_samples} samples")


@main.group()
def review():
    """Reviewer-facing helpers."""


@review.command()
@click.option("--bundles", "bundles_dir", type=click.Path(), required=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static", "static_dir", type=click.Path(), default=None,
              help="Directory with the browser UI build, served at /.")
@click.option("--selections", "selections_path", type=click.Path(), default=None,
              help="Where decisions are persisted; defaults to <bundles>/selections.json.")
@_fail_on_pipeline_error
def serve(bundles_dir, port, host, static_dir, selections_path):
    """Host the review bundles and collect selections over HTTP."""
    server = start_server(bundles_dir, port, host, selections_path, static_dir)
    click.echo(f"review service on http://{host}:{port}/ (Ctrl-C stops it)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()


@review.command("auto")
@click.option("--bundles", "bundles_dir", type=click.Path(), required=True)
@click.option("--selections", "selections_path", type=click.Path(), required=True)
@_fail_on_pipeline_error
def review_auto(bundles_dir, selections_path):
    """Write a selections file without a human: largest sensible candidate."""
    n = pipeline.auto_select_fixture(bundles_dir, selections_path)
    click.echo(f"auto-selected {n} cases")


@main.group()
def demo():
    """Synthetic data so the pipeline runs without external images."""


@demo.command("generate")
@click.option("--per-class", "per_class", type=int, default=3, show_default=True)
@click.option("--side", type=int, default=128, show_default=True)
@seed_option
@out_option
@_fail_on_pipeline_error
def demo_generate(per_class, side, seed, out):
    """Write phantom images plus a manifest under the output directory."""
    out_dir = out or "demo-data"
    manifest, path = demo_mod.generate_demo_dataset(
        out_dir, n_per_class=per_class, side=side, seed=seed or 0
    )
    click.echo(f"wrote {len(manifest)} cases; manifest at {path}")
