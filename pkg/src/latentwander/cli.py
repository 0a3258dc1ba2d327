"""Command-line pipeline: synth, ingest, build-index, project, build-map,
eval, query, serve.

Exit codes: 0 success, 1 usage error, 2 data error. Data errors print
``error[<code>]: <message>`` to stderr.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from . import core, encoder, latentmap, pipeline, retrieval, service
from .errors import LatentWanderError

click.UsageError.exit_code = 1  # spec: usage errors exit 1, data errors exit 2


def _data_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except LatentWanderError as exc:
            click.echo(f"error[{exc.code}]: {exc}", err=True)
            sys.exit(2)
        except OSError as exc:
            click.echo(f"error[io_error]: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _parse_distribution(raw: str | None) -> tuple[float, ...]:
    if raw is None:
        return (1 / 6,) * 6
    parts = raw.split(",")
    if len(parts) != 6:
        raise click.UsageError("--emotion-dist needs six comma-separated weights")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise click.UsageError(f"--emotion-dist: {exc}")


def _dataset_paths(dataset_dir: str) -> dict[str, Path]:
    base = Path(dataset_dir)
    return {
        "clips": base / "clips.jsonl",
        "embeddings": base / "embeddings.lwem",
        "queries": base / "queries.tsv",
        "encoder": base / "encoder.json",
        "index": base / "index.lwix",
        "points": base / "points.csv",
        "map": base / "map.json",
    }


def _load_dataset_encoder(dataset_dir: str) -> encoder.EncoderConfig:
    paths = _dataset_paths(dataset_dir)
    if paths["encoder"].exists():
        return encoder.load_encoder_config(paths["encoder"])
    return encoder.EncoderConfig()


@click.group()
def main():
    """Retrieval and latent-map engine for audiovisual archives."""


@main.command()
@click.option("--out", required=True, type=click.Path(), help="Dataset directory to create.")
@click.option("--clips", "clip_count", default=1000, show_default=True, type=int)
@click.option("--captions-per-clip", default=3, show_default=True, type=int)
@click.option("--sigma", default=0.0, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--dim", default=256, show_default=True, type=int)
@click.option("--hash-seed", default=0, show_default=True, type=int)
@click.option("--emotion-dist", default=None, help="Six comma-separated weights.")
@_data_errors
def synth(out, clip_count, captions_per_clip, sigma, seed, dim, hash_seed, emotion_dist):
    """Generate a seeded synthetic dataset with ground-truth queries."""
    enc_cfg = encoder.EncoderConfig(dimension=dim, mode="emotional", hash_seed=hash_seed)
    synth_cfg = encoder.SynthConfig(
        clip_count=clip_count,
        captions_per_clip=captions_per_clip,
        noise_sigma=sigma,
        emotion_distribution=_parse_distribution(emotion_dist),
        rng_seed=seed,
    )
    dataset = encoder.generate_synthetic_dataset(synth_cfg, enc_cfg)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = _dataset_paths(out)
    core.save_clips(dataset.clips, paths["clips"])
    encoder.save_embeddings_binary(dataset.embeddings, paths["embeddings"])
    retrieval.save_ground_truth(dataset.ground_truth, paths["queries"])
    encoder.save_encoder_config(enc_cfg, paths["encoder"])
    click.echo(f"wrote {len(dataset.clips)} clips to {out_dir}")


@main.command()
@click.option("--clips", "clips_file", required=True, type=click.Path(exists=False))
@click.option("--embeddings", "embeddings_file", required=True, type=click.Path(exists=False))
@click.option("--out", required=True, type=click.Path())
@click.option("--dim", default=None, type=int, help="Expected embedding dimension.")
@click.option("--hash-seed", default=0, show_default=True, type=int)
@click.option("--paraphrase-cmd", default=None, help="Command producing one paraphrase per line.")
@_data_errors
def ingest(clips_file, embeddings_file, out, dim, hash_seed, paraphrase_cmd):
    """Validate and normalize external clip and embedding files."""
    clips = core.load_clips(clips_file)
    if paraphrase_cmd:
        hook = pipeline.paraphrase_command_hook(paraphrase_cmd.split())
        clips = [
            core.ClipRecord(
                id=c.id,
                video_id=c.video_id,
                start_s=c.start_s,
                end_s=c.end_s,
                naive_captions=tuple(pipeline.expand_captions(c.naive_captions, hook)),
                emotional_captions=tuple(pipeline.expand_captions(c.emotional_captions, hook)),
                emotion=c.emotion,
                media_url=c.media_url,
            )
            for c in clips
        ]
    with open(embeddings_file, "rb") as fh:
        raw = fh.read(4)
    if raw == b"LWEM":
        embeddings = encoder.load_embeddings_binary(embeddings_file)
    else:
        embeddings = encoder.load_embeddings_text(embeddings_file)
    known = {c.id for c in clips}
    for emb in embeddings:
        if emb.id not in known:
            raise retrieval.MissingGroundTruth(f"embedding {emb.id!r} has no clip record")
    if dim is not None and embeddings and embeddings[0].dimension != dim:
        raise encoder.DimensionMismatch(
            f"embeddings are {embeddings[0].dimension}-dimensional, expected {dim}"
        )
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = _dataset_paths(out)
    core.save_clips(clips, paths["clips"])
    encoder.save_embeddings_binary(embeddings, paths["embeddings"])
    dimension = embeddings[0].dimension if embeddings else 256
    encoder.save_encoder_config(
        encoder.EncoderConfig(dimension=dimension, mode="emotional", hash_seed=hash_seed),
        paths["encoder"],
    )
    click.echo(f"ingested {len(clips)} clips / {len(embeddings)} embeddings into {out_dir}")


@main.command("build-index")
@click.option("--dataset", required=True, type=click.Path(), envvar="LW_DATASET")
@click.option("--out", default=None, type=click.Path())
@_data_errors
def build_index(dataset, out):
    """Build the cosine index from a dataset's clips and embeddings."""
    paths = _dataset_paths(dataset)
    clips = core.load_clips(paths["clips"])
    embeddings = encoder.load_embeddings_binary(paths["embeddings"])
    emotions = {c.id: c.emotion for c in clips if c.emotion is not None}
    index = retrieval.build_index(embeddings, emotions)
    out_path = Path(out) if out else paths["index"]
    index.save(out_path)
    click.echo(f"indexed {len(index)} clips ({index.dimension}d) into {out_path}")


@main.command()
@click.option("--dataset", required=True, type=click.Path(), envvar="LW_DATASET")
@click.option("--out", default=None, type=click.Path())
@click.option("--method", default="pca", show_default=True, type=click.Choice(["pca", "imported"]))
@click.option("--import", "import_file", default=None, type=click.Path(),
              help="Points file to import when --method imported.")
@_data_errors
def project(dataset, out, method, import_file):
    """Project clip embeddings to 2D (built-in PCA or imported coordinates)."""
    paths = _dataset_paths(dataset)
    if method == "imported":
        if not import_file:
            raise click.UsageError("--method imported requires --import FILE")
        points = latentmap.import_points(import_file)
        known = {c.id for c in core.load_clips(paths["clips"])}
        for p in points:
            if p.clip_id not in known:
                raise latentmap.InvalidPoint(f"point id {p.clip_id!r} not in dataset")
    else:
        embeddings = encoder.load_embeddings_binary(paths["embeddings"])
        points = latentmap.project_pca(embeddings)
    out_path = Path(out) if out else paths["points"]
    latentmap.save_points(points, out_path)
    click.echo(f"projected {len(points)} points into {out_path}")


@main.command("build-map")
@click.option("--points", "points_file", required=True, type=click.Path(), envvar="LW_POINTS")
@click.option("--out", required=True, type=click.Path())
@click.option("--cell-size", default=None, type=float)
@click.option("--cell-count", default=None, type=int)
@click.option("--pad", default=0.05, show_default=True, type=float)
@_data_errors
def build_map(points_file, out, cell_size, cell_count, pad):
    """Bin projected points into the walkable grid map."""
    points = latentmap.import_points(points_file)
    cfg = latentmap.ProjectionConfig(
        pad_fraction=pad, cell_size=cell_size, cell_count=cell_count
    )
    grid = latentmap.build_grid_map(points, cfg)
    grid.save(out)
    click.echo(
        f"map {grid.width}x{grid.height} with {len(grid.cells)} positive cells into {out}"
    )


@main.command("eval")
@click.option("--dataset", required=True, type=click.Path(), envvar="LW_DATASET")
@click.option("--index", "index_file", default=None, type=click.Path(), envvar="LW_INDEX")
@click.option("--strategy", default="full", show_default=True,
              type=click.Choice(["full", "filter"]))
@click.option("--ks", default="1,5,10", show_default=True)
@_data_errors
def eval_cmd(dataset, index_file, strategy, ks):
    """Evaluate R@K over the dataset's ground-truth queries."""
    paths = _dataset_paths(dataset)
    try:
        k_values = sorted({int(k) for k in ks.split(",")})
    except ValueError as exc:
        raise click.UsageError(f"--ks: {exc}")
    index = retrieval.VectorIndex.load(index_file or paths["index"])
    pairs = retrieval.load_ground_truth(paths["queries"])
    enc_cfg = _load_dataset_encoder(dataset)
    report = retrieval.evaluate(index, pairs, strategy, k_values, enc_cfg)
    header = ["strategy"] + [f"R@{k}" for k in k_values] + ["MedR", "queries", "not_found"]
    median = f"{report.median_rank:.1f}" if report.median_rank is not None else "-"
    row = (
        [strategy]
        + [f"{report.r_at[k]:.3f}" for k in k_values]
        + [median, str(report.query_count), str(report.not_found)]
    )
    widths = [max(len(h), len(r)) for h, r in zip(header, row)]
    click.echo("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    click.echo("  ".join(r.ljust(w) for r, w in zip(row, widths)))


@main.command()
@click.option("--dataset", required=True, type=click.Path(), envvar="LW_DATASET")
@click.option("--index", "index_file", default=None, type=click.Path(), envvar="LW_INDEX")
@click.option("--text", required=True)
@click.option("--strategy", default="full", show_default=True,
              type=click.Choice(["full", "filter"]))
@click.option("--k", default=10, show_default=True, type=int)
@_data_errors
def query(dataset, index_file, text, strategy, k):
    """Run one text query and print the ranked clips."""
    if not text.strip():
        raise click.UsageError("--text must be non-empty")
    if k < 1:
        raise click.UsageError("--k must be >= 1")
    paths = _dataset_paths(dataset)
    index = retrieval.VectorIndex.load(index_file or paths["index"])
    enc_cfg = _load_dataset_encoder(dataset)
    clips = {c.id: c for c in core.load_clips(paths["clips"])} if paths["clips"].exists() else {}
    if strategy == "filter":
        try:
            result = retrieval.query_strategy_filter(index, text, k, enc_cfg)
        except pipeline.NoEmotionFound:
            click.echo("no emotion phrase found; falling back to full strategy", err=True)
            result = retrieval.query_strategy_full(index, text, k, enc_cfg)
    else:
        result = retrieval.query_strategy_full(index, text, k, enc_cfg)
    click.echo(f"comparisons: {result.comparisons_made}")
    for rank, (clip_id, score) in enumerate(result.ranked, start=1):
        clip = clips.get(clip_id)
        emotion = clip.emotion.value if clip and clip.emotion else "-"
        caption = clip.naive_captions[0] if clip and clip.naive_captions else ""
        click.echo(f"{rank:3d}  {clip_id}  {score:+.4f}  {emotion:9s}  {caption}")


@main.command()
@click.option("--listen", default="127.0.0.1:8000", show_default=True, envvar="LW_LISTEN")
@click.option("--dataset", default=None, type=click.Path(), envvar="LW_DATASET")
@click.option("--index", "index_file", default=None, type=click.Path(), envvar="LW_INDEX")
@click.option("--map", "map_file", default=None, type=click.Path(), envvar="LW_MAP")
@click.option("--points", "points_file", default=None, type=click.Path(), envvar="LW_POINTS")
@click.option("--remote-encoder", default=None, envvar="LW_REMOTE_ENCODER")
@click.option("--default-k", default=10, show_default=True, type=int, envvar="LW_DEFAULT_K")
@click.option("--cors", default=None, envvar="LW_CORS",
              help="Comma-separated allowed origins.")
@_data_errors
def serve(listen, dataset, index_file, map_file, points_file, remote_encoder, default_k, cors):
    """Serve the read-only HTTP API over the built artifacts."""
    if dataset:
        paths = _dataset_paths(dataset)
        index_file = index_file or (str(paths["index"]) if paths["index"].exists() else None)
        map_file = map_file or (str(paths["map"]) if paths["map"].exists() else None)
        points_file = points_file or (
            str(paths["points"]) if paths["points"].exists() else None
        )
    cfg = service.ServiceConfig(
        listen=listen,
        dataset_dir=dataset,
        index_path=index_file,
        map_path=map_file,
        points_path=points_file,
        remote_encoder_url=remote_encoder,
        default_k=default_k,
        cors_origins=tuple(o.strip() for o in cors.split(",")) if cors else (),
    )
    host, port = cfg.host_port  # validate before loading anything
    click.echo(f"serving on http://{host}:{port}")
    service.serve(cfg)


if __name__ == "__main__":
    main()
