"""End-to-end benchmark: split, fit the pipeline, score the held-out set.

One call runs the whole chain on a dataset manifest or an in-memory
sequence list, producing an evaluation report plus the fitted pipeline
bundle. Per-case wall clock is measured around classification only; a
second column records the full embed-to-answer latency.
"""
from __future__ import annotations

import logging
import time
from pathlib import Path

from .autoencoder import encode_sequence, train_codec
from .bundle import PipelineBundle, save_bundle
from .classify import ReferenceSet, calibrate_reject_threshold, classify
from .config import PipelineConfig
from .errors import EmptyDataset
from .features import (EmbeddingConfig, FeatureSequence, apply_scaling,
                       embed_sequence, fit_scaling)
from .metrics import (EvalReport, write_confusion_csv, write_report_csv,
                      write_report_json)
from .normalize import normalize_sequence
from .skeleton_io import DatasetManifest, PoseSequence, load_sequence, split

log = logging.getLogger(__name__)


def load_dataset(manifest: DatasetManifest, base_dir: str | Path
                 ) -> list[PoseSequence]:
    base = Path(base_dir)
    return [load_sequence(base / path, label=label)
            for path, label, _, _ in manifest.entries]


def sequences_to_manifest(sequences: list[PoseSequence]) -> DatasetManifest:
    """Index in-memory sequences so the manifest split rule applies to them.

    Entry paths are synthetic (the position in the list); resolve them
    back with ``int(path)``.
    """
    entries = [(f"{i:05d}", s.label or "unknown", s.subject or "",
                s.trial or "") for i, s in enumerate(sequences)]
    return DatasetManifest(entries)


def fit_pipeline(train: list[PoseSequence], config: PipelineConfig,
                 classes: list[str]) -> PipelineBundle:
    """Normalize, embed, scale, optionally train the codec, build references."""
    emb_cfg = EmbeddingConfig()
    norm_cfg = config.normalize_config()
    clamp = config["scale.clamp"]

    feats = []
    labels = []
    for seq in train:
        normed = normalize_sequence(seq, norm_cfg)
        feats.append(embed_sequence(normed, emb_cfg))
        labels.append(seq.label or "unknown")

    scaling = fit_scaling(feats)
    scaled = [apply_scaling(f, scaling, clamp) for f in feats]

    codec = None
    refs_feats = scaled
    if config["codec.enabled"]:
        codec = train_codec(scaled, config.train_config())
        best = min((e["val_loss"] for e in codec.history), default=float("nan"))
        log.info("codec trained: %d epochs, best val loss %.6f",
                 len(codec.history), best)
        refs_feats = [encode_sequence(s, codec) for s in scaled]

    refs = ReferenceSet(refs_feats, labels, config=config.classifier_config(),
                        classes=sorted(classes))
    return PipelineBundle(embedding=emb_cfg, scaling=scaling, refs=refs,
                          codec=codec, meta={"config": config.echo()})


def embed_query(seq: PoseSequence, bundle: PipelineBundle,
                config: PipelineConfig | None = None) -> FeatureSequence:
    """Run one query through the fitted front half of the pipeline."""
    cfg = config or PipelineConfig(dict(bundle.meta.get("config", {})))
    normed = normalize_sequence(seq, cfg.normalize_config())
    feat = embed_sequence(normed, bundle.embedding)
    scaled = apply_scaling(feat, bundle.scaling, cfg["scale.clamp"])
    if bundle.codec is not None:
        return encode_sequence(scaled, bundle.codec)
    return scaled


def run_benchmark(sequences: list[PoseSequence], config: PipelineConfig,
                  classes: list[str] | None = None,
                  out_dir: str | Path | None = None,
                  calibrate_reject: bool = False,
                  bundle_path: str | Path | None = None
                  ) -> tuple[EvalReport, PipelineBundle]:
    """Split the labeled sequences, fit on train, classify and score test."""
    if classes is not None:
        if not classes:
            raise EmptyDataset("empty class subset")
        sequences = [s for s in sequences if s.label in set(classes)]
    else:
        classes = sorted({s.label or "unknown" for s in sequences})
    if not sequences:
        raise EmptyDataset("no sequences in the requested classes")

    manifest = sequences_to_manifest(sequences)
    train_man, test_man = split(manifest, config["split.ratio"],
                                config["split.seed"])
    train = [sequences[int(p)] for p, _, _, _ in train_man.entries]
    test = [sequences[int(p)] for p, _, _, _ in test_man.entries]
    log.info("split: %d train / %d test", len(train), len(test))

    bundle = fit_pipeline(train, config, classes)
    if calibrate_reject and bundle.refs.config.reject_threshold is None:
        tau = calibrate_reject_threshold(bundle.refs)
        bundle.refs.config.reject_threshold = tau
        log.info("calibrated reject threshold: %.4f", tau)

    truths, preds, classify_ms, e2e_ms = [], [], [], []
    for seq in test:
        t0 = time.perf_counter()
        query = embed_query(seq, bundle, config)
        front_ms = (time.perf_counter() - t0) * 1e3
        result = classify(query, bundle.refs)
        truths.append(seq.label or "unknown")
        preds.append(result.label)
        classify_ms.append(result.elapsed_ms)
        e2e_ms.append(front_ms + result.elapsed_ms)

    report = EvalReport(classes=sorted(classes), true_labels=truths,
                        pred_labels=preds, elapsed_ms=classify_ms,
                        e2e_ms=e2e_ms, config_echo=config.echo())

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_report_json(report, out / "report.json")
        write_report_csv(report, out / "report.csv")
        write_confusion_csv(report, out / "confusion.csv")
    if bundle_path is not None:
        save_bundle(bundle, bundle_path)
    return report, bundle
