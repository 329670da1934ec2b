"""Persist a trained pipeline (references, scaling, codec) as one zip file.

The archive holds a ``manifest.json`` describing the embedding layout,
scaling statistics, classifier settings and reference labels; one ``.npz``
per reference sequence; and, when the pipeline compresses features, the
codec weights as ``model.bin``. Everything a ``classify`` call needs
travels in this single file.
"""
from __future__ import annotations

import io
import json
import tempfile
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .autoencoder import MLPModel, load_model, save_model
from .classify import ClassifierConfig, ReferenceSet
from .errors import ParseError, ValidationError
from .features import EmbeddingConfig, FeatureSequence, ScalingStats

_FORMAT = "skelact-bundle"
_VERSION = 1


@dataclass
class PipelineBundle:
    """Everything needed to classify a new pose sequence."""

    embedding: EmbeddingConfig
    scaling: ScalingStats
    refs: ReferenceSet
    codec: MLPModel | None = None      # None: classify on scaled features
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        scaled = self.scaling.layout + "|scaled"
        expected = self.codec.latent_layout if self.codec is not None else scaled
        if self.codec is not None and self.codec.layout != scaled:
            raise ValidationError(
                f"codec expects {self.codec.layout}, pipeline scales to {scaled}")
        if self.refs.layout != expected:
            raise ValidationError(
                f"reference layout {self.refs.layout} does not match "
                f"pipeline output {expected}")


def _embedding_to_dict(cfg: EmbeddingConfig) -> dict:
    return {
        "pairs": [list(p) for p in cfg.pairs],
        "triples": [list(t) for t in cfg.triples],
        "single_kinds": list(cfg.single_kinds),
        "pair_kinds": list(cfg.pair_kinds),
        "triple_kinds": list(cfg.triple_kinds),
    }


def _embedding_from_dict(d: dict) -> EmbeddingConfig:
    return EmbeddingConfig(
        pairs=tuple(tuple(p) for p in d["pairs"]),
        triples=tuple(tuple(t) for t in d["triples"]),
        single_kinds=tuple(d["single_kinds"]),
        pair_kinds=tuple(d["pair_kinds"]),
        triple_kinds=tuple(d["triple_kinds"]),
    )


def save_bundle(bundle: PipelineBundle, path: str | Path) -> None:
    cfg = bundle.refs.config
    manifest = {
        "format": _FORMAT,
        "version": _VERSION,
        "embedding": _embedding_to_dict(bundle.embedding),
        "scaling_layout": bundle.scaling.layout,
        "classifier": {
            "k": cfg.k,
            "shortlist_size": cfg.shortlist_size,
            "band": cfg.band,
            "reject_threshold": cfg.reject_threshold,
            "vote_over_shortlist": cfg.vote_over_shortlist,
        },
        "classes": bundle.refs.classes,
        "labels": bundle.refs.labels,
        "ref_layout": bundle.refs.layout,
        "has_codec": bundle.codec is not None,
        "meta": bundle.meta,
    }
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        zf.writestr("manifest.json", json.dumps(manifest, indent=2))
        buf = io.BytesIO()
        np.savez(buf, mins=bundle.scaling.mins, maxs=bundle.scaling.maxs)
        zf.writestr("scaling.npz", buf.getvalue())
        if bundle.codec is not None:
            with tempfile.TemporaryDirectory() as tmp:
                model_path = Path(tmp) / "model.bin"
                save_model(bundle.codec, model_path)
                zf.write(model_path, "model.bin")
        for i, seq in enumerate(bundle.refs.sequences):
            buf = io.BytesIO()
            np.savez(buf, t=seq.timestamps, values=seq.values)
            zf.writestr(f"refs/{i:05d}.npz", buf.getvalue())


def load_bundle(path: str | Path) -> PipelineBundle:
    with zipfile.ZipFile(path, "r") as zf:
        try:
            manifest = json.loads(zf.read("manifest.json"))
        except (KeyError, json.JSONDecodeError) as e:
            raise ParseError(f"{path}: bad or missing manifest: {e}") from e
        if manifest.get("format") != _FORMAT or manifest.get("version") != _VERSION:
            raise ParseError(f"{path}: not a version-{_VERSION} bundle")

        embedding = _embedding_from_dict(manifest["embedding"])
        with np.load(io.BytesIO(zf.read("scaling.npz"))) as z:
            scaling = ScalingStats(mins=z["mins"], maxs=z["maxs"],
                                   layout=manifest["scaling_layout"])

        codec = None
        if manifest["has_codec"]:
            with tempfile.TemporaryDirectory() as tmp:
                model_path = Path(tmp) / "model.bin"
                model_path.write_bytes(zf.read("model.bin"))
                codec = load_model(model_path)

        c = manifest["classifier"]
        cfg = ClassifierConfig(
            k=c["k"], shortlist_size=c["shortlist_size"], band=c["band"],
            reject_threshold=c["reject_threshold"],
            vote_over_shortlist=c["vote_over_shortlist"])

        labels = manifest["labels"]
        sequences = []
        for i, label in enumerate(labels):
            with np.load(io.BytesIO(zf.read(f"refs/{i:05d}.npz"))) as z:
                sequences.append(FeatureSequence(
                    timestamps=z["t"], values=z["values"],
                    layout=manifest["ref_layout"], label=label))
        refs = ReferenceSet(sequences, labels, config=cfg,
                            classes=manifest["classes"])
    return PipelineBundle(embedding=embedding, scaling=scaling, refs=refs,
                          codec=codec, meta=manifest.get("meta", {}))
