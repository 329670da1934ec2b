"""Train the latent codec and compare classification cost with and
without it.

The autoencoder squeezes each scaled frame vector down to a small
latent, which makes every DTW comparison proportionally cheaper. This
demo trains a quick model on synthetic gestures and reports the
reconstruction error and the speedup on a classification pass.
"""
import time

import numpy as np

from skelact import (TrainConfig, apply_scaling, embed_sequence,
                     encode_sequence, fit_scaling, make_dataset,
                     normalize_sequence, train_codec)
from skelact.classify import ReferenceSet, classify

seqs = make_dataset(per_class=6, seed=11)
feats = [embed_sequence(normalize_sequence(s)) for s in seqs]
stats = fit_scaling(feats)
scaled = [apply_scaling(f, stats) for f in feats]

cfg = TrainConfig(latent_dim=16, epochs=30, patience=6, seed=4)
model = train_codec(scaled, cfg)

sample = scaled[0]
recon = model.reconstruct(sample.values)
err = float(np.sqrt(np.mean((recon - sample.values) ** 2)))
print(f"input dim {sample.values.shape[1]} -> latent {cfg.latent_dim}")
print(f"reconstruction rmse: {err:.4f} on values in [-1, 1]")

encoded = [encode_sequence(f, model) for f in scaled]


def time_classify(pool, query):
    refs = ReferenceSet(pool[1:], [s.label for s in seqs[1:]])
    t0 = time.perf_counter()
    result = classify(query, refs)
    return result.label, 1000 * (time.perf_counter() - t0)


raw_label, raw_ms = time_classify(scaled, scaled[0])
enc_label, enc_ms = time_classify(encoded, encoded[0])
print(f"\nfull-width classify:  {raw_label:12s} {raw_ms:7.1f} ms")
print(f"latent classify:      {enc_label:12s} {enc_ms:7.1f} ms")
print(f"speedup: {raw_ms / enc_ms:.1f}x")
