"""Run the evaluation harness on synthetic gestures under both presets.

The heavy preset compares full-width features against every reference;
the encoded preset adds the latent codec, a shortlist prefilter, and a
narrow DTW band. Accuracy should match while per-query cost drops.
"""
from skelact import PipelineConfig, run_benchmark, make_dataset

seqs = make_dataset(per_class=10, seed=42)

for preset in ("heavy", "encoded"):
    cfg = PipelineConfig.load(preset)
    if preset == "encoded":
        cfg = cfg.with_overrides(["codec.epochs=30", "codec.patience=6"])
    report, bundle = run_benchmark(seqs, cfg)
    print(f"[{preset}]")
    print(f"  accuracy     {report.accuracy:.4f}")
    print(f"  weighted f1  {report.weighted_f1:.4f}")
    print(f"  mean query   {report.mean_ms:.1f} ms")
    print(f"  refs kept    {len(bundle.refs.sequences)}")
    support = report.confusion.sum(axis=1)
    tested = [(c, f1) for (c, f1), n in
              zip(sorted(report.per_class_f1.items()), support) if n > 0]
    worst = min(tested, key=lambda kv: kv[1])
    print(f"  weakest tested class {worst[0]} (f1={worst[1]:.3f})")
    print()
