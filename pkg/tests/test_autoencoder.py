import numpy as np
import pytest

from skelact.autoencoder import (MLPModel, TrainConfig, encode_sequence,
                                 identity_model, load_model, loss_and_gradients,
                                 make_model, save_model, train_codec)
from skelact.errors import Diverged, InsufficientData, LayoutMismatch, ParseError
from skelact.features import FeatureSequence

from oracles import fd_gradients


def small_model(rng, input_dim=5):
    cfg = TrainConfig(hidden=(4,), latent_dim=2, seed=int(rng.integers(1 << 30)))
    return make_model(input_dim, cfg, layout=f"test:d{input_dim}", rng=rng)


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(21)
    for _ in range(50):
        model = small_model(rng)
        layers = model.encoder + model.decoder
        x = rng.normal(size=(3, 5))

        def loss():
            return loss_and_gradients(layers, x)[0]

        _, grads = loss_and_gradients(layers, x)
        params = [p for layer in layers for p in (layer.weights, layer.bias)]
        fd = fd_gradients(loss, params, h=1e-5)
        bp = [g for pair in grads for g in pair]
        for got, want in zip(bp, fd):
            err = np.linalg.norm(got - want) / (np.linalg.norm(want)
                                                + np.linalg.norm(got) + 1e-12)
            assert err < 1e-4


def test_shapes_and_mirror_structure():
    rng = np.random.default_rng(1)
    cfg = TrainConfig(hidden=(8, 4), latent_dim=3)
    model = make_model(10, cfg, layout="test:d10", rng=rng)
    assert model.input_dim == 10
    assert model.latent_dim == 3
    assert [l.weights.shape for l in model.encoder] == [(8, 10), (4, 8), (3, 4)]
    assert [l.weights.shape for l in model.decoder] == [(4, 3), (8, 4), (10, 8)]
    # hidden layers squash, latent and output stay linear
    assert model.encoder[-1].activation == "linear"
    assert model.decoder[-1].activation == "linear"
    assert all(l.activation == "tanh" for l in model.encoder[:-1])


def make_feature_sequences(rng, n_seq=6, frames=40, dim=6):
    out = []
    for _ in range(n_seq):
        out.append(FeatureSequence(
            timestamps=np.arange(frames) / 30.0,
            values=rng.normal(size=(frames, dim)),
            layout=f"test:d{dim}"))
    return out


def test_training_reduces_reconstruction_error():
    rng = np.random.default_rng(5)
    # Data on a 2-D subspace of 6-D space: compressible to latent 2.
    basis = rng.normal(size=(2, 6))
    seqs = []
    for _ in range(8):
        coeffs = rng.normal(size=(40, 2))
        seqs.append(FeatureSequence(timestamps=np.arange(40) / 30.0,
                                    values=coeffs @ basis, layout="test:d6"))
    cfg = TrainConfig(hidden=(8,), latent_dim=2, epochs=150, batch_size=16,
                      seed=3, patience=150)
    model = train_codec(seqs, cfg)
    first = model.history[0]["train_loss"]
    last = model.history[-1]["train_loss"]
    assert last < first * 0.1


def test_best_validation_weights_are_restored():
    rng = np.random.default_rng(9)
    seqs = make_feature_sequences(rng)
    cfg = TrainConfig(hidden=(4,), latent_dim=2, epochs=30, batch_size=32, seed=11)
    model = train_codec(seqs, cfg)
    # Rebuild the internal holdout split: same seed, same draw order.
    frames = np.concatenate([s.values for s in seqs], axis=0)
    check_rng = np.random.default_rng(cfg.seed)
    order = check_rng.permutation(frames.shape[0])
    n_val = max(1, round(cfg.val_fraction * frames.shape[0]))
    val = frames[order[:n_val]]
    val_loss = float(np.mean((model.reconstruct(val) - val) ** 2))
    best_in_curve = min(e["val_loss"] for e in model.history)
    assert val_loss == pytest.approx(best_in_curve, abs=1e-12)


def test_early_stopping_cuts_training_short():
    rng = np.random.default_rng(17)
    seqs = make_feature_sequences(rng, n_seq=3, frames=30)
    cfg = TrainConfig(hidden=(4,), latent_dim=2, epochs=500, batch_size=16,
                      patience=3, seed=2)
    model = train_codec(seqs, cfg)
    assert len(model.history) < 500


def test_divergence_detected():
    # A NaN anywhere in the data poisons the loss; training must stop loudly.
    rng = np.random.default_rng(8)
    seqs = make_feature_sequences(rng, n_seq=2, frames=40)
    seqs[0].values[5, 2] = np.nan
    cfg = TrainConfig(hidden=(4,), latent_dim=2, epochs=50, batch_size=16, seed=0)
    with pytest.raises(Diverged):
        train_codec(seqs, cfg)


def test_too_few_frames_rejected():
    rng = np.random.default_rng(2)
    seqs = make_feature_sequences(rng, n_seq=1, frames=10)
    with pytest.raises(InsufficientData):
        train_codec(seqs, TrainConfig(batch_size=64))


def test_identity_model_round_trips():
    model = identity_model(4, layout="test:d4")
    x = np.arange(8.0).reshape(2, 4)
    assert np.array_equal(model.encode(x), x)
    assert np.array_equal(model.reconstruct(x), x)


def test_encode_sequence_checks_layout():
    model = identity_model(3, layout="test:d3")
    seq = FeatureSequence(timestamps=np.arange(2.0), values=np.zeros((2, 3)),
                          layout="other:d3")
    with pytest.raises(LayoutMismatch):
        encode_sequence(seq, model)


def test_latent_layout_names_fingerprint_and_dim():
    rng = np.random.default_rng(4)
    model = small_model(rng)
    assert model.latent_layout == f"latent:{model.fingerprint}:d2"


def test_serialization_round_trip(tmp_path):
    rng = np.random.default_rng(31)
    model = small_model(rng)
    path = tmp_path / "model.bin"
    save_model(model, path)
    back = load_model(path)
    assert back.layout == model.layout
    x = rng.normal(size=(4, 5))
    assert np.array_equal(back.encode(x), model.encode(x))
    assert np.array_equal(back.reconstruct(x), model.reconstruct(x))
    for a, b in zip(model.encoder + model.decoder, back.encoder + back.decoder):
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.bias, b.bias)
        assert a.activation == b.activation


def test_load_rejects_wrong_magic(tmp_path):
    path = tmp_path / "bogus.bin"
    path.write_bytes(b'{"magic":"nope","version":1}\n')
    with pytest.raises(ParseError):
        load_model(path)
