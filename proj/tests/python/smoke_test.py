"""Smoke tests for the python bindings: a few known values per subsystem."""

import math
import sys

import gradsurg as gs


def approx(a, b, tol=1e-9):
    return abs(a - b) < tol


def main():
    # geometry
    e = gs.normalize([3.0, 4.0, 0.0])
    assert approx(e.coords[0], 0.6) and approx(e.coords[1], 0.8)
    a = gs.normalize([1.0, 0.0, 0.0])
    p = gs.normalize([0.0, 1.0, 0.0])
    n = gs.normalize([0.0, 0.0, 1.0])
    assert approx(gs.cosine_similarity(a, p), 0.0)
    assert approx(gs.euclidean_distance(a, p), math.sqrt(2.0))
    assert approx(gs.effective_strength(gs.Metric.euclidean, 0.5),
                  gs.effective_strength(gs.Metric.cosine, 0.5))

    try:
        gs.normalize([0.0, 0.0])
        raise AssertionError("expected GradsurgError")
    except gs.GradsurgError:
        pass

    # losses
    assert approx(gs.triplet_loss_cosine([1, 0, 0], [0, 1, 0], [0, 0, 1], 1.0), math.log(2.0))
    g = gs.numeric_gradient(gs.LossKind.cosine, gs.LossParams(), [1, 0, 0], [0, 1, 0],
                            [0, 0, 1], gs.TripletRole.positive)
    assert approx(g[0], -0.5, 1e-6)

    # surgery
    cfg = gs.SurgeryConfig()
    up = gs.compose(cfg, a, p, n)
    assert approx(up.g_p[0], -0.5) and approx(up.g_n[0], 0.5)
    assert approx(up.g_a[1], -0.5) and approx(up.g_a[2], 0.5)

    w = gs.pair_weights(gs.PairWeightKind.linear, gs.SimilarityPair(0.8, 0.6), cfg,
                        gs.empty_relative_stats(gs.RelativeForm.linear))
    assert approx(w.p_pos, 0.2) and approx(w.p_neg, 0.6)
    assert approx(gs.triplet_weight(gs.TripletWeightKind.cosine, gs.SimilarityPair(0.8, 0.3), 1.0),
                  1.0 / (1.0 + math.exp(0.5)))
    assert gs.positive_mask(gs.MaskKind.sc1, gs.SimilarityPair(0.3, 0.5)) == gs.MaskAction.zero

    best = gs.best_combination_preset()
    assert best.direction == gs.DirectionKind.cosine_orthogonal
    assert best.pair_weight == gs.PairWeightKind.linear_ms
    assert best.triplet_weight == gs.TripletWeightKind.circle

    # mining
    sets = gs.relative_sets(gs.SimilarityPair(0.8, 0.6), [0.9, 0.5], [0.3, 0.65], 0.1)
    assert sets.set_p == [0.5] and sets.set_n == [0.65]

    # evaluation
    embs = [gs.normalize(v) for v in ([1, 0], [0.99, 0.1], [0, 1], [0.1, 0.99])]
    report = gs.recall_at_k(embs, [0, 0, 1, 1], [1])
    assert report.recall[0] == 1.0

    # a tiny end-to-end run
    dspec = gs.SyntheticSpec()
    dspec.num_classes = 4
    dspec.samples_per_class = 4
    dspec.input_dim = 8
    dspec.noise_sigma = 0.2
    dspec.holdout_classes = 1
    espec = gs.EncoderSpec()
    espec.kind = gs.EncoderKind.table
    espec.embed_dim = 4
    params = gs.TrainParams()
    params.epochs = 5
    params.batch.classes_per_batch = 2
    params.batch.samples_per_class = 3
    params.base_lr = 0.3
    result = gs.train(dspec, espec, cfg, 0.1, params, [1])
    assert len(result.log.epochs) == 5
    assert 0.0 <= result.log.final_recall(False, 1) <= 1.0

    print("python smoke tests passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
