# Copyright 2026 The spatialift Authors
# SPDX-License-Identifier: Apache-2.0

import json
import os
import tempfile

import numpy as np
import pytest

import spatialift as sl


def test_worked_encodings():
    box, dims = (10, 120, 30, 145), (512, 512)
    assert sl.encode_bbox(box, dims, sl.Scheme.nfp()) == "(0.0195, 0.2344, 0.0586, 0.2832)"
    assert sl.encode_bbox(box, dims, sl.Scheme.ivb(224)) == "(4, 52, 13, 63)"
    assert sl.encode_bbox(box, dims, sl.Scheme.diga(16)) == "(0, 4, 3, 11, 6, 0)"
    assert sl.nearest_anchor((20, 132.5), dims, sl.Scheme.diga()) == (0, 4)
    assert sl.numeric_token_cost("12.34") == 5


def test_round_trip_within_bound():
    rng = np.random.default_rng(3)
    dims = (640, 480)
    for scheme in (sl.Scheme.nfp(), sl.Scheme.ivb(), sl.Scheme.from_id("diga24x14")):
        bx = sl.quantization_error_bound(scheme, dims[0]) + 1e-9
        by = sl.quantization_error_bound(scheme, dims[1]) + 1e-9
        for _ in range(200):
            x = np.sort(rng.uniform(0, dims[0], 2))
            y = np.sort(rng.uniform(0, dims[1], 2))
            box = (x[0], y[0], x[1], y[1])
            back = sl.decode_bbox(sl.encode_bbox(box, dims, scheme), dims, scheme)
            assert all(abs(a - b) <= t for a, b, t in zip(back, box, (bx, by, bx, by)))


def test_errors_map_to_exceptions():
    with pytest.raises(sl.InvalidArgument):
        sl.encode_bbox((30, 0, 10, 5), (64, 64), sl.Scheme.ivb())
    with pytest.raises(sl.ParseError):
        sl.decode_point("(1, 2", (64, 64), sl.Scheme.ivb())
    assert issubclass(sl.SchemaError, ValueError)


def test_metrics():
    assert sl.score_meteor("a cat", "dogs") == 0.0
    assert sl.score_meteor("cat", "cat") == 0.5
    six = "the cat sat on the mat"
    assert sl.score_meteor(six, six) == pytest.approx(1 - 0.5 / 216, abs=1e-12)
    assert sl.meteor_detail("dog runs", "dog running")["matches"] == 2
    assert sl.spatial_correct("It is on the left.", "left")
    assert not sl.spatial_correct("left or right", "left", "strict")
    assert sl.spatial_correct("left or right", "left", "containment")
    stats = sl.keyword_stats(["The left side", "right here", "nothing"], ["left", "right"])
    assert stats == [("left", 1, pytest.approx(1 / 3)), ("right", 1, pytest.approx(1 / 3))]


def test_pooling_matches_numpy():
    grid = np.random.default_rng(1).normal(size=(8, 256, 16))
    out = sl.spatiotemporal_pool(grid, jobs=2)
    assert out.shape == (256 + 8, 16)
    np.testing.assert_allclose(out[:256], grid.mean(axis=0), rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(out[256:], grid.mean(axis=1), rtol=1e-12, atol=1e-15)


def test_spatial_bench_and_cli():
    coco = {
        "images": [{"id": 1, "width": 1000, "height": 1000}],
        "annotations": [
            {"id": 1, "image_id": 1, "category_id": 1, "bbox": [90, 500, 20, 20]},
            {"id": 2, "image_id": 1, "category_id": 2, "bbox": [190, 100, 20, 20]},
            {"id": 3, "image_id": 1, "category_id": 3, "bbox": [890, 900, 20, 20]},
        ],
        "categories": [{"id": 1, "name": "cat"}, {"id": 2, "name": "dog"}, {"id": 3, "name": "car"}],
    }
    items = sl.build_spatial_bench(coco, seed=1, icl=False)
    # Left/right: the car is on the right half, cat and dog on the left.
    lr = [i for i in items if i["axis"] == "LR"]
    assert len(lr) == 4
    assert {i["gt_keyword"] for i in lr} == {"left", "right"}

    with tempfile.TemporaryDirectory() as d:
        ann = os.path.join(d, "a.json")
        with open(ann, "w") as f:
            json.dump(coco, f)
        out = os.path.join(d, "sb.jsonl")
        assert sl.run_cli(["build", "spatial-bench", "--no-icl", "--seed", "1", "--annotations", ann, "-o", out]) == 0
        with open(out) as f:
            assert [json.loads(line) for line in f] == items
        assert sl.run_cli(["build", "ift", "--annotations", os.path.join(d, "missing.json"), "-o", out]) == 1
