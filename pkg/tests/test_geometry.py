import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boxopt.geometry import (
    BoundingBox,
    boxes_to_array,
    clip_box_to_bounds,
    greedy_nms,
    iou,
    iou_matrix,
    psi_inverse,
    psi_transform,
    psi_transform_array,
)

finite_coord = st.floats(-500.0, 500.0, allow_nan=False, allow_infinity=False)
positive_size = st.floats(0.5, 300.0, allow_nan=False, allow_infinity=False)


@st.composite
def boxes(draw):
    u1 = draw(finite_coord)
    v1 = draw(finite_coord)
    w = draw(positive_size)
    h = draw(positive_size)
    return BoundingBox(u1, v1, u1 + w, v1 + h)


class TestBoundingBox:
    def test_accessors(self):
        b = BoundingBox(1, 2, 5, 10)
        assert b.width == 4
        assert b.height == 8
        assert b.center_u == 3
        assert b.center_v == 6
        assert b.area == 32

    @pytest.mark.parametrize("coords", [(0, 0, 0, 10), (0, 0, 10, 0), (5, 0, 3, 10)])
    def test_rejects_degenerate(self, coords):
        with pytest.raises(ValueError):
            BoundingBox(*coords)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            BoundingBox(0, 0, math.inf, 10)

    def test_array_round_trip(self):
        b = BoundingBox(1.5, 2.5, 3.5, 4.5)
        assert BoundingBox.from_array(b.as_array()) == b


class TestIou:
    def test_identical(self):
        b = BoundingBox(0, 0, 10, 10)
        assert iou(b, b) == 1.0

    def test_disjoint(self):
        assert iou(BoundingBox(0, 0, 10, 10), BoundingBox(20, 20, 30, 30)) == 0.0

    def test_half_overlap(self):
        # intersection 50, union 150
        a = BoundingBox(0, 0, 10, 10)
        b = BoundingBox(0, 5, 10, 15)
        assert iou(a, b) == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_edge_touching_is_zero(self):
        assert iou(BoundingBox(0, 0, 10, 10), BoundingBox(10, 0, 20, 10)) == 0.0

    @given(boxes(), boxes())
    def test_symmetry(self, a, b):
        assert iou(a, b) == pytest.approx(iou(b, a), abs=1e-12)
        assert 0.0 <= iou(a, b) <= 1.0

    @given(boxes())
    def test_self_iou_is_exactly_one(self, a):
        assert iou(a, a) == 1.0

    @given(st.lists(boxes(), min_size=1, max_size=8), st.lists(boxes(), min_size=1, max_size=8))
    def test_matrix_matches_scalar(self, bs_a, bs_b):
        mat = iou_matrix(boxes_to_array(bs_a), boxes_to_array(bs_b))
        for i, a in enumerate(bs_a):
            for j, b in enumerate(bs_b):
                assert mat[i, j] == pytest.approx(iou(a, b), abs=1e-12)


class TestPsiTransform:
    def test_hand_values_z_zero(self):
        got = psi_transform(BoundingBox(0, 0, 10, 20), 0.0)
        np.testing.assert_allclose(got, [5.0, 10.0, math.log(10), math.log(20)])

    def test_hand_values_z_log2(self):
        got = psi_transform(BoundingBox(0, 0, 10, 20), math.log(2))
        np.testing.assert_allclose(got, [2.5, 5.0, math.log(10), math.log(20)])

    @given(boxes(), st.floats(0.1, 10.0), st.floats(-3.0, 3.0))
    def test_scaling_shifts_log_sizes_only(self, b, s, z):
        delta = psi_transform(b.scaled(s), z + math.log(s)) - psi_transform(b, z)
        np.testing.assert_allclose(delta, [0, 0, math.log(s), math.log(s)], atol=1e-9)

    @given(boxes(), boxes(), st.floats(0.25, 4.0), st.floats(-2.0, 2.0))
    def test_pairwise_differences_scale_invariant(self, a, b, s, z):
        # the property the kernel's scale invariance rests on
        zs = z + math.log(s)
        before = psi_transform(a, z) - psi_transform(b, z)
        after = psi_transform(a.scaled(s), zs) - psi_transform(b.scaled(s), zs)
        np.testing.assert_allclose(after, before, atol=1e-12, rtol=1e-9)

    @given(boxes(), st.floats(-3.0, 3.0))
    def test_inverse_round_trip(self, b, z):
        back = psi_inverse(psi_transform(b, z), z)
        np.testing.assert_allclose(back.as_array(), b.as_array(), atol=1e-9)

    @given(st.lists(boxes(), min_size=1, max_size=6), st.floats(-3.0, 3.0))
    def test_array_matches_scalar(self, bs, z):
        arr = psi_transform_array(boxes_to_array(bs), z)
        for i, b in enumerate(bs):
            np.testing.assert_allclose(arr[i], psi_transform(b, z), atol=1e-12)


class TestGreedyNms:
    def test_empty(self):
        assert greedy_nms([], 0.5) == []

    def test_single_box(self):
        b = BoundingBox(0, 0, 10, 10)
        assert greedy_nms([(b, 0.9)], 0.3) == [(b, 0.9)]

    def test_identical_boxes_keep_higher_score(self):
        b = BoundingBox(0, 0, 10, 10)
        assert greedy_nms([(b, 0.5), (b, 0.9)], 0.3) == [(b, 0.9)]

    def test_three_box_example(self):
        # IoU(1,2)=1/3 > 0.3 suppresses box 2; IoU(1,3)=0 keeps box 3
        dets = [
            (BoundingBox(0, 0, 10, 10), 0.9),
            (BoundingBox(0, 5, 10, 15), 0.8),
            (BoundingBox(0, 40, 10, 50), 0.7),
        ]
        kept = greedy_nms(dets, 0.3)
        assert kept == [dets[0], dets[2]]

    def test_tie_break_is_lexicographic(self):
        a = BoundingBox(0, 0, 10, 10)
        b = BoundingBox(0, 1, 10, 11)
        kept = greedy_nms([(b, 0.5), (a, 0.5)], 0.3)
        assert kept[0][0] == a

    def test_invalid_threshold(self):
        with pytest.raises(ValueError):
            greedy_nms([], 1.5)

    @given(
        st.lists(st.tuples(boxes(), st.floats(0.0, 1.0)), max_size=15),
        st.floats(0.0, 0.9),
    )
    @settings(max_examples=50)
    def test_output_subset_and_non_overlapping(self, dets, threshold):
        kept = greedy_nms(dets, threshold)
        assert all(k in dets for k in kept)
        scores = [s for _, s in kept]
        assert scores == sorted(scores, reverse=True)
        for i in range(len(kept)):
            for j in range(i + 1, len(kept)):
                assert iou(kept[i][0], kept[j][0]) <= threshold + 1e-12


class TestClipBoxToBounds:
    def test_inside_box_unchanged(self):
        b = BoundingBox(5, 5, 20, 20)
        assert clip_box_to_bounds(b, (0, 0, 100, 100)) == b

    def test_shift_preserves_size(self):
        b = BoundingBox(-5, 90, 15, 110)
        c = clip_box_to_bounds(b, (0, 0, 100, 100))
        assert (c.width, c.height) == (b.width, b.height)
        assert c.u1 >= 0 and c.v2 <= 100

    def test_oversized_box_shrinks_to_bounds(self):
        c = clip_box_to_bounds(BoundingBox(-50, -50, 300, 300), (0, 0, 100, 100))
        assert c.coords == (0, 0, 100, 100)
