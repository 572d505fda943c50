"""Ball statistics, recursive purity-driven generation, membership attachment."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gbfsvm.data_io import Dataset
from gbfsvm.granular_ball import (BallConfigError, BallGenConfig, FuzzyBallSet,
                                  MembershipRangeError, attach_membership_from_function,
                                  attach_membership_from_samples, ball_center,
                                  ball_purity, ball_radius, generate_balls)
from gbfsvm.membership import fit_class_geometry, membership_values
from gbfsvm import synth


# --- ball statistics ---------------------------------------------------------


def test_ball_center_examples():
    assert np.allclose(ball_center(np.array([[0.0, 0.0], [2.0, 0.0]])), (1, 0))
    assert np.allclose(ball_center(np.array([[3.0, 3.0]])), (3, 3))
    corners = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    assert np.allclose(ball_center(corners), (0.5, 0.5))
    with pytest.raises(ValueError):
        ball_center(np.empty((0, 2)))


def test_ball_radius_examples():
    pts = np.array([[0.0, 0.0], [2.0, 0.0]])
    assert ball_radius(pts, (1, 0), "mean_distance") == pytest.approx(1.0)
    assert ball_radius(pts, (1, 0), "max_distance") == pytest.approx(1.0)
    # distances from (1,0) are 1 and 3 -> mean 2, max 3
    pts = np.array([[0.0, 0.0], [4.0, 0.0]])
    assert ball_radius(pts, (1, 0), "mean_distance") == pytest.approx(2.0)
    assert ball_radius(pts, (1, 0), "max_distance") == pytest.approx(3.0)
    with pytest.raises(ValueError):
        ball_radius(np.empty((0, 2)), (0, 0))
    with pytest.raises(BallConfigError):
        ball_radius(np.zeros((1, 2)), (0, 0), mode="median")


def test_ball_purity_examples():
    assert ball_purity(np.array([1, 1, 1, -1])) == (0.75, 1)
    assert ball_purity(np.array([1, -1])) == (0.5, 1)  # tie goes to +1
    assert ball_purity(np.array([-1, -1, -1])) == (1.0, -1)
    with pytest.raises(ValueError):
        ball_purity(np.array([], dtype=int))


@pytest.mark.parametrize("kwargs", [
    dict(purity_threshold=0.5),
    dict(purity_threshold=1.2),
    dict(radius_mode="geodesic"),
    dict(kmeans_max_iters=0),
    dict(min_ball_size=0),
])
def test_ball_gen_config_validation(kwargs):
    with pytest.raises(BallConfigError):
        BallGenConfig(**kwargs)


# --- generation --------------------------------------------------------------


def _partition_ok(fbs, n):
    merged = np.sort(np.concatenate([b.member_indices for b in fbs.balls]))
    return np.array_equal(merged, np.arange(n))


def test_two_separated_clusters_give_two_pure_balls(blobs40):
    fbs = generate_balls(blobs40, BallGenConfig(purity_threshold=0.9))
    assert len(fbs) == 2
    assert all(b.purity == 1.0 for b in fbs.balls)
    assert _partition_ok(fbs, blobs40.n)


def test_threshold_one_forces_pure_balls():
    """With threshold 1.0 and no duplicate conflicting points, every final
    ball is pure; checked exhaustively on a 40-point overlapping instance."""
    d = synth.blobs(20, 20, (0.0, 0.0), (0.8, 0.8), 1.0, 1.0, seed=5)
    fbs = generate_balls(d, BallGenConfig(purity_threshold=1.0))
    assert _partition_ok(fbs, d.n)
    for b in fbs.balls:
        assert b.purity == 1.0
        assert np.all(d.labels[b.member_indices] == b.label)


def test_ball_count_stays_below_sample_count():
    d = synth.fourclass_like()
    for p in (0.7, 0.9, 0.95):
        fbs = generate_balls(d, BallGenConfig(purity_threshold=p))
        assert 1 < len(fbs) < d.n


def test_ball_fields_are_consistent(overlap80):
    cfg = BallGenConfig(purity_threshold=0.8, radius_mode="max_distance")
    fbs = generate_balls(overlap80, cfg)
    assert fbs.source_n == overlap80.n and fbs.config == cfg
    for b in fbs.balls:
        pts = overlap80.features[b.member_indices]
        assert np.allclose(b.center, pts.mean(axis=0))
        dists = np.linalg.norm(pts - b.center, axis=1)
        assert b.radius == pytest.approx(float(dists.max()))
        purity, label = ball_purity(overlap80.labels[b.member_indices])
        assert b.purity == purity and b.label == label
        assert b.size == len(b.member_indices)


def test_generation_is_deterministic(overlap80):
    cfg = BallGenConfig(purity_threshold=0.85)
    a = generate_balls(overlap80, cfg)
    b = generate_balls(overlap80, cfg)
    assert len(a) == len(b)
    for ba, bb in zip(a.balls, b.balls):
        assert np.array_equal(ba.member_indices, bb.member_indices)
        assert np.array_equal(ba.center, bb.center)
        assert ba.radius == bb.radius


def test_mean_radius_never_exceeds_max_radius(overlap80):
    """Splitting ignores the radius mode, so the two modes produce the same
    partition and the radii compare ballwise."""
    mean_fbs = generate_balls(overlap80, BallGenConfig(0.8, "mean_distance"))
    max_fbs = generate_balls(overlap80, BallGenConfig(0.8, "max_distance"))
    assert len(mean_fbs) == len(max_fbs)
    for bm, bx in zip(mean_fbs.balls, max_fbs.balls):
        assert np.array_equal(bm.member_indices, bx.member_indices)
        assert bm.radius <= bx.radius + 1e-15


def test_identical_conflicting_points_accepted_with_warning():
    feats = np.zeros((6, 2))
    labels = np.array([1, 1, 1, -1, -1, 1])
    d = Dataset(feats, labels)
    with pytest.warns(UserWarning, match="identical points"):
        fbs = generate_balls(d, BallGenConfig(purity_threshold=0.9))
    assert _partition_ok(fbs, 6)
    # the conflicted pile stays one ball with its sub-threshold purity
    assert any(b.purity < 0.9 for b in fbs.balls)


def test_min_ball_size_accepts_small_impure_balls(overlap80):
    fbs = generate_balls(overlap80, BallGenConfig(purity_threshold=0.95, min_ball_size=4))
    for b in fbs.balls:
        if b.size > 4:
            assert b.purity >= 0.95


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**31),
    n_pos=st.integers(2, 60),
    n_neg=st.integers(2, 60),
    dim=st.integers(1, 4),
    threshold=st.sampled_from([0.7, 0.8, 0.9, 0.95, 1.0]),
    spread=st.floats(0.2, 2.0),
)
def test_generation_invariants_random(seed, n_pos, n_neg, dim, threshold, spread):
    """Partition, purity-or-unsplittable, singleton and radius invariants on
    randomized overlapping instances."""
    rng = np.random.default_rng(seed)
    feats = np.vstack([rng.normal(0.0, spread, (n_pos, dim)),
                       rng.normal(1.0, spread, (n_neg, dim))])
    labels = np.r_[np.ones(n_pos, int), -np.ones(n_neg, int)]
    d = Dataset(feats, labels)
    fbs = generate_balls(d, BallGenConfig(purity_threshold=threshold))
    assert _partition_ok(fbs, d.n)
    for b in fbs.balls:
        assert b.purity >= 0.5
        if b.size == 1:
            assert b.radius == 0.0 and b.purity == 1.0
        elif not np.all(d.features[b.member_indices] == d.features[b.member_indices][0]):
            assert b.purity >= threshold


# --- membership attachment ---------------------------------------------------


def _three_ball_set():
    feats = np.array([[0.0], [0.1], [0.2], [5.0], [5.1], [9.0]])
    labels = np.array([1, 1, 1, -1, -1, -1])
    d = Dataset(feats, labels)
    fbs = generate_balls(d, BallGenConfig(purity_threshold=0.9))
    return d, fbs


def test_attach_from_samples_averages_members():
    d, fbs = _three_ball_set()
    mem = np.array([0.2, 0.4, 0.6, 1.0, 1.0, 0.9])
    out = attach_membership_from_samples(fbs, d.with_memberships(mem))
    for b in out.balls:
        assert b.membership == pytest.approx(float(mem[b.member_indices].mean()))
    ball_of_first = next(b for b in out.balls if 0 in b.member_indices)
    if ball_of_first.size == 3:
        assert ball_of_first.membership == pytest.approx(0.4)


def test_attach_from_samples_requires_memberships():
    d, fbs = _three_ball_set()
    with pytest.raises(ValueError):
        attach_membership_from_samples(fbs, d)


def test_attach_constant_function():
    _, fbs = _three_ball_set()
    out = attach_membership_from_function(fbs, lambda c, y: 0.7)
    assert all(b.membership == 0.7 for b in out.balls)


def test_attach_function_range_checked():
    _, fbs = _three_ball_set()
    with pytest.raises(MembershipRangeError):
        attach_membership_from_function(fbs, lambda c, y: 1.5)
    with pytest.raises(MembershipRangeError):
        attach_membership_from_function(fbs, lambda c, y: 0.0)


def test_memberships_accessor_requires_attachment():
    _, fbs = _three_ball_set()
    with pytest.raises(ValueError):
        fbs.memberships()
    out = attach_membership_from_function(fbs, lambda c, y: 1.0)
    assert np.array_equal(out.memberships(), np.ones(len(out)))


def test_array_accessors_and_records(overlap80):
    geometry = fit_class_geometry(overlap80)
    d = overlap80.with_memberships(
        membership_values(overlap80.features, overlap80.labels, geometry))
    fbs = attach_membership_from_samples(
        generate_balls(d, BallGenConfig(purity_threshold=0.8)), d)
    m = len(fbs)
    assert fbs.centers().shape == (m, overlap80.d)
    assert fbs.radii().shape == (m,) and np.all(fbs.radii() >= 0)
    assert set(fbs.labels()) <= {1, -1}
    records = fbs.to_records()
    assert len(records) == m
    assert records[0].keys() == {"ball", "center", "radius", "label", "purity",
                                 "membership", "size"}
    assert "balls" in fbs.to_json()
    csv_text = fbs.to_csv()
    assert csv_text.startswith("ball,radius,label,purity,membership,size,center")
    assert len(csv_text.strip().splitlines()) == m + 1
