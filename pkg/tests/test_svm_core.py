"""Ball training sets, the fuzzy-ball dual objective, and solution recovery."""

import numpy as np
import pytest

from gbfsvm.granular_ball import BallGenConfig, attach_membership_from_function, generate_balls
from gbfsvm.svm_core import (BallTrainingSet, DualSolution, ModelConfig, SolverFailure,
                             DegenerateSolution, accuracy, apply_variant, compute_A_B,
                             gbfsvm_dual_objective, make_pso_config, predict,
                             predict_batch, recover_b, recover_w, train)
from gbfsvm.pso import optimize

from conftest import random_training_set


def _single_ball(center=(1.0, 0.0), radius=0.5, label=1, membership=1.0):
    return BallTrainingSet(
        centers=np.array([center]),
        radii=np.array([radius]),
        labels=np.array([label]),
        memberships=np.array([membership]),
    )


# --- training-set construction ------------------------------------------------


@pytest.mark.parametrize("field,value", [
    ("centers", np.empty((0, 2))),
    ("radii", np.array([-0.1])),
    ("labels", np.array([2])),
    ("memberships", np.array([0.0])),
    ("memberships", np.array([1.5])),
])
def test_training_set_validation(field, value):
    kwargs = dict(
        centers=np.array([[1.0, 0.0]]),
        radii=np.array([0.5]),
        labels=np.array([1]),
        memberships=np.array([1.0]),
    )
    kwargs[field] = value
    if field == "centers":
        for other in ("radii", "labels", "memberships"):
            kwargs[other] = kwargs[other][:0]
    with pytest.raises(ValueError):
        BallTrainingSet(**kwargs)


def test_training_set_length_mismatch():
    with pytest.raises(ValueError):
        BallTrainingSet(
            centers=np.array([[0.0], [1.0]]),
            radii=np.array([0.0]),
            labels=np.array([1, -1]),
            memberships=np.array([1.0, 1.0]),
        )


def test_training_set_arrays_are_write_protected():
    ts = _single_ball()
    with pytest.raises(ValueError):
        ts.centers[0, 0] = 9.0


def test_from_points_defaults(blobs40):
    ts = BallTrainingSet.from_points(blobs40)
    assert ts.m == blobs40.n
    assert np.all(ts.radii == 0.0)
    assert np.all(ts.memberships == 1.0)
    assert np.array_equal(ts.labels, blobs40.labels)


def test_from_points_membership_priority(blobs40):
    stored = np.full(blobs40.n, 0.6)
    explicit = np.full(blobs40.n, 0.3)
    assert np.all(BallTrainingSet.from_points(
        blobs40.with_memberships(stored)).memberships == 0.6)
    assert np.all(BallTrainingSet.from_points(
        blobs40.with_memberships(stored), memberships=explicit).memberships == 0.3)


def test_from_balls_round_trip(overlap80):
    fbs = attach_membership_from_function(
        generate_balls(overlap80, BallGenConfig(purity_threshold=0.8)),
        lambda c, y: 0.9)
    ts = BallTrainingSet.from_balls(fbs)
    assert ts.m == len(fbs)
    assert np.array_equal(ts.centers, fbs.centers())
    assert np.array_equal(ts.radii, fbs.radii())
    assert np.all(ts.memberships == 0.9)


# --- model variants -----------------------------------------------------------


def test_apply_variant_rules():
    ts = _single_ball(radius=0.5, membership=0.7)
    svm = apply_variant(ts, "svm")
    assert svm.radii[0] == 0.0 and svm.memberships[0] == 1.0
    fsvm = apply_variant(ts, "fsvm")
    assert fsvm.radii[0] == 0.0 and fsvm.memberships[0] == 0.7
    gbsvm = apply_variant(ts, "gbsvm")
    assert gbsvm.radii[0] == 0.5 and gbsvm.memberships[0] == 1.0
    gbfsvm = apply_variant(ts, "gbfsvm")
    assert gbfsvm is ts or (gbfsvm.radii[0] == 0.5 and gbfsvm.memberships[0] == 0.7)


def test_apply_variant_rejects_unknown():
    with pytest.raises(ValueError):
        apply_variant(_single_ball(), "dnn")


# --- dual objective -----------------------------------------------------------


def test_compute_A_B_hand_cases():
    ts = _single_ball(center=(1.0, 0.0), radius=0.5, label=1)
    A, B = compute_A_B(np.array([1.0]), ts)
    assert np.allclose(A, [1.0, 0.0]) and B == pytest.approx(0.5)

    ts2 = BallTrainingSet(
        centers=np.array([[1.0, 0.0], [1.0, 0.0]]),
        radii=np.array([0.5, 0.0]),
        labels=np.array([1, -1]),
        memberships=np.array([1.0, 1.0]),
    )
    A, B = compute_A_B(np.array([1.0, 1.0]), ts2)
    assert np.allclose(A, [0.0, 0.0]) and B == pytest.approx(0.5)


def test_compute_A_B_batched_shape():
    rng = np.random.default_rng(0)
    ts = random_training_set(rng, m=4, d=3)
    alphas = rng.uniform(0, 2, (7, 4))
    A, B = compute_A_B(alphas, ts)
    assert A.shape == (7, 3) and B.shape == (7,)
    for i in range(7):
        Ai, Bi = compute_A_B(alphas[i], ts)
        assert np.allclose(A[i], Ai) and B[i] == pytest.approx(Bi)


def test_compute_A_B_length_mismatch():
    with pytest.raises(ValueError):
        compute_A_B(np.array([1.0, 2.0]), _single_ball())


def test_objective_zero_alpha_is_zero():
    assert gbfsvm_dual_objective(np.zeros(1), _single_ball()) == 0.0


def test_objective_hand_value():
    # one ball, alpha=1: A=(1,0), B=0.5
    # -0.5*1 + 0.5*0.25 + |1-0.5|*0.5 + 1 = -0.5+0.125+0.25+1 = 0.875
    val = gbfsvm_dual_objective(np.array([1.0]), _single_ball())
    assert val == pytest.approx(0.875)


def test_objective_batched_matches_loop():
    rng = np.random.default_rng(1)
    ts = random_training_set(rng, m=5, d=2)
    alphas = rng.uniform(0, 3, (20, 5))
    batch = gbfsvm_dual_objective(alphas, ts)
    assert batch.shape == (20,)
    for i in range(20):
        assert batch[i] == pytest.approx(float(gbfsvm_dual_objective(alphas[i], ts)), rel=1e-12)


def test_zero_radius_objective_equals_point_svm_dual():
    rng = np.random.default_rng(2)
    ts = random_training_set(rng, m=6, d=3, zero_radii=True)
    alpha = rng.uniform(0, 2, 6)
    signed = alpha * ts.labels
    reference = alpha.sum() - 0.5 * float(signed @ ts.centers @ (signed @ ts.centers))
    assert gbfsvm_dual_objective(alpha, ts) == pytest.approx(reference, rel=1e-12)


# --- recovery -----------------------------------------------------------------


def test_recover_w_shrinks_by_radius_mass():
    ts = _single_ball(center=(1.0, 0.0), radius=0.5)
    w = recover_w(np.array([1.0]), ts)
    assert np.allclose(w, [0.5, 0.0])


def test_recover_w_zero_radius_returns_A_exactly():
    rng = np.random.default_rng(3)
    ts = random_training_set(rng, m=4, d=2, zero_radii=True)
    alpha = rng.uniform(0.1, 1.0, 4)
    A, _ = compute_A_B(alpha, ts)
    assert np.array_equal(recover_w(alpha, ts), A)


def test_recover_w_ball_larger_than_A_gives_zero():
    ts = BallTrainingSet(
        centers=np.array([[3.0, 4.0]]),   # ||A|| = 5 at alpha=1
        radii=np.array([5.0]),
        labels=np.array([1]),
        memberships=np.array([1.0]),
    )
    assert np.allclose(recover_w(np.array([1.0]), ts), [0.0, 0.0])


def test_recover_w_degenerate_when_A_vanishes():
    ts = BallTrainingSet(
        centers=np.array([[1.0, 1.0], [1.0, 1.0]]),
        radii=np.array([0.2, 0.2]),
        labels=np.array([1, -1]),
        memberships=np.array([1.0, 1.0]),
    )
    with pytest.raises(DegenerateSolution):
        recover_w(np.array([1.0, 1.0]), ts)


def test_norm_identity():
    """||w|| must equal | ||A|| - B | for the recovered direction."""
    rng = np.random.default_rng(4)
    for _ in range(50):
        ts = random_training_set(rng)
        alpha = rng.uniform(0, 2, ts.m)
        A, B = compute_A_B(alpha, ts)
        nA = float(np.linalg.norm(A))
        if nA < 1e-9:
            continue
        w = recover_w(alpha, ts)
        assert np.linalg.norm(w) == pytest.approx(abs(nA - B), rel=1e-9, abs=1e-12)


def test_recover_b_interior_single_ball():
    ts = _single_ball(center=(1.0, 0.0), radius=0.0, label=1)
    b, fallback = recover_b(np.array([5.0]), ts, np.array([1.0, 0.0]), C=10.0)
    assert b == pytest.approx(0.0) and fallback is False


def test_recover_b_averages_interior_estimates():
    ts = BallTrainingSet(
        centers=np.array([[0.9, 0.0], [0.7, 0.0]]),
        radii=np.array([0.0, 0.0]),
        labels=np.array([1, 1]),
        memberships=np.array([1.0, 1.0]),
    )
    # estimates with w=(1,0): 1 - 0.9 = 0.1 and 1 - 0.7 = 0.3
    b, fallback = recover_b(np.array([5.0, 5.0]), ts, np.array([1.0, 0.0]), C=10.0)
    assert b == pytest.approx(0.2) and fallback is False


def test_recover_b_fallback_when_no_interior():
    ts = BallTrainingSet(
        centers=np.array([[1.0, 0.0], [-1.0, 0.0]]),
        radii=np.array([0.0, 0.0]),
        labels=np.array([1, -1]),
        memberships=np.array([1.0, 1.0]),
    )
    b, fallback = recover_b(np.array([0.0, 0.0]), ts, np.array([1.0, 0.0]), C=10.0)
    assert fallback is True
    assert b == pytest.approx(0.0, abs=1e-9)  # symmetric pair


# --- prediction ---------------------------------------------------------------


def test_predict_sign_convention():
    w = np.array([1.0, 0.0])
    assert predict(np.array([2.0, 0.0]), w, 0.0) == 1
    assert predict(np.array([-2.0, 0.0]), w, 0.0) == -1
    assert predict(np.array([0.0, 0.0]), w, 0.0) == 1  # boundary goes positive


def test_predict_batch_and_accuracy():
    w = np.array([1.0, -1.0])
    X = np.array([[1.0, 0.0], [0.0, 1.0], [2.0, 1.0]])
    preds = predict_batch(X, w, 0.0)
    assert np.array_equal(preds, [1, -1, 1])
    assert accuracy(X, np.array([1, -1, -1]), w, 0.0) == pytest.approx(2 / 3)


def test_prediction_invariant_under_positive_rescaling():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(30, 3))
    w = rng.normal(size=3)
    b = 0.3
    assert np.array_equal(predict_batch(X, w, b), predict_batch(X, 4.0 * w, 4.0 * b))


# --- training glue ------------------------------------------------------------


def test_make_pso_config_box_and_penalty():
    ts = BallTrainingSet(
        centers=np.array([[0.0], [1.0]]),
        radii=np.array([0.0, 0.0]),
        labels=np.array([1, -1]),
        memberships=np.array([0.5, 1.0]),
    )
    cfg = make_pso_config(ts, C=10.0, seed=4)
    assert np.all(cfg.lower == 0.0)
    assert np.allclose(cfg.upper, [5.0, 10.0])  # membership-scaled caps
    assert cfg.resolved_penalty() == pytest.approx(1e4)
    assert cfg.seed == 4
    fast = make_pso_config(ts, C=10.0, seed=4, max_iter=50, pop=12)
    assert fast.max_iter == 50 and fast.resolved_pop() == 12


def test_train_separable_singletons(fast_pso):
    ts = BallTrainingSet(
        centers=np.array([[0.0, 0.0], [2.0, 2.0]]),
        radii=np.array([0.0, 0.0]),
        labels=np.array([-1, 1]),
        memberships=np.array([1.0, 1.0]),
    )
    sol = train(ts, ModelConfig(C=10.0, variant="gbfsvm"), seed=0, **fast_pso)
    assert sol.feasibility_gap <= 1e-3
    assert predict(np.array([2.0, 2.0]), sol.w, sol.b) == 1
    assert predict(np.array([0.0, 0.0]), sol.w, sol.b) == -1


def test_train_raises_solver_failure_when_starved():
    ts = BallTrainingSet(
        centers=np.array([[0.0, 0.0], [1.0, 1.0]]),
        radii=np.array([0.0, 0.0]),
        labels=np.array([1, -1]),
        memberships=np.array([1.0, 1.0]),
    )
    with pytest.raises(SolverFailure) as exc_info:
        train(ts, ModelConfig(), seed=0, max_iter=1, pop=2, equality_tolerance=1e-12)
    assert exc_info.value.gap > 1e-12


def test_gbfsvm_on_singletons_equals_svm(fast_pso, blobs40):
    """Zero radii plus unit memberships collapse the ball model onto the
    point model: identical search box, identical seed, identical answer."""
    ts = BallTrainingSet.from_points(blobs40)
    a = train(ts, ModelConfig(variant="gbfsvm"), seed=1, **fast_pso)
    b = train(ts, ModelConfig(variant="svm"), seed=1, **fast_pso)
    assert np.array_equal(a.alpha, b.alpha)
    assert a.objective == b.objective
    assert np.array_equal(a.w, b.w) and a.b == b.b


def test_dual_solution_json_round_trip(fast_pso):
    ts = BallTrainingSet(
        centers=np.array([[0.0, 0.0], [2.0, 2.0]]),
        radii=np.array([0.1, 0.2]),
        labels=np.array([-1, 1]),
        memberships=np.array([0.8, 0.9]),
    )
    sol = train(ts, ModelConfig(C=5.0), seed=2, **fast_pso)
    clone = DualSolution.from_json(sol.to_json())
    assert np.array_equal(clone.alpha, sol.alpha)
    assert np.array_equal(clone.w, sol.w)
    assert clone.b == sol.b and clone.objective == sol.objective
    assert clone.variant == sol.variant and clone.seed == sol.seed
    assert clone.b_from_fallback == sol.b_from_fallback
