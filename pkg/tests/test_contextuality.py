import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from magicsq.contextuality import (
    QUANTUM_PREDICTION,
    REALISM_BOUND,
    analyze,
    analyze_counts,
    as_result_vector,
    enumerate_sign_squares,
    facet_distance,
    hull_distance,
    line_statistics,
    max_overlap,
    overlaps,
    round_sig,
    sigma_radius,
    vector_sets,
    violation_score,
)
from magicsq.projection import kkt_residual, project_onto_hull
from magicsq.qsim import Counts

# ibmqx4 hardware counts: (+1, -1) for row1..row3, col1..col3.
HARDWARE = [(7943, 249), (7731, 461), (7506, 686), (7813, 379), (7851, 341), (2033, 6159)]
HARDWARE_MEANS = [0.939, 0.887, 0.833, 0.907, 0.917, -0.504]
HARDWARE_SIGMAS = [0.00379, 0.00509, 0.00612, 0.00464, 0.00441, 0.00955]


def hardware_counts():
    return [Counts({"0": p, "1": m}) for p, m in HARDWARE]


def slsqp_distance(point: np.ndarray, vertices: np.ndarray) -> float:
    """Independent QP oracle: minimize |w V - p|^2 over the simplex."""
    m = len(vertices)
    res = minimize(
        lambda w: float(np.sum((w @ vertices - point) ** 2)),
        np.full(m, 1.0 / m),
        jac=lambda w: 2 * vertices @ (w @ vertices - point),
        bounds=[(0, 1)] * m,
        constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1, "jac": lambda w: np.ones(m)}],
        method="SLSQP",
        options={"ftol": 1e-15, "maxiter": 1000},
    )
    return float(np.linalg.norm(res.x @ vertices - point))


# -- enumeration and sets -----------------------------------------------------


def test_enumeration_counts():
    squares = enumerate_sign_squares()
    assert len(squares) == 512
    distinct = {vec for _, vec in squares}
    assert len(distinct) == 32
    sets = vector_sets()
    assert distinct == set(sets.realism_tuples())


def test_enumerated_vectors_have_even_row_and_column_parity():
    for _, vec in enumerate_sign_squares():
        assert math.prod(vec[:3]) == math.prod(vec[3:])


def test_example_squares():
    a = np.array([[1, 1, 1], [1, 1, 1], [1, 1, -1]])
    b = np.array([[1, 1, 1], [1, -1, 1], [1, 1, -1]])
    from magicsq.contextuality import square_result_vector

    assert square_result_vector(a) == (1, 1, -1, 1, 1, -1)
    assert square_result_vector(b) == (1, -1, -1, 1, -1, -1)


def test_set_arithmetic():
    sets = vector_sets()
    r, q = set(sets.realism_tuples()), set(sets.quantum_tuples())
    assert len(r) == len(q) == 32
    assert not r & q
    assert len(r | q) == 64
    assert QUANTUM_PREDICTION in q
    assert tuple(-c for c in QUANTUM_PREDICTION) in q


def test_quantum_prediction_self_overlap():
    q = np.array(QUANTUM_PREDICTION)
    assert q @ q == 6
    best, idx = max_overlap(q)
    assert best == 6
    assert vector_sets().quantum_tuples()[idx] == QUANTUM_PREDICTION


def test_realism_bound_is_tight():
    sets = vector_sets()
    products = sets.realism @ sets.quantum.T
    assert products.max() == REALISM_BOUND
    assert set(np.unique(products)) <= {-4, 0, 4, -2, 2}


# -- statistics ---------------------------------------------------------------


def test_hardware_line_statistics():
    stats = [line_statistics(c) for c in hardware_counts()]
    for (mean, sigma), (plus, minus), m_ref in zip(stats, HARDWARE, HARDWARE_MEANS):
        n = plus + minus
        p = plus / n
        assert mean == (plus - minus) / n
        assert sigma == pytest.approx(2 * math.sqrt(p * (1 - p) / n), rel=1e-15)
        assert round(mean, 3) == pytest.approx(m_ref, abs=1e-12)


def test_hardware_sigmas_to_three_figures():
    sigmas = [round_sig(line_statistics(c)[1], 3) for c in hardware_counts()]
    assert sigmas[:5] == pytest.approx(HARDWARE_SIGMAS[:5], rel=1e-9)
    # 2 sqrt(p(1-p)/n) for 2033/8192 is 9.5448e-3, which rounds to 9.54 rather than 9.55
    assert line_statistics(hardware_counts()[5])[1] == pytest.approx(9.5448e-3, abs=1e-7)


def test_deterministic_counts_zero_sigma():
    mean, sigma = line_statistics(Counts({"0": 8192}))
    assert (mean, sigma) == (1.0, 0.0)


def test_result_vector_validation():
    with pytest.raises(ValueError):
        as_result_vector([1, 1, 1])
    with pytest.raises(ValueError):
        as_result_vector([1, 1, 1, 1, 1, 1.5])


def test_hardware_max_overlap():
    v = [line_statistics(c)[0] for c in hardware_counts()]
    best, idx = max_overlap(v)
    assert best == pytest.approx(4.987, abs=1e-3)
    assert vector_sets().quantum_tuples()[idx] == QUANTUM_PREDICTION


def test_realism_vectors_respect_bound():
    for r in vector_sets().realism:
        assert max_overlap(r)[0] <= REALISM_BOUND


# -- hull ---------------------------------------------------------------------


def test_hull_distance_zero_inside():
    assert hull_distance(np.zeros(6)).distance < 1e-12
    for r in vector_sets().realism:
        assert hull_distance(r).distance < 1e-12


def test_hardware_hull_distance_matches_facet():
    v = np.array([line_statistics(c)[0] for c in hardware_counts()])
    proj = hull_distance(v)
    assert proj.distance == pytest.approx(facet_distance(v), abs=1e-9)
    assert proj.distance == pytest.approx(0.4029, abs=5e-4)
    # every support vertex lies on the facet x . q = 4
    support = vector_sets().realism[proj.support]
    np.testing.assert_array_equal(support @ np.array(QUANTUM_PREDICTION), 4)
    np.testing.assert_allclose(proj.weights.sum(), 1, atol=1e-9)
    assert proj.weights.min() >= -1e-12


def test_ideal_point_distance():
    assert hull_distance(QUANTUM_PREDICTION).distance == pytest.approx(2 / math.sqrt(6), abs=1e-9)


def test_projection_agrees_with_slsqp(rng):
    realism = vector_sets().realism.astype(float)
    for _ in range(30):
        p = rng.uniform(-1, 1, 6)
        ours = hull_distance(p).distance
        assert ours == pytest.approx(slsqp_distance(p, realism), abs=1e-6)
        assert ours <= slsqp_distance(p, realism) + 1e-9


def test_random_mixtures_are_inside(rng):
    realism = vector_sets().realism.astype(float)
    worst = 0.0
    for _ in range(1000):
        w = rng.dirichlet(np.full(32, 0.3))
        worst = max(worst, hull_distance(w @ realism).distance)
    assert worst < 1e-9


def test_projection_is_optimal_against_feasible_perturbations(rng):
    realism = vector_sets().realism.astype(float)
    points = [np.array([line_statistics(c)[0] for c in hardware_counts()])]
    while len(points) < 6:
        p = rng.uniform(-1, 1, 6)
        if hull_distance(p).distance > 1e-3:
            points.append(p)
    for v in points:
        proj = hull_distance(v)
        for _ in range(1000):
            w = proj.weights + rng.normal(scale=1e-4, size=32)
            w = np.clip(w, 0, None)
            w /= w.sum()
            assert np.linalg.norm(w @ realism - v) >= proj.distance - 1e-12


def test_projection_on_generic_polytope(rng):
    verts = rng.normal(size=(12, 4))
    for _ in range(10):
        p = rng.normal(size=4) * 3
        proj = project_onto_hull(p, verts)
        assert proj.distance == pytest.approx(slsqp_distance(p, verts), abs=1e-6)
        assert kkt_residual(verts - p, proj.weights) < 1e-9


# -- sigma radius and score ---------------------------------------------------


def test_sigma_radius_examples():
    assert sigma_radius([0.0] * 6) == 0.0
    assert sigma_radius([3, 4, 0, 0, 0, 0]) == 5.0
    assert sigma_radius(HARDWARE_SIGMAS) == pytest.approx(0.0145, abs=1e-4)


def test_violation_score_cases():
    v, s = zip(*(line_statistics(c) for c in hardware_counts()))
    score, violated = violation_score(v, s)
    assert violated and score == pytest.approx(27.8, abs=0.05)
    assert violation_score(vector_sets().realism[5], [0.01] * 6) == (0.0, False)
    score, violated = violation_score(QUANTUM_PREDICTION, [0.0] * 6)
    assert violated and math.isinf(score)


def test_analyze_counts_report():
    report = analyze_counts(hardware_counts())
    assert report.verdict == "violation"
    assert report.score_3sf == pytest.approx(27.8)
    assert report.max_overlap_vector == QUANTUM_PREDICTION
    assert report.metadata["shots"] == [8192] * 6
    assert report.metadata["rule_of_three_upper_bounds"] == [None] * 6
    np.testing.assert_allclose(report.overlaps, overlaps(report.result_vector))


def test_analyze_rule_of_three():
    ideal = [Counts({"0": 8192})] * 5 + [Counts({"1": 8192})]
    report = analyze_counts(ideal)
    assert report.metadata["rule_of_three_upper_bounds"] == [3 / 8192] * 6
    assert math.isinf(report.score)


def test_analyze_rejects_bad_sigmas():
    with pytest.raises(ValueError):
        analyze([0] * 6, [-0.1] + [0] * 5)


# -- properties ---------------------------------------------------------------

coeff = st.floats(-1, 1, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(v=st.lists(coeff, min_size=6, max_size=6))
def test_distance_positive_iff_overlap_exceeds_bound(v):
    proj = hull_distance(v)
    best, _ = max_overlap(v)
    if best <= REALISM_BOUND - 1e-9:
        assert proj.distance < 1e-9
    # the distance never exceeds the distance to the origin, which is inside
    assert proj.distance <= np.linalg.norm(v) + 1e-12


@settings(max_examples=60, deadline=None)
@given(v=st.lists(coeff, min_size=6, max_size=6), t=st.floats(0, 1))
def test_distance_monotone_towards_origin(v, t):
    v = np.array(v)
    assert hull_distance(t * v).distance <= hull_distance(v).distance + 1e-9


@settings(max_examples=40, deadline=None)
@given(weights=st.lists(st.floats(0.01, 1), min_size=32, max_size=32))
def test_mixtures_have_zero_distance(weights):
    w = np.array(weights) / sum(weights)
    assert hull_distance(w @ vector_sets().realism).distance < 1e-9
