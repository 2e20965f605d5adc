import json
import math

import pytest

from dirsubdiff.corpus import get_rng, random_directed_set, random_interval
from dirsubdiff.dirset import (
    ActiveSetInfo,
    DirectedInterval,
    DirectedSet,
    GridMismatchError,
    SphereGrid,
    directed_zero,
    distance,
    embed_interval,
    embed_point,
    embed_polygon,
    inf,
    leq,
    linear_combination,
    norm,
    scale,
    sup,
)

SQUARE = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]


def leaf(a, b):
    return DirectedSet.leaf(a, b)


# ---------------------------------------------------------------------------
# intervals and embeddings


def test_interval_endpoints_and_inversion():
    iv = DirectedInterval(1.0, 1.0)  # embed of [-1, 1]
    assert iv.lower_endpoint == -1.0
    assert iv.upper_endpoint == 1.0
    assert not iv.is_inverted
    assert DirectedInterval(-1.0, -1.0).is_inverted
    assert not DirectedInterval(0.0, 0.0).is_inverted


def test_embed_interval():
    assert embed_interval(-1.0, 1.0) == DirectedInterval(1.0, 1.0)
    assert embed_interval(0.0, 0.0) == DirectedInterval(0.0, 0.0)
    assert embed_interval(2.0, 5.0) == DirectedInterval(-2.0, 5.0)
    with pytest.raises(ValueError):
        embed_interval(1.0, 0.0)


def test_embed_point_plane():
    g = SphereGrid.circle(4)
    s = embed_point((3.0, 4.0), g)
    for l, support, lower in zip(g.directions, s.supports, s.lowers):
        assert support == 3.0 * l[0] + 4.0 * l[1]
        r = (-l[1], l[0])
        proj = 3.0 * r[0] + 4.0 * r[1]
        assert lower.interval == DirectedInterval(-proj, proj)


def test_embed_point_1d():
    assert embed_point((2.5,)).interval == DirectedInterval(-2.5, 2.5)


def test_embed_polygon_square_faces():
    g = SphereGrid.circle(4)
    s = embed_polygon(SQUARE, g)
    # l = (1, 0): support 1, face {1} x [-1, 1] projected through R = (0, 1)
    assert s.supports[0] == 1.0
    assert s.lowers[0].interval == embed_interval(-1.0, 1.0)


def test_embed_polygon_singleton_matches_point():
    g = SphereGrid.circle(8)
    assert embed_polygon([(3.0, 4.0)], g) == embed_point((3.0, 4.0), g)


def test_embed_polygon_diagonal_segment():
    g = SphereGrid.circle(8)
    s = embed_polygon([(1.0, 0.0), (0.0, 1.0)], g)
    # the grid direction at 45 degrees supports the whole segment
    l = g.directions[1]
    assert abs(s.supports[1] - 1.0 / math.sqrt(2.0)) < 1e-15
    low = s.lowers[1].interval
    assert low.upper_endpoint - low.lower_endpoint > 1.0  # spans both endpoints
    # a generic direction supports a single vertex
    assert s.lowers[0].interval.upper_endpoint == s.lowers[0].interval.lower_endpoint


def test_embed_polygon_interior_points_ignored():
    g = SphereGrid.circle(8)
    assert embed_polygon(SQUARE + [(0.0, 0.0), (0.5, 0.5)], g) == embed_polygon(SQUARE, g)


# ---------------------------------------------------------------------------
# linear structure


def test_linear_combination_1d():
    a = leaf(1.0, 1.0)     # embed [-1, 1]
    b = leaf(-1.0, 1.0)    # embed {1}
    assert linear_combination(1.0, a, 1.0, b).interval == DirectedInterval(0.0, 2.0)


def test_scalar_negation_inverts():
    a = DirectedSet.from_interval(embed_interval(-1.0, 1.0))
    assert scale(-1.0, a).interval == DirectedInterval(-1.0, -1.0)


def test_zero_is_neutral():
    g = SphereGrid.circle(8)
    rng = get_rng(11)
    a = random_directed_set(rng, 2, g)
    z = directed_zero(2, g)
    assert linear_combination(1.0, a, 1.0, z) == a
    assert a + z == a


def test_operator_sugar_on_sets():
    a = leaf(1.0, 2.0)
    b = leaf(0.5, -1.0)
    assert (a + b).interval == DirectedInterval(1.5, 1.0)
    assert (a - b).interval == DirectedInterval(0.5, 3.0)
    assert (-a).interval == DirectedInterval(-1.0, -2.0)
    assert (2.0 * a).interval == DirectedInterval(2.0, 4.0)
    assert (a * 2.0) == 2.0 * a


def test_dim_mismatch_rejected():
    g = SphereGrid.circle(8)
    a = random_directed_set(get_rng(1), 2, g)
    with pytest.raises(ValueError):
        linear_combination(1.0, a, 1.0, leaf(0.0, 0.0))


def test_grid_mismatch_rejected():
    a = random_directed_set(get_rng(1), 2, SphereGrid.circle(8))
    b = random_directed_set(get_rng(2), 2, SphereGrid.circle(16))
    with pytest.raises(GridMismatchError):
        linear_combination(1.0, a, 1.0, b)


def test_norm():
    assert norm(leaf(3.0, -2.0)) == 3.0
    assert norm(directed_zero(1)) == 0.0
    g = SphereGrid.circle(8)
    assert norm(directed_zero(2, g)) == 0.0
    s = embed_polygon(SQUARE, g)
    assert abs(norm(s) - math.sqrt(2.0)) < 1e-15


# ---------------------------------------------------------------------------
# lattice operations


def test_sup_1d_examples():
    # sup of embedded {1} and {-1} is the embedded interval [-1, 1]
    assert sup([leaf(-1.0, 1.0), leaf(1.0, -1.0)]).interval == DirectedInterval(1.0, 1.0)
    a = DirectedSet.from_interval(embed_interval(0.0, 2.0))
    b = DirectedSet.from_interval(embed_interval(1.0, 3.0))
    assert sup([a, b]).interval == embed_interval(0.0, 3.0)


def test_inf_1d_examples():
    a = DirectedSet.from_interval(embed_interval(-1.0, 1.0))
    b = DirectedSet.from_interval(embed_interval(0.0, 2.0))
    assert inf([a, b]).interval == embed_interval(0.0, 1.0)
    # inf of two points crosses over into an inverted interval
    got = inf([leaf(0.0, 0.0), leaf(-1.0, 1.0)]).interval
    assert got == DirectedInterval(-1.0, 0.0)
    assert got.is_inverted


def test_sup_inf_singleton_identity():
    a = leaf(0.3, -0.7)
    assert sup([a]) == a
    assert inf([a]) == a
    with pytest.raises(ValueError):
        sup([])


def test_sup_of_embedded_points_is_polygon():
    g = SphereGrid.circle(8)
    e1 = embed_point((1.0, 0.0), g)
    e2 = embed_point((0.0, 1.0), g)
    hull = embed_polygon([(1.0, 0.0), (0.0, 1.0)], g)
    assert distance(sup([e1, e2]), hull) == 0.0


def test_active_set_flags():
    # the second point is displaced along x only near l = (1, 0); the 0.3
    # offset keeps every other direction decisively resolved
    g = SphereGrid.circle(4)
    base = embed_point((1.0, 0.0), g)
    # support gap below the activity tolerance: a tie
    info = ActiveSetInfo()
    sup([base, embed_point((1.0 + 1e-10, 0.3), g)], info=info)
    assert info.ties
    # gap just above it: borderline, not a tie
    info = ActiveSetInfo()
    sup([base, embed_point((1.0 + 8e-9, 0.3), g)], info=info)
    assert info.borderline
    assert not info.ties


def test_leq_examples():
    point = leaf(-1.0, 1.0)          # embed {1}
    wide = leaf(3.0, 3.0)            # embed [-3, 3]
    assert leq(point, wide, 1e-9)
    assert not leq(wide, point, 1e-9)
    assert leq(directed_zero(1), DirectedSet.from_interval(embed_interval(0.0, 2.0)), 1e-9)


def test_leq_validation():
    with pytest.raises(ValueError):
        leq(leaf(0.0, 0.0), leaf(0.0, 0.0), -1.0)


def test_leq_recursion_on_support_ties():
    g = SphereGrid.circle(4)
    z = directed_zero(2, g)
    a = embed_polygon(SQUARE, g)
    assert leq(z, a, 1e-9)
    assert not leq(a, z, 1e-9)


def test_directed_zero():
    z = directed_zero(1)
    assert z.interval == DirectedInterval(0.0, 0.0)
    g = SphereGrid.circle(4)
    z2 = directed_zero(2, g)
    assert all(s == 0.0 for s in z2.supports)
    assert all(low.interval == DirectedInterval(0.0, 0.0) for low in z2.lowers)
    with pytest.raises(ValueError):
        directed_zero(2)


# ---------------------------------------------------------------------------
# grids and serialization


def test_circle_grid_directions():
    g = SphereGrid.circle(4)
    assert g.dim == 2
    assert len(g) == 4
    assert g.directions[0] == (1.0, 0.0)
    assert abs(g.directions[1][0]) < 1e-15 and g.directions[1][1] == 1.0


def test_grid_ids_content_addressed():
    assert SphereGrid.circle(8).id == SphereGrid.circle(8).id
    assert SphereGrid.circle(8).id != SphereGrid.circle(16).id
    assert SphereGrid.sphere(4, 8, 8).id != SphereGrid.circle(8).id


def test_grid_validation():
    with pytest.raises(ValueError):
        SphereGrid.circle(0)
    with pytest.raises(ValueError):
        SphereGrid.sphere(0, 8, 8)


def test_json_roundtrip_leaf():
    a = leaf(1.5, -0.25)
    assert DirectedSet.from_json(a.to_json()) == a


def test_json_roundtrip_plane():
    g = SphereGrid.circle(8)
    a = random_directed_set(get_rng(5), 2, g)
    b = DirectedSet.from_json(a.to_json())
    assert b == a
    assert b.grid.id == g.id


def test_json_roundtrip_three_dims():
    g = SphereGrid.sphere(2, 4, 8)
    a = random_directed_set(get_rng(6), 3, g)
    assert DirectedSet.from_json(a.to_json()) == a


def test_json_schema_keys():
    g = SphereGrid.circle(4)
    d = embed_point((1.0, 0.0), g).to_json_dict()
    assert set(d) == {"dim", "grid", "entries"}
    assert set(d["grid"]) == {"id", "dim", "resolution", "directions"}
    assert set(d["entries"][0]) == {"support", "lower"}
    assert d["entries"][0]["lower"] == {"dim": 1, "a_neg": 0.0, "a_pos": 0.0}
    assert d["entries"][3]["lower"] == {"dim": 1, "a_neg": -1.0, "a_pos": 1.0}


def test_json_tamper_detected():
    g = SphereGrid.circle(4)
    d = embed_point((1.0, 0.0), g).to_json_dict()
    # replace a direction with a different unit vector: the content hash in
    # the stored id no longer matches
    d["grid"]["directions"][0] = [0.6, 0.8]
    with pytest.raises(GridMismatchError):
        DirectedSet.from_json_dict(d)
    d = embed_point((1.0, 0.0), g).to_json_dict()
    d["grid"]["id"] = "0" * 16
    with pytest.raises(GridMismatchError):
        DirectedSet.from_json_dict(d)


# ---------------------------------------------------------------------------
# space axioms, small randomized editions


def test_norm_axioms_random():
    rng = get_rng(23)
    g = SphereGrid.circle(16)
    z = directed_zero(2, g)
    for _ in range(50):
        a = random_directed_set(rng, 2, g)
        b = random_directed_set(rng, 2, g)
        lam = rng.uniform(-3.0, 3.0)
        assert norm(a) > 0.0
        assert norm(scale(lam, a)) == abs(lam) * norm(a)
        assert norm(a + b) <= norm(a) + norm(b) + 1e-12
    assert norm(z) == 0.0


def test_vector_space_laws_random():
    rng = get_rng(29)
    g = SphereGrid.circle(16)
    z = directed_zero(2, g)
    for _ in range(50):
        a = random_directed_set(rng, 2, g)
        b = random_directed_set(rng, 2, g)
        c = random_directed_set(rng, 2, g)
        assert a + b == b + a
        assert distance((a + b) + c, a + (b + c)) <= 1e-12
        assert distance(a - a, z) == 0.0
        assert scale(1.0, a) == a


def test_order_consistency_random():
    rng = get_rng(31)
    g = SphereGrid.circle(16)
    for _ in range(50):
        a = random_directed_set(rng, 2, g)
        b = random_directed_set(rng, 2, g)
        s = sup([a, b])
        i = inf([a, b])
        assert leq(a, s, 1e-9) and leq(b, s, 1e-9)
        assert leq(i, a, 1e-9) and leq(i, b, 1e-9)


def test_1d_order_matches_sup():
    rng = get_rng(37)
    for _ in range(200):
        a = DirectedSet.from_interval(random_interval(rng))
        b = DirectedSet.from_interval(random_interval(rng))
        assert leq(a, b, 0.0) == (sup([a, b]) == b)


def test_embedding_monotone_under_inclusion():
    rng = get_rng(41)
    g = SphereGrid.circle(16)
    from dirsubdiff.corpus import random_polygon
    from dirsubdiff.oracle import convex_hull

    for _ in range(20):
        p = convex_hull(random_polygon(rng))
        far = (max(x for x, _ in p) * 2.0 + 1.0, 0.0)
        q = list(p) + [far]
        assert leq(embed_polygon(p, g), embed_polygon(q, g), 1e-9)
