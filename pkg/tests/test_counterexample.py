"""The sparse integer carrier, its ray family, and the exact witnesses."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spiralpaste import (
    BlockVector,
    CounterexampleConfig,
    CoverageViolated,
    NotARay,
    SumSpaceSpec,
    ball,
    ball_point_count,
    build_family,
    grouping_spec,
    in_carrier,
    linf_distance,
    min_projection_level,
    norm,
    profile_proportionality,
    ray_block_vectors,
    ray_point,
    separation_epsilon,
    separation_witness,
    to_metric_space,
    verify_metric_ray,
    verify_separation_epsilon,
)


@pytest.fixture(scope="module")
def family():
    return build_family()


class TestConfig:
    def test_rejects_non_increasing_widths(self):
        with pytest.raises(ValueError):
            CounterexampleConfig(N=(3, 3, 4), depth=3, ray_count=8)

    def test_rejects_width_count_mismatch(self):
        with pytest.raises(ValueError):
            CounterexampleConfig(N=(2, 3), depth=3, ray_count=8)

    def test_rejects_too_few_rays(self):
        with pytest.raises(ValueError):
            CounterexampleConfig(N=(2, 3, 4), depth=3, ray_count=3)

    def test_level_positions_partition(self):
        cfg = CounterexampleConfig()
        assert cfg.level_positions(0) == (1,)
        assert cfg.level_positions(1) == (2, 3)
        assert cfg.level_positions(2) == (4, 5, 6)
        seen = set()
        for t in range(0, cfg.depth + 1):
            pos = set(cfg.level_positions(t))
            assert not (pos & seen)
            seen |= pos


class TestFamily:
    def test_round_robin_covers(self, family):
        cfg = family.config
        for t in range(1, cfg.depth):
            hit = {family.choice(j, t) for j in range(1, cfg.ray_count + 1)}
            assert hit == set(cfg.level_positions(t))

    def test_bad_choice_rejected(self):
        cfg = CounterexampleConfig(N=(2, 3), depth=2, ray_count=3)
        with pytest.raises(CoverageViolated):
            build_family(cfg, choice=lambda j, t: cfg.level_positions(t)[0])

    def test_off_level_choice_rejected(self):
        cfg = CounterexampleConfig(N=(2, 3), depth=2, ray_count=3)
        with pytest.raises(CoverageViolated):
            build_family(cfg, choice=lambda j, t: 1)


class TestRayPoints:
    def test_first_steps(self, family):
        assert ray_point(family, 1, 0) == {}
        assert ray_point(family, 1, 1) == {1: 1}

    def test_value_formula(self, family):
        for j in (1, 4, 8):
            for t in range(2, 7):
                pt = ray_point(family, j, t)
                assert pt[1] == (3**t - 1) // 2
                for u in range(1, t):
                    assert pt[family.choice(j, u)] == (3**t - 3**u) // 2

    def test_known_point(self, family):
        # ray 1 chooses positions 2, 4, 7, ... round robin
        assert ray_point(family, 1, 3) == {1: 13, 2: 12, 4: 9}

    def test_membership_in_carrier(self, family):
        for j in range(1, 9):
            for t in range(0, 7):
                assert in_carrier(family, ray_point(family, j, t))

    def test_carrier_rejects_bad_multiples(self, family):
        assert not in_carrier(family, {2: 1})  # level-1 position needs a multiple of 3
        assert not in_carrier(family, {1: -1})
        assert not in_carrier(family, {99: 3})

    def test_pairwise_distance_formula(self, family):
        for j in (1, 5):
            pts = [ray_point(family, j, t) for t in range(0, 7)]
            for s in range(0, 7):
                for t in range(s + 1, 7):
                    assert linf_distance(pts[s], pts[t]) == (3**t - 3**s) // 2

    def test_rays_are_metric_rays(self, family):
        for j in range(1, 9):
            pts = [ray_point(family, j, t) for t in range(0, 7)]
            assert verify_metric_ray(pts)

    def test_tampered_ray_fails(self, family):
        pts = [ray_point(family, 2, t) for t in range(0, 5)]
        pts[3] = dict(pts[3])
        pts[3][1] += 1
        assert not verify_metric_ray(pts)


class TestSeparation:
    def test_witnesses_meet_bound(self, family):
        frozen = {2: 3, 3: 9, 4: 36, 5: 117, 6: 360}
        for t in range(2, 7):
            w = separation_witness(family, t)
            assert len(w.points) == family.config.N[t - 2]
            assert w.bound == 3 ** (t - 1)
            assert w.min_distance >= w.bound
            assert w.min_distance == frozen[t]

    def test_epsilon_value_and_exactness(self):
        assert separation_epsilon() == pytest.approx(1 / 9, abs=0)
        assert verify_separation_epsilon(12)

    def test_equality_is_sharp(self):
        # one directly computed instance of the level inequality at eps = 1/9
        eps = Fraction(1, 9)
        t = 5
        assert Fraction(3) ** (t - 1) - 2 * eps * Fraction(3) ** t == Fraction(3) ** (t - 2)


class TestBlockView:
    def test_grouping_dims(self):
        cfg = CounterexampleConfig()
        spec = grouping_spec(cfg, 2.0)
        assert spec.block_dims == (1, 2, 3, 4, 5, 6)

    def test_block_vectors_match_sparse_points(self, family):
        vecs = ray_block_vectors(family, 1, 2.0)
        assert norm(vecs[0]) == 0.0
        pt = ray_point(family, 1, 3)
        prof3 = np.zeros(6)
        prof3[0] = pt[1]
        prof3[1] = pt[2]
        prof3[2] = pt[4]
        from spiralpaste import block_profile

        assert np.array_equal(block_profile(vecs[3]), prof3)

    def test_counterexample_rays_break_sum_norm_additivity(self, family):
        # the heart of the lower bound: under any finite exponent the level
        # grouping stops these from being metric rays, so the profile law
        # refuses them
        for p in (1.5, 2.0, 3.0):
            vecs = ray_block_vectors(family, 1, p)
            with pytest.raises(NotARay):
                profile_proportionality(vecs)

    def test_multiples_ray_is_proportional(self):
        spec = SumSpaceSpec(2.0, (2, 1))
        u = BlockVector(spec, {1: np.array([3.0, 0.0]), 2: np.array([4.0])})
        ray = [BlockVector(spec, {}), u, 2.0 * u, 3.0 * u]
        assert profile_proportionality(ray)

    def test_exponent_range_enforced(self):
        spec = SumSpaceSpec(1.0, (2,))
        u = BlockVector(spec, {1: np.array([1.0, 0.0])})
        with pytest.raises(NotARay):
            profile_proportionality([BlockVector(spec, {}), u, 2.0 * u])

    def test_min_projection_level_boundary(self):
        spec = SumSpaceSpec(1.0, (1, 1))
        u = BlockVector(spec, {1: np.array([3.0]), 2: np.array([1.0])})
        ray = [BlockVector(spec, {}), u, 2.0 * u]
        assert min_projection_level(ray, 0.25) == 1  # 1 <= 0.25 * 4, inclusive
        assert min_projection_level(ray, 0.20) == 2

    def test_min_projection_level_rejects_mismatched_tails(self):
        spec = SumSpaceSpec(1.0, (1, 1))
        a = BlockVector(spec, {1: np.array([3.0]), 2: np.array([1.0])})
        b = BlockVector(spec, {1: np.array([4.0]), 2: np.array([4.0])})
        with pytest.raises(NotARay):
            min_projection_level([BlockVector(spec, {}), a, b], 0.25)


class TestWholeSpace:
    def test_ball_counts(self, family):
        assert ball_point_count(family, 0) == 1
        assert ball_point_count(family, 13) == 10
        assert ball_point_count(family, (3**6 - 1) // 2) == 34

    def test_metric_space_agrees_with_sparse_distances(self, family):
        sp = to_metric_space(family)
        assert len(sp) == 34
        assert sp.basepoint in sp.ids
        # cross-check the ball against the family count
        assert len(ball(sp, 13.0)) == ball_point_count(family, 13)

    def test_space_distances_are_integers(self, family):
        sp = to_metric_space(family)
        D = sp.distance_matrix()
        assert np.array_equal(D, np.round(D))


@st.composite
def small_config(draw):
    depth = draw(st.integers(min_value=2, max_value=4))
    base = draw(st.integers(min_value=2, max_value=3))
    widths = tuple(base + i for i in range(depth))
    return CounterexampleConfig(N=widths, depth=depth, ray_count=widths[-1])


@settings(max_examples=25, deadline=None)
@given(small_config())
def test_any_valid_family_has_exact_witnesses(cfg):
    fam = build_family(cfg)
    for j in range(1, cfg.ray_count + 1):
        pts = [ray_point(fam, j, t) for t in range(0, cfg.depth + 1)]
        assert verify_metric_ray(pts)
    for t in range(2, cfg.depth + 1):
        w = separation_witness(fam, t)
        assert w.min_distance >= 3 ** (t - 1)
