import random

import pytest

from rankmerge import (
    CombineConfig,
    DisplacementQuery,
    Method,
    Provider,
    ThresholdQuery,
    combine,
    displacement_cost,
    displacement_profile,
    entry_threshold,
    threshold_rank,
)
from tests.conftest import day
from tests.oracles import displacement_check


class TestEntryThreshold:
    def single_list_combined(self, snap, n=20):
        names = [f"d{i:03d}.test" for i in range(n)]
        cfg = CombineConfig(
            providers=frozenset({Provider.ALEXA}),
            window_start=day(0),
            window_end=day(0),
            method=Method.DOWDALL,
            n_ref=n,
        )
        return combine([snap(Provider.ALEXA, day(0), names)], cfg)

    def test_single_list_self_consistency(self, snap):
        # one provider, one day, full-length list: reaching the last rank
        # requires exactly that rank
        combined = self.single_list_combined(snap, n=20)
        last = len(combined.entries)
        query = ThresholdQuery(combined, target_rank=last)
        assert entry_threshold(query) == last
        mid = ThresholdQuery(combined, target_rank=7)
        assert entry_threshold(mid) == 7

    def test_unreachable_target_returns_none(self, snap):
        names = [f"d{i}.test" for i in range(5)]
        cfg = CombineConfig(
            providers=frozenset({Provider.ALEXA, Provider.MAJESTIC}),
            window_start=day(0),
            window_end=day(1),
            method=Method.DOWDALL,
            n_ref=5,
        )
        snaps = [
            snap(p, day(o), names)
            for p in (Provider.ALEXA, Provider.MAJESTIC)
            for o in range(2)
        ]
        combined = combine(snaps, cfg)
        # rank-1 incumbent holds 4 appearances of score 1; one day on one
        # provider can contribute at most 1
        assert entry_threshold(ThresholdQuery(combined, target_rank=1)) is None

    def test_monotone_in_days_and_providers_and_target(self, snap):
        combined = self.single_list_combined(snap, n=50)

        def rank_for(target, days=1, providers=1):
            return threshold_rank(
                combined.entries[target - 1].score,
                Method.DOWDALL,
                combined.config.n_ref,
                days=days,
                providers=providers,
            )

        assert rank_for(10, days=2) >= rank_for(10, days=1)
        assert rank_for(10, providers=2) >= rank_for(10, providers=1)
        assert rank_for(5) <= rank_for(20)

    def test_borda_threshold(self):
        # target score 6 with n_ref 10: need 10 - r >= 6, so r* = 4
        assert threshold_rank(6.0, Method.BORDA, 10) == 4
        # beyond the best possible budget
        assert threshold_rank(11.0, Method.BORDA, 10) is None

    def test_query_validation(self, snap):
        combined = self.single_list_combined(snap)
        with pytest.raises(ValueError):
            ThresholdQuery(combined, target_rank=0)
        with pytest.raises(ValueError):
            ThresholdQuery(combined, target_rank=1, days_manipulated=2)  # 1-day window
        with pytest.raises(ValueError):
            ThresholdQuery(combined, target_rank=1, providers_manipulated=2)


class TestDisplacementCost:
    def test_worked_example(self):
        ranking = tuple(f"d{i}.com" for i in range(1, 101))
        flagged = frozenset({"d5.com", "d40.com"})
        assert displacement_cost(DisplacementQuery(ranking, flagged, 10)) == 6

    def test_nothing_to_displace(self):
        ranking = tuple(f"d{i}.com" for i in range(1, 101))
        assert displacement_cost(DisplacementQuery(ranking, frozenset({"d50.com"}), 10)) == 0

    def test_boundary_rank_one(self):
        assert displacement_cost(DisplacementQuery(("bad.com",), frozenset({"bad.com"}), 1)) == 1

    def test_simulation_bracketing(self):
        rng = random.Random(11)
        for _ in range(50):
            n = rng.randint(5, 200)
            ranking = tuple(f"d{i}.com" for i in range(n))
            flagged = frozenset(rng.sample(list(ranking), rng.randint(1, min(8, n))))
            k = rng.randint(1, n)
            cost = displacement_cost(DisplacementQuery(ranking, flagged, k))
            assert displacement_check(ranking, flagged, k, cost)
            if cost > 0:
                assert not displacement_check(ranking, flagged, k, cost - 1)


class TestDisplacementProfile:
    def test_tail_flag_arithmetic(self):
        ranking = tuple(f"d{i}.com" for i in range(1, 1_000_001))
        profile = displacement_profile(
            ranking, {"tracker": {"d999969.com"}}, cuts=[1_000_000]
        )
        assert profile.rows == (("tracker", 1_000_000, 32),)

    def test_provider_absent_from_cut(self):
        ranking = tuple(f"d{i}.com" for i in range(1, 101))
        profile = displacement_profile(ranking, {"t": {"d90.com"}}, cuts=[10, 100])
        assert dict(((label, cut), cost) for label, cut, cost in profile.rows) == {
            ("t", 10): 0,
            ("t", 100): 11,
        }

    def test_three_provider_fixture_with_minima(self):
        ranking = tuple(f"d{i}.com" for i in range(1, 51))
        flagged = {
            "alpha": {"d3.com", "d30.com"},
            "beta": {"d10.com"},
            "gamma": {"d45.com"},
        }
        profile = displacement_profile(ranking, flagged, cuts=[10, 50])
        table = {(label, cut): cost for label, cut, cost in profile.rows}
        assert table == {
            ("alpha", 10): 8, ("alpha", 50): 48,
            ("beta", 10): 1, ("beta", 50): 41,
            ("gamma", 10): 0, ("gamma", 50): 6,
        }
        assert dict(profile.minima) == {10: 0, 50: 6}
