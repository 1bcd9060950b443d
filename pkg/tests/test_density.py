"""Tests for index sets, splitting, and separated families."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freqdyn.density import (
    GROWTH_THRESHOLDS,
    IndexSet,
    arithmetic_progression,
    build_separated_family,
    check_similarity_criterion,
    check_translation_separation,
    diagonal_pairs,
    lower_density_estimate,
    naturals,
    split,
    split_assignment,
    upper_density_estimate,
    verify_separated_family,
)

DENSITY_TOL = 2e-3


# ---------------------------------------------------------------------------
# IndexSet basics


def test_index_set_validation():
    with pytest.raises(ValueError):
        IndexSet(np.array([0, 1]), 10)
    with pytest.raises(ValueError):
        IndexSet(np.array([3, 3]), 10)
    with pytest.raises(ValueError):
        IndexSet(np.array([2, 1]), 10)
    with pytest.raises(ValueError):
        IndexSet(np.array([5, 20]), 10)


def test_index_set_membership_and_counts():
    s = IndexSet.from_elements([2, 5, 11], n_max=20)
    assert 5 in s and 6 not in s and len(s) == 3
    # oracle: count by explicit loop
    for n in range(1, 21):
        assert s.count_up_to(n) == sum(1 for x in [2, 5, 11] if x <= n)


def test_arithmetic_progression_matches_loop():
    ap = arithmetic_progression(8, 24, 1000)
    assert list(ap) == [8 + 24 * j for j in range(42)]
    assert ap.closed_form_density == pytest.approx(1 / 24)


# ---------------------------------------------------------------------------
# Density estimates


def test_naturals_have_density_one():
    rep = lower_density_estimate(naturals(1000), 1000)
    assert rep.lower_estimate == 1.0
    assert rep.upper_estimate == 1.0
    assert not rep.empty


def test_progression_estimate_near_closed_form():
    ap = arithmetic_progression(8, 24, 100_000)
    rep = lower_density_estimate(ap, 100_000)
    assert rep.burn_in == 20_000
    assert rep.closed_form == pytest.approx(1 / 24)
    assert abs(rep.lower_estimate - 1 / 24) < DENSITY_TOL
    assert abs(rep.upper_estimate - 1 / 24) < DENSITY_TOL
    assert rep.lower_estimate <= 1 / 24 <= rep.upper_estimate


def test_estimates_bracket_every_prefix_ratio():
    s = IndexSet.from_elements([1, 2, 3, 50, 51, 52, 53, 54], n_max=60)
    rep = lower_density_estimate(s, 60, burn_in=5)
    # oracle: direct scan
    ratios = [sum(1 for x in s if x <= n) / n for n in range(5, 61)]
    assert rep.lower_estimate == pytest.approx(min(ratios))
    assert rep.upper_estimate == pytest.approx(max(ratios))


def test_empty_set_reports_zero():
    s = IndexSet(np.empty(0, dtype=np.int64), 100)
    rep = lower_density_estimate(s, 100)
    assert rep.empty
    assert rep.lower_estimate == 0.0 and rep.upper_estimate == 0.0


def test_checkpoints_are_consistent():
    ap = arithmetic_progression(3, 7, 5000)
    rep = lower_density_estimate(ap, 5000)
    assert rep.checkpoints[0][0] == rep.burn_in
    assert rep.checkpoints[-1][0] == 5000
    for n, ratio in rep.checkpoints:
        assert ratio == pytest.approx(int(ap.count_up_to(n)) / n)


def test_density_rejects_bad_windows():
    s = naturals(100)
    with pytest.raises(ValueError):
        lower_density_estimate(s, 200)
    with pytest.raises(ValueError):
        lower_density_estimate(s, 100, burn_in=0)
    with pytest.raises(ValueError):
        lower_density_estimate(s, 50, burn_in=60)


@given(
    st.sets(st.integers(min_value=1, max_value=400), min_size=0, max_size=120),
    st.integers(min_value=1, max_value=400),
)
@settings(max_examples=60, deadline=None)
def test_density_invariants(elements, burn_in):
    s = IndexSet.from_elements(elements, n_max=400)
    rep = lower_density_estimate(s, 400, burn_in=burn_in)
    assert 0.0 <= rep.lower_estimate <= rep.upper_estimate <= 1.0
    assert upper_density_estimate(s, 400, burn_in=burn_in) == rep.upper_estimate
    if not elements:
        assert rep.empty


# ---------------------------------------------------------------------------
# Rank splitting


def _oracle_halving(n, parts):
    """Repeatedly take every other rank; last part absorbs the rest."""
    out = []
    rem = list(range(1, n + 1))
    for _ in range(parts - 1):
        out.append(rem[0::2])
        rem = rem[1::2]
    out.append(rem)
    return out


def test_split_assignment_matches_halving_oracle():
    for parts in (1, 2, 3, 7):
        oracle = _oracle_halving(64, parts)
        for j, ranks in enumerate(oracle, start=1):
            for k in ranks:
                assert min(split_assignment(k), parts) == j


def test_split_assignment_known_values():
    assert [split_assignment(k) for k in range(1, 13)] == [
        1, 2, 1, 3, 1, 2, 1, 4, 1, 2, 1, 3,
    ]


def test_split_assignment_rejects_zero():
    with pytest.raises(ValueError):
        split_assignment(0)


def test_split_partitions_a_set():
    s = IndexSet.from_elements(range(5, 500, 5), n_max=500)
    parts = split(s, 3, 500)
    merged = np.concatenate([p.elements for p in parts])
    assert np.array_equal(np.sort(merged), s.elements)
    oracle = _oracle_halving(len(s), 3)
    for p, ranks in zip(parts, oracle):
        assert list(p) == [int(s.elements[k - 1]) for k in ranks]


def test_split_part_densities():
    n = naturals(2 ** 14)
    parts = split(n, 4, 2 ** 14)
    for j, p in enumerate(parts[:-1], start=1):
        rep = lower_density_estimate(p, 2 ** 14)
        assert abs(rep.lower_estimate - 2.0 ** -j) < DENSITY_TOL
    last = lower_density_estimate(parts[-1], 2 ** 14)
    # the absorbing part has density 2^-(parts-1)
    assert abs(last.lower_estimate - 2.0 ** -3) < DENSITY_TOL


@given(
    st.sets(st.integers(min_value=1, max_value=300), min_size=1, max_size=80),
    st.integers(min_value=1, max_value=5),
)
@settings(max_examples=60, deadline=None)
def test_split_is_a_partition(elements, parts):
    s = IndexSet.from_elements(elements, n_max=300)
    pieces = split(s, parts, 300)
    assert len(pieces) == parts
    merged = np.concatenate([p.elements for p in pieces])
    assert np.array_equal(np.sort(merged), s.elements)
    assert merged.size == s.elements.size


# ---------------------------------------------------------------------------
# Separated families


def test_diagonal_pairs_order():
    assert diagonal_pairs(6) == [(1, 1), (2, 1), (1, 2), (3, 1), (2, 2), (1, 3)]
    pairs = diagonal_pairs(40)
    for p, (_, nu) in enumerate(pairs, start=1):
        assert nu <= p


def test_family_first_class_is_the_expected_progression():
    fam = build_separated_family(3, 100_000, 8)
    a1 = fam.set_for(1, 1)
    # depth-1 residue 1 class with multiplier 8: 8, 32, 56, ...
    assert list(a1)[:4] == [8, 32, 56, 80]
    rep = lower_density_estimate(a1, 100_000)
    assert abs(rep.lower_estimate - 1 / 24) < DENSITY_TOL


def test_family_three_pairs_densities_and_verifier():
    fam = build_separated_family(3, 100_000, 8)
    report = verify_separated_family(fam)
    assert report.passed, report.violations
    for (l, nu), rep in report.densities:
        assert rep.lower_estimate >= 0.005


def test_family_separation_brute_force():
    fam = build_separated_family(6, 4000, 8)
    items = list(fam.pairs)
    # oracle: all pairwise distances by explicit double loop
    for i in range(len(items)):
        for j in range(len(items)):
            if i == j:
                continue
            (_, nu_i), si = items[i]
            (_, nu_j), sj = items[j]
            for x in si:
                for y in sj:
                    assert abs(x - y) >= nu_i + nu_j
    # disjointness and the n >= nu prefix rule
    seen = set()
    for (l, nu), s in items:
        for x in s:
            assert x >= nu
            assert x not in seen
            seen.add(x)


def test_family_pruning_can_reject():
    # with multiplier 1 the depth-1 classes sit at distance 1 < nu sum
    with pytest.raises(ValueError, match="pruning"):
        build_separated_family(2, 10_000, 1)


def test_family_large_multiplier_never_prunes():
    fam = build_separated_family(6, 30_000, 8)
    for p, ((l, nu), s) in enumerate(fam.pairs, start=1):
        d = (p + 1) // 2
        r = 1 if p % 2 == 1 else 2
        start, gap = 8 * r * 3 ** (d - 1), 8 * 3 ** d
        expect = [x for x in range(start, 30_001, gap) if x >= nu]
        assert list(s) == expect


def test_family_per_level_union():
    fam = build_separated_family(6, 30_000, 8)
    a1 = fam.a_of_nu(1)
    merged = set()
    for (l, nu), s in fam.pairs:
        if nu == 1:
            merged |= set(s)
    assert set(a1) == merged
    assert fam.nu_values() == [1, 2, 3]


@given(
    st.integers(min_value=1, max_value=6),
    st.integers(min_value=6, max_value=12),
)
@settings(max_examples=25, deadline=None)
def test_family_verifier_always_passes_for_safe_multipliers(num_pairs, mult):
    fam = build_separated_family(num_pairs, 5000, mult)
    report = verify_separated_family(fam)
    assert report.passed, report.violations


def test_family_lookup_errors():
    fam = build_separated_family(2, 1000, 8)
    with pytest.raises(KeyError):
        fam.set_for(9, 9)


# ---------------------------------------------------------------------------
# Growth criteria


def test_similarity_criterion_passes_for_quadratic_translations():
    rep = check_similarity_criterion(
        lambda n: 1.0,
        lambda n: float(n * n),
        lambda k: np.sqrt(k),
        horizon=400,
    )
    assert rep.passed and rep.growth_ok and rep.pairwise_ok
    for t, last in rep.crossings:
        assert last < 400


def test_similarity_criterion_fails_for_slow_growth():
    rep = check_similarity_criterion(
        lambda n: 1.0,
        lambda n: np.log(n + 1.0),
        lambda k: float(k),
        horizon=300,
    )
    assert not rep.passed and not rep.growth_ok


def test_similarity_criterion_finds_pairwise_witness():
    rep = check_similarity_criterion(
        lambda n: 1.0,
        lambda n: float((-1) ** n),
        lambda k: 0.5 * np.ones(()),
        horizon=50,
    )
    assert not rep.pairwise_ok
    m, n = rep.witness
    assert m > n
    assert abs((-1.0) ** m - (-1.0) ** n) < 0.5 * 2 - 1e-9


def test_similarity_criterion_rejects_bad_input():
    with pytest.raises(ValueError, match="nonzero"):
        check_similarity_criterion(
            lambda n: 0.0 if n == 3 else 1.0,
            lambda n: float(n),
            lambda k: float(k),
            horizon=10,
        )
    with pytest.raises(ValueError, match="nondecreasing"):
        check_similarity_criterion(
            lambda n: 1.0,
            lambda n: float(n),
            lambda k: -float(k),
            horizon=10,
        )


def test_similarity_criterion_accepts_arrays():
    n = np.arange(1, 201, dtype=float)
    rep = check_similarity_criterion(np.ones(200), n ** 2, np.sqrt(n), horizon=200)
    assert rep.passed


def test_translation_separation_quadratic():
    rep = check_translation_separation(lambda n: float(n * n), horizon=1000)
    assert rep.passed and not rep.slow_growth
    assert rep.k_max == 200
    # inf over n of (n+k)^2 - n^2 is attained at n = 1
    for k, value in enumerate(rep.infima, start=1):
        assert value == pytest.approx(k * (k + 2))


def test_translation_separation_linear_is_slow():
    rep = check_translation_separation(lambda n: float(n), horizon=1000)
    assert rep.passed and rep.slow_growth
    assert rep.crossings[-1] == (100.0, 100)


def test_translation_separation_bounded_fails():
    rep = check_translation_separation(lambda n: np.sin(0.7 * n), horizon=600)
    assert not rep.passed


def test_translation_separation_rejects_bad_k_max():
    with pytest.raises(ValueError):
        check_translation_separation(lambda n: float(n), horizon=100, k_max=100)


def test_growth_thresholds_are_increasing():
    assert list(GROWTH_THRESHOLDS) == sorted(GROWTH_THRESHOLDS)
    assert len(GROWTH_THRESHOLDS) == 3
