"""Tests for runaway checkers and finite truncations."""

import numpy as np
import pytest

from freqdyn.density import IndexSet, arithmetic_progression, build_separated_family
from freqdyn.geometry import (
    ClosedDisc,
    Disjointness,
    Domain,
    disjointness,
    right_half_plane_exhaustion,
    sample_grid,
    whole_plane_exhaustion,
)
from freqdyn.maps import Identity, Iterated, ParabolicDisc, Similarity, apply
from freqdyn.runaway import (
    HorizonExhausted,
    RunawayConfig,
    build_carleman_truncation,
    check_strong_runaway,
    check_weak_runaway,
    collect_islands,
    powers_of_two_schedule,
)

WP = Domain.whole_plane()


def _translations(n):
    return Similarity(1.0, float(n))


def _vertical(n):
    return Similarity(1.0, 1j * float(n))


# ---------------------------------------------------------------------------
# Weak runaway


def test_weak_runaway_translations():
    rep = check_weak_runaway(_translations, ClosedDisc(0.0, 1.0), horizon=1000)
    assert list(rep.escape_set)[:3] == [3, 4, 5]
    assert len(rep.escape_set) == 998
    assert rep.density.lower_estimate >= 0.99
    assert rep.positive_density


def test_weak_runaway_identity_is_exactly_zero():
    rep = check_weak_runaway(
        lambda n: Identity(WP), ClosedDisc(0.0, 1.0), horizon=300
    )
    assert len(rep.escape_set) == 0
    assert rep.density.lower_estimate == 0.0
    assert rep.density.upper_estimate == 0.0
    assert not rep.positive_density


def test_weak_runaway_negative_control_powers_of_two():
    schedule = powers_of_two_schedule(ParabolicDisc(1.0, 1.0, 1))
    rep = check_weak_runaway(schedule, ClosedDisc(0.0, 0.5), horizon=10_000)
    for n in rep.escape_set:
        assert n & (n - 1) == 0, "escape outside the designed subsequence"
    assert len(rep.escape_set) >= 5
    assert rep.density.upper_estimate < 0.01


def test_powers_of_two_schedule_structure():
    base = ParabolicDisc(1.0, 1.0, 1)
    schedule = powers_of_two_schedule(base)
    assert isinstance(schedule(1), Identity)
    assert schedule(2) == Iterated(base, 1)
    assert schedule(8) == Iterated(base, 3)
    assert isinstance(schedule(12), Identity)


# ---------------------------------------------------------------------------
# Strong runaway


def _family_config(horizon, nu_max=2, maps=_translations):
    fam = build_separated_family(3, horizon, 8)
    return RunawayConfig(
        domain=WP,
        maps=maps,
        exhaustion=whole_plane_exhaustion(),
        family=fam.a_of_nu,
        n_max=horizon,
        nu_max=nu_max,
    )


def test_strong_runaway_translations_pass():
    cfg = _family_config(2000)
    rep = check_strong_runaway(cfg)
    assert rep.passed
    assert rep.p1_ok and rep.p2_ok and rep.p3_ok
    for nu, dens in rep.densities:
        assert dens.lower_estimate > 0.0
    assert rep.probes == ((1, 0, 0), (2, 0, 0))
    assert rep.p2_disc_witness is None and rep.p2_index_witness is None
    expected = len(cfg.family(1)) + len(cfg.family(2))
    assert len(rep.islands) == expected


def test_strong_runaway_island_discs_brute_force():
    cfg = _family_config(600)
    rep = check_strong_runaway(cfg)
    # oracle: translations of whole-plane discs have center n, radius nu
    for isl in rep.islands:
        assert isl.image_bound.center == pytest.approx(float(isl.n))
        assert isl.image_bound.radius == pytest.approx(float(isl.nu))
    for i, a in enumerate(rep.islands):
        for b in rep.islands[i + 1:]:
            assert abs(a.image_bound.center - b.image_bound.center) > (
                a.image_bound.radius + b.image_bound.radius
            )
    # spot check with actual mapped sample clouds
    few = rep.islands[:4]
    clouds = [apply(isl.map, sample_grid(isl.source, 2)) for isl in few]
    for i in range(len(few)):
        for j in range(i + 1, len(few)):
            gap = np.min(
                np.abs(clouds[i][:, None] - clouds[j][None, :])
            )
            assert gap > 0.0


def test_strong_runaway_identity_fails_p2_and_stays_failed():
    for horizon in (600, 1200):
        cfg = _family_config(horizon, maps=lambda n: Identity(WP))
        rep = check_strong_runaway(cfg)
        assert not rep.passed and not rep.p2_ok
        assert rep.p2_disc_witness is not None
        (n1, nu1), (n2, nu2) = rep.p2_disc_witness
        d1 = next(i.image_bound for i in rep.islands if (i.n, i.nu) == (n1, nu1))
        d2 = next(i.image_bound for i in rep.islands if (i.n, i.nu) == (n2, nu2))
        assert abs(d1.center - d2.center) <= d1.radius + d2.radius


def test_strong_runaway_shared_index_sets_fail_p2():
    cfg = RunawayConfig(
        domain=WP,
        maps=_translations,
        exhaustion=whole_plane_exhaustion(),
        family=lambda nu: arithmetic_progression(8, 24, 2000),
        n_max=2000,
        nu_max=2,
    )
    rep = check_strong_runaway(cfg)
    assert not rep.p2_ok
    assert rep.p2_index_witness == (1, 2, 8)


def test_strong_runaway_empty_level_fails_p1():
    def family(nu):
        if nu == 1:
            return arithmetic_progression(8, 24, 2000)
        return IndexSet(np.empty(0, dtype=np.int64), 2000)

    cfg = RunawayConfig(
        domain=WP,
        maps=_translations,
        exhaustion=whole_plane_exhaustion(),
        family=family,
        n_max=2000,
        nu_max=2,
    )
    rep = check_strong_runaway(cfg)
    assert not rep.p1_ok and rep.p1_witness == 2
    assert not rep.passed


def test_offender_reporting_with_clean_tail():
    cfg = RunawayConfig(
        domain=WP,
        maps=_vertical,
        exhaustion=whole_plane_exhaustion(),
        family=lambda nu: arithmetic_progression(2 if nu == 1 else 6, 8, 500),
        n_max=500,
        nu_max=2,
    )
    rep = check_strong_runaway(cfg)
    assert rep.passed
    # the island at n = 2 touches K_1 and sits inside reach of K_2
    assert rep.probes[0] == (1, 1, 2)
    assert rep.probes[1][1] >= 1


def test_membership_guard_rejects_escaping_maps():
    cfg = RunawayConfig(
        domain=Domain.right_half_plane(),
        maps=lambda n: Similarity(1.0, -float(n)),
        exhaustion=right_half_plane_exhaustion(),
        family=lambda nu: arithmetic_progression(8, 24, 500),
        n_max=500,
        nu_max=1,
    )
    with pytest.raises(ValueError, match="does not send"):
        collect_islands(cfg)


def test_config_domain_mismatch_rejected():
    with pytest.raises(ValueError, match="domain"):
        RunawayConfig(
            domain=Domain.unit_disc(),
            maps=_translations,
            exhaustion=whole_plane_exhaustion(),
            family=lambda nu: arithmetic_progression(8, 24, 100),
            n_max=100,
            nu_max=1,
        )


# ---------------------------------------------------------------------------
# Overlap inequality witness


def test_overlap_forces_unit_gap_for_constant_target():
    # whenever K meets phi(K), the constant 1 + sup|f| stays at distance
    # >= 1 from f composed with phi somewhere on K
    k = ClosedDisc(0.0, 1.0)
    pts = sample_grid(k, 4)
    f = lambda z: z ** 2 / 4.0
    shift = Similarity(1.0, 1.0)
    moved = apply(shift, pts)
    inside = np.abs(moved) <= 1.0
    assert inside.any(), "overlap witness missing from the grid"
    g = 1.0 + np.max(np.abs(f(pts)))
    gap = np.max(np.abs(g - f(moved)[inside]))
    assert gap >= 1.0 - 1e-9


# ---------------------------------------------------------------------------
# Truncations


def test_truncation_translations():
    cfg = _family_config(2000)
    tr = build_carleman_truncation(cfg, bases=1, max_islands=4)
    assert tr.k_base == 1
    assert len(tr.bases) == 1
    assert len(tr.islands) == 4
    ns = [isl.n for isl in tr.islands]
    assert ns == sorted(ns)
    for i, a in enumerate(tr.islands):
        assert a.nu >= tr.k_base
        for b in tr.islands[i + 1:]:
            assert (
                disjointness(a.image_bound, b.image_bound)
                is Disjointness.DISJOINT
            )
        for base in tr.bases:
            assert disjointness(a.image_bound, base) is Disjointness.DISJOINT
    assert all(count == 0 for _, count in tr.probe_counts)


def test_truncation_island_bounds_hold_on_fine_grids():
    cfg = _family_config(2000)
    tr = build_carleman_truncation(cfg, bases=1, max_islands=4)
    for isl in tr.islands:
        pts = sample_grid(isl.source, 12)
        reach = np.max(np.abs(apply(isl.map, pts) - isl.image_bound.center))
        assert reach <= isl.image_bound.radius + 1e-9


def test_truncation_skips_offending_level():
    cfg = RunawayConfig(
        domain=WP,
        maps=_vertical,
        exhaustion=whole_plane_exhaustion(),
        family=lambda nu: arithmetic_progression(2 if nu == 1 else 6, 8, 500),
        n_max=500,
        nu_max=2,
    )
    tr = build_carleman_truncation(cfg, bases=1)
    assert tr.k_base == 2
    assert tr.islands and all(isl.nu == 2 for isl in tr.islands)


def test_truncation_horizon_exhaustion():
    cfg = RunawayConfig(
        domain=WP,
        maps=_vertical,
        exhaustion=whole_plane_exhaustion(),
        family=lambda nu: arithmetic_progression(6 if nu == 1 else 2, 8, 500),
        n_max=500,
        nu_max=2,
    )
    assert check_strong_runaway(cfg).passed
    with pytest.raises(HorizonExhausted):
        build_carleman_truncation(cfg, bases=1)


def test_truncation_requires_strong_pass():
    cfg = _family_config(600, maps=lambda n: Identity(WP))
    with pytest.raises(ValueError, match="P2"):
        build_carleman_truncation(cfg, bases=1)


def test_truncation_bases_zero():
    cfg = _family_config(1000)
    tr = build_carleman_truncation(cfg, bases=0, max_islands=3)
    assert tr.bases == ()
    assert tr.k_base == 1
    assert len(tr.islands) == 3


def test_truncation_rejects_bad_arguments():
    cfg = _family_config(600)
    with pytest.raises(ValueError):
        build_carleman_truncation(cfg, bases=5)
    with pytest.raises(ValueError):
        build_carleman_truncation(cfg, bases=0, max_islands=0)
