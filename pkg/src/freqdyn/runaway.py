"""Runaway-condition checkers and finite Carleman-style truncations.

A schedule of self-maps escapes in the weak sense when the indices n
with K disjoint from phi_n(K) carry positive density for every compact
K.  The strong form asks for an exhaustion (K_nu) and index sets A(nu)
such that (P1) each A(nu) has positive lower density, (P2) the A(nu)
and the image islands phi_n(K_nu) are pairwise disjoint, and (P3) any
fixed compact meets only finitely many islands.  All three are checked
here at a finite horizon, with certified enclosing discs standing in
for the images.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .density import DensityReport, IndexSet, lower_density_estimate
from .geometry import (
    ClosedDisc,
    CompactSet,
    Disjointness,
    Domain,
    Exhaustion,
    disjointness,
    sample_grid,
)
from .maps import (
    HoloMap,
    Identity,
    apply,
    image_enclosing_disc,
    iterate,
    map_domain,
    maps_into,
)

__all__ = [
    "CarlemanTruncation",
    "HorizonExhausted",
    "Island",
    "RunawayConfig",
    "StrongRunawayReport",
    "WeakRunawayReport",
    "build_carleman_truncation",
    "check_strong_runaway",
    "check_weak_runaway",
    "collect_islands",
    "powers_of_two_schedule",
]

# Desk-scale cap on truncation islands; fits certified on more pieces
# than this are slow without adding evidence.
MAX_ISLANDS = 6

# Post-construction re-verification samples this much finer than the
# construction grid.
VERIFY_REFINE = 4


class HorizonExhausted(RuntimeError):
    """No admissible truncation level exists within the inspected horizon.

    Raised when every inspected level still carries an island meeting a
    base compact.  This reports the finiteness of the experiment, not a
    property of the underlying map sequence.
    """


def powers_of_two_schedule(base: HoloMap) -> Callable[[int], HoloMap]:
    """The classical negative control: iterates at n = 2^k, identity elsewhere.

    The escape times of this schedule are contained in the powers of
    two, a set of zero density, so no density-based runaway property
    can hold even though the orbit escapes along the subsequence.
    """
    dom = map_domain(base)
    ident = Identity(dom)

    def schedule(n: int) -> HoloMap:
        if n >= 2 and (n & (n - 1)) == 0:
            return iterate(base, n.bit_length() - 1)
        return ident

    return schedule


@dataclass(frozen=True)
class WeakRunawayReport:
    escape_set: IndexSet
    density: DensityReport
    horizon: int

    @property
    def positive_density(self) -> bool:
        # a nonempty escape set always has a positive finite-horizon
        # estimate; callers judging a schedule should read the estimate
        # itself, not just this flag
        return self.density.lower_estimate > 0.0


def check_weak_runaway(
    maps_schedule: Callable[[int], HoloMap],
    k: CompactSet,
    horizon: int,
    resolution: int = 3,
) -> WeakRunawayReport:
    """Density report of {n <= horizon : K and phi_n(K) certified disjoint}.

    Disjointness is decided between K and the certified enclosing disc
    of phi_n(K); an Unknown verdict counts as not disjoint, so the
    reported escape set is an under-approximation.
    """
    escapes = []
    for n in range(1, horizon + 1):
        bound = image_enclosing_disc(maps_schedule(n), k, resolution=resolution)
        if disjointness(bound, k, resolution) is Disjointness.DISJOINT:
            escapes.append(n)
    escape_set = IndexSet(
        np.asarray(escapes, dtype=np.int64), horizon, "escape-times"
    )
    return WeakRunawayReport(
        escape_set=escape_set,
        density=lower_density_estimate(escape_set, horizon),
        horizon=horizon,
    )


@dataclass(frozen=True)
class RunawayConfig:
    """One strong-runaway experiment: maps, exhaustion, index family, horizons."""

    domain: Domain
    maps: Callable[[int], HoloMap]
    exhaustion: Exhaustion
    family: Callable[[int], IndexSet]
    n_max: int
    nu_max: int
    resolution: int = 3

    def __post_init__(self):
        if self.n_max < 1 or self.nu_max < 1:
            raise ValueError("horizons must be positive")
        if self.exhaustion.domain != self.domain:
            raise ValueError("exhaustion does not live on the configured domain")


@dataclass(frozen=True)
class Island:
    """One image set phi_n(K_nu) together with its certified disc bound."""

    n: int
    nu: int
    map: HoloMap
    source: CompactSet
    image_bound: ClosedDisc


def collect_islands(cfg: RunawayConfig) -> tuple:
    """All islands (n in A(nu), nu <= nu_max) with certified image bounds.

    Rejects the configuration when some phi_n fails to send the sampled
    K_nu into the domain, since every later certificate would be about
    a map outside the declared class.
    """
    islands = []
    for nu in range(1, cfg.nu_max + 1):
        source = cfg.exhaustion.member(nu)
        for n in cfg.family(nu):
            if n > cfg.n_max:
                break
            m = cfg.maps(n)
            if not maps_into(m, cfg.domain, source, cfg.resolution):
                raise ValueError(
                    f"map at index {n} does not send level {nu} into the domain"
                )
            islands.append(
                Island(n, nu, m, source,
                       image_enclosing_disc(m, source, resolution=cfg.resolution))
            )
    return tuple(islands)


@dataclass(frozen=True)
class StrongRunawayReport:
    p1_ok: bool
    p2_ok: bool
    p3_ok: bool
    densities: tuple  # of (nu, DensityReport)
    p1_witness: Optional[int]
    p2_index_witness: Optional[tuple]  # (nu, mu, shared index)
    p2_disc_witness: Optional[tuple]  # ((n, nu), (m, mu))
    probes: tuple  # of (mu, offender count, largest offending n)
    p3_witness: Optional[int]
    islands: tuple

    @property
    def passed(self) -> bool:
        return self.p1_ok and self.p2_ok and self.p3_ok


def check_strong_runaway(cfg: RunawayConfig) -> StrongRunawayReport:
    """Finite-horizon verdicts for (P1), (P2), (P3) with witnesses.

    (P3) is a proxy: per probe compact K_mu the offending islands are
    counted and the check passes only when some inspected island lies
    beyond the largest offender, i.e. the inspected tail is clean.
    """
    densities = []
    p1_ok = True
    p1_witness = None
    sets = {}
    for nu in range(1, cfg.nu_max + 1):
        a = cfg.family(nu)
        sets[nu] = a
        rep = lower_density_estimate(a, min(cfg.n_max, a.n_max))
        densities.append((nu, rep))
        if rep.lower_estimate <= 0.0 and p1_witness is None:
            p1_ok = False
            p1_witness = nu

    p2_index_witness = None
    for nu in range(1, cfg.nu_max + 1):
        for mu in range(nu + 1, cfg.nu_max + 1):
            common = np.intersect1d(sets[nu].elements, sets[mu].elements)
            if common.size:
                p2_index_witness = (nu, mu, int(common[0]))
                break
        if p2_index_witness:
            break

    islands = collect_islands(cfg)
    p2_disc_witness = None
    if len(islands) >= 2:
        centers = np.array([i.image_bound.center for i in islands], dtype=complex)
        radii = np.array([i.image_bound.radius for i in islands])
        # image bounds are discs, so the pairwise test is the exact
        # disc rule |c1 - c2| > r1 + r2, vectorized over all pairs
        sep = np.abs(centers[:, None] - centers[None, :])
        need = radii[:, None] + radii[None, :]
        iu = np.triu_indices(len(islands), k=1)
        bad = (sep <= need)[iu]
        if bad.any():
            first = int(np.argmax(bad))
            a, b = islands[int(iu[0][first])], islands[int(iu[1][first])]
            p2_disc_witness = ((a.n, a.nu), (b.n, b.nu))
    p2_ok = p2_index_witness is None and p2_disc_witness is None

    probes = []
    p3_ok = True
    p3_witness = None
    for mu in range(1, cfg.nu_max + 1):
        probe = cfg.exhaustion.member(mu)
        offenders = [
            isl.n
            for isl in islands
            if disjointness(isl.image_bound, probe, cfg.resolution)
            is not Disjointness.DISJOINT
        ]
        last = max(offenders, default=0)
        probes.append((mu, len(offenders), last))
        if offenders and not any(isl.n > last for isl in islands):
            p3_ok = False
            if p3_witness is None:
                p3_witness = mu

    return StrongRunawayReport(
        p1_ok=p1_ok,
        p2_ok=p2_ok,
        p3_ok=p3_ok,
        densities=tuple(densities),
        p1_witness=p1_witness,
        p2_index_witness=p2_index_witness,
        p2_disc_witness=p2_disc_witness,
        probes=tuple(probes),
        p3_witness=p3_witness,
        islands=islands,
    )


@dataclass(frozen=True)
class CarlemanTruncation:
    """Finite stand-in for the union of base compacts and escaped islands."""

    bases: tuple  # of CompactSet
    islands: tuple  # of Island
    k_base: int
    domain: Domain
    probe_counts: tuple  # of (mu, offending island count)

    def __post_init__(self):
        for isl in self.islands:
            if isl.nu < self.k_base:
                raise ValueError("island below the truncation level")


def build_carleman_truncation(
    cfg: RunawayConfig,
    bases: int,
    report: Optional[StrongRunawayReport] = None,
    max_islands: int = MAX_ISLANDS,
) -> CarlemanTruncation:
    """Base compacts K_1..K_bases plus islands from levels >= k_base.

    k_base is the least level such that every inspected island at that
    level or above clears all base compacts; it is computed, never
    supplied.  Islands are then taken in increasing schedule order up
    to max_islands, and the disjointness of everything retained is
    re-verified on grids VERIFY_REFINE times finer than construction.
    """
    if bases < 0 or bases > cfg.nu_max:
        raise ValueError("bases must lie in [0, nu_max]")
    if max_islands < 1:
        raise ValueError("max_islands must be positive")
    if report is None:
        report = check_strong_runaway(cfg)
    if not report.passed:
        failed = [
            name
            for name, ok in (("P1", report.p1_ok), ("P2", report.p2_ok), ("P3", report.p3_ok))
            if not ok
        ]
        raise ValueError(f"strong-runaway precondition failed: {', '.join(failed)}")

    base_sets = tuple(cfg.exhaustion.member(mu) for mu in range(1, bases + 1))
    fine = cfg.resolution * VERIFY_REFINE

    clears = [
        all(
            disjointness(isl.image_bound, b, cfg.resolution) is Disjointness.DISJOINT
            for b in base_sets
        )
        for isl in report.islands
    ]
    k_base = None
    for k in range(1, cfg.nu_max + 1):
        if all(ok for ok, isl in zip(clears, report.islands) if isl.nu >= k):
            k_base = k
            break
    if k_base is None:
        raise HorizonExhausted(
            "every inspected level keeps an island meeting a base compact; "
            "enlarge nu_max or the horizon"
        )

    eligible = sorted(
        (isl for isl in report.islands if isl.nu >= k_base),
        key=lambda i: (i.n, i.nu),
    )
    chosen = tuple(eligible[:max_islands])

    for isl in chosen:
        pts = sample_grid(isl.source, fine)
        if pts.size:
            overflow = float(
                np.max(np.abs(apply(isl.map, pts) - isl.image_bound.center))
            ) - isl.image_bound.radius
            if overflow > 1e-9 * max(1.0, isl.image_bound.radius):
                raise RuntimeError(
                    f"island ({isl.n}, {isl.nu}) image bound fails fine-grid recheck"
                )
    for i, a in enumerate(chosen):
        for b in chosen[i + 1:]:
            if disjointness(a.image_bound, b.image_bound, fine) is not Disjointness.DISJOINT:
                raise RuntimeError(
                    f"islands ({a.n},{a.nu}) / ({b.n},{b.nu}) fail fine-grid disjointness"
                )
        for base_c in base_sets:
            if disjointness(a.image_bound, base_c, fine) is not Disjointness.DISJOINT:
                raise RuntimeError(
                    f"island ({a.n},{a.nu}) meets a base compact at fine resolution"
                )

    return CarlemanTruncation(
        bases=base_sets,
        islands=chosen,
        k_base=k_base,
        domain=cfg.domain,
        probe_counts=tuple((mu, count) for mu, count, _ in report.probes),
    )
