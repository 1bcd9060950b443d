"""Orbit scanning against polynomial targets.

A scan measures, for a fixed candidate f and a schedule of maps, the
sup distance of f composed with each map to a target polynomial over a
compact, and compares the resulting hit set with the index set the
candidate was designed for.  Every sup here is a grid sup, which
understates the true value; pass thresholds therefore carry a slack
factor, and burn-in indices are reported rather than silently skipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .approx import PolyLike, Polynomial, SpanBasis
from .density import DensityReport, IndexSet, lower_density_estimate
from .geometry import (
    CompactSet,
    DomainError,
    Exhaustion,
    eps_to_boundary,
    sample_grid,
)
from .maps import ConformalPair, HoloMap, apply

__all__ = [
    "GRID_SLACK",
    "IterateReport",
    "OrbitScanReport",
    "PairScan",
    "combination_scan",
    "first_monotone_tail",
    "iterate_convergence",
    "orbit_distance",
    "scan",
]

# Grid sup-norms understate true sup-norms; measured errors are
# multiplied by this before any pass/fail comparison.
GRID_SLACK = 1.1

_EVAL_CHUNK = 1 << 16


def _eval_chunked(f, pts: np.ndarray) -> np.ndarray:
    flat = pts.ravel()
    out = np.empty(flat.size, dtype=complex)
    for s in range(0, flat.size, _EVAL_CHUNK):
        out[s : s + _EVAL_CHUNK] = f.evaluate(flat[s : s + _EVAL_CHUNK])
    return out.reshape(pts.shape)


def orbit_distance(
    f: PolyLike,
    m: HoloMap,
    k: CompactSet,
    p: Polynomial,
    grid_res: int = 3,
) -> float:
    """sup over the grid of K of |f(phi(z)) - P(z)|."""
    grid = sample_grid(k, grid_res)
    if grid.size == 0:
        raise ValueError("cannot scan over an empty compact")
    mapped = apply(m, grid)
    return float(np.max(np.abs(_eval_chunked(f, mapped) - p.evaluate(grid))))


@dataclass(frozen=True, eq=False)
class PairScan:
    """Scan outcome for one (nu, l) pair."""

    nu: int
    l: int
    designed: IndexSet
    hits: IndexSet
    burn_in: int
    errors: np.ndarray  # measured error at every n in [1, horizon]
    eps_sup: np.ndarray  # sup over the grid of the boundary envelope at phi_n
    density: DensityReport
    hit_rate: float  # fraction of post-burn-in indices that are hits
    passed: bool

    @property
    def designed_elements(self) -> np.ndarray:
        horizon = self.errors.size
        els = self.designed.elements
        return els[els <= horizon]

    @property
    def designed_errors(self) -> np.ndarray:
        return self.errors[self.designed_elements - 1]

    @property
    def max_error_designed(self) -> float:
        errs = self.designed_errors
        return float(np.max(errs)) if errs.size else 0.0


@dataclass(frozen=True, eq=False)
class OrbitScanReport:
    entries: tuple
    delta: float
    horizon: int
    grid_res: int
    coefficients: Optional[tuple] = None
    coeff_square_sum: Optional[float] = None

    @property
    def passed(self) -> bool:
        return bool(self.entries) and all(e.passed for e in self.entries)

    def entry(self, nu: int, l: int) -> PairScan:
        for e in self.entries:
            if e.nu == nu and e.l == l:
                return e
        raise KeyError((nu, l))


def _entry_from_errors(
    nu: int,
    l: int,
    designed: IndexSet,
    errors: np.ndarray,
    eps_sup: np.ndarray,
    delta: float,
    horizon: int,
    envelope_constant: float,
    grid_slack: float,
) -> PairScan:
    hit_mask = errors * grid_slack < delta
    hits = IndexSet(
        np.nonzero(hit_mask)[0].astype(np.int64) + 1,
        horizon,
        f"hits(nu={nu},l={l})",
    )
    over = np.nonzero(eps_sup >= delta / envelope_constant)[0]
    burn_in = int(over[-1] + 1) if over.size else 0
    density = lower_density_estimate(
        hits, horizon, burn_in=min(max(burn_in, horizon // 5, 1), horizon)
    )
    els = designed.elements[designed.elements <= horizon]
    tail = els[els > burn_in]
    covered = bool(np.all(hit_mask[tail - 1])) if tail.size else True
    # the prefix-minimum lower estimate punishes the empty range before
    # the first covered index, so the verdict uses the post-burn-in rate
    window = horizon - burn_in
    hit_rate = float(np.count_nonzero(hit_mask[burn_in:]) / window) if window > 0 else 0.0
    passed = covered and hit_rate > 0.0
    return PairScan(
        nu=nu,
        l=l,
        designed=designed,
        hits=hits,
        burn_in=burn_in,
        errors=errors,
        eps_sup=eps_sup,
        density=density,
        hit_rate=hit_rate,
        passed=passed,
    )


def scan(
    f,
    maps_schedule: Callable[[int], HoloMap],
    exhaustion: Exhaustion,
    dense_seq: Callable[[int], Polynomial],
    delta: float,
    horizon: int,
    pairs: Sequence,
    grid_res: int = 3,
    envelope_constant: float = 1.0,
    grid_slack: float = GRID_SLACK,
) -> OrbitScanReport:
    """Measure hit sets {n : slack * error_n < delta} for each (nu, l) pair.

    pairs is a sequence of (nu, l, designed IndexSet).  For each tested
    level nu the burn-in is the last index at which the sup of the
    boundary envelope over the mapped grid still reaches
    delta / envelope_constant; a pair passes when every designed index
    beyond the burn-in is a hit and the hit set keeps a positive
    lower-density estimate.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if horizon < 1:
        raise ValueError("horizon must be positive")
    if not pairs:
        raise ValueError("need at least one (nu, l, designed) triple")

    by_nu = {}
    for nu, l, designed in pairs:
        by_nu.setdefault(int(nu), []).append((int(l), designed))

    entries = []
    for nu, blocks in sorted(by_nu.items()):
        grid = sample_grid(exhaustion.member(nu), grid_res)
        if grid.size == 0:
            raise ValueError(f"level {nu} compact has an empty grid")
        mapped = np.empty((horizon, grid.size), dtype=complex)
        for n in range(1, horizon + 1):
            mapped[n - 1] = apply(maps_schedule(n), grid)
        vals = _eval_chunked(f, mapped)
        eps_sup = np.max(
            eps_to_boundary(exhaustion.domain, mapped.ravel()).reshape(mapped.shape),
            axis=1,
        )
        for l, designed in sorted(blocks, key=lambda t: t[0]):
            targ = dense_seq(l).evaluate(grid)
            errors = np.max(np.abs(vals - targ[None, :]), axis=1)
            entries.append(
                _entry_from_errors(
                    nu, l, designed, errors, eps_sup, delta, horizon,
                    envelope_constant, grid_slack,
                )
            )
    return OrbitScanReport(
        entries=tuple(entries), delta=delta, horizon=horizon, grid_res=grid_res
    )


class _Combination:
    """Fixed linear combination of basis members, evaluated memberwise."""

    def __init__(self, members, alphas):
        self._members = members
        self._alphas = alphas

    def evaluate(self, z):
        out = self._alphas[0] * self._members[0].fn.evaluate(z)
        for a, m in zip(self._alphas[1:], self._members[1:]):
            if a != 0.0:
                out = out + a * m.fn.evaluate(z)
        return out


def combination_scan(
    basis: SpanBasis,
    coefficients: Sequence[complex],
    maps_schedule: Callable[[int], HoloMap],
    exhaustion: Exhaustion,
    dense_seq: Callable[[int], Polynomial],
    delta: float,
    horizon: int,
    pairs: Sequence,
    grid_res: int = 3,
    envelope_constant: Optional[float] = None,
    grid_slack: float = GRID_SLACK,
    phi: Optional[PolyLike] = None,
) -> OrbitScanReport:
    """Scan a span combination, leading coefficient normalized to one.

    The designed pairs must belong to the leading member's index block;
    scaling the coefficient vector therefore never changes the verdict.
    The default envelope constant is 1 + sqrt of the squared sum of the
    non-leading normalized coefficients, so a single-member combination
    reproduces a plain scan of that member exactly.

    For a Mixed basis with a supplied dense part phi, the hit rule is
    the two-sided split of the target: phi must track the target within
    delta/2 while the combination stays below delta/2, and the reported
    errors are those of phi + combination against the target.
    """
    alphas = np.asarray(list(coefficients), dtype=complex)
    if alphas.size != len(basis.members):
        raise ValueError("coefficient count must match basis size")
    nonzero = np.nonzero(alphas)[0]
    if nonzero.size == 0:
        raise ValueError("coefficients must not all vanish")
    lead = int(nonzero[0])
    alphas = alphas / alphas[lead]
    tail_sq = float(np.sum(np.abs(np.delete(alphas, lead)) ** 2))
    if envelope_constant is None:
        envelope_constant = 1.0 + float(np.sqrt(tail_sq))

    comb = _Combination(basis.members, alphas)
    if basis.kind == "mixed" and phi is not None:
        half = delta / 2.0
        rep_phi = scan(
            phi, maps_schedule, exhaustion, dense_seq, half, horizon, pairs,
            grid_res, envelope_constant, grid_slack,
        )
        rep_h = scan(
            comb, maps_schedule, exhaustion, lambda l: Polynomial.zero(), half,
            horizon, pairs, grid_res, envelope_constant, grid_slack,
        )
        entries = []
        for e_phi, e_h in zip(rep_phi.entries, rep_h.entries):
            errors = e_phi.errors + e_h.errors
            hit_mask = (e_phi.errors * grid_slack < half) & (
                e_h.errors * grid_slack < half
            )
            hits = IndexSet(
                np.nonzero(hit_mask)[0].astype(np.int64) + 1,
                horizon,
                f"hits(nu={e_phi.nu},l={e_phi.l})",
            )
            burn_in = max(e_phi.burn_in, e_h.burn_in)
            density = lower_density_estimate(
                hits, horizon, burn_in=min(max(burn_in, horizon // 5, 1), horizon)
            )
            els = e_phi.designed.elements[e_phi.designed.elements <= horizon]
            tail = els[els > burn_in]
            covered = bool(np.all(hit_mask[tail - 1])) if tail.size else True
            window = horizon - burn_in
            hit_rate = (
                float(np.count_nonzero(hit_mask[burn_in:]) / window)
                if window > 0
                else 0.0
            )
            entries.append(
                PairScan(
                    nu=e_phi.nu,
                    l=e_phi.l,
                    designed=e_phi.designed,
                    hits=hits,
                    burn_in=burn_in,
                    errors=errors,
                    eps_sup=e_phi.eps_sup,
                    density=density,
                    hit_rate=hit_rate,
                    passed=covered and hit_rate > 0.0,
                )
            )
        return OrbitScanReport(
            entries=tuple(entries),
            delta=delta,
            horizon=horizon,
            grid_res=grid_res,
            coefficients=tuple(alphas.tolist()),
            coeff_square_sum=1.0 + tail_sq,
        )

    rep = scan(
        comb, maps_schedule, exhaustion, dense_seq, delta, horizon, pairs,
        grid_res, envelope_constant, grid_slack,
    )
    return OrbitScanReport(
        entries=rep.entries,
        delta=delta,
        horizon=horizon,
        grid_res=grid_res,
        coefficients=tuple(alphas.tolist()),
        coeff_square_sum=1.0 + tail_sq,
    )


@dataclass(frozen=True, eq=False)
class IterateReport:
    errors: np.ndarray
    escaped: bool
    escaped_at: Optional[int]
    limit_value: complex


def iterate_convergence(
    m: HoloMap,
    q: Polynomial,
    k: CompactSet,
    limit: complex,
    n_steps: int,
    pair: Optional[ConformalPair] = None,
    grid_res: int = 3,
) -> IterateReport:
    """e_n = sup over the grid of K of |Q(phi^n(z)) - Q(limit)|, n = 1..N.

    When a conformal pair is supplied the observable is Q composed with
    the pair's backward map, so bounded observables are available on
    unbounded domains.  If some iterate leaves the map's domain the
    error list is truncated and flagged; the caller judges decrease and
    eventual monotonicity from the returned values.
    """
    if n_steps < 1:
        raise ValueError("need at least one iterate")

    def observe(z):
        if pair is not None:
            return q.evaluate(pair.backward(z))
        return q.evaluate(z)

    limit_value = complex(observe(limit))
    grid = sample_grid(k, grid_res)
    if grid.size == 0:
        raise ValueError("cannot iterate over an empty compact")
    current = grid.astype(complex)
    errors = []
    escaped = False
    escaped_at = None
    for n in range(1, n_steps + 1):
        try:
            current = apply(m, current)
        except DomainError:
            escaped = True
            escaped_at = n
            break
        errors.append(float(np.max(np.abs(observe(current) - limit_value))))
    return IterateReport(
        errors=np.asarray(errors),
        escaped=escaped,
        escaped_at=escaped_at,
        limit_value=limit_value,
    )


def first_monotone_tail(errors: np.ndarray, tol: float = 1e-12) -> int:
    """Least index from which the sequence is non-increasing within tol.

    Always defined: the final element alone forms a monotone tail, so
    the caller should judge whether the returned position is early
    enough to call the sequence eventually monotone.
    """
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        raise ValueError("empty error sequence")
    idx = errors.size - 1
    for i in range(errors.size - 2, -1, -1):
        if errors[i + 1] <= errors[i] + tol:
            idx = i
        else:
            break
    return int(idx)
