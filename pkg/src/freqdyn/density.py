"""Index sets, finite-horizon densities, splitting, and separated families.

The lower density of a set A of positive integers is
liminf_n card(A intersect [1, n]) / n.  At a finite horizon it is
estimated by the minimum prefix ratio beyond a burn-in index; the upper
variant takes the maximum.  Estimates are labelled as such and never
presented as limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

__all__ = [
    "DensityReport",
    "FamilyReport",
    "IndexSet",
    "SeparatedFamily",
    "SimilarityCriterionReport",
    "TranslationSeparationReport",
    "arithmetic_progression",
    "build_separated_family",
    "check_similarity_criterion",
    "check_translation_separation",
    "diagonal_pairs",
    "lower_density_estimate",
    "naturals",
    "split",
    "split_assignment",
    "upper_density_estimate",
    "verify_separated_family",
]

# Thresholds used by the finite growth criteria.
GROWTH_THRESHOLDS = (1.0, 10.0, 100.0)


def _default_burn_in(horizon: int) -> int:
    return max(1, horizon // 5)


@dataclass(frozen=True, eq=False)
class IndexSet:
    """A strictly increasing set of positive integers known up to n_max."""

    elements: np.ndarray
    n_max: int
    descriptor: Optional[str] = None
    closed_form_density: Optional[float] = None

    def __post_init__(self):
        els = np.asarray(self.elements, dtype=np.int64)
        object.__setattr__(self, "elements", els)
        if els.size:
            if els[0] < 1:
                raise ValueError("index sets contain positive integers only")
            if np.any(np.diff(els) <= 0):
                raise ValueError("elements must be strictly increasing")
            if els[-1] > self.n_max:
                raise ValueError("element beyond the stated horizon n_max")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")

    def __len__(self) -> int:
        return int(self.elements.size)

    def __iter__(self):
        return iter(int(x) for x in self.elements)

    def __contains__(self, n: int) -> bool:
        i = np.searchsorted(self.elements, n)
        return i < self.elements.size and self.elements[i] == n

    def count_up_to(self, n) -> np.ndarray:
        """card(A intersect [1, n]), vectorized over n."""
        return np.searchsorted(self.elements, np.asarray(n), side="right")

    @staticmethod
    def from_elements(elements, n_max: Optional[int] = None, descriptor: Optional[str] = None,
                      closed_form_density: Optional[float] = None) -> "IndexSet":
        els = np.unique(np.asarray(list(elements), dtype=np.int64))
        if n_max is None:
            n_max = int(els[-1]) if els.size else 1
        return IndexSet(els, n_max, descriptor, closed_form_density)


def naturals(n_max: int) -> IndexSet:
    return IndexSet(np.arange(1, n_max + 1, dtype=np.int64), n_max, "naturals", 1.0)


def arithmetic_progression(first: int, step: int, n_max: int) -> IndexSet:
    """{first, first + step, ...} up to n_max, with exact density 1/step."""
    if first < 1 or step < 1:
        raise ValueError("first and step must be positive")
    els = np.arange(first, n_max + 1, step, dtype=np.int64)
    return IndexSet(els, n_max, f"ap({first},{step})", 1.0 / step)


@dataclass(frozen=True)
class DensityReport:
    """Finite-horizon density estimates for one index set.

    lower_estimate and upper_estimate are the extreme prefix ratios
    card(A intersect [1, n]) / n over burn_in <= n <= horizon.
    """

    lower_estimate: float
    upper_estimate: float
    burn_in: int
    horizon: int
    empty: bool
    closed_form: Optional[float] = None
    checkpoints: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not (0.0 <= self.lower_estimate <= self.upper_estimate <= 1.0 + 1e-12):
            raise ValueError("density estimates must satisfy 0 <= lower <= upper <= 1")


def _prefix_ratios(a: IndexSet, horizon: int, burn_in: int):
    ns = np.arange(burn_in, horizon + 1, dtype=np.int64)
    counts = a.count_up_to(ns)
    return ns, counts / ns


def lower_density_estimate(a: IndexSet, horizon: int, burn_in: Optional[int] = None) -> DensityReport:
    """Minimum (and maximum) prefix ratio beyond the burn-in.

    burn_in defaults to horizon // 5.  The horizon may not exceed the
    set's stated n_max, since membership beyond it is unknown.
    """
    if horizon < 1 or horizon > a.n_max:
        raise ValueError(f"horizon must lie in [1, {a.n_max}]")
    if burn_in is None:
        burn_in = _default_burn_in(horizon)
    if not (1 <= burn_in <= horizon):
        raise ValueError("burn_in must lie in [1, horizon]")
    ns, ratios = _prefix_ratios(a, horizon, burn_in)
    empty = a.count_up_to(horizon) == 0
    marks = np.unique(
        np.clip(
            np.round(np.logspace(math.log10(burn_in), math.log10(horizon), 33)),
            burn_in,
            horizon,
        ).astype(np.int64)
    )
    checkpoints = tuple(
        (int(n), float(ratios[n - burn_in])) for n in marks
    )
    return DensityReport(
        lower_estimate=float(ratios.min()),
        upper_estimate=float(ratios.max()),
        burn_in=burn_in,
        horizon=horizon,
        empty=bool(empty),
        closed_form=a.closed_form_density,
        checkpoints=checkpoints,
    )


def upper_density_estimate(a: IndexSet, horizon: int, burn_in: Optional[int] = None) -> float:
    """Maximum prefix ratio beyond the burn-in."""
    return lower_density_estimate(a, horizon, burn_in).upper_estimate


# ---------------------------------------------------------------------------
# Rank splitting


def split_assignment(k: int) -> int:
    """Subsequence index for rank k in the dyadic splitting.

    Rank k goes to part j exactly when k = 2^(j-1) (2m + 1); equivalently
    j - 1 is the number of trailing zero bits of k.  Odd ranks go to
    part 1, ranks 2, 6, 10, ... to part 2, ranks 4, 12, 20, ... to
    part 3, and so on: part j receives a set of rank density 2^-j.
    """
    if k < 1:
        raise ValueError("ranks are positive integers")
    return (k & -k).bit_length()


def _assignments(count: int) -> np.ndarray:
    k = np.arange(1, count + 1, dtype=np.int64)
    return np.log2(k & -k).astype(np.int64) + 1


def split(a: IndexSet, parts: int, horizon: int) -> list:
    """Split a into parts by rank; the last part absorbs higher indices.

    Part j < parts holds the elements whose rank assignment equals j;
    part `parts` takes every rank whose assignment is >= parts.  The
    parts partition a up to the horizon.
    """
    if parts < 1:
        raise ValueError("parts must be at least 1")
    els = a.elements[a.elements <= horizon]
    assign = np.minimum(_assignments(els.size), parts)
    out = []
    base = a.descriptor or "set"
    for j in range(1, parts + 1):
        out.append(
            IndexSet(
                els[assign == j],
                min(horizon, a.n_max),
                f"{base}|part{j}of{parts}",
            )
        )
    return out


# ---------------------------------------------------------------------------
# Separated families


def diagonal_pairs(num: int) -> list:
    """The first `num` labels (l, nu) in anti-diagonal order.

    Enumeration runs (1,1), (2,1), (1,2), (3,1), (2,2), (1,3), ... so
    the p-th label always has nu <= p.
    """
    out = []
    s = 2
    while len(out) < num:
        for nu in range(1, s):
            out.append((s - nu, nu))
            if len(out) == num:
                break
        s += 1
    return out


def _residue_class(p: int, m: int):
    """(start, gap) of the base-3 residue class assigned to the p-th label.

    Classes are drawn two per 3-adic depth: label p uses depth
    d = ceil(p/2) and residue r = 1 (p odd) or r = 2 (p even), giving
    the progression m (r 3^(d-1) + j 3^d).  Distinct labels receive
    disjoint classes for every positive multiplier m.
    """
    d = (p + 1) // 2
    r = 1 if p % 2 == 1 else 2
    return m * r * 3 ** (d - 1), m * 3 ** d


@dataclass(frozen=True)
class SeparatedFamily:
    """Disjoint index sets A(l, nu) with |n - m| >= nu + mu across sets."""

    pairs: tuple  # of ((l, nu), IndexSet)
    horizon: int
    m_multiplier: int

    def labels(self) -> list:
        return [label for label, _ in self.pairs]

    def set_for(self, l: int, nu: int) -> IndexSet:
        for (ll, nn), s in self.pairs:
            if (ll, nn) == (l, nu):
                return s
        raise KeyError(f"no member with label ({l}, {nu})")

    def nu_values(self) -> list:
        return sorted({nu for (_, nu), _ in self.pairs})

    def a_of_nu(self, nu: int) -> IndexSet:
        """Union over l of A(l, nu), the per-level hit schedule."""
        parts = [s.elements for (_, nn), s in self.pairs if nn == nu]
        if not parts:
            return IndexSet(np.empty(0, dtype=np.int64), self.horizon, f"A({nu})")
        return IndexSet(
            np.unique(np.concatenate(parts)), self.horizon, f"A(nu={nu})"
        )


def _surviving_density(p: int, nus: Sequence[int], m: int) -> float:
    """Exact asymptotic density of class p after pruning against q > p.

    All classes are unions of full arithmetic progressions, so pruning is
    periodic with period the largest modulus; one period is checked by
    exact modular distances.
    """
    P = len(nus)
    start, gap = _residue_class(p, m)
    period = m * 3 ** ((P + 1) // 2)
    max_dist = max((nus[p - 1] + nus[q - 1] for q in range(p + 1, P + 1)), default=0)
    if period <= 2 * max_dist:
        # Period too small for the window argument; report zero so the
        # caller rejects the configuration.
        return 0.0
    xs = np.arange(start, start + period, gap, dtype=np.int64)
    alive = np.ones(xs.shape, dtype=bool)
    for q in range(p + 1, P + 1):
        sq, gq = _residue_class(q, m)
        r = (xs - sq) % gq
        dist = np.minimum(r, gq - r)
        alive &= dist >= nus[p - 1] + nus[q - 1]
    return float(alive.sum()) / period


def build_separated_family(num_pairs: int, horizon: int, m_multiplier: int) -> SeparatedFamily:
    """Construct pairwise separated index sets from base-3 residue classes.

    The p-th label (l, nu) in diagonal order receives a residue class of
    step m 3^d; elements of lower-indexed classes within distance
    nu(p) + nu(q) of a later class are pruned, as are elements below nu.
    The construction is rejected when the exact post-pruning density of
    any class vanishes, and the result is always run through
    verify_separated_family before being returned.
    """
    if num_pairs < 1:
        raise ValueError("num_pairs must be at least 1")
    if m_multiplier < 1:
        raise ValueError("m_multiplier must be at least 1")
    labels = diagonal_pairs(num_pairs)
    nus = [nu for (_, nu) in labels]
    for p in range(1, num_pairs + 1):
        if _surviving_density(p, nus, m_multiplier) <= 0.0:
            raise ValueError(
                f"pruning clears class {p}; increase m_multiplier"
            )
    members = []
    for p, (l, nu) in enumerate(labels, start=1):
        start, gap = _residue_class(p, m_multiplier)
        els = np.arange(start, horizon + 1, gap, dtype=np.int64)
        alive = np.ones(els.shape, dtype=bool)
        for q in range(p + 1, num_pairs + 1):
            sq, gq = _residue_class(q, m_multiplier)
            r = (els - sq) % gq
            dist = np.minimum(r, gq - r)
            alive &= dist >= nu + nus[q - 1]
        els = els[alive & (els >= nu)]
        members.append(
            ((l, nu), IndexSet(els, horizon, f"A(l={l},nu={nu})"))
        )
    family = SeparatedFamily(tuple(members), horizon, m_multiplier)
    report = verify_separated_family(family)
    if not report.passed:
        raise RuntimeError(
            "separated-family construction failed its own verifier: "
            + "; ".join(report.violations)
        )
    return family


@dataclass(frozen=True)
class FamilyReport:
    passed: bool
    violations: tuple
    densities: tuple  # of ((l, nu), DensityReport)


def _min_cross_distance(a: np.ndarray, b: np.ndarray) -> int:
    """Minimum |x - y| over x in a, y in b (both sorted, nonempty)."""
    idx = np.searchsorted(b, a)
    best = np.iinfo(np.int64).max
    left = idx > 0
    if left.any():
        best = min(best, int(np.min(a[left] - b[idx[left] - 1])))
    right = idx < b.size
    if right.any():
        best = min(best, int(np.min(b[idx[right]] - a[right])))
    return best


def verify_separated_family(family: SeparatedFamily, burn_in: Optional[int] = None) -> FamilyReport:
    """Brute-force check of the separation and positivity requirements.

    Verifies n >= nu inside each set, the within-set gap >= 2 nu, the
    cross-set gap >= nu + mu, pairwise disjointness, and positive
    lower-density estimates at the family horizon.
    """
    violations = []
    densities = []
    items = list(family.pairs)
    for (l, nu), s in items:
        if len(s) == 0:
            violations.append(f"A(l={l},nu={nu}) is empty")
            densities.append(((l, nu), None))
            continue
        if int(s.elements[0]) < nu:
            violations.append(f"A(l={l},nu={nu}) starts below nu")
        if s.elements.size > 1 and int(np.min(np.diff(s.elements))) < 2 * nu:
            violations.append(f"A(l={l},nu={nu}) violates its own separation")
        rep = lower_density_estimate(s, family.horizon, burn_in)
        densities.append(((l, nu), rep))
        if rep.lower_estimate <= 0.0:
            violations.append(f"A(l={l},nu={nu}) has vanishing density estimate")
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            (_, nu_i), si = items[i]
            (_, nu_j), sj = items[j]
            if len(si) == 0 or len(sj) == 0:
                continue
            d = _min_cross_distance(si.elements, sj.elements)
            if d < nu_i + nu_j:
                violations.append(
                    f"pair {items[i][0]} / {items[j][0]} at distance {d}"
                )
    return FamilyReport(not violations, tuple(violations), tuple(densities))


# ---------------------------------------------------------------------------
# Finite growth criteria


def _seq_values(seq, count: int) -> np.ndarray:
    if callable(seq):
        return np.asarray([seq(n) for n in range(1, count + 1)])
    arr = np.asarray(seq)
    if arr.size < count:
        raise ValueError(f"sequence shorter than the horizon ({arr.size} < {count})")
    return arr[:count]


@dataclass(frozen=True)
class SimilarityCriterionReport:
    passed: bool
    growth_ok: bool
    pairwise_ok: bool
    crossings: tuple  # of (threshold, last index at or below it)
    witness: Optional[tuple]


def check_similarity_criterion(a_seq, b_seq, omega_seq, horizon: int) -> SimilarityCriterionReport:
    """Finite-horizon run of the similarity-family runaway criterion.

    Checks (i) |b_n| - omega_n |a_n| eventually exceeds each threshold in
    GROWTH_THRESHOLDS (the last crossing index must fall before the
    horizon) and (ii) |b_m - b_n| >= omega_{m-n} (|a_m| + |a_n|) for all
    m > n up to the horizon.  Sequences may be callables of n >= 1 or
    array-likes.  a_n = 0 anywhere and non-monotone omega are rejected.
    """
    a = _seq_values(a_seq, horizon).astype(complex)
    b = _seq_values(b_seq, horizon).astype(complex)
    omega = _seq_values(omega_seq, horizon).astype(float)
    if np.any(np.abs(a) == 0.0):
        raise ValueError("a_n must be nonzero for every n")
    if np.any(np.diff(omega) < 0.0):
        raise ValueError("omega must be nondecreasing on the inspected range")
    q = np.abs(b) - omega * np.abs(a)
    crossings = []
    growth_ok = True
    for t in GROWTH_THRESHOLDS:
        below = np.nonzero(q <= t)[0]
        last = int(below[-1]) + 1 if below.size else 0
        crossings.append((t, last))
        if last >= horizon:
            growth_ok = False
    # pairwise separation, vectorized over the strict upper triangle
    absa = np.abs(a)
    diff = np.abs(b[None, :] - b[:, None])
    need = np.zeros_like(diff)
    m_idx, n_idx = np.meshgrid(np.arange(horizon), np.arange(horizon), indexing="ij")
    gap = m_idx - n_idx
    upper = gap > 0
    need[upper] = omega[gap[upper] - 1] * (absa[m_idx[upper]] + absa[n_idx[upper]])
    bad = upper & (diff < need - 1e-9)
    witness = None
    pairwise_ok = not bad.any()
    if not pairwise_ok:
        i, j = np.argwhere(bad)[0]
        witness = (int(i) + 1, int(j) + 1)
    return SimilarityCriterionReport(
        passed=growth_ok and pairwise_ok,
        growth_ok=growth_ok,
        pairwise_ok=pairwise_ok,
        crossings=tuple(crossings),
        witness=witness,
    )


@dataclass(frozen=True)
class TranslationSeparationReport:
    passed: bool
    slow_growth: bool
    k_max: int
    crossings: tuple  # of (threshold, last k with infimum <= threshold)
    infima: tuple


def check_translation_separation(b_seq, horizon: int, k_max: Optional[int] = None) -> TranslationSeparationReport:
    """Finite proxy for inf_n |b_{n+k} - b_n| -> infinity as k grows.

    For each k <= k_max the infimum over n <= horizon - k is computed;
    the criterion passes when every threshold in GROWTH_THRESHOLDS is
    exceeded from some k strictly below k_max onward.  Slow growth is
    flagged when the final threshold is cleared only in the upper half
    of the k range.
    """
    if k_max is None:
        k_max = min(200, horizon // 2)
    if k_max < 1 or k_max >= horizon:
        raise ValueError("need 1 <= k_max < horizon")
    b = _seq_values(b_seq, horizon).astype(complex)
    infima = np.empty(k_max)
    for k in range(1, k_max + 1):
        infima[k - 1] = np.min(np.abs(b[k:] - b[:-k]))
    crossings = []
    passed = True
    for t in GROWTH_THRESHOLDS:
        below = np.nonzero(infima <= t)[0]
        last = int(below[-1]) + 1 if below.size else 0
        crossings.append((t, last))
        if last >= k_max:
            passed = False
    slow = passed and crossings[-1][1] >= k_max / 2
    return TranslationSeparationReport(
        passed=passed,
        slow_growth=bool(slow),
        k_max=k_max,
        crossings=tuple(crossings),
        infima=tuple(float(x) for x in infima),
    )
