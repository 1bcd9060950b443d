"""Plane domains, compact subsets, and the chordal metric on the sphere.

Points are Python complex numbers; the point at infinity is any complex
value with an infinite component.  The chordal (spherical) distance used
throughout is

    chi(z, w) = 2 |z - w| / sqrt((1 + |z|^2) (1 + |w|^2)),

with chi(z, inf) = 2 / sqrt(1 + |z|^2).  Values lie in [0, 2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Union

import numpy as np

__all__ = [
    "BOUNDARY_SAMPLES",
    "RAY_SAMPLES",
    "AnnularSector",
    "ClosedDisc",
    "CompactSet",
    "Disjointness",
    "Domain",
    "DomainError",
    "DomainKind",
    "Exhaustion",
    "SampledCompact",
    "chordal_distance",
    "disjointness",
    "distance_to_slit",
    "enclosing_disc",
    "eps_to_boundary",
    "interior_margin",
    "point_in_compact",
    "right_half_plane_exhaustion",
    "sample_grid",
    "sector_exhaustion",
    "unit_disc_exhaustion",
    "verify_nesting",
    "whole_plane_exhaustion",
]

# Samples used for one-dimensional boundary pieces (circle, imaginary axis).
BOUNDARY_SAMPLES = 4096
# Logarithmically spaced samples on an unbounded ray such as (-inf, 0].
RAY_SAMPLES = 10_000
# Half-width in decades of the logarithmic sampling window for rays.
_LOG_DECADES = 9.0
# Slack below which a point counts as sitting on the slit (-inf, 0].
SLIT_GUARD = 1e-9


class DomainError(ValueError):
    """A point fell outside the domain where it was required to lie."""


def _is_inf(z: complex) -> bool:
    return math.isinf(z.real) or math.isinf(z.imag)


def chordal_distance(z, w):
    """Spherical chord length between two points of the extended plane.

    Accepts scalars or numpy arrays (broadcast).  Either argument may be
    the point at infinity.
    """
    scalar = np.isscalar(z) and np.isscalar(w)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    zinf = ~np.isfinite(z)
    winf = ~np.isfinite(w)
    zf = np.where(zinf, 0.0, z)
    wf = np.where(winf, 0.0, w)
    az2 = np.abs(zf) ** 2
    aw2 = np.abs(wf) ** 2
    out = 2.0 * np.abs(zf - wf) / np.sqrt((1.0 + az2) * (1.0 + aw2))
    out = np.where(zinf & ~winf, 2.0 / np.sqrt(1.0 + aw2), out)
    out = np.where(winf & ~zinf, 2.0 / np.sqrt(1.0 + az2), out)
    out = np.where(zinf & winf, 0.0, out)
    return float(out) if scalar else out


def distance_to_slit(z):
    """Euclidean distance from z to the ray (-inf, 0]."""
    z = np.asarray(z, dtype=complex)
    d = np.where(z.real > 0.0, np.abs(z), np.abs(z.imag))
    return float(d) if d.ndim == 0 else d


class DomainKind(Enum):
    WHOLE_PLANE = "whole_plane"
    UNIT_DISC = "unit_disc"
    RIGHT_HALF_PLANE = "right_half_plane"
    SLIT_PLANE = "slit_plane"


@dataclass(frozen=True)
class Domain:
    """A simply connected plane domain with a decidable membership test."""

    kind: DomainKind

    @staticmethod
    def whole_plane() -> "Domain":
        return Domain(DomainKind.WHOLE_PLANE)

    @staticmethod
    def unit_disc() -> "Domain":
        return Domain(DomainKind.UNIT_DISC)

    @staticmethod
    def right_half_plane() -> "Domain":
        return Domain(DomainKind.RIGHT_HALF_PLANE)

    @staticmethod
    def slit_plane() -> "Domain":
        return Domain(DomainKind.SLIT_PLANE)

    def contains(self, z, slack: float = 0.0):
        """Membership test, vectorized.  slack loosens the boundary."""
        z = np.asarray(z, dtype=complex)
        finite = np.isfinite(z)
        if self.kind is DomainKind.WHOLE_PLANE:
            ok = finite
        elif self.kind is DomainKind.UNIT_DISC:
            ok = finite & (np.abs(z) < 1.0 + slack)
        elif self.kind is DomainKind.RIGHT_HALF_PLANE:
            ok = finite & (z.real > -slack)
        else:
            ok = finite & (distance_to_slit(z) > -slack) & ~(
                (z.imag == 0.0) & (z.real <= slack)
            )
        return bool(ok) if ok.ndim == 0 else ok

    @property
    def is_bounded(self) -> bool:
        return self.kind is DomainKind.UNIT_DISC

    @property
    def boundary_contains_infinity(self) -> bool:
        return self.kind is not DomainKind.UNIT_DISC

    def describe_boundary(self) -> str:
        return {
            DomainKind.WHOLE_PLANE: "the single point at infinity",
            DomainKind.UNIT_DISC: "the unit circle |z| = 1",
            DomainKind.RIGHT_HALF_PLANE: "the imaginary axis plus infinity",
            DomainKind.SLIT_PLANE: "the ray (-inf, 0] plus infinity",
        }[self.kind]


@lru_cache(maxsize=8)
def _boundary_points(kind: DomainKind) -> np.ndarray:
    """Finite boundary samples for one domain kind (infinity handled apart)."""
    if kind is DomainKind.WHOLE_PLANE:
        return np.empty(0, dtype=complex)
    if kind is DomainKind.UNIT_DISC:
        theta = 2.0 * np.pi * np.arange(BOUNDARY_SAMPLES) / BOUNDARY_SAMPLES
        return np.exp(1j * theta)
    if kind is DomainKind.RIGHT_HALF_PLANE:
        half = BOUNDARY_SAMPLES // 2
        mags = np.logspace(-_LOG_DECADES, _LOG_DECADES, half)
        return np.concatenate([1j * mags, -1j * mags, [0.0 + 0.0j]])
    mags = np.logspace(-_LOG_DECADES, _LOG_DECADES, RAY_SAMPLES)
    return np.concatenate([-mags.astype(complex), [0.0 + 0.0j]])


def _min_chordal_to(z: np.ndarray, boundary: np.ndarray, with_inf: bool) -> np.ndarray:
    az2 = np.abs(z) ** 2
    best = np.full(z.shape, np.inf)
    if boundary.size:
        ab2 = np.abs(boundary) ** 2
        # Chunked to keep the pairwise distance matrix small.
        flat = z.ravel()
        res = np.empty(flat.shape)
        step = 512
        for i in range(0, flat.size, step):
            blk = flat[i : i + step, None]
            d = 2.0 * np.abs(blk - boundary[None, :]) / np.sqrt(
                (1.0 + np.abs(blk) ** 2) * (1.0 + ab2[None, :])
            )
            res[i : i + step] = d.min(axis=1)
        best = res.reshape(z.shape)
    if with_inf:
        best = np.minimum(best, 2.0 / np.sqrt(1.0 + az2))
    return best


def eps_to_boundary(domain: Domain, z):
    """Chordal distance from z to the extended boundary of the domain.

    This is the error envelope used by the approximation pipeline: it is
    positive on the domain and tends to zero along any sequence leaving
    every compact subset.  Closed forms are used for the whole plane
    (distance to infinity alone) and for the disc (radial projection onto
    the circle); the half plane and the slit plane fall back on dense
    boundary sampling together with the infinity term.

    Raises DomainError when z lies outside the domain.
    """
    scalar = np.isscalar(z)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    inside = domain.contains(z)
    if not np.all(inside):
        bad = z[~np.atleast_1d(inside)][0]
        raise DomainError(f"point {bad} is not in {domain.kind.value}")
    if domain.kind is DomainKind.WHOLE_PLANE:
        out = 2.0 / np.sqrt(1.0 + np.abs(z) ** 2)
    elif domain.kind is DomainKind.UNIT_DISC:
        r = np.abs(z)
        out = 2.0 * (1.0 - r) / np.sqrt(2.0 * (1.0 + r * r))
    else:
        out = _min_chordal_to(z, _boundary_points(domain.kind), with_inf=True)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Compact sets


@dataclass(frozen=True)
class ClosedDisc:
    """Closed disc {|z - center| <= radius}."""

    center: complex
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius >= 0.0):
            raise ValueError("disc radius must be finite and nonnegative")
        if _is_inf(complex(self.center)):
            raise ValueError("disc center must be finite")


@dataclass(frozen=True)
class AnnularSector:
    """Sector {r e^{i t} : rmin <= r <= rmax, |t| <= half_angle}.

    rmax < rmin is allowed and denotes the empty set; this arises for the
    small members of the slit-plane exhaustion, whose radial interval
    [min(1/R, 1), R] is void while R < 1.  half_angle = 0 denotes a
    radial segment.
    """

    rmin: float
    rmax: float
    half_angle: float

    def __post_init__(self):
        if not (self.rmin > 0.0 and math.isfinite(self.rmin)):
            raise ValueError("rmin must be positive and finite")
        if not (self.rmax > 0.0 and math.isfinite(self.rmax)):
            raise ValueError("rmax must be positive and finite")
        if not (0.0 <= self.half_angle <= math.pi + 1e-12):
            raise ValueError("half_angle must lie in [0, pi]")

    @property
    def is_empty(self) -> bool:
        return self.rmax < self.rmin


@dataclass(frozen=True)
class SampledCompact:
    """A compact known only through boundary samples and a disc bound."""

    boundary_points: tuple
    enclosing: ClosedDisc

    def __post_init__(self):
        if len(self.boundary_points) == 0:
            raise ValueError("a sampled compact needs at least one point")
        pts = np.asarray(self.boundary_points, dtype=complex)
        gap = np.abs(pts - self.enclosing.center) - self.enclosing.radius
        if np.max(gap) > 1e-9 * (1.0 + self.enclosing.radius):
            raise ValueError("boundary point outside the stated enclosing disc")


CompactSet = Union[ClosedDisc, AnnularSector, SampledCompact]


def enclosing_disc(c: CompactSet) -> ClosedDisc:
    """A closed disc containing the compact set."""
    if isinstance(c, ClosedDisc):
        return c
    if isinstance(c, AnnularSector):
        return ClosedDisc(0.0 + 0.0j, c.rmax)
    return c.enclosing


def point_in_compact(c: CompactSet, z: complex):
    """Membership where decidable; None for sampled compacts.

    Boundary comparisons carry a relative 1e-12 slack so that points
    produced by floating arithmetic on the boundary still count as
    members of the closed set.
    """
    if isinstance(c, ClosedDisc):
        return abs(z - c.center) <= c.radius + 1e-12 * (1.0 + c.radius)
    if isinstance(c, AnnularSector):
        if c.is_empty:
            return False
        tol = 1e-12 * (1.0 + c.rmax)
        r = abs(z)
        if not (c.rmin - tol <= r <= c.rmax + tol):
            return False
        return abs(np.angle(complex(z))) <= c.half_angle + 1e-12
    return None


def interior_margin(c: CompactSet, z: complex) -> float:
    """Positive when z is strictly interior to c, measured in plane units.

    For a sampled compact only the enclosing disc is available, so the
    value is an upper bound rather than an exact margin.
    """
    if isinstance(c, ClosedDisc):
        return c.radius - abs(z - c.center)
    if isinstance(c, AnnularSector):
        if c.is_empty:
            return -math.inf
        r = abs(z)
        ang = abs(np.angle(complex(z)))
        margin = min(r - c.rmin, c.rmax - r)
        if c.half_angle < math.pi:
            margin = min(margin, r * (c.half_angle - ang))
        return margin
    d = c.enclosing
    return d.radius - abs(z - d.center)


def sample_grid(c: CompactSet, resolution: int) -> np.ndarray:
    """Deterministic point set covering boundary and interior of c.

    The grid at resolution r is the union of per-level point sets for
    levels 1..r, so raising the resolution always yields a superset.
    Level 1 already contains the centre (disc case) and the outer
    boundary.  An empty sector yields an empty array.
    """
    if resolution < 1:
        raise ValueError("resolution must be a positive integer")
    if isinstance(c, ClosedDisc):
        pts = [complex(c.center)]
        for k in range(1, resolution + 1):
            m = 8 * k
            ang = np.exp(2j * np.pi * np.arange(m) / m)
            for j in range(1, k + 1):
                pts.extend(c.center + (c.radius * j / k) * ang)
        return np.unique(np.array(pts, dtype=complex))
    if isinstance(c, AnnularSector):
        if c.is_empty:
            return np.empty(0, dtype=complex)
        pts = []
        for k in range(1, resolution + 1):
            radii = c.rmin + (c.rmax - c.rmin) * np.arange(k + 1) / k
            m = 4 * k
            angles = c.half_angle * np.arange(-m, m + 1) / m
            pts.extend((radii[:, None] * np.exp(1j * angles[None, :])).ravel())
        return np.unique(np.array(pts, dtype=complex))
    return np.asarray(c.boundary_points, dtype=complex)


class Disjointness(Enum):
    """Three-valued disjointness verdict with one-sided certainty."""

    DISJOINT = "disjoint"
    INTERSECTING = "intersecting"
    UNKNOWN = "unknown"


def disjointness(a: CompactSet, b: CompactSet, resolution: int = 3) -> Disjointness:
    """Tri-state disjointness certificate for two compact sets.

    Disc against disc is decided exactly: the closed discs are disjoint
    if and only if |c1 - c2| > r1 + r2.  Otherwise the enclosing discs
    are tried first (their disjointness certifies DISJOINT), then sample
    points of one set are tested for membership in the other (a hit
    certifies INTERSECTING).  When neither test settles the question the
    verdict is UNKNOWN; callers must treat UNKNOWN as failure of
    whichever property they are verifying.
    """
    if isinstance(a, ClosedDisc) and isinstance(b, ClosedDisc):
        if abs(a.center - b.center) > a.radius + b.radius:
            return Disjointness.DISJOINT
        return Disjointness.INTERSECTING
    ea, eb = enclosing_disc(a), enclosing_disc(b)
    if abs(ea.center - eb.center) > ea.radius + eb.radius:
        return Disjointness.DISJOINT
    for first, second in ((a, b), (b, a)):
        for z in sample_grid(first, resolution):
            if point_in_compact(second, complex(z)):
                return Disjointness.INTERSECTING
    return Disjointness.UNKNOWN


# ---------------------------------------------------------------------------
# Exhaustions


@dataclass(frozen=True)
class Exhaustion:
    """A closed-form sequence of compacts K_1 <= K_2 <= ... filling a domain.

    Members are hole-free compacts (discs or annular sectors), so every
    member is admissible for polynomial and rational approximation on the
    ambient domain.
    """

    domain: Domain
    label: str
    generator: Callable[[int], CompactSet]

    def member(self, nu: int) -> CompactSet:
        if nu < 1:
            raise ValueError("exhaustion index starts at 1")
        return self.generator(nu)


def whole_plane_exhaustion() -> Exhaustion:
    """Discs of radius nu centred at the origin."""
    return Exhaustion(
        Domain.whole_plane(),
        "discs |z| <= nu",
        lambda nu: ClosedDisc(0.0 + 0.0j, float(nu)),
    )


def unit_disc_exhaustion() -> Exhaustion:
    """Concentric discs of radius 1 - 1/(nu + 1)."""
    return Exhaustion(
        Domain.unit_disc(),
        "discs |z| <= 1 - 1/(nu+1)",
        lambda nu: ClosedDisc(0.0 + 0.0j, 1.0 - 1.0 / (nu + 1)),
    )


def right_half_plane_exhaustion() -> Exhaustion:
    """Discs with real diameter [1/nu, nu], filling Re z > 0."""
    return Exhaustion(
        Domain.right_half_plane(),
        "discs with diameter [1/nu, nu]",
        lambda nu: ClosedDisc(
            complex((nu + 1.0 / nu) / 2.0), (nu - 1.0 / nu) / 2.0
        ),
    )


def sector_exhaustion(c_const: float, alpha: float, beta: float, root_n: int) -> Exhaustion:
    """Annular sectors exhausting the slit plane.

    With R_nu = (c_const * nu^(beta - alpha))^root_n the member is

        K_nu = {r e^{i t} : min(1/R_nu, 1) <= r <= R_nu, |t| <= pi (1 - 1/nu)}.

    Members with R_nu < 1 are empty; they occur for small nu whenever
    c_const <= 1/2 and are represented by empty sectors.
    """
    if c_const <= 0.0:
        raise ValueError("c_const must be positive")
    if root_n < 1:
        raise ValueError("root_n must be a positive integer")

    def member(nu: int) -> CompactSet:
        big_r = (c_const * nu ** (beta - alpha)) ** root_n
        return AnnularSector(
            rmin=min(1.0 / big_r, 1.0),
            rmax=big_r,
            half_angle=math.pi * (1.0 - 1.0 / nu),
        )

    return Exhaustion(Domain.slit_plane(), "annular sectors", member)


def verify_nesting(exh: Exhaustion, nu_max: int, resolution: int = 2):
    """Check that sampled K_nu sits strictly inside K_{nu+1} for nu <= nu_max.

    Returns (ok, worst_margin, witness); empty members pass vacuously.
    """
    worst = math.inf
    witness = None
    for nu in range(1, nu_max + 1):
        inner, outer = exh.member(nu), exh.member(nu + 1)
        for z in sample_grid(inner, resolution):
            m = interior_margin(outer, complex(z))
            if m < worst:
                worst, witness = m, (nu, complex(z))
    ok = witness is None or worst > 0.0
    return ok, worst, witness
