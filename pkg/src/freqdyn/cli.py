"""Config-driven experiment harness.

Every subcommand reads one INI file, optionally patched by repeatable
``--override section.key=value`` flags, runs a fixed pipeline, and
writes its artifacts under ``<output root>/<command>/``.  The output
root is the ``dir`` entry of the ``[output]`` section unless the
``FREQDYN_OUT`` environment variable is set.  Artifacts are written to
a temporary file and renamed into place, so a crashed run never leaves
a half-written report.  Summaries contain one ``PASS:`` or ``FAIL:``
line per checked property and the process exits nonzero exactly when
some line failed.

Reports embed a short hash of the effective configuration so that any
artifact can be traced back to the exact parameter set that produced
it.  Identical configurations produce byte-identical artifacts; wall
clock timings go to stdout only.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize

from . import approx, density, orbit, runaway
from .approx import (
    ArnoldiPoly,
    BasisKind,
    FhcCandidate,
    Polynomial,
    enumerate_dense_polynomial,
)
from .density import IndexSet
from .geometry import (
    ClosedDisc,
    Domain,
    DomainKind,
    Exhaustion,
    right_half_plane_exhaustion,
    sample_grid,
    sector_exhaustion,
    unit_disc_exhaustion,
    whole_plane_exhaustion,
)
from .maps import (
    ConformalPair,
    HalfPlaneShift,
    HoloMap,
    Identity,
    PairKind,
    ParabolicDisc,
    RootShift,
    Similarity,
    Conjugated,
    apply,
)

__all__ = [
    "ExperimentConfig",
    "SigmaReport",
    "CommandResult",
    "apply_overrides",
    "cmd_build_fhc",
    "cmd_density",
    "cmd_example1",
    "cmd_example2",
    "cmd_example3",
    "cmd_example4",
    "cmd_example5",
    "cmd_runaway",
    "cmd_scan",
    "cmd_sepfamily",
    "cmd_sigma",
    "cmd_split",
    "config_hash",
    "load_config",
    "main",
]

ENV_OUTPUT = "FREQDYN_OUT"
DEFAULT_T_MAX = 1.0e6

# Interior minima of the growth ratio are bracketed on a log-spaced
# probe grid before golden-section refinement.
SIGMA_GRID_POINTS = 4096
RICHARDSON_FACTOR = 10.0

# Conformal conjugation identities must close to this residual; it sits
# far above double-precision round-off and far below any model error.
CONJUGATION_TOL = 1e-10
FIXED_POINT_TOL = 1e-12

# A weak runaway verdict needs the escape times to keep at least this
# much lower density; zero-density escapes are the classical failure.
WEAK_DENSITY_FLOOR = 0.01

# Map indices probed when checking conjugation formulas pointwise.
PROBE_STEPS = (1, 2, 3, 5, 10, 100)
MESH_POINTS = 1000

CANDIDATE_FORMAT = "freqdyn-candidate-v1"


# ---------------------------------------------------------------------------
# growth exponent


@dataclass(frozen=True)
class SigmaReport:
    """Infimum of the island separation ratio and the radius constant."""

    alpha: float
    beta: float
    t_max: float
    sigma: float
    c_const: float
    interior_min: float
    t_at_min: float
    limit_at_one: float
    limit_at_inf: float
    richardson: float


def _growth_ratio(alpha: float, beta: float) -> Callable:
    gap = beta - alpha
    def value(t):
        t = np.asarray(t, dtype=float)
        return (np.power(t, beta) - 1.0) / (
            np.power(t, alpha) * np.power(t - 1.0, gap)
        )
    return value


def _interior_minimum(ratio: Callable, t_max: float) -> tuple:
    lo = math.log1p(1e-8)
    hi = math.log(t_max)
    us = np.linspace(lo, hi, SIGMA_GRID_POINTS)
    vals = np.asarray(ratio(np.exp(us)), dtype=float)
    i = int(np.argmin(vals))
    t_best = float(np.exp(us[i]))
    v_best = float(vals[i])
    if 0 < i < us.size - 1 and vals[i] < vals[i - 1] and vals[i] < vals[i + 1]:
        res = optimize.minimize_scalar(
            lambda u: float(ratio(math.exp(u))),
            bracket=(us[i - 1], us[i], us[i + 1]),
            method="golden",
            options={"xtol": 1e-12},
        )
        if float(res.fun) < v_best:
            t_best = math.exp(float(res.x))
            v_best = float(res.fun)
    return t_best, v_best


def cmd_sigma(alpha: float, beta: float, t_max: float = DEFAULT_T_MAX) -> SigmaReport:
    """Minimise (t^beta - 1) / (t^alpha (t-1)^(beta-alpha)) over t > 1.

    The infimum over the open half-line is the least of the interior
    grid-plus-golden minimum and the two analytic endpoint values: the
    ratio tends to 1 as t grows without bound, and as t decreases to 1
    it tends to beta when the exponent gap is exactly one and diverges
    otherwise.  The reported Richardson value extrapolates the interior
    minimum from t_max and 10 t_max and serves as a consistency check.
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    if beta < 1.0 + alpha:
        raise ValueError("the exponent gap beta - alpha must be at least one")
    if t_max <= 10.0:
        raise ValueError("t_max must exceed 10")
    ratio = _growth_ratio(alpha, beta)
    gap = beta - alpha
    limit_inf = 1.0
    limit_one = beta if abs(gap - 1.0) <= 1e-12 else math.inf
    t_at, interior = _interior_minimum(ratio, t_max)
    _, interior_far = _interior_minimum(ratio, RICHARDSON_FACTOR * t_max)
    richardson = (RICHARDSON_FACTOR * interior_far - interior) / (
        RICHARDSON_FACTOR - 1.0
    )
    sigma = min(interior, limit_inf, limit_one)
    return SigmaReport(
        alpha=float(alpha),
        beta=float(beta),
        t_max=float(t_max),
        sigma=float(sigma),
        c_const=float(min(0.5, sigma / 4.0)),
        interior_min=float(interior),
        t_at_min=float(t_at),
        limit_at_one=float(limit_one),
        limit_at_inf=float(limit_inf),
        richardson=float(richardson),
    )


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat view of one INI experiment description.

    Unused entries are harmless; each subcommand reads only the fields
    its pipeline needs.
    """

    domain_kind: str = "whole_plane"
    map_family: str = "translation"
    schedule: str = "direct"
    alpha: float = 0.0
    beta: float = 1.0
    root_n: int = 1
    a_param: float = 1.0
    gamma: float = 1.0
    c_const: float = 0.25
    b_power: float = 2.0
    omega_power: float = 1.0
    pairs: int = 3
    multiplier: int = 8
    n_max: int = 10000
    nu_max: int = 2
    l_max: int = 2
    mu_max: int = 3
    iterates: int = 200
    delta: float = 0.0
    grid_res: int = 3
    max_degree: int = 256
    sigma_t_max: float = DEFAULT_T_MAX
    split_parts: int = 4
    set_kind: str = "naturals"
    set_first: int = 1
    set_step: int = 1
    build_kind: str = "existence"
    bases: int = 0
    max_islands: int = 4
    runaway_mode: str = "strong"
    candidate_path: str = ""
    out_dir: str = "out"


# (section, key, attribute, type); the single source of truth for
# parsing, overrides and the configuration hash.
_FIELDS = (
    ("domain", "kind", "domain_kind", str),
    ("maps", "family", "map_family", str),
    ("maps", "schedule", "schedule", str),
    ("maps", "alpha", "alpha", float),
    ("maps", "beta", "beta", float),
    ("maps", "root_n", "root_n", int),
    ("maps", "a", "a_param", float),
    ("maps", "gamma", "gamma", float),
    ("maps", "c", "c_const", float),
    ("maps", "b_power", "b_power", float),
    ("maps", "omega_power", "omega_power", float),
    ("family", "pairs", "pairs", int),
    ("family", "multiplier", "multiplier", int),
    ("horizons", "n_max", "n_max", int),
    ("horizons", "nu_max", "nu_max", int),
    ("horizons", "l_max", "l_max", int),
    ("horizons", "mu_max", "mu_max", int),
    ("horizons", "iterates", "iterates", int),
    ("tolerances", "delta", "delta", float),
    ("tolerances", "grid_res", "grid_res", int),
    ("tolerances", "max_degree", "max_degree", int),
    ("tolerances", "sigma_t_max", "sigma_t_max", float),
    ("split", "parts", "split_parts", int),
    ("set", "kind", "set_kind", str),
    ("set", "first", "set_first", int),
    ("set", "step", "set_step", int),
    ("build", "kind", "build_kind", str),
    ("build", "bases", "bases", int),
    ("build", "max_islands", "max_islands", int),
    ("runaway", "mode", "runaway_mode", str),
    ("scan", "candidate", "candidate_path", str),
    ("output", "dir", "out_dir", str),
)

_KEY_TABLE = {(s, k): (attr, kind) for s, k, attr, kind in _FIELDS}


def _parse_value(kind, raw: str):
    raw = raw.strip()
    if kind is str:
        return raw
    if kind is int:
        try:
            return int(raw, 10)
        except ValueError:
            val = float(raw)
            out = int(round(val))
            if abs(val - out) > 0.0:
                raise ValueError(f"expected an integer, got {raw!r}")
            return out
    return float(raw)


def load_config(path: str) -> ExperimentConfig:
    """Parse an INI file; unknown sections or keys are hard errors."""
    parser = configparser.ConfigParser(interpolation=None)
    with open(path, "r", encoding="utf-8") as fh:
        parser.read_file(fh)
    if parser.defaults():
        raise ValueError("the DEFAULT section is not supported, use explicit sections")
    updates = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            entry = _KEY_TABLE.get((section, key))
            if entry is None:
                raise ValueError(f"unknown config entry [{section}] {key}")
            attr, kind = entry
            updates[attr] = _parse_value(kind, raw)
    return dataclasses.replace(ExperimentConfig(), **updates)


def apply_overrides(
    cfg: ExperimentConfig, overrides: Sequence[str]
) -> ExperimentConfig:
    """Apply command line ``section.key=value`` patches in order."""
    updates = {}
    for item in overrides:
        lhs, sep, raw = item.partition("=")
        if not sep:
            raise ValueError(f"override must look like section.key=value: {item!r}")
        section, dot, key = lhs.strip().partition(".")
        if not dot:
            raise ValueError(f"override key must be section.key: {lhs.strip()!r}")
        entry = _KEY_TABLE.get((section.strip(), key.strip()))
        if entry is None:
            raise ValueError(f"unknown override target {lhs.strip()!r}")
        attr, kind = entry
        updates[attr] = _parse_value(kind, raw)
    if not updates:
        return cfg
    return dataclasses.replace(cfg, **updates)


def _canonical(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_hash(cfg: ExperimentConfig) -> str:
    """Short digest of the effective configuration, defaults included."""
    lines = sorted(
        f"{section}.{key}={_canonical(getattr(cfg, attr))}"
        for section, key, attr, _ in _FIELDS
    )
    digest = hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()
    return digest[:12]


# ---------------------------------------------------------------------------
# builders


_DOMAIN_KINDS = {
    "whole_plane": DomainKind.WHOLE_PLANE,
    "unit_disc": DomainKind.UNIT_DISC,
    "right_half_plane": DomainKind.RIGHT_HALF_PLANE,
    "slit_plane": DomainKind.SLIT_PLANE,
}


def build_domain(cfg: ExperimentConfig) -> Domain:
    kind = _DOMAIN_KINDS.get(cfg.domain_kind)
    if kind is None:
        raise ValueError(f"unknown domain kind {cfg.domain_kind!r}")
    return Domain(kind)


def build_exhaustion(cfg: ExperimentConfig) -> Exhaustion:
    kind = cfg.domain_kind
    if kind == "whole_plane":
        return whole_plane_exhaustion()
    if kind == "unit_disc":
        return unit_disc_exhaustion()
    if kind == "right_half_plane":
        return right_half_plane_exhaustion()
    if kind == "slit_plane":
        return sector_exhaustion(cfg.c_const, cfg.alpha, cfg.beta, cfg.root_n)
    raise ValueError(f"unknown domain kind {kind!r}")


def build_schedule(cfg: ExperimentConfig) -> Callable[[int], HoloMap]:
    fam = cfg.map_family
    if fam == "translation":
        base = lambda n: Similarity(1.0, complex(n))
    elif fam == "root_shift":
        base = lambda n: RootShift(cfg.alpha, cfg.beta, cfg.root_n, n)
    elif fam == "half_plane_shift":
        base = lambda n: HalfPlaneShift(cfg.a_param, cfg.gamma, n)
    elif fam == "parabolic_disc":
        base = lambda n: ParabolicDisc(cfg.a_param, cfg.gamma, n)
    elif fam == "identity":
        dom = build_domain(cfg)
        base = lambda n: Identity(dom)
    else:
        raise ValueError(f"unknown map family {cfg.map_family!r}")
    if cfg.schedule == "powers_of_two":
        return runaway.powers_of_two_schedule(base(1))
    if cfg.schedule != "direct":
        raise ValueError(f"unknown schedule {cfg.schedule!r}")
    return base


def _family_levels(fam, nu_max: int) -> list:
    return sorted({int(nu) for nu in fam.nu_values() if int(nu) <= nu_max})


def _prepare_runaway(cfg: ExperimentConfig, pairs: Optional[int] = None):
    fam = density.build_separated_family(
        pairs if pairs else cfg.pairs, cfg.n_max, cfg.multiplier
    )
    fam_report = density.verify_separated_family(fam)
    exh = build_exhaustion(cfg)
    schedule = build_schedule(cfg)
    rcfg = runaway.RunawayConfig(
        domain=build_domain(cfg),
        maps=schedule,
        exhaustion=exh,
        family=fam.a_of_nu,
        n_max=cfg.n_max,
        nu_max=cfg.nu_max,
        resolution=cfg.grid_res,
    )
    return fam, fam_report, exh, schedule, rcfg


# ---------------------------------------------------------------------------
# artifacts


@dataclass(frozen=True)
class CommandResult:
    name: str
    lines: tuple
    artifacts: tuple

    @property
    def failed(self) -> bool:
        return any(line.startswith("FAIL:") for line in self.lines)


def _verdict(ok: bool, text: str) -> str:
    return ("PASS: " if ok else "FAIL: ") + text


def _artifact_dir(cfg: ExperimentConfig, name: str) -> str:
    root = os.environ.get(ENV_OUTPUT, "") or cfg.out_dir
    path = os.path.join(root, name)
    os.makedirs(path, exist_ok=True)
    return path


def _atomic_write(path: str, data: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _plain(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


def _write_json(path: str, payload) -> None:
    _atomic_write(path, json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n")


def _write_csv(path: str, header: Sequence[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    _atomic_write(path, buf.getvalue())


def _finish(
    cfg: ExperimentConfig, name: str, out: str, lines, artifacts
) -> CommandResult:
    head = [f"# freqdyn {name}", f"# config {config_hash(cfg)}"]
    summary = os.path.join(out, "summary.txt")
    _atomic_write(summary, "\n".join(head + list(lines)) + "\n")
    return CommandResult(
        name=name, lines=tuple(lines), artifacts=tuple([summary] + list(artifacts))
    )


# ---------------------------------------------------------------------------
# candidate serialization


def _encode_function(fn) -> dict:
    if isinstance(fn, ArnoldiPoly):
        hess = np.asarray(fn.hessenberg, dtype=complex)
        return {
            "type": "arnoldi",
            "norm0": float(fn.norm0),
            "hessenberg": [
                [[v.real, v.imag] for v in row] for row in hess.tolist()
            ],
            "coefficients": [
                [complex(c).real, complex(c).imag] for c in np.asarray(fn.coefficients)
            ],
        }
    return {
        "type": "polynomial",
        "center": [complex(fn.center).real, complex(fn.center).imag],
        "scale": float(fn.scale),
        "coefficients": [
            [complex(c).real, complex(c).imag] for c in fn.coefficients
        ],
    }


def _decode_function(blob: dict):
    kind = blob.get("type")
    if kind == "arnoldi":
        hess = np.array(
            [[complex(re, im) for re, im in row] for row in blob["hessenberg"]],
            dtype=complex,
        )
        coeffs = np.array(
            [complex(re, im) for re, im in blob["coefficients"]], dtype=complex
        )
        return ArnoldiPoly(
            hessenberg=hess, norm0=float(blob["norm0"]), coefficients=coeffs
        )
    if kind == "polynomial":
        coeffs = tuple(complex(re, im) for re, im in blob["coefficients"])
        center = complex(blob["center"][0], blob["center"][1])
        return Polynomial(coeffs, center, float(blob["scale"]))
    raise ValueError(f"unknown function encoding {kind!r}")


def _encode_candidate(
    cand: FhcCandidate, cfg: ExperimentConfig, kind: str, islands, extra=None
) -> dict:
    payload = {
        "format": CANDIDATE_FORMAT,
        "config": config_hash(cfg),
        "kind": kind,
        "status": cand.status,
        "reason": cand.reason,
        "degree": int(cand.degree),
        "condition": float(cand.condition),
        "orthogonal_basis": bool(cand.used_orthogonal_basis),
        "certificates": [
            {
                "achieved": float(c.achieved),
                "envelope": float(c.envelope),
                "fine_grid": float(c.fine_grid),
            }
            for c in cand.certificates
        ],
        "islands": [[int(isl.n), int(isl.nu)] for isl in islands],
        "function": _encode_function(cand.fn),
    }
    if extra:
        payload.update(extra)
    return payload


def load_candidate(path: str):
    """Read back a stored candidate; returns (function, metadata)."""
    with open(path, "r", encoding="utf-8") as fh:
        blob = json.load(fh)
    if blob.get("format") != CANDIDATE_FORMAT:
        raise ValueError(f"not a candidate file: {path}")
    encoded = blob.get("function")
    if encoded is None:
        raise ValueError(f"candidate file carries no function: {path}")
    return _decode_function(encoded), blob


# ---------------------------------------------------------------------------
# shared pipeline pieces


def _image_disc_separation(islands):
    """Minimal gap between certified image discs over all island pairs.

    Returns (gap, pairs checked, witness); the gap is positive exactly
    when every pair of discs is disjoint.  Blocks keep the pairwise
    distance matrix small enough to hold in memory.
    """
    m = len(islands)
    if m < 2:
        return math.inf, 0, None
    centers = np.array([isl.image_bound.center for isl in islands], dtype=complex)
    radii = np.array([isl.image_bound.radius for isl in islands], dtype=float)
    best = math.inf
    best_pair = (0, 0)
    checked = 0
    step = 512
    cols = np.arange(m)[None, :]
    for s in range(0, m, step):
        e = min(s + step, m)
        gap = np.abs(centers[s:e, None] - centers[None, :]) - (
            radii[s:e, None] + radii[None, :]
        )
        mask = cols > np.arange(s, e)[:, None]
        checked += int(np.count_nonzero(mask))
        gap = np.where(mask, gap, np.inf)
        k = int(np.argmin(gap))
        val = float(gap.ravel()[k])
        if val < best:
            best = val
            best_pair = (s + k // m, k % m)
    witness = None
    if best <= 0.0:
        a, b = islands[best_pair[0]], islands[best_pair[1]]
        witness = ((int(a.n), int(a.nu)), (int(b.n), int(b.nu)))
    return best, checked, witness


def _island_pairs(tr, splits, horizon: int):
    """Designed index sets of the retained islands, grouped by block."""
    member = {}
    for nu, pieces in splits.items():
        for l_idx, piece in enumerate(pieces, start=1):
            for n in piece.elements:
                member[(int(n), int(nu))] = l_idx
    blocks = {}
    for isl in tr.islands:
        l_idx = member.get((int(isl.n), int(isl.nu)))
        if l_idx is None:
            continue
        blocks.setdefault((int(isl.nu), l_idx), []).append(int(isl.n))
    out = []
    for (nu, l_idx), ns in sorted(blocks.items()):
        els = np.array(sorted(n for n in ns if n <= horizon), dtype=np.int64)
        if els.size:
            out.append(
                (nu, l_idx, IndexSet(els, horizon, f"designed(nu={nu},l={l_idx})"))
            )
    return out


def _pairs_from_meta(meta: dict, splits, horizon: int):
    class _Shim:
        def __init__(self, n, nu):
            self.n = n
            self.nu = nu

    shim = [_Shim(n, nu) for n, nu in meta.get("islands", [])]
    holder = type("_Holder", (), {"islands": shim})
    return _island_pairs(holder, splits, horizon)


def _scan_lines(report) -> list:
    lines = []
    for e in report.entries:
        lines.append(
            _verdict(
                e.passed,
                f"scan block (nu={e.nu}, l={e.l}): {e.designed.elements.size} designed"
                f" indices, burn-in {e.burn_in}, hit rate {e.hit_rate:.3g}",
            )
        )
    return lines


def _scan_rows(report):
    rows = []
    for e in report.entries:
        designed = set(int(n) for n in e.designed.elements)
        hits = set(int(n) for n in e.hits.elements)
        running = 0
        for n in range(1, report.horizon + 1):
            if n in hits:
                running += 1
            rows.append(
                (
                    e.nu,
                    e.l,
                    n,
                    int(n in designed),
                    f"{e.errors[n - 1]:.6e}",
                    f"{e.eps_sup[n - 1]:.6e}",
                    int(n in hits),
                    f"{running / n:.4f}",
                )
            )
    return rows


def _disc_mesh(count: int = MESH_POINTS, radius: float = 0.95) -> np.ndarray:
    per_ring = 40
    rings = max(1, count // per_ring)
    r = radius * (np.arange(1, rings + 1) / rings)
    th = 2.0 * np.pi * np.arange(per_ring) / per_ring
    return (r[:, None] * np.exp(1j * th)[None, :]).ravel()


# ---------------------------------------------------------------------------
# subcommands


def _cli_sigma(cfg: ExperimentConfig) -> CommandResult:
    out = _artifact_dir(cfg, "sigma")
    rep = cmd_sigma(cfg.alpha, cfg.beta, cfg.sigma_t_max)
    lines = [
        f"NOTE: sigma({cfg.alpha:g}, {cfg.beta:g}) = {rep.sigma:.12g}",
        f"NOTE: radius constant C = {rep.c_const:.12g}",
        f"NOTE: interior minimum {rep.interior_min:.12g} at t = {rep.t_at_min:.6g}",
        f"NOTE: endpoint limits {rep.limit_at_one:g} (t -> 1) and"
        f" {rep.limit_at_inf:g} (t -> infinity)",
        _verdict(rep.sigma > 0.0, "separation exponent is positive"),
        _verdict(
            abs(rep.richardson - rep.sigma) <= max(1e-6, 0.05 * abs(rep.sigma)),
            f"extrapolated tail value {rep.richardson:.12g} agrees with sigma",
        ),
    ]
    path = os.path.join(out, "report.json")
    _write_json(path, {"config": config_hash(cfg), **dataclasses.asdict(rep)})
    return _finish(cfg, "sigma", out, lines, [path])


def cmd_example1(cfg: ExperimentConfig) -> CommandResult:
    """Root-shift maps on the slit plane: the full certification chain."""
    out = _artifact_dir(cfg, "example1")
    lines = []
    sig = cmd_sigma(cfg.alpha, cfg.beta, cfg.sigma_t_max)
    lines.append(
        f"NOTE: sigma = {sig.sigma:.12g}, certified radius constant"
        f" {sig.c_const:.12g}"
    )
    if cfg.c_const > sig.c_const + 1e-12:
        lines.append(
            f"NOTE: configured radius constant {cfg.c_const:g} exceeds the"
            " certified value"
        )
    auto_pairs = cfg.nu_max * (cfg.nu_max + 1) // 2
    fam, fam_report, exh, schedule, rcfg = _prepare_runaway(
        cfg, pairs=max(cfg.pairs, auto_pairs)
    )
    lines.append(_verdict(fam_report.passed, "separated family verifies"))
    rep = runaway.check_strong_runaway(rcfg)
    lines.append(
        _verdict(rep.p1_ok, "P1: index families keep positive lower density")
    )
    lines.append(_verdict(rep.p2_ok, "P2: islands are disjoint with separated images"))
    lines.append(_verdict(rep.p3_ok, "P3: probe compacts avoid foreign image discs"))
    for label, witness in (
        ("P1", rep.p1_witness),
        ("P2 index", rep.p2_index_witness),
        ("P2 disc", rep.p2_disc_witness),
        ("P3", rep.p3_witness),
    ):
        if witness is not None:
            lines.append(f"NOTE: {label} witness {witness}")
    gap, checked, gap_witness = _image_disc_separation(rep.islands)
    lines.append(
        _verdict(
            gap > 0.0,
            f"image discs pairwise separated over {checked} pairs"
            f" (minimal gap {gap:.6g})",
        )
    )
    if gap_witness is not None:
        lines.append(f"NOTE: closest disc pair {gap_witness}")

    payload = {
        "config": config_hash(cfg),
        "sigma": dataclasses.asdict(sig),
        "p1_ok": rep.p1_ok,
        "p2_ok": rep.p2_ok,
        "p3_ok": rep.p3_ok,
        "islands": len(rep.islands),
        "disc_gap": gap,
        "disc_pairs_checked": checked,
    }
    artifacts = []
    if rep.p1_ok and rep.p2_ok and rep.p3_ok:
        tr = runaway.build_carleman_truncation(
            rcfg, bases=0, report=rep, max_islands=cfg.max_islands
        )
        levels = _family_levels(fam, cfg.nu_max)
        splits = {
            nu: density.split(fam.a_of_nu(nu), cfg.l_max, cfg.n_max) for nu in levels
        }
        target = approx.assemble_existence_target(tr, splits, cfg.l_max, cfg.grid_res)
        cand = approx.fit_on_compacts(target, cfg.max_degree, cfg.grid_res)
        lines.append(
            _verdict(
                cand.status == "PASS",
                f"island fit {cand.status} at degree {cand.degree}"
                f" (worst error ratio {cand.max_ratio:.3g})",
            )
        )
        cpath = os.path.join(out, "candidate.json")
        _write_json(cpath, _encode_candidate(cand, cfg, "existence", tr.islands))
        artifacts.append(cpath)
        payload["fit_status"] = cand.status
        payload["fit_degree"] = int(cand.degree)

        pairs = _island_pairs(tr, splits, cfg.n_max)
        scannable = [
            (nu, l, d)
            for nu, l, d in pairs
            if sample_grid(exh.member(nu), cfg.grid_res).size > 0
        ]
        if not scannable:
            lines.append(
                "NOTE: orbit scan skipped, every truncation compact is empty at"
                " this radius constant"
            )
        else:
            delta = cfg.delta
            if delta <= 0.0:
                delta = 2.0 * max(c.envelope for c in cand.certificates)
            horizon = max(int(isl.n) for isl in tr.islands)
            clipped = []
            for nu, l, d in scannable:
                els = d.elements[d.elements <= horizon]
                if els.size:
                    clipped.append((nu, l, IndexSet(els, horizon, d.descriptor)))
            scan_rep = orbit.scan(
                cand.fn,
                schedule,
                exh,
                enumerate_dense_polynomial,
                delta,
                horizon,
                clipped,
                cfg.grid_res,
            )
            lines.extend(_scan_lines(scan_rep))
            spath = os.path.join(out, "scan.csv")
            _write_csv(
                spath,
                ("nu", "l", "n", "designed", "error", "eps_sup", "hit", "prefix_ratio"),
                _scan_rows(scan_rep),
            )
            artifacts.append(spath)
    else:
        lines.append("NOTE: truncation and fit skipped, the runaway check failed")
    rpath = os.path.join(out, "report.json")
    _write_json(rpath, payload)
    artifacts.append(rpath)
    return _finish(cfg, "example1", out, lines, artifacts)


def cmd_example2(cfg: ExperimentConfig) -> CommandResult:
    """Conjugate the slit-plane shifts onto the disc and check the identity."""
    out = _artifact_dir(cfg, "example2")
    pair = ConformalPair(PairKind.SLIT_TO_DISC)
    mesh = _disc_mesh()
    w = pair.backward(mesh)
    rows = []
    worst_resid = 0.0
    worst_mod = 0.0
    for n in PROBE_STEPS:
        inner = RootShift(cfg.alpha, cfg.beta, cfg.root_n, n)
        phi = Conjugated(pair, inner)
        lhs = apply(phi, pair.forward(w))
        rhs = pair.forward(apply(inner, w))
        resid = float(np.max(np.abs(lhs - rhs)))
        mod = float(np.max(np.abs(apply(phi, mesh))))
        worst_resid = max(worst_resid, resid)
        worst_mod = max(worst_mod, mod)
        rows.append((n, f"{resid:.6e}", f"{mod:.12f}"))
    lines = [
        _verdict(
            worst_resid < CONJUGATION_TOL,
            f"conjugation identity closes to {worst_resid:.3e} on"
            f" {mesh.size} points",
        ),
        _verdict(worst_mod < 1.0, f"conjugated maps stay inside the disc"
                 f" (max modulus {worst_mod:.6f})"),
    ]
    path = os.path.join(out, "residuals.csv")
    _write_csv(path, ("n", "residual", "max_modulus"), rows)
    return _finish(cfg, "example2", out, lines, [path])


def cmd_example3(cfg: ExperimentConfig) -> CommandResult:
    """Parabolic disc maps against their half-plane conjugation."""
    out = _artifact_dir(cfg, "example3")
    pair = ConformalPair(PairKind.CAYLEY_DISC_TO_HALF_PLANE).reversed()
    mesh = _disc_mesh()
    rows = []
    worst_resid = 0.0
    worst_fp = 0.0
    worst_mod = 0.0
    for n in PROBE_STEPS:
        direct = ParabolicDisc(cfg.a_param, cfg.gamma, n)
        conj = Conjugated(pair, HalfPlaneShift(cfg.a_param, cfg.gamma, n))
        vals = apply(direct, mesh)
        resid = float(np.max(np.abs(vals - apply(conj, mesh))))
        # the closed form is defined on the closed disc, so the boundary
        # fixed point can be evaluated directly
        s_par = cfg.a_param * float(n) ** cfg.gamma
        z = 1.0 + 0.0j
        fixed = 1.0 + 2.0 * (z - 1.0) / (2.0 - 1j * s_par * (z - 1.0))
        fp_err = abs(fixed - 1.0)
        mod = float(np.max(np.abs(vals)))
        worst_resid = max(worst_resid, resid)
        worst_fp = max(worst_fp, fp_err)
        worst_mod = max(worst_mod, mod)
        rows.append((n, f"{resid:.6e}", f"{fp_err:.3e}", f"{mod:.12f}"))
    lines = [
        _verdict(
            worst_resid < CONJUGATION_TOL,
            f"closed form matches the conjugated chain to {worst_resid:.3e}"
            f" on {mesh.size} points",
        ),
        _verdict(
            worst_fp <= FIXED_POINT_TOL,
            f"boundary fixed point error {worst_fp:.3e}",
        ),
        _verdict(worst_mod < 1.0, f"maps stay inside the disc"
                 f" (max modulus {worst_mod:.6f})"),
    ]
    path = os.path.join(out, "residuals.csv")
    _write_csv(path, ("n", "residual", "fixed_point_error", "max_modulus"), rows)
    return _finish(cfg, "example3", out, lines, [path])


def cmd_example4(cfg: ExperimentConfig) -> CommandResult:
    """Similarity coefficients: growth and pairwise separation checks."""
    out = _artifact_dir(cfg, "example4")
    horizon = cfg.n_max
    a_seq = lambda n: 1.0 + 0.0j
    b_seq = lambda n: complex(float(n) ** cfg.b_power)
    omega_seq = lambda k: float(k) ** cfg.omega_power
    sim = density.check_similarity_criterion(a_seq, b_seq, omega_seq, horizon)
    sep = density.check_translation_separation(b_seq, horizon)
    lines = [
        _verdict(sim.passed, "similarity coefficients satisfy the criterion"),
        f"NOTE: growth check {'ok' if sim.growth_ok else 'violated'},"
        f" pairwise check {'ok' if sim.pairwise_ok else 'violated'}",
        _verdict(sep.passed, "translation steps separate all difference classes"),
        f"NOTE: {'slow' if sep.slow_growth else 'fast'} separation growth over"
        f" k <= {sep.k_max}",
    ]
    path = os.path.join(out, "report.json")
    _write_json(
        path,
        {
            "config": config_hash(cfg),
            "similarity_passed": sim.passed,
            "growth_ok": sim.growth_ok,
            "pairwise_ok": sim.pairwise_ok,
            "separation_passed": sep.passed,
            "slow_growth": sep.slow_growth,
            "k_max": sep.k_max,
            "infima": list(sep.infima),
        },
    )
    return _finish(cfg, "example4", out, lines, [path])


def cmd_example5(cfg: ExperimentConfig) -> CommandResult:
    """Orbit contraction of a parabolic disc map toward its fixed point."""
    out = _artifact_dir(cfg, "example5")
    m = ParabolicDisc(cfg.a_param, cfg.gamma, 1)
    observable = Polynomial.monomial(1)
    region = ClosedDisc(0.0, 0.5)
    rep = orbit.iterate_convergence(
        m, observable, region, 1.0 + 0.0j, cfg.iterates, grid_res=cfg.grid_res
    )
    lines = []
    if rep.escaped:
        lines.append(
            _verdict(False, f"orbit left the domain at step {rep.escaped_at}")
        )
    else:
        final = float(rep.errors[-1])
        tail = orbit.first_monotone_tail(rep.errors)
        lines.append(
            _verdict(final < 0.1, f"error after {cfg.iterates} steps is {final:.6f}")
        )
        lines.append(
            _verdict(
                tail <= (3 * cfg.iterates) // 4,
                f"errors decrease monotonically from step {tail + 1}",
            )
        )
    ident = Identity(Domain(DomainKind.UNIT_DISC))
    control = orbit.iterate_convergence(
        m=ident,
        q=observable,
        k=region,
        limit=1.0 + 0.0j,
        n_steps=min(50, cfg.iterates),
        grid_res=cfg.grid_res,
    )
    spread = float(np.max(control.errors) - np.min(control.errors))
    lines.append(
        _verdict(
            spread <= 1e-12 and float(control.errors[0]) > 0.0,
            "identity control shows no decrease",
        )
    )
    path = os.path.join(out, "errors.csv")
    _write_csv(
        path,
        ("n", "error"),
        ((i + 1, f"{e:.10e}") for i, e in enumerate(rep.errors)),
    )
    return _finish(cfg, "example5", out, lines, [path])


def cmd_build_fhc(cfg: ExperimentConfig) -> CommandResult:
    """Certify a runaway family and fit candidates on its truncation."""
    out = _artifact_dir(cfg, "build_fhc")
    kind = cfg.build_kind
    if kind not in ("existence", "spaceable", "dense", "mixed"):
        raise ValueError(f"unknown build kind {kind!r}")
    fam, fam_report, exh, schedule, rcfg = _prepare_runaway(cfg)
    lines = [_verdict(fam_report.passed, "separated family verifies")]
    rep = runaway.check_strong_runaway(rcfg)
    lines.append(
        _verdict(
            rep.p1_ok and rep.p2_ok and rep.p3_ok,
            f"strong runaway check (P1 {rep.p1_ok}, P2 {rep.p2_ok},"
            f" P3 {rep.p3_ok})",
        )
    )
    if not (rep.p1_ok and rep.p2_ok and rep.p3_ok):
        return _finish(cfg, "build_fhc", out, lines, [])

    # each build shape fixes its own base-compact count
    if kind == "existence":
        bases = 0
    elif kind in ("spaceable", "mixed"):
        bases = 1
    else:
        bases = max(cfg.bases, cfg.mu_max + 1)
    tr = runaway.build_carleman_truncation(
        rcfg, bases=bases, report=rep, max_islands=cfg.max_islands
    )
    levels = _family_levels(fam, cfg.nu_max)
    lines.append(
        f"NOTE: truncation keeps {len(tr.islands)} islands and"
        f" {len(tr.bases)} base compacts (k_base {tr.k_base})"
    )
    artifacts = []

    if kind == "existence":
        splits = {
            nu: density.split(fam.a_of_nu(nu), cfg.l_max, cfg.n_max) for nu in levels
        }
        target = approx.assemble_existence_target(tr, splits, cfg.l_max, cfg.grid_res)
        cand = approx.fit_on_compacts(target, cfg.max_degree, cfg.grid_res)
        lines.append(
            _verdict(
                cand.status == "PASS",
                f"candidate fit {cand.status} at degree {cand.degree}"
                f" (worst error ratio {cand.max_ratio:.3g})",
            )
        )
        path = os.path.join(out, "candidate.json")
        _write_json(path, _encode_candidate(cand, cfg, kind, tr.islands))
        artifacts.append(path)
        return _finish(cfg, "build_fhc", out, lines, artifacts)

    if kind == "dense":
        dense_splits = {
            nu: approx.double_split(
                fam.a_of_nu(nu), cfg.l_max, cfg.mu_max + 1, cfg.n_max
            )
            for nu in levels
        }
        members = []
        ok = True
        for mu in range(1, cfg.mu_max + 1):
            target = approx.assemble_dense_target(mu, tr, dense_splits, cfg.grid_res)
            cand = approx.fit_on_compacts(target, cfg.max_degree, cfg.grid_res)
            members.append(cand)
            base_cert = cand.certificates[0]
            lines.append(
                _verdict(
                    cand.status == "PASS",
                    f"member {mu} fit {cand.status} at degree {cand.degree}"
                    f" (base error {base_cert.achieved:.3e} vs {1.0 / mu:.3e})",
                )
            )
            ok = ok and cand.status == "PASS"
            path = os.path.join(out, f"member{mu}.json")
            _write_json(
                path,
                _encode_candidate(cand, cfg, kind, tr.islands, extra={"mu": mu}),
            )
            artifacts.append(path)
        if not ok:
            lines.append("NOTE: some member failed, no collection written")
        return _finish(cfg, "build_fhc", out, lines, artifacts)

    # spaceable and mixed both perturb monomials on a single base compact
    if kind == "spaceable":
        block_splits = {
            nu: approx.double_split(fam.a_of_nu(nu), cfg.l_max, cfg.mu_max, cfg.n_max)
            for nu in levels
        }
        assemble = approx.assemble_spaceable_target
        basis_kind = BasisKind.SPACEABLE
    else:
        block_splits = {
            nu: approx.double_split(
                density.split(fam.a_of_nu(nu), 2, cfg.n_max)[0],
                cfg.l_max,
                cfg.mu_max,
                cfg.n_max,
            )
            for nu in levels
        }
        assemble = approx.assemble_mixed_target
        basis_kind = BasisKind.MIXED
    members = []
    ok = True
    for mu in range(1, cfg.mu_max + 1):
        target = assemble(mu, tr, block_splits, cfg.grid_res)
        cand = approx.fit_on_compacts(target, cfg.max_degree, cfg.grid_res)
        members.append(cand)
        lines.append(
            _verdict(
                cand.status == "PASS",
                f"member {mu} fit {cand.status} at degree {cand.degree}",
            )
        )
        ok = ok and cand.status == "PASS"
        path = os.path.join(out, f"member{mu}.json")
        _write_json(
            path, _encode_candidate(cand, cfg, kind, tr.islands, extra={"mu": mu})
        )
        artifacts.append(path)
    if ok:
        try:
            basis = approx.build_span_basis(
                members, list(range(1, cfg.mu_max + 1)), basis_kind
            )
        except ValueError as exc:
            lines.append(_verdict(False, f"span basis rejected: {exc}"))
        else:
            lines.append(
                _verdict(
                    basis.perturbation_sum < 0.5,
                    f"circle perturbation sum {basis.perturbation_sum:.6f}",
                )
            )
            lines.append(
                f"NOTE: Gram lower eigenvalue {basis.gram_lambda_min:.6f},"
                f" coefficient bound {basis.coeff_bound:.6f}"
            )
            path = os.path.join(out, "basis.json")
            _write_json(
                path,
                {
                    "config": config_hash(cfg),
                    "kind": basis.kind,
                    "indices": list(basis.indices),
                    "perturbation_sum": basis.perturbation_sum,
                    "gram_lambda_min": basis.gram_lambda_min,
                    "coeff_bound": basis.coeff_bound,
                    "members": [f"member{mu}.json" for mu in basis.indices],
                },
            )
            artifacts.append(path)
    else:
        lines.append(_verdict(False, "span basis skipped, a member fit failed"))
    return _finish(cfg, "build_fhc", out, lines, artifacts)


def cmd_scan(cfg: ExperimentConfig) -> CommandResult:
    """Scan a stored candidate along its map schedule."""
    out = _artifact_dir(cfg, "scan")
    if not cfg.candidate_path:
        raise ValueError("the [scan] section must name a candidate file")
    fn, meta = load_candidate(cfg.candidate_path)
    if meta.get("kind") != "existence":
        raise ValueError("orbit scans expect an existence candidate")
    lines = []
    if meta.get("config") != config_hash(cfg):
        lines.append(
            "NOTE: candidate was built under a different configuration,"
            f" hash {meta.get('config')}"
        )
    fam = density.build_separated_family(cfg.pairs, cfg.n_max, cfg.multiplier)
    exh = build_exhaustion(cfg)
    schedule = build_schedule(cfg)
    levels = _family_levels(fam, cfg.nu_max)
    splits = {
        nu: density.split(fam.a_of_nu(nu), cfg.l_max, cfg.n_max) for nu in levels
    }
    islands = meta.get("islands", [])
    if not islands:
        raise ValueError("candidate file lists no islands to scan")
    horizon = max(int(n) for n, _ in islands)
    pairs = _pairs_from_meta(meta, splits, horizon)
    pairs = [
        (nu, l, d)
        for nu, l, d in pairs
        if sample_grid(exh.member(nu), cfg.grid_res).size > 0
    ]
    if not pairs:
        raise ValueError("every designed compact has an empty grid at this radius")
    delta = cfg.delta
    if delta <= 0.0:
        envelopes = [c["envelope"] for c in meta.get("certificates", [])]
        if not envelopes:
            raise ValueError("candidate carries no certificates, set a delta")
        delta = 2.0 * max(envelopes)
    lines.append(f"NOTE: scanning {len(pairs)} blocks to horizon {horizon}"
                 f" at delta {delta:.6g}")
    report = orbit.scan(
        fn,
        schedule,
        exh,
        enumerate_dense_polynomial,
        delta,
        horizon,
        pairs,
        cfg.grid_res,
    )
    lines.extend(_scan_lines(report))
    lines.append(_verdict(report.passed, "orbit scan verdict"))
    path = os.path.join(out, "scan.csv")
    _write_csv(
        path,
        ("nu", "l", "n", "designed", "error", "eps_sup", "hit", "prefix_ratio"),
        _scan_rows(report),
    )
    return _finish(cfg, "scan", out, lines, [path])


def cmd_density(cfg: ExperimentConfig) -> CommandResult:
    """Density estimates of one index set with checkpoint trace."""
    out = _artifact_dir(cfg, "density")
    if cfg.set_kind == "naturals":
        a = density.naturals(cfg.n_max)
    elif cfg.set_kind == "progression":
        a = density.arithmetic_progression(cfg.set_first, cfg.set_step, cfg.n_max)
    else:
        raise ValueError(f"unknown set kind {cfg.set_kind!r}")
    rep = density.lower_density_estimate(a, cfg.n_max)
    upper = density.upper_density_estimate(a, cfg.n_max)
    lines = [
        f"NOTE: lower {rep.lower_estimate:.6f}, upper {upper:.6f}"
        f" at horizon {cfg.n_max}",
        _verdict(rep.lower_estimate <= upper + 1e-12, "estimates are ordered"),
    ]
    if rep.closed_form is not None:
        lines.append(
            _verdict(
                abs(rep.lower_estimate - rep.closed_form) <= 0.01,
                f"estimate within 0.01 of the closed form {rep.closed_form:.6f}",
            )
        )
    path = os.path.join(out, "checkpoints.csv")
    _write_csv(
        path,
        ("n", "ratio"),
        ((n, f"{r:.8f}") for n, r in rep.checkpoints),
    )
    return _finish(cfg, "density", out, lines, [path])


def cmd_split(cfg: ExperimentConfig) -> CommandResult:
    """Split the naturals into geometric-density parts and verify."""
    out = _artifact_dir(cfg, "split")
    parts = cfg.split_parts
    pieces = density.split(density.naturals(cfg.n_max), parts, cfg.n_max)
    merged = np.sort(np.concatenate([p.elements for p in pieces]))
    exact = merged.size == cfg.n_max and bool(
        np.array_equal(merged, np.arange(1, cfg.n_max + 1))
    )
    lines = [_verdict(exact, f"{parts} parts partition 1..{cfg.n_max} exactly")]
    targets = [2.0 ** (-(j + 1)) for j in range(parts - 1)]
    targets.append(2.0 ** (-(parts - 1)))
    rows = []
    for j, (piece, want) in enumerate(zip(pieces, targets), start=1):
        lo = density.lower_density_estimate(piece, cfg.n_max).lower_estimate
        up = density.upper_density_estimate(piece, cfg.n_max)
        lines.append(
            _verdict(
                abs(lo - want) <= 0.01,
                f"part {j} lower density {lo:.6f} within 0.01 of {want:.6f}",
            )
        )
        rows.append((j, f"{want:.6f}", piece.elements.size, f"{lo:.6f}", f"{up:.6f}"))
    path = os.path.join(out, "parts.csv")
    _write_csv(path, ("part", "target", "count", "lower", "upper"), rows)
    return _finish(cfg, "split", out, lines, [path])


def cmd_sepfamily(cfg: ExperimentConfig) -> CommandResult:
    """Build the separated family and report per-class densities."""
    out = _artifact_dir(cfg, "sepfamily")
    fam = density.build_separated_family(cfg.pairs, cfg.n_max, cfg.multiplier)
    rep = density.verify_separated_family(fam)
    lines = [_verdict(rep.passed, "separated family verifies")]
    for violation in rep.violations:
        lines.append(f"NOTE: violation {violation}")
    rows = []
    for label in fam.labels():
        piece = fam.set_for(*label)
        lo = density.lower_density_estimate(piece, cfg.n_max).lower_estimate
        head = ",".join(str(int(v)) for v in piece.elements[:5])
        rows.append(
            (
                label[0],
                label[1],
                min(label),
                piece.elements.size,
                f"{lo:.8f}",
                head,
            )
        )
        lines.append(
            _verdict(lo > 0.0, f"class {label} keeps positive density ({lo:.3e})")
        )
    path = os.path.join(out, "classes.csv")
    _write_csv(path, ("i", "j", "nu", "count", "lower", "first_elements"), rows)
    return _finish(cfg, "sepfamily", out, lines, [path])


def cmd_runaway(cfg: ExperimentConfig) -> CommandResult:
    """Verify the strong or weak runaway property for a schedule."""
    out = _artifact_dir(cfg, "runaway")
    if cfg.runaway_mode == "strong":
        fam, fam_report, exh, schedule, rcfg = _prepare_runaway(cfg)
        rep = runaway.check_strong_runaway(rcfg)
        lines = [
            _verdict(fam_report.passed, "separated family verifies"),
            _verdict(rep.p1_ok, "P1: index families keep positive lower density"),
            _verdict(rep.p2_ok, "P2: islands are disjoint with separated images"),
            _verdict(rep.p3_ok, "P3: probe compacts avoid foreign image discs"),
            f"NOTE: inspected {len(rep.islands)} islands",
        ]
        for label, witness in (
            ("P1", rep.p1_witness),
            ("P2 index", rep.p2_index_witness),
            ("P2 disc", rep.p2_disc_witness),
            ("P3", rep.p3_witness),
        ):
            if witness is not None:
                lines.append(f"NOTE: {label} witness {witness}")
        path = os.path.join(out, "report.json")
        _write_json(
            path,
            {
                "config": config_hash(cfg),
                "mode": "strong",
                "p1_ok": rep.p1_ok,
                "p2_ok": rep.p2_ok,
                "p3_ok": rep.p3_ok,
                "islands": len(rep.islands),
                "densities": {
                    str(k): v.lower_estimate for k, v in dict(rep.densities).items()
                },
            },
        )
        return _finish(cfg, "runaway", out, lines, [path])
    if cfg.runaway_mode != "weak":
        raise ValueError(f"unknown runaway mode {cfg.runaway_mode!r}")
    schedule = build_schedule(cfg)
    exh = build_exhaustion(cfg)
    rep = runaway.check_weak_runaway(
        schedule, exh.member(1), cfg.n_max, cfg.grid_res
    )
    est = rep.density.lower_estimate
    lines = [
        f"NOTE: {rep.escape_set.elements.size} escape times up to {cfg.n_max}",
        _verdict(
            est > WEAK_DENSITY_FLOOR,
            f"escape set keeps lower density {est:.6f}"
            f" (floor {WEAK_DENSITY_FLOOR})",
        ),
    ]
    path = os.path.join(out, "escapes.csv")
    _write_csv(
        path,
        ("n",),
        ((int(n),) for n in rep.escape_set.elements),
    )
    return _finish(cfg, "runaway", out, lines, [path])


# ---------------------------------------------------------------------------
# entry point


_COMMANDS = {
    "sigma": _cli_sigma,
    "example1": cmd_example1,
    "example2": cmd_example2,
    "example3": cmd_example3,
    "example4": cmd_example4,
    "example5": cmd_example5,
    "build_fhc": cmd_build_fhc,
    "scan": cmd_scan,
    "density": cmd_density,
    "split": cmd_split,
    "sepfamily": cmd_sepfamily,
    "runaway": cmd_runaway,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="freqdyn",
        description="numerical experiments around frequently hypercyclic"
        " sequences of composition operators",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("config", help="path to an INI experiment description")
    parser.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="replace one config entry; may be repeated",
    )
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        cfg = apply_overrides(load_config(args.config), args.override)
        result = _COMMANDS[args.command](cfg)
    except (OSError, ValueError, runaway.HorizonExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for line in result.lines:
        print(line)
    for path in result.artifacts:
        print(f"wrote {path}")
    print(f"elapsed {time.perf_counter() - started:.2f}s")
    return 1 if result.failed else 0


if __name__ == "__main__":
    sys.exit(main())
