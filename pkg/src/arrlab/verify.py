"""End-to-end checks: summed projection volumes against the characteristic polynomial.

For a central arrangement of rank ``r`` in ``R^d`` the sum over regions of
``nu_k`` should equal ``|[t^(r-d+k)] chi(t)|``; refined per flat ``x``, the
volumes of faces spanning ``x`` summed over regions should equal ``|mu(x)|``.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import cones as cn
from .arrangement import Arrangement, enumerate_regions, essentialize, region_cone
from .io import rational_str
from .lattice import IntersectionLattice, build_lattice, characteristic_polynomial, region_count_check
from .zonotope import angle_sums_dual, angle_sums_perles_shephard, vertex_lemma_check

EXACT_TOL = 1e-9


@dataclass
class DegreeCheck:
    k: int
    expected: Fraction
    estimate: float
    stderr: float
    z: float
    passed: bool
    path: str


@dataclass
class FlatCheck:
    flat: str
    dim: int
    expected: Fraction
    estimate: float
    stderr: float
    z: float
    passed: bool


@dataclass
class VerificationReport:
    arrangement_id: str
    d: int
    r: int
    charpoly: list[int]
    regions: int
    samples: int
    seed: int
    tol: float
    zmax: float
    essentialized: bool
    index_shift: int
    exact_checks: dict[str, bool] = field(default_factory=dict)
    degrees: list[DegreeCheck] = field(default_factory=list)
    flats: list[FlatCheck] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return (
            all(self.exact_checks.values())
            and all(c.passed for c in self.degrees)
            and all(c.passed for c in self.flats)
        )

    @property
    def failing(self) -> list[int]:
        return [c.k for c in self.degrees if not c.passed]


def _zscore(estimate: float, expected: Fraction, stderr: float) -> float:
    diff = estimate - float(expected)
    if stderr > 0:
        return diff / stderr
    return 0.0 if abs(diff) <= EXACT_TOL else math.copysign(math.inf, diff)


def exact_checks(arr: Arrangement, lat: Optional[IntersectionLattice] = None) -> dict[str, bool]:
    """Exact identities that must hold before any sampling is worth doing."""
    lat = lat or build_lattice(arr)
    checks = {"region_count": len(enumerate_regions(arr)) == region_count_check(lat)}
    ess = essentialize(arr)
    if ess.arrangement.dimension >= 1:
        lat_v = build_lattice(ess.arrangement)
        checks["angle_sums_agree"] = angle_sums_perles_shephard(lat_v) == angle_sums_dual(lat_v)
        a0, mu = vertex_lemma_check(lat_v)
        checks["vertex_lemma"] = a0 == mu
    return checks


def _essential_cones(arr: Arrangement):
    """Isometric float cones of the regions of the essentialized arrangement, in region order."""
    ess = essentialize(arr)
    iso = ess.isometric_normals()
    out = []
    for region in enumerate_regions(ess.arrangement):
        exact = region_cone(ess.arrangement, region)
        sgn = np.array([1.0 if c == "+" else -1.0 for c in region.signs]).reshape(-1, 1)
        out.append((region, cn.Cone.from_float(iso * sgn, facets=exact.facets)))
    return ess, out


def region_histograms(arr: Arrangement, samples: int, seed: int, tol: float, workers: Optional[int] = None):
    """Per region, histogram of tight hyperplane sets of sampled projections.

    Region ``j`` (in sorted order) uses RNG stream ``j``, so results do not
    depend on how regions are distributed over threads.
    """
    workers = cn.default_workers() if workers is None else workers
    ess, cones = _essential_cones(arr)

    def run(item):
        j, (_, cone) = item
        return cn.tight_mask_counts(cone, samples, seed, stream=j, tol=tol, workers=1)

    return ess, cn._fan_out(run, list(enumerate(cones)), workers)


def _mask_set(mask: int) -> frozenset[int]:
    out, i = set(), 0
    while mask:
        if mask & 1:
            out.add(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def _region_flat_counts(lat: IntersectionLattice, hist: dict[int, int]) -> dict[int, int]:
    per = {f.id: 0 for f in lat.flats}
    for mask, c in hist.items():
        per[lat.closure(_mask_set(mask)).id] += c
    return per


def _binomial_totals(groups_per_region, samples: int):
    """Sum over regions of group fractions, with the matching binomial variances."""
    est: dict = {}
    var: dict = {}
    for groups in groups_per_region:
        for key, c in groups.items():
            p = c / samples
            est[key] = est.get(key, 0.0) + p
            var[key] = var.get(key, 0.0) + p * (1 - p) / samples
    return est, var


def _flat_totals(lat: IntersectionLattice, hists, samples: int):
    """Per flat: summed fraction of samples whose projection spans that flat."""
    return _binomial_totals([_region_flat_counts(lat, h) for h in hists], samples)


def _dim_totals(lat: IntersectionLattice, hists, samples: int):
    """Per face dimension ``k``: summed ``nu_k`` over regions."""
    groups = []
    for h in hists:
        per = {k: 0 for k in range(lat.ambient_dim + 1)}
        for fid, c in _region_flat_counts(lat, h).items():
            per[lat.flats[fid].dim] += c
        groups.append(per)
    return _binomial_totals(groups, samples)


def verify_main_theorem(
    arr: Arrangement,
    samples: int,
    seed: int,
    tol: float = cn.DEFAULT_TOL,
    zmax: float = 4.0,
    method: str = "auto",
    flats: bool = False,
    workers: Optional[int] = None,
    arrangement_id: str = "",
) -> VerificationReport:
    """Compare summed projection volumes with characteristic-polynomial coefficients.

    ``method`` is ``"auto"`` (exact planar angles when ``r <= 2``, otherwise
    Monte Carlo), ``"exact"`` or ``"mc"``.  With ``flats=True`` the per-flat
    table is filled from the same Monte Carlo samples.
    """
    if method not in ("auto", "exact", "mc"):
        raise ValueError(f"unknown method {method!r}")
    t0 = time.perf_counter()
    d, r = arr.dimension, arr.rank
    lat = build_lattice(arr)
    chi = characteristic_polynomial(lat)
    checks = exact_checks(arr, lat)
    ess = essentialize(arr)
    report = VerificationReport(
        arrangement_id=arrangement_id,
        d=d,
        r=r,
        charpoly=chi.high_first(),
        regions=region_count_check(lat),
        samples=samples,
        seed=seed,
        tol=tol,
        zmax=zmax,
        essentialized=ess.index_shift > 0,
        index_shift=ess.index_shift,
        exact_checks=checks,
    )
    report.timings["exact_checks"] = time.perf_counter() - t0
    if not all(checks.values()):
        return report

    use_exact = method == "exact" or (method == "auto" and r <= 2)
    if use_exact and r > 2:
        raise ValueError("exact path needs rank <= 2")
    t1 = time.perf_counter()
    hists = None
    if not use_exact or flats:
        _, hists = region_histograms(arr, samples, seed, tol, workers)

    sums = [0.0] * (d + 1)
    var = [0.0] * (d + 1)
    if use_exact:
        for region in enumerate_regions(arr):
            for k, v in enumerate(cn.exact_volumes_rank2(region_cone(arr, region))):
                sums[k] += v
    else:
        est, dvar = _dim_totals(lat, hists, samples)
        for k in range(d + 1):
            sums[k], var[k] = est[k], dvar[k]
    path = "exact-rank2" if use_exact else "monte-carlo"
    for k in range(d, -1, -1):
        expected = Fraction(abs(chi.coefficient(r - d + k)))
        se = math.sqrt(var[k])
        z = _zscore(sums[k], expected, se)
        report.degrees.append(DegreeCheck(k, expected, sums[k], se, z, abs(z) <= zmax, path))

    if flats:
        report.flats = _flat_checks(lat, hists, samples, zmax)
    report.timings["volumes"] = time.perf_counter() - t1
    return report


def _flat_checks(lat: IntersectionLattice, hists, samples: int, zmax: float) -> list[FlatCheck]:
    est, var = _flat_totals(lat, hists, samples)
    rows = []
    for f in lat.flats:
        expected = Fraction(abs(lat.mu(f)))
        se = math.sqrt(var[f.id])
        z = _zscore(est[f.id], expected, se)
        rows.append(FlatCheck(f.label(), f.dim, expected, est[f.id], se, z, abs(z) <= zmax))
    return rows


def verify_flat_identity(
    arr: Arrangement,
    samples: int,
    seed: int,
    tol: float = cn.DEFAULT_TOL,
    zmax: float = 4.0,
    workers: Optional[int] = None,
) -> list[FlatCheck]:
    """Per flat ``x``: summed volumes of faces spanning ``x`` against ``|mu(x)|``."""
    lat = build_lattice(arr)
    _, hists = region_histograms(arr, samples, seed, tol, workers)
    return _flat_checks(lat, hists, samples, zmax)


# --- output ----------------------------------------------------------------------


def _num(x: float):
    if math.isinf(x) or math.isnan(x):
        return str(x)
    return x


def report_to_dict(report: VerificationReport, timings: bool = False) -> dict:
    out = {
        "arrangement": report.arrangement_id,
        "d": report.d,
        "r": report.r,
        "charpoly": [str(c) for c in report.charpoly],
        "regions": report.regions,
        "samples": report.samples,
        "seed": report.seed,
        "tol": report.tol,
        "zmax": report.zmax,
        "essentialized": report.essentialized,
        "index_shift": report.index_shift,
        "exact_checks": report.exact_checks,
        "theorem": [
            {
                "k": c.k,
                "expected": rational_str(c.expected),
                "estimate": c.estimate,
                "stderr": c.stderr,
                "z": _num(c.z),
                "pass": c.passed,
                "path": c.path,
            }
            for c in report.degrees
        ],
        "flats": [
            {
                "flat": c.flat,
                "dim": c.dim,
                "expected": rational_str(c.expected),
                "estimate": c.estimate,
                "stderr": c.stderr,
                "z": _num(c.z),
                "pass": c.passed,
            }
            for c in report.flats
        ],
        "failing_k": report.failing,
        "pass": report.passed,
    }
    if timings:
        out["timings"] = report.timings
    return out


def report_to_text(report: VerificationReport) -> str:
    lines = [
        f"arrangement {report.arrangement_id or '-'}: d={report.d} r={report.r} regions={report.regions}",
        f"charpoly (high first): {report.charpoly}   index shift d-r = {report.index_shift}",
        "exact checks: " + ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in report.exact_checks.items()),
        "",
        f"{'k':>3} {'expected':>9} {'estimate':>12} {'stderr':>10} {'z':>8}  {'path':<12} result",
    ]
    for c in report.degrees:
        lines.append(
            f"{c.k:>3} {rational_str(c.expected):>9} {c.estimate:>12.6f} {c.stderr:>10.2e} {c.z:>8.2f}  {c.path:<12} {'pass' if c.passed else 'FAIL'}"
        )
    if report.flats:
        lines += ["", f"{'flat':<16} {'dim':>3} {'|mu|':>5} {'estimate':>12} {'stderr':>10} {'z':>8} result"]
        for c in report.flats:
            lines.append(
                f"{c.flat:<16} {c.dim:>3} {rational_str(c.expected):>5} {c.estimate:>12.6f} {c.stderr:>10.2e} {c.z:>8.2f} {'pass' if c.passed else 'FAIL'}"
            )
    if report.timings:
        lines += ["", "timings: " + ", ".join(f"{k}={v:.2f}s" for k, v in report.timings.items())]
    lines.append("")
    lines.append("PASS" if report.passed else f"FAIL (k = {report.failing})")
    return "\n".join(lines) + "\n"


def emit_report(report: VerificationReport, format: str = "json", path=None, timings: bool = False) -> str:
    """Serialize a report; JSON omits timings unless asked so reruns compare byte for byte."""
    if format == "json":
        text = json.dumps(report_to_dict(report, timings), indent=2, sort_keys=True) + "\n"
    elif format == "text":
        text = report_to_text(report)
    else:
        raise ValueError(f"unknown format {format!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
