"""Where is the defender's best reply a mixed strategy?

For a 2x2 game with tied ongoing costs, Alice mixes exactly when the
attack-intensity gap ``d_beta`` falls in an open interval fixed by ``k`` and
the two robustness differentials. This module computes that interval,
classifies individual scenarios, sweeps one or two scenario parameters over
a grid and exports the result as CSV or SVG.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from itertools import product
from pathlib import Path

import numpy as np

from .equilibrium import (
    DENOM_TOL,
    ENDPOINT_SLACK,
    DegenerateDenominator,
    simplified_probabilities,
    structural_deltas,
)
from .game_core import Scenario, validate_scenario

MIXED = "mixed"
PURE_ONLY = "pure-only"
DEGENERATE = "degenerate"
OUT_OF_DOMAIN = "out-of-domain"
CLASSES = (MIXED, PURE_ONLY, DEGENERATE, OUT_OF_DOMAIN)

MAX_GRID_POINTS = 10**6

PALETTE = {
    MIXED: "#90ee90",
    PURE_ONLY: "#ffffff",
    DEGENERATE: "#808080",
    OUT_OF_DOMAIN: "#000000",
}


class RegionError(ValueError):
    name = "region-error"


class InvalidSweep(RegionError):
    name = "invalid-spec"


class GridTooLarge(RegionError):
    name = "grid-too-large"


class WrongAxisCount(RegionError):
    name = "wrong-axis-count"


class HeterogeneousCoordinates(RegionError):
    name = "heterogeneous-coordinates"


@dataclass(frozen=True)
class FeasibilityInterval:
    lower: float
    upper: float
    orientation: str  # "d2-greater", "d1-greater" or "degenerate"

    @property
    def empty(self) -> bool:
        return self.orientation == "degenerate"

    def __contains__(self, d_beta) -> bool:
        return not self.empty and self.lower < d_beta < self.upper


def feasibility_interval(k, d_r_1star, d_r_2star) -> FeasibilityInterval:
    """Open range of ``d_beta`` for which Alice's mixing probability is interior."""
    if not k > 0:
        raise RegionError(f"nonpositive-k: k={k!r}")
    gap = d_r_2star - d_r_1star
    if abs(gap) <= DENOM_TOL:
        return FeasibilityInterval(math.nan, math.nan, "degenerate")
    lo = -max(d_r_1star, d_r_2star) / k
    hi = -min(d_r_1star, d_r_2star) / k
    return FeasibilityInterval(lo, hi, "d2-greater" if gap > 0 else "d1-greater")


@dataclass(frozen=True)
class RegionPoint:
    coordinates: tuple[tuple[str, float], ...]
    classification: str
    pr_alpha1: float | None = None
    pr_beta1: float | None = None

    def __post_init__(self):
        if self.classification not in CLASSES:
            raise ValueError(f"unknown classification {self.classification!r}")
        has_pr = self.pr_alpha1 is not None and self.pr_beta1 is not None
        if has_pr != (self.classification == MIXED):
            raise ValueError("mixing probabilities must be present exactly for mixed points")


def _evaluate(scenario: Scenario) -> tuple[str, float | None, float | None]:
    if not validate_scenario(scenario).ok:
        return OUT_OF_DOMAIN, None, None
    try:
        pa, pb = simplified_probabilities(scenario)
    except DegenerateDenominator:
        return DEGENERATE, None, None
    lo, hi = ENDPOINT_SLACK, 1 - ENDPOINT_SLACK
    if lo < pa < hi and lo < pb < hi:
        return MIXED, pa, pb
    return PURE_ONLY, None, None


def classify_scenario(scenario: Scenario) -> str:
    """``mixed`` needs both players' closed-form probabilities strictly inside (0, 1).

    Mode and tied-cost violations raise, as for the closed form itself.
    """
    return _evaluate(scenario)[0]


def alice_feasible(scenario: Scenario) -> bool:
    """Only Alice's side of the mixing condition, read off the interval."""
    s = structural_deltas(scenario)
    return s.d_beta in feasibility_interval(scenario.costs.k, s.d_r_1star, s.d_r_2star)


@dataclass(frozen=True)
class Axis:
    path: str
    start: float
    end: float
    steps: int

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """``path:start:end:steps``, e.g. ``betas.1:0.3:0.9:7``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise InvalidSweep(f"axis {text!r} is not path:start:end:steps")
        path, start, end, steps = parts
        try:
            return cls(path, float(start), float(end), int(steps))
        except ValueError:
            raise InvalidSweep(f"axis {text!r} has a non-numeric bound or step count") from None

    def values(self) -> list[float]:
        return [float(v) for v in np.linspace(self.start, self.end, self.steps)]


@dataclass(frozen=True)
class SweepSpec:
    base: Scenario
    axes: tuple[Axis, ...]
    tie_ongoing_costs: bool = False

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))

    def check(self):
        if not 1 <= len(self.axes) <= 2:
            raise InvalidSweep(f"need 1 or 2 axes, got {len(self.axes)}")
        paths = [a.path for a in self.axes]
        if len(set(paths)) != len(paths):
            raise InvalidSweep(f"repeated axis path in {paths}")
        total = 1
        for a in self.axes:
            if a.steps < 2:
                raise InvalidSweep(f"axis {a.path}: need at least 2 steps")
            if not (math.isfinite(a.start) and math.isfinite(a.end)) or a.start == a.end:
                raise InvalidSweep(f"axis {a.path}: start and end must be finite and differ")
            try:
                self.base.get_param(a.path)
            except (KeyError, IndexError, ValueError):
                raise InvalidSweep(f"axis {a.path}: no such scenario parameter") from None
            total *= a.steps
        if total > MAX_GRID_POINTS:
            raise GridTooLarge(f"{total} grid points exceed the cap of {MAX_GRID_POINTS}")

    def scenario_at(self, coords: tuple[tuple[str, float], ...]) -> Scenario:
        s = self.base
        for path, value in coords:
            s = s.with_param(path, value)
        if self.tie_ongoing_costs:
            c = s.costs
            s = replace(s, costs=replace(c, o_att=c.k * c.r_att_plus, o_def=c.k * c.r_def_plus))
        return s


def _point(spec: SweepSpec, coords) -> RegionPoint:
    cls, pa, pb = _evaluate(spec.scenario_at(coords))
    return RegionPoint(coords, cls, pa, pb)


def scan(spec: SweepSpec, workers: int = 1) -> list[RegionPoint]:
    """Classify every grid point, first axis outermost.

    ``workers > 1`` evaluates points on a thread pool; the output order is
    the same either way.
    """
    spec.check()
    grids = [[(a.path, v) for v in a.values()] for a in spec.axes]
    coords = [tuple(c) for c in product(*grids)]
    if workers <= 1:
        return [_point(spec, c) for c in coords]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: _point(spec, c), coords, chunksize=64))


# --- export ---------------------------------------------------------------

def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def _axis_paths(points) -> list[str]:
    if not points:
        raise RegionError("no points to export")
    paths = [p for p, _ in points[0].coordinates]
    for pt in points:
        if [p for p, _ in pt.coordinates] != paths:
            raise HeterogeneousCoordinates("points do not share the same coordinate keys")
    return paths


def region_csv_text(points) -> str:
    paths = _axis_paths(points)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"axis:{p}" for p in paths] + ["pr_alpha1", "pr_beta1", "class"])
    for pt in points:
        w.writerow([_fmt(v) for _, v in pt.coordinates]
                   + [_fmt(pt.pr_alpha1), _fmt(pt.pr_beta1), pt.classification.replace("-", "_")])
    return buf.getvalue()


def export_region_csv(points, destination) -> None:
    """Write points as CSV to a path or an open text stream."""
    text = region_csv_text(points)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    Path(destination).write_text(text, encoding="utf-8", newline="")


def read_region_csv(source) -> list[RegionPoint]:
    text = source.read() if hasattr(source, "read") else Path(source).read_text(encoding="utf-8")
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    paths = [h[len("axis:"):] for h in header[:-3]]
    out = []
    for row in body:
        coords = tuple((p, float(v)) for p, v in zip(paths, row))
        pa, pb, cls = row[-3:]
        out.append(RegionPoint(coords, cls.replace("_", "-"),
                               float(pa) if pa else None, float(pb) if pb else None))
    return out


def region_svg_text(points, cell: int = 12) -> str:
    paths = _axis_paths(points)
    if len(paths) != 2:
        raise WrongAxisCount(f"SVG needs exactly 2 axes, got {len(paths)}")
    xs = sorted({pt.coordinates[0][1] for pt in points})
    ys = sorted({pt.coordinates[1][1] for pt in points})
    if len(points) != len(xs) * len(ys):
        raise RegionError("incomplete grid")
    xi = {v: k for k, v in enumerate(xs)}
    yi = {v: k for k, v in enumerate(ys)}

    margin_l, margin_b, margin_t, margin_r = 70, 50, 30, 20
    w, h = cell * len(xs), cell * len(ys)
    width, height = margin_l + w + margin_r, margin_t + h + margin_b
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        '<g stroke="none">',
    ]
    for pt in points:
        col = xi[pt.coordinates[0][1]]
        row = len(ys) - 1 - yi[pt.coordinates[1][1]]
        out.append(f'<rect class="{pt.classification}" x="{margin_l + col * cell}" '
                   f'y="{margin_t + row * cell}" width="{cell}" height="{cell}" '
                   f'fill="{PALETTE[pt.classification]}"/>')
    out.append("</g>")
    out.append(f'<rect x="{margin_l}" y="{margin_t}" width="{w}" height="{h}" '
               f'fill="none" stroke="#000000" stroke-width="1"/>')
    fs = 'font-family="sans-serif" font-size="11"'
    out += [
        f'<text x="{margin_l}" y="{margin_t + h + 15}" {fs}>{xs[0]:.6g}</text>',
        f'<text x="{margin_l + w}" y="{margin_t + h + 15}" {fs} text-anchor="end">{xs[-1]:.6g}</text>',
        f'<text x="{margin_l - 4}" y="{margin_t + h}" {fs} text-anchor="end">{ys[0]:.6g}</text>',
        f'<text x="{margin_l - 4}" y="{margin_t + 10}" {fs} text-anchor="end">{ys[-1]:.6g}</text>',
        f'<text x="{margin_l + w / 2:g}" y="{height - 12}" {fs} text-anchor="middle">{paths[0]}</text>',
        f'<text x="16" y="{margin_t + h / 2:g}" {fs} text-anchor="middle" '
        f'transform="rotate(-90 16 {margin_t + h / 2:g})">{paths[1]}</text>',
        "</svg>",
    ]
    return "\n".join(out) + "\n"


def render_region_svg(points, destination) -> None:
    text = region_svg_text(points)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    Path(destination).write_text(text, encoding="utf-8", newline="")
