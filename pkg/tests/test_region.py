import io
import math
import re

import numpy as np
import pytest

from conftest import worked_scenario
from wmgame.equilibrium import AssumptionViolated, simplified_probabilities, structural_deltas
from wmgame.region import (
    DEGENERATE,
    MIXED,
    OUT_OF_DOMAIN,
    PALETTE,
    PURE_ONLY,
    Axis,
    GridTooLarge,
    HeterogeneousCoordinates,
    InvalidSweep,
    RegionError,
    RegionPoint,
    SweepSpec,
    WrongAxisCount,
    alice_feasible,
    classify_scenario,
    export_region_csv,
    feasibility_interval,
    read_region_csv,
    region_csv_text,
    region_svg_text,
    render_region_svg,
    scan,
)


def test_feasibility_interval_examples():
    iv = feasibility_interval(0.5, 0.5, 0.3)
    assert (iv.lower, iv.upper) == pytest.approx((-1.0, -0.6))
    assert iv.orientation == "d1-greater"
    assert -0.8 in iv and -0.6 not in iv and -1.0 not in iv
    assert feasibility_interval(1, 0.2, 0.2).empty
    assert -0.2 not in feasibility_interval(1, 0.2, 0.2)
    iv = feasibility_interval(2, 0.4, 0.1)
    assert (iv.lower, iv.upper) == pytest.approx((-0.2, -0.05))
    assert feasibility_interval(2, 0.1, 0.4).orientation == "d2-greater"
    with pytest.raises(RegionError, match="nonpositive-k"):
        feasibility_interval(0, 0.1, 0.4)


def test_feasibility_interval_matches_probability_scan():
    # interval membership vs. direct evaluation of Alice's mixing probability
    k, d1, d2 = 2.0, 0.4, 0.1
    iv = feasibility_interval(k, d1, d2)
    for db in np.linspace(-0.5, 0.2, 1401):
        pa = (k * db + d2) / (d2 - d1)
        inside = 0 < pa < 1
        if min(abs(db - iv.lower), abs(db - iv.upper)) > 1e-12:
            assert inside == (db in iv)


def test_classify_examples(worked):
    assert classify_scenario(worked) == MIXED
    assert classify_scenario(worked.with_param("betas.1", 0.2)) == PURE_ONLY
    pa, _ = simplified_probabilities(worked.with_param("betas.1", 0.2))
    assert pa == pytest.approx(-1.25)
    flat = worked
    for path in ("robustness.0.0", "robustness.0.1", "robustness.1.0", "robustness.1.1"):
        flat = flat.with_param(path, 0.5)
    assert classify_scenario(flat) == DEGENERATE
    assert classify_scenario(worked.with_param("betas.0", 0.95)) == OUT_OF_DOMAIN
    with pytest.raises(AssumptionViolated):
        classify_scenario(worked.with_costs(o_att=1.0))


def test_scan_one_axis_beta2(worked):
    pts = scan(SweepSpec(worked, [Axis("betas.1", 0.3, 0.9, 7)]))
    assert len(pts) == 7
    assert [p.coordinates[0][1] for p in pts] == pytest.approx([0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    assert [p.classification for p in pts] == [PURE_ONLY] * 5 + [MIXED] * 2
    iv = feasibility_interval(0.5, 0.5, 0.3)
    for p in pts:
        s = worked.with_param("betas.1", p.coordinates[0][1])
        d_beta = structural_deltas(s).d_beta
        if p.classification == MIXED:
            assert d_beta in iv
        # Alice-side membership agrees with the interval away from the boundary
        if abs(d_beta - iv.upper) > 1e-9:
            pa, _ = simplified_probabilities(s)
            assert (0 < pa < 1) == (d_beta in iv) == alice_feasible(s)


def test_scan_two_axes_matches_sign_analysis(worked):
    spec = SweepSpec(worked, [Axis("betas.1", 0.15, 1.0, 50), Axis("robustness.1.1", 0.0, 1.0, 50)])
    pts = scan(spec)
    assert len(pts) == 2500
    counts = {c: sum(p.classification == c for p in pts) for c in (MIXED, PURE_ONLY, DEGENERATE, OUT_OF_DOMAIN)}
    assert counts[MIXED] > 0 and counts[PURE_ONLY] > 0
    for p in pts:
        s = spec.scenario_at(p.coordinates)
        d = structural_deltas(s)
        iv = feasibility_interval(s.costs.k, d.d_r_1star, d.d_r_2star)
        if p.classification == MIXED:
            assert d.d_beta in iv
            assert 0 < p.pr_alpha1 < 1 and 0 < p.pr_beta1 < 1
        elif p.classification == PURE_ONLY and not iv.empty:
            near = min(abs(d.d_beta - iv.lower), abs(d.d_beta - iv.upper)) <= 1e-9
            pa, pb = simplified_probabilities(s)
            if d.d_beta in iv and not near:
                assert not 0 < pb < 1  # excluded by Bob's side only


def test_scan_out_of_domain_points_are_kept(worked):
    pts = scan(SweepSpec(worked, [Axis("betas.1", 0.0, 0.9, 10)]))
    assert len(pts) == 10
    assert pts[0].classification == OUT_OF_DOMAIN and pts[1].classification == OUT_OF_DOMAIN


def test_scan_spec_guards(worked):
    with pytest.raises(InvalidSweep):
        scan(SweepSpec(worked, [Axis("betas.1", 0.5, 0.5, 3)]))
    with pytest.raises(InvalidSweep):
        scan(SweepSpec(worked, [Axis("betas.1", 0.2, 0.5, 1)]))
    with pytest.raises(InvalidSweep):
        scan(SweepSpec(worked, [Axis("betas.1", 0.2, 0.5, 3), Axis("betas.1", 0.2, 0.6, 3)]))
    with pytest.raises(InvalidSweep):
        scan(SweepSpec(worked, [Axis("betas.7", 0.2, 0.5, 3)]))
    with pytest.raises(InvalidSweep):
        scan(SweepSpec(worked, []))
    with pytest.raises(GridTooLarge):
        scan(SweepSpec(worked, [Axis("betas.1", 0.2, 0.5, 1001), Axis("costs.k", 0.1, 1, 1000)]))
    with pytest.raises(InvalidSweep):
        Axis.parse("betas.1:0.2:0.5")
    assert Axis.parse("robustness.1.1:-0.5:1e-1:4") == Axis("robustness.1.1", -0.5, 0.1, 4)


def test_scan_tie_ongoing_costs(worked):
    spec = SweepSpec(worked, [Axis("costs.k", 0.2, 0.8, 4)])
    with pytest.raises(AssumptionViolated):
        scan(spec)
    pts = scan(SweepSpec(worked, [Axis("costs.k", 0.2, 0.8, 4)], tie_ongoing_costs=True))
    assert len(pts) == 4


def test_scan_parallel_matches_serial(worked):
    spec = SweepSpec(worked, [Axis("betas.1", 0.15, 1.0, 30), Axis("robustness.1.1", 0.0, 1.0, 30)])
    assert scan(spec, workers=1) == scan(spec, workers=8) == scan(spec)


def _pt(coords, cls, pa=None, pb=None):
    return RegionPoint(tuple(coords), cls, pa, pb)


def test_export_csv_examples(tmp_path):
    mixed = _pt([("betas.1", 0.9)], MIXED, 0.5, 0.49999999999999994)
    dest = tmp_path / "one.csv"
    export_region_csv([mixed], dest)
    lines = dest.read_text(encoding="utf-8").splitlines()
    assert lines == ["axis:betas.1,pr_alpha1,pr_beta1,class", "0.9,0.5,0.49999999999999994,mixed"]
    pure = _pt([("betas.1", 0.3)], PURE_ONLY)
    assert region_csv_text([pure]).splitlines()[1] == "0.3,,,pure_only"
    export_region_csv([mixed, pure], tmp_path / "a.csv")
    export_region_csv([mixed, pure], tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    with pytest.raises(HeterogeneousCoordinates):
        region_csv_text([mixed, _pt([("costs.k", 0.3)], PURE_ONLY)])


def test_export_csv_round_trip(worked):
    pts = scan(SweepSpec(worked, [Axis("betas.1", 0.15, 1.0, 20), Axis("robustness.1.1", 0.0, 1.0, 20)]))
    buf = io.StringIO()
    export_region_csv(pts, buf)
    assert read_region_csv(io.StringIO(buf.getvalue())) == pts


def test_region_point_invariant():
    with pytest.raises(ValueError):
        _pt([("costs.k", 0.1)], PURE_ONLY, 0.5, 0.5)
    with pytest.raises(ValueError):
        _pt([("costs.k", 0.1)], MIXED)


def _grid(classes):
    (a, b), (c, d) = classes
    return [_pt([("x", 0.0), ("y", 0.0)], a, *([0.5, 0.5] if a == MIXED else [])),
            _pt([("x", 0.0), ("y", 1.0)], b, *([0.5, 0.5] if b == MIXED else [])),
            _pt([("x", 1.0), ("y", 0.0)], c, *([0.5, 0.5] if c == MIXED else [])),
            _pt([("x", 1.0), ("y", 1.0)], d, *([0.5, 0.5] if d == MIXED else []))]


def _cells(svg):
    return re.findall(r'<rect class="([a-z-]+)"[^>]*fill="(#[0-9a-f]{6})"', svg)


def test_svg_examples(tmp_path):
    svg = region_svg_text(_grid([[MIXED, MIXED], [MIXED, MIXED]]))
    assert _cells(svg) == [(MIXED, PALETTE[MIXED])] * 4
    assert "http://www.w3.org/2000/svg" in svg and "href" not in svg
    assert ">x<" in svg and ">y<" in svg
    svg = region_svg_text(_grid([[MIXED, PURE_ONLY], [MIXED, PURE_ONLY]]))
    assert {fill for _, fill in _cells(svg)} == {PALETTE[MIXED], PALETTE[PURE_ONLY]}
    with pytest.raises(WrongAxisCount):
        region_svg_text([_pt([("x", 0.0)], PURE_ONLY)])
    render_region_svg(_grid([[MIXED, DEGENERATE], [OUT_OF_DOMAIN, PURE_ONLY]]), tmp_path / "a.svg")
    render_region_svg(_grid([[MIXED, DEGENERATE], [OUT_OF_DOMAIN, PURE_ONLY]]), tmp_path / "b.svg")
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


def test_svg_rejects_incomplete_grid():
    with pytest.raises(RegionError):
        region_svg_text(_grid([[MIXED, MIXED], [MIXED, MIXED]])[:3])


def test_interval_is_nan_when_degenerate():
    iv = feasibility_interval(1.0, 0.3, 0.3)
    assert math.isnan(iv.lower) and math.isnan(iv.upper)
