import xml.etree.ElementTree as ET

import pytest

from followme.fsm import GuidancePhase as P
from followme.plot import distance_axis_max, render_plot, y_of
from followme.runner import TraceRecord, run
from followme.scenario import load_bundled_scenario

SVG_NS = "{http://www.w3.org/2000/svg}"


def record(tick, raw, filt, speed, phase=P.GUIDING):
    return TraceRecord(tick, tick * 0.05, raw, filt, speed, phase, True)


def elements_by_id(svg_text):
    root = ET.fromstring(svg_text)
    return {el.attrib["id"]: el for el in root.iter() if "id" in el.attrib}


def test_four_named_series_present():
    trace = [record(i, 1.5, 1.5, 0.5) for i in range(10)]
    ids = elements_by_id(render_plot(trace, d_des=2.0))
    assert {"raw", "ema", "speed", "threshold"} <= set(ids)


def test_legend_labels_fixed():
    trace = [record(i, 1.5, 1.5, 0.5) for i in range(10)]
    root = ET.fromstring(render_plot(trace))
    labels = {el.text for el in root.iter(f"{SVG_NS}text")}
    assert {"raw", "ema", "speed", "threshold"} <= labels


def test_no_valid_samples_gives_empty_distance_series():
    trace = [record(i, None, None, 0.5, P.AWAITING_GESTURE) for i in range(10)]
    ids = elements_by_id(render_plot(trace))
    assert ids["raw"].attrib["points"] == ""
    assert ids["ema"].attrib["points"] == ""
    assert len(ids["speed"].attrib["points"].split()) == 10


def test_threshold_line_position_matches_transform():
    trace = [record(i, 1.5, 1.5, 0.5) for i in range(10)]
    d_des = 2.0
    ids = elements_by_id(render_plot(trace, d_des=d_des))
    expected_y = y_of(d_des, distance_axis_max(trace, d_des))
    assert float(ids["threshold"].attrib["y1"]) == pytest.approx(expected_y, abs=1e-3)
    assert ids["threshold"].attrib["y1"] == ids["threshold"].attrib["y2"]


def test_empty_trace_is_a_usage_error():
    with pytest.raises(ValueError, match="empty"):
        render_plot([])


def test_real_run_renders_well_formed_svg():
    res = run(load_bundled_scenario("intermittent_lag"))
    svg = render_plot(res.trace, 2.0)
    root = ET.fromstring(svg)  # parses as XML
    assert root.tag == f"{SVG_NS}svg"
    assert svg == render_plot(res.trace, 2.0)  # deterministic bytes
