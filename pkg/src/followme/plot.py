"""Single-file SVG rendering of a run trace.

Three series against time: raw distance, smoothed distance, and robot speed,
plus a horizontal reference line at the stop threshold. Distances use the
left axis, speed the right one. Series elements carry fixed ids ("raw",
"ema", "speed", "threshold") and the legend uses the same labels, so the
document structure is machine-checkable. Output is deterministic: same
trace, same bytes.
"""

from __future__ import annotations

from .runner import TraceRecord

WIDTH = 960
HEIGHT = 480
MARGIN_LEFT = 64
MARGIN_RIGHT = 64
MARGIN_TOP = 24
MARGIN_BOTTOM = 48

PLOT_W = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
PLOT_H = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

SERIES_COLORS = {
    "raw": "#9ecae1",
    "ema": "#08519c",
    "speed": "#31a354",
    "threshold": "#de2d26",
}


def distance_axis_max(trace: list[TraceRecord], d_des: float) -> float:
    """Top of the left (distance) axis: 5% headroom over everything shown."""
    top = d_des
    for r in trace:
        if r.raw_distance_m is not None:
            top = max(top, r.raw_distance_m)
        if r.filtered_distance_m is not None:
            top = max(top, r.filtered_distance_m)
    return top * 1.05


def speed_axis_max(trace: list[TraceRecord]) -> float:
    top = max((r.robot_speed_mps for r in trace), default=0.0)
    return (top if top > 0.0 else 1.0) * 1.05


def x_of(t: float, t_end: float) -> float:
    frac = t / t_end if t_end > 0.0 else 0.0
    return MARGIN_LEFT + frac * PLOT_W


def y_of(value: float, axis_max: float) -> float:
    return MARGIN_TOP + (1.0 - value / axis_max) * PLOT_H


def _polyline(series_id: str, points: list[tuple[float, float]]) -> str:
    pts = " ".join(f"{x:.3f},{y:.3f}" for x, y in points)
    return (
        f'<polyline id="{series_id}" fill="none" '
        f'stroke="{SERIES_COLORS[series_id]}" stroke-width="1.5" points="{pts}"/>'
    )


def render_plot(trace: list[TraceRecord], d_des: float = 2.0) -> str:
    """Build the SVG document for a non-empty trace."""
    if not trace:
        raise ValueError("cannot plot an empty trace")
    t_end = trace[-1].time_s
    d_max = distance_axis_max(trace, d_des)
    v_max = speed_axis_max(trace)

    raw_pts = [
        (x_of(r.time_s, t_end), y_of(r.raw_distance_m, d_max))
        for r in trace
        if r.raw_distance_m is not None
    ]
    ema_pts = [
        (x_of(r.time_s, t_end), y_of(r.filtered_distance_m, d_max))
        for r in trace
        if r.filtered_distance_m is not None
    ]
    speed_pts = [(x_of(r.time_s, t_end), y_of(r.robot_speed_mps, v_max)) for r in trace]
    y_thr = y_of(d_des, d_max)

    x0, x1 = MARGIN_LEFT, MARGIN_LEFT + PLOT_W
    y0, y1 = MARGIN_TOP, MARGIN_TOP + PLOT_H
    legend_x = x1 - 150
    legend = []
    for i, name in enumerate(("raw", "ema", "speed", "threshold")):
        ly = y0 + 14 + 16 * i
        legend.append(
            f'<line x1="{legend_x}" y1="{ly - 4}" x2="{legend_x + 22}" y2="{ly - 4}" '
            f'stroke="{SERIES_COLORS[name]}" stroke-width="2"/>'
            f'<text x="{legend_x + 28}" y="{ly}" font-size="12" '
            f'font-family="sans-serif">{name}</text>'
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="{x0}" y="{y0}" width="{PLOT_W}" height="{PLOT_H}" '
        f'fill="white" stroke="#cccccc"/>',
        _polyline("raw", raw_pts),
        _polyline("ema", ema_pts),
        _polyline("speed", speed_pts),
        f'<line id="threshold" x1="{x0}" y1="{y_thr:.3f}" x2="{x1}" y2="{y_thr:.3f}" '
        f'stroke="{SERIES_COLORS["threshold"]}" stroke-width="1" stroke-dasharray="6,4"/>',
        f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 12}" font-size="12" '
        f'font-family="sans-serif" text-anchor="middle">time [s]</text>',
        f'<text x="16" y="{(y0 + y1) / 2:.1f}" font-size="12" font-family="sans-serif" '
        f'transform="rotate(-90 16 {(y0 + y1) / 2:.1f})" '
        f'text-anchor="middle">distance [m]</text>',
        f'<text x="{WIDTH - 16}" y="{(y0 + y1) / 2:.1f}" font-size="12" '
        f'font-family="sans-serif" transform="rotate(90 {WIDTH - 16} {(y0 + y1) / 2:.1f})" '
        f'text-anchor="middle">speed [m/s]</text>',
        *legend,
        "</svg>",
    ]
    return "\n".join(parts) + "\n"


def emit_plot(trace: list[TraceRecord], destination: str, d_des: float = 2.0) -> None:
    svg = render_plot(trace, d_des)
    try:
        with open(destination, "w", encoding="utf-8") as f:
            f.write(svg)
    except OSError as e:
        raise OSError(f"cannot write plot to {destination}: {e}") from e
