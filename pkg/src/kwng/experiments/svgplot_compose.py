"""Helper to place several charts side by side in one SVG document."""

from . import svgplot


def compose_horizontal(svg_texts):
    """Nest chart documents horizontally inside a single root SVG."""
    n = len(svg_texts)
    total_w = svgplot.WIDTH * n
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" '
        f'height="{svgplot.HEIGHT}" viewBox="0 0 {total_w} {svgplot.HEIGHT}">'
    ]
    for i, text in enumerate(svg_texts):
        inner = text.replace(
            '<svg xmlns="http://www.w3.org/2000/svg"',
            f'<svg x="{i * svgplot.WIDTH}"',
            1,
        )
        parts.append(inner)
    parts.append("</svg>")
    return "\n".join(parts)
