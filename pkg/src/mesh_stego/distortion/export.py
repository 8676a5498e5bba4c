import io
from typing import Optional

from mesh_stego.distortion.fpd import CostTable
from mesh_stego.mesh.io import format_fixed
from mesh_stego.quant.domain import CHANNELS

COSTMAP_COLUMNS = ("vertex", "channel", "step", "delta", "cost")


def costmap_text(table: CostTable, delimiter: str = ",", header: bool = True,
                 vertices: Optional[range] = None) -> str:
    """One row per (vertex, channel, step); cost printed with repr for exact re-reading."""
    out = io.StringIO()
    if header:
        out.write(f"# profile={table.profile} mu={table.mu!r} k_star={table.k_star}")
        for name, (lo, hi) in sorted(table.bounds.items()):
            out.write(f" {name}_min={lo!r} {name}_max={hi!r}")
        for key, value in sorted(table.metadata.items()):
            out.write(f" {key}={value!r}")
        out.write("\n")
        out.write(delimiter.join(COSTMAP_COLUMNS) + "\n")
    vertices = range(table.n_vertices) if vertices is None else vertices
    deltas = [format_fixed(int(s), table.k_star) for s in table.steps]
    for i in vertices:
        for j, name in enumerate(CHANNELS):
            for d, step in enumerate(table.steps):
                out.write(delimiter.join((str(i), name, str(int(step)), deltas[d],
                                          repr(float(table.costs[i, j, d])))) + "\n")
    return out.getvalue()


def parse_costmap(text: str, delimiter: str = ","):
    """Rows of (vertex, channel, step, cost) from costmap_text output."""
    rows = []
    for line in text.splitlines():
        if not line or line.startswith("#") or line.startswith(COSTMAP_COLUMNS[0]):
            continue
        vertex, channel, step, _, cost = line.split(delimiter)
        rows.append((int(vertex), channel, int(step), float(cost)))
    return rows
