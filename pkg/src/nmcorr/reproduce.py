"""CSV output and figure reproduction.

All numbers are written with 12 significant digits using Python's own
float formatting, which never depends on the locale.
"""
from __future__ import annotations

import io
from typing import Iterable, Mapping

from .channels import DynamicalMap
from .nonmarkov import (
    Region,
    TimeGrid,
    Trajectory,
    detect_regions,
    trajectories,
)
from .qlinalg import PureState
from .states import bell_state, witness_state

CSV_COLUMNS = ("eof", "mi", "j_ae", "delta_ae", "i_ae")
CSV_HEADER = "t," + ",".join(CSV_COLUMNS)

FIGURES = {
    "fig1": ("bell", "eof", "Entanglement of formation"),
    "fig2": ("witness", "mi", "Mutual information I_SA"),
    "fig3": ("witness", "j_ae,delta_ae,i_ae", "Accessible, inaccessible and total A-E information"),
}


def fmt(x: float) -> str:
    # + 0.0 folds -0.0 into 0.0
    return format(float(x) + 0.0, ".12g")


def csv_text(trajs: Mapping[str, Trajectory]) -> str:
    first = trajs[CSV_COLUMNS[0]]
    cols = [first.times] + [trajs[c].values for c in CSV_COLUMNS]
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for row in zip(*cols):
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def regions_text(regions: Iterable[Region]) -> str:
    lines = ["label,t_start,t_end,dj_sign,ddelta_sign,di_sign"]
    for r in regions:
        lines.append(",".join([r.label, fmt(r.t_start), fmt(r.t_end)] + [str(s) for s in r.signs]))
    return "\n".join(lines) + "\n"


def gnuplot_text(csv_name: str, columns: str, title: str) -> str:
    index = {c: i + 2 for i, c in enumerate(CSV_COLUMNS)}
    plots = ", \\\n     ".join(
        f"'{csv_name}' using 1:{index[c]} with lines title '{c}'" for c in columns.split(",")
    )
    return (
        "set datafile separator ','\n"
        f"set title '{title}'\n"
        "set xlabel 't'\n"
        "set key top right\n"
        f"plot {plots}\n"
    )


def all_trajectories(dmap: DynamicalMap, psi0: PureState, grid: TimeGrid) -> dict[str, Trajectory]:
    return trajectories(dmap, psi0, grid, CSV_COLUMNS)


def figure_state(fig: str) -> PureState:
    return bell_state() if FIGURES[fig][0] == "bell" else witness_state()


def figure_regions(trajs: Mapping[str, Trajectory]) -> list[Region]:
    t = trajs["j_ae"].times
    return detect_regions(t, trajs["j_ae"].values, trajs["delta_ae"].values, trajs["i_ae"].values)
