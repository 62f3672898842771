"""Command line front end.

    nmcorr trajectory --state paper --out traj.csv
    nmcorr measure both
    nmcorr reproduce fig3 --out figs/
    nmcorr check

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines, then command-line flags, each layer overriding the
previous one.

Exit status: 0 on success, 1 on usage or configuration errors, 2 when a
numerical invariant is violated.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path


from . import reproduce
from ._backend import BACKEND
from .channels import CPTP_TOL, GadMap, GadParams
from .errors import InvariantViolation, NmcorrError
from .nonmarkov import TimeGrid, check_factorization, cptp_deviation, n_e, n_i, positive_variation, trajectory
from .states import bell_state, witness_state, spin_state

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
FACTORIZATION_TOL = 1e-8


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    channel: str = "gad"
    omega: float = 5.0
    t_c: float = 0.25
    t_end: float = 1.0
    steps: int = 4000
    state: str = "bell"
    a: float | None = None
    b: float | None = None
    c: float | None = None
    seed: int = 42
    output_path: str | None = None
    samples: int = 512
    refine_iters: int = 100

    def validate(self) -> "RunConfig":
        if self.channel != "gad":
            raise UsageError(f"unknown channel {self.channel!r}")
        if self.steps < 2:
            raise UsageError("steps must be at least 2")
        if not self.t_end > 0:
            raise UsageError("t-end must be positive")
        if not (self.t_c >= 0 and math.isfinite(self.t_c)) or not math.isfinite(self.omega):
            raise UsageError("tc must be nonnegative and omega finite")
        if self.state not in ("bell", "paper", "custom"):
            raise UsageError(f"unknown state {self.state!r}")
        if self.state == "custom":
            if None in (self.a, self.b, self.c):
                raise UsageError("custom state needs --a, --b and --c")
            if self.a ** 2 + self.b ** 2 + self.c ** 2 > 1 + 1e-12:
                raise UsageError("custom state needs a^2 + b^2 + c^2 <= 1")
        if self.samples < 1 or self.refine_iters < 0:
            raise UsageError("samples must be >= 1 and refine-iters >= 0")
        return self

    def dmap(self) -> GadMap:
        return GadMap(GadParams(self.omega, self.t_c))

    def grid(self) -> TimeGrid:
        return TimeGrid(0.0, self.t_end, self.steps)

    def initial_state(self):
        if self.state == "bell":
            return bell_state()
        if self.state == "paper":
            return witness_state()
        return spin_state(self.a, self.b, self.c)


# config-file keys and flag dests mapped onto RunConfig fields
KEYS = {
    "channel": "channel", "omega": "omega", "tc": "t_c", "t_c": "t_c",
    "t_end": "t_end", "steps": "steps", "state": "state",
    "a": "a", "b": "b", "c": "c", "seed": "seed", "out": "output_path",
    "output_path": "output_path", "samples": "samples", "refine_iters": "refine_iters",
}
TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(field_name: str, raw: str):
    kind = TYPES[field_name]
    try:
        if kind == "int":
            return int(raw)
        if kind in ("float", "float | None"):
            return float(raw)
    except ValueError:
        raise UsageError(f"bad value {raw!r} for {field_name}") from None
    return raw


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file (UTF-8, ``#`` starts a comment)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        name = KEYS.get(key.replace("-", "_"))
        if name is None:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        out[name] = _convert(name, value)
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(read_config(args.config))
    for dest, name in KEYS.items():
        v = getattr(args, dest, None)
        if v is not None:
            values[name] = v
    return replace(RunConfig(), **values).validate()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--channel", choices=["gad"])
    p.add_argument("--omega", type=float)
    p.add_argument("--tc", type=float, help="decoherence cutoff time")
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--state", choices=["bell", "paper", "custom"])
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nmcorr", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("trajectory", help="write the correlation trajectories as CSV")
    _common(p)
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = sub.add_parser("measure", help="compute N_E and/or N_I")
    _common(p)
    p.add_argument("which", nargs="?", choices=["ne", "ni", "both"], default="both")
    p.add_argument("--samples", type=int, help="random initial states for N_I")
    p.add_argument("--refine-iters", dest="refine_iters", type=int)
    p.add_argument("--out", help="optional CSV of N_I search candidates")

    p = sub.add_parser("reproduce", help="write the data behind a figure")
    _common(p)
    p.add_argument("figure", choices=sorted(reproduce.FIGURES))
    p.add_argument("--out", help="output directory (default: current)")

    p = sub.add_parser("check", help="CPTP and concurrence factorization checks")
    _common(p)
    p.add_argument("--samples", type=int, help="random states for the factorization check")
    return parser


def _write(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


def cmd_trajectory(cfg: RunConfig, gnuplot: bool = False) -> int:
    trajs = reproduce.all_trajectories(cfg.dmap(), cfg.initial_state(), cfg.grid())
    text = reproduce.csv_text(trajs)
    if cfg.output_path in (None, "-"):
        sys.stdout.write(text)
        return EXIT_OK
    path = Path(cfg.output_path)
    _write(path, text)
    if gnuplot:
        _write(path.with_suffix(".gp"), reproduce.gnuplot_text(path.name, ",".join(reproduce.CSV_COLUMNS), "Trajectories"))
    return EXIT_OK


def _amps(state) -> str:
    return " ".join(f"{reproduce.fmt(z.real)}{'+' if z.imag >= 0 else '-'}{reproduce.fmt(abs(z.imag))}j" for z in state.amps)


def cmd_measure(cfg: RunConfig, which: str = "both") -> int:
    dmap, grid = cfg.dmap(), cfg.grid()
    print(f"channel: gad omega={reproduce.fmt(cfg.omega)} t_c={reproduce.fmt(cfg.t_c)}")
    print(f"grid: [0, {reproduce.fmt(cfg.t_end)}] steps={cfg.steps} backend={BACKEND}")
    if which in ("ne", "both"):
        r = n_e(dmap, grid)
        print(f"N_E = {reproduce.fmt(r.value)}")
        print(f"  optimal_state = {_amps(r.optimal_state)}")
        print(f"  grid_steps = {r.grid_used.steps} converged = {str(r.converged).lower()}")
    if which in ("ni", "both"):
        r = n_i(dmap, grid, n_samples=cfg.samples, seed=cfg.seed, refine_iters=cfg.refine_iters)
        print(f"N_I = {reproduce.fmt(r.value)}")
        print(f"  optimal_state = {_amps(r.optimal_state)}")
        print(f"  grid_steps = {r.grid_used.steps} converged = {str(r.converged).lower()}")
        witness = positive_variation(
            trajectory(dmap, witness_state(), grid, "mi"))
        print(f"  witness_mi_variation = {reproduce.fmt(witness)}")
        if cfg.output_path not in (None, "-"):
            lines = ["index,mi_variation,re0,im0,re1,im1,re2,im2,re3,im3"]
            for idx, score, amps in r.candidates:
                parts = [str(idx), reproduce.fmt(score)]
                for z in amps:
                    parts += [reproduce.fmt(z.real), reproduce.fmt(z.imag)]
                lines.append(",".join(parts))
            _write(Path(cfg.output_path), "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_reproduce(cfg: RunConfig, figure: str, gnuplot: bool = False) -> int:
    out_dir = Path(cfg.output_path or ".")
    _, columns, title = reproduce.FIGURES[figure]
    trajs = reproduce.all_trajectories(cfg.dmap(), reproduce.figure_state(figure), cfg.grid())
    csv_path = out_dir / f"{figure}.csv"
    _write(csv_path, reproduce.csv_text(trajs))
    print(f"wrote {csv_path}")
    if figure == "fig3":
        regions = reproduce.figure_regions(trajs)
        reg_path = out_dir / "fig3_regions.csv"
        _write(reg_path, reproduce.regions_text(regions))
        print(f"wrote {reg_path}")
        for r in regions:
            print(f"  {r.label:5s} [{reproduce.fmt(r.t_start)}, {reproduce.fmt(r.t_end)}] signs={r.signs}")
    if gnuplot:
        gp = out_dir / f"{figure}.gp"
        _write(gp, reproduce.gnuplot_text(csv_path.name, columns, title))
        print(f"wrote {gp}")
    return EXIT_OK


def cmd_check(cfg: RunConfig, n_states: int = 100) -> int:
    dmap, grid = cfg.dmap(), cfg.grid()
    dev = cptp_deviation(dmap, grid.times)
    res = check_factorization(dmap, grid, n_states=n_states, seed=cfg.seed)
    print(f"cptp_max_deviation = {dev:.3e} (tolerance {CPTP_TOL:.0e})")
    print(f"factorization_max_residual = {res:.3e} (tolerance {FACTORIZATION_TOL:.0e}, {n_states} states)")
    if dev > CPTP_TOL:
        raise InvariantViolation(f"Kraus completeness violated by {dev:.3e}")
    if res > FACTORIZATION_TOL:
        raise InvariantViolation(f"concurrence factorization violated by {res:.3e}")
    print("ok")
    return EXIT_OK


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "trajectory":
            return cmd_trajectory(cfg, args.gnuplot)
        if args.command == "measure":
            return cmd_measure(cfg, args.which)
        if args.command == "reproduce":
            return cmd_reproduce(cfg, args.figure, args.gnuplot)
        if args.command == "check":
            return cmd_check(cfg, n_states=args.samples or 100)
    except UsageError as exc:
        print(f"nmcorr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"nmcorr: invariant violated: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except NmcorrError as exc:
        print(f"nmcorr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    parser.error(f"unknown command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
