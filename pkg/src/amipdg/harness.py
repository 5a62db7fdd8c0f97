"""Benchmark studies and the ``amipdg`` command line entry point.

Mesh sizes are given as ``h = 1/N`` in the convention of the reference
tables: the structured criss-cross mesh of a domain of width 2 then has
``M = 4 N`` cells per side (cell width ``h / 2``).
"""
import argparse
import csv
import dataclasses
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Tuple

from .adapt import DOFS_PER_ELEMENT, StopCriteria, amipdg_loop
from .assembly import assemble_aip
from .estimator import estimate
from .linalg import SolverConfig, SolverError, estimate_cond2, write_matrix_market
from .mesh import build_structured_mesh, write_mesh
from .problem import ProblemError
from .problems import get_problem
from .solve import solve_mixed

log = logging.getLogger(__name__)

PROBLEM_ALIASES = {
    "ex1": "ex1", "ex1-sinusoidal": "ex1",
    "ex2": "ex2", "ex2-jump": "ex2",
    "ex3": "ex3", "ex3-lshape": "ex3",
}
UNIFORM_FIELDS = ("kappa", "h", "M", "N", "dg_error", "dg_order", "eta", "eta_order", "sigma",
                  "l2_error", "cond")
EXIT_OK, EXIT_SOLVER, EXIT_CONFIG = 0, 2, 3


class ConfigError(ValueError):
    pass


def fmt(v):
    """Six significant digits in scientific notation; blank for missing values."""
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return f"{v:.5e}"


def mesh_size_to_cells(h):
    M = 4.0 / h
    if abs(M - round(M)) > 1e-9 or round(M) < 2:
        raise ConfigError(f"h = {h} does not give an integer number of cells")
    return int(round(M))


def parse_h(text):
    try:
        val = float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad mesh size {text!r}") from exc
    if val <= 0:
        raise ConfigError(f"mesh size must be positive, got {text!r}")
    return val


def _floats(text, what):
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad {what} list {text!r}") from exc


@dataclass
class ExperimentConfig:
    problem: str = "ex1"
    mode: str = "uniform"
    kappas: Tuple[float, ...] = (50.0,)
    thetas: Tuple[float, ...] = (0.5,)
    h_list: Tuple[float, ...] = (1 / 16, 1 / 32)
    M0: int = 8  # initial mesh of the adaptive runs
    max_dofs: int = 100_000
    tol: float = 0.0
    max_iterations: Optional[int] = None
    out: Optional[Path] = None
    tri_degree: Optional[int] = None
    edge_degree: Optional[int] = None
    cond_number: bool = False
    dump_mesh: bool = False
    dump_matrix: bool = False
    dump_estimator: bool = False
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.problem not in PROBLEM_ALIASES:
            raise ConfigError(f"unknown problem {self.problem!r}")
        self.problem = PROBLEM_ALIASES[self.problem]
        if self.mode not in ("uniform", "adaptive"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        self.kappas = tuple(float(k) for k in self.kappas)
        self.thetas = tuple(float(t) for t in self.thetas)
        if not self.kappas or any(not k > 0 for k in self.kappas):
            raise ConfigError("kappa must be positive")
        if self.mode == "uniform":
            if not self.h_list:
                raise ConfigError("uniform mode needs at least one mesh size")
            for h in self.h_list:
                mesh_size_to_cells(h)
        else:
            if len(self.kappas) != 1:
                raise ConfigError("adaptive mode takes a single kappa")
            if not self.thetas or any(not 0 < t < 1 for t in self.thetas):
                raise ConfigError("theta must lie in (0, 1)")
        if self.max_dofs <= 0:
            raise ConfigError("max_dofs must be positive")
        if self.tol < 0:
            raise ConfigError("tol must be non-negative")
        if self.out is not None:
            self.out = Path(self.out)

    def make_problem(self):
        pb = get_problem(self.problem)
        over = {}
        if self.tri_degree is not None:
            over["tri_degree"] = self.tri_degree
        if self.edge_degree is not None:
            over["edge_degree"] = self.edge_degree
        return dataclasses.replace(pb, **over) if over else pb

    def stop(self):
        return StopCriteria(tol=self.tol, max_dofs=self.max_dofs, max_iterations=self.max_iterations)


def _order(prev, cur):
    if prev is None or cur is None or prev <= 0 or cur <= 0:
        return "N/A"
    return math.log2(prev / cur)


def _out_path(cfg, name):
    if cfg.out is None:
        return None
    cfg.out.mkdir(parents=True, exist_ok=True)
    return cfg.out / name


def run_uniform_study(cfg):
    """One row per (kappa, h): errors, estimator, log2 orders and effectivity.

    Orders compare consecutive entries of ``h_list`` for the same kappa and
    are ``"N/A"`` on the first row of each kappa.
    """
    problem = cfg.make_problem()
    rows = []
    for kappa in cfg.kappas:
        prev = None
        for h in cfg.h_list:
            M = mesh_size_to_cells(h)
            mesh = build_structured_mesh(problem.domain, M)
            A = assemble_aip(mesh, problem, kappa)
            sol = solve_mixed(mesh, problem, kappa, cfg.solver, matrix=A)
            rep = estimate(mesh, sol.u, sol.p, problem, kappa)
            row = {
                "kappa": kappa, "h": h, "M": M, "N": DOFS_PER_ELEMENT * mesh.n_triangles,
                "dg_error": rep.dg_error, "eta": rep.eta, "sigma": rep.sigma,
                "l2_error": math.sqrt(rep.dg_parts["u"]) if rep.dg_parts else None,
                "cond": estimate_cond2(A, cfg.solver) if cfg.cond_number else None,
            }
            row["dg_order"] = "N/A" if prev is None else _order(prev["dg_error"], row["dg_error"])
            row["eta_order"] = "N/A" if prev is None else _order(prev["eta"], row["eta"])
            rows.append(row)
            prev = row
            tag = f"{problem.name}_k{kappa:g}_M{M}"
            if cfg.dump_mesh and cfg.out is not None:
                write_mesh(mesh, _out_path(cfg, f"mesh_{tag}.txt"))
            if cfg.dump_matrix and cfg.out is not None:
                write_matrix_market(A, _out_path(cfg, f"matrix_{tag}.mtx"))
            if cfg.dump_estimator and cfg.out is not None:
                rep.to_csv(_out_path(cfg, f"estimator_{tag}.csv"))
            log.info("kappa=%g M=%d eta=%.5e", kappa, M, rep.eta)
    path = _out_path(cfg, f"uniform_{problem.name}.csv")
    if path is not None:
        with open(path, "w", newline="") as fh:
            write_rows(fh, rows)
    return rows


def write_rows(stream, rows):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(UNIFORM_FIELDS)
    for r in rows:
        w.writerow([r[k] if k in ("M", "N") else fmt(r.get(k)) for k in UNIFORM_FIELDS])


def run_adaptive_study(cfg):
    """Adaptive cycle for every theta; returns ``{theta: (history, slope)}``.

    The slope is fitted over the last five iterations to ln(DG error)
    against ln N when an exact solution exists and to ln(eta) otherwise.
    """
    problem = cfg.make_problem()
    quantity = "dg_error" if problem.has_exact else "eta"
    kappa = cfg.kappas[0]
    results = {}
    for theta in cfg.thetas:
        hist = amipdg_loop(problem, theta, kappa, cfg.stop(), cfg.solver, M=cfg.M0)
        slope = hist.slope(quantity) if len(hist) >= 2 else None
        results[theta] = (hist, slope)
        tag = f"{problem.name}_theta{theta:g}"
        path = _out_path(cfg, f"adaptive_{tag}.csv")
        if path is not None:
            hist.to_csv(path)
            if cfg.dump_mesh:
                write_mesh(hist.final_mesh, _out_path(cfg, f"mesh_{tag}.txt"))
            if cfg.dump_estimator:
                hist.final_report.to_csv(_out_path(cfg, f"estimator_{tag}.csv"))
            if cfg.dump_matrix:
                A = assemble_aip(hist.final_mesh, problem, kappa)
                write_matrix_market(A, _out_path(cfg, f"matrix_{tag}.mtx"))
    path = _out_path(cfg, f"adaptive_{problem.name}_slopes.csv")
    if path is not None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("theta", "quantity", "slope", "iterations", "final_N"))
            for theta, (hist, slope) in results.items():
                w.writerow((f"{theta:g}", quantity, fmt(slope), len(hist), hist.records[-1].N))
    return results


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="amipdg", description="Mixed interior-penalty DG studies for curl-curl problems.")
    p.add_argument("--problem", default="ex1", help="ex1 | ex2 | ex3 (or ex1-sinusoidal, ...)")
    p.add_argument("--mode", default="uniform", choices=("uniform", "adaptive"))
    p.add_argument("--kappa", default="50", help="penalty; comma list for a uniform kappa sweep")
    p.add_argument("--theta", default="0.5", help="marking parameter(s), comma separated")
    p.add_argument("--h-list", default="1/16,1/32", help="mesh sizes such as 1/16,1/32")
    p.add_argument("--M0", type=int, default=8, help="cells per side of the initial adaptive mesh")
    p.add_argument("--max-dofs", type=int, default=100_000)
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--tol", type=float, default=0.0)
    p.add_argument("--out", default="amipdg_out")
    p.add_argument("--tri-degree", type=int, default=None)
    p.add_argument("--edge-degree", type=int, default=None)
    p.add_argument("--solver", default="direct", choices=("direct", "cholesky", "cg"))
    p.add_argument("--cond-number", action="store_true")
    p.add_argument("--dump-mesh", action="store_true")
    p.add_argument("--dump-matrix", action="store_true")
    p.add_argument("--dump-estimator", action="store_true")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args):
    return ExperimentConfig(
        problem=args.problem, mode=args.mode,
        kappas=tuple(_floats(args.kappa, "kappa")),
        thetas=tuple(_floats(args.theta, "theta")),
        h_list=tuple(parse_h(t) for t in args.h_list.split(",") if t.strip()),
        M0=args.M0, max_dofs=args.max_dofs, tol=args.tol, max_iterations=args.max_iterations,
        out=Path(args.out), tri_degree=args.tri_degree, edge_degree=args.edge_degree,
        cond_number=args.cond_number, dump_mesh=args.dump_mesh, dump_matrix=args.dump_matrix,
        dump_estimator=args.dump_estimator, solver=SolverConfig(method=args.solver),
    )


def _thread_limit():
    raw = os.environ.get("AMIPDG_THREADS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"AMIPDG_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"AMIPDG_THREADS must be a positive integer, got {raw!r}")
    return n


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        threads = _thread_limit()
    except (ConfigError, ProblemError, ValueError) as exc:
        print(f"amipdg: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    from threadpoolctl import threadpool_limits

    try:
        with threadpool_limits(limits=threads):
            if cfg.mode == "uniform":
                write_rows(sys.stdout, run_uniform_study(cfg))
            else:
                for theta, (hist, slope) in run_adaptive_study(cfg).items():
                    print(f"theta={theta:g} iterations={len(hist)} N={hist.records[-1].N} "
                          f"eta={fmt(hist.records[-1].eta)} slope={fmt(slope)}")
    except SolverError as exc:
        print(f"amipdg: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ConfigError, ProblemError) as exc:
        print(f"amipdg: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
