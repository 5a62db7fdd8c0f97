"""Uniform refinement on the smooth example.

Solves the mixed problem on a sequence of criss-cross meshes, recovers p_h,
and prints the DG error, the estimator, their log2 orders and the
effectivity index.  Both errors should halve with h while sigma stays put.

Run:  python demos/uniform_convergence.py
"""
from amipdg.harness import ExperimentConfig, run_uniform_study

cfg = ExperimentConfig(problem="ex1", kappas=(50.0,), h_list=(1 / 4, 1 / 8, 1 / 16, 1 / 32))
rows = run_uniform_study(cfg)

print(f"{'h':>6} {'DoFs':>7} {'DG error':>12} {'order':>7} {'eta':>12} {'order':>7} {'sigma':>7}")
for r in rows:
    o1 = r["dg_order"] if isinstance(r["dg_order"], str) else f"{r['dg_order']:.4f}"
    o2 = r["eta_order"] if isinstance(r["eta_order"], str) else f"{r['eta_order']:.4f}"
    print(f"1/{round(1 / r['h']):<4} {r['N']:>7} {r['dg_error']:12.5e} {o1:>7} "
          f"{r['eta']:12.5e} {o2:>7} {r['sigma']:7.3f}")
