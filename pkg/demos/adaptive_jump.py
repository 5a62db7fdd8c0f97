"""Adaptive cycle on the peaked solution with a jumping coefficient.

The solution has a sharp peak at the origin and beta jumps by a factor of
100 across the boundary of (-0.5, 0.5)^2.  Each pass solves, estimates,
marks a Doerfler set and bisects it.  The DG error should decay like N^-1/2
once the peak is resolved, and the refinement should cluster at the origin
and along the coefficient interface.

Run:  python demos/adaptive_jump.py
"""
import numpy as np

from amipdg import StopCriteria, amipdg_loop, problem_ex2

hist = amipdg_loop(problem_ex2(), theta=0.5, kappa=50.0, stop=StopCriteria(max_dofs=40_000), M=8)

print(f"{'k':>3} {'N':>7} {'DG error':>12} {'eta':>12} {'sigma':>7}")
for r in hist.records:
    print(f"{r.k:>3} {r.N:>7} {r.dg_error:12.5e} {r.eta:12.5e} {r.sigma:7.3f}")
print(f"slope of ln(DG error) vs ln N over the last 5 steps: {hist.slope('dg_error'):.3f}")

c = hist.final_mesh.geometry.centroid
r = np.hypot(c[:, 0], c[:, 1])
interface = np.abs(np.maximum(np.abs(c[:, 0]), np.abs(c[:, 1])) - 0.5) < 0.05
print(f"elements within 0.1 of the origin: {np.mean(r < 0.1):.1%}")
print(f"elements within 0.05 of the interface: {np.mean(interface):.1%}")
