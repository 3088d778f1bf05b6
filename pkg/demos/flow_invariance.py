"""Check numerically that a subspace is flow-invariant for one system class and not another.

Run with ``python3 demos/flow_invariance.py``.
"""

from polydiag import certify_flow_invariance, load_fixture, parse_partition

net = load_fixture("fig1_three_cell")
P = parse_partition("1,1,2")
for cls in ("I_G0", "I_G"):
    rep = certify_flow_invariance(net, P, cls, trials=5, horizon=10, tol=1e-8)
    print(f"{cls:5s} on [{P}]: {'PASS' if rep.passed else 'FAIL'}  max residual {rep.max_residual:.2e}")
