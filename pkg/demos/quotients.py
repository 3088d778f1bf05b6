"""Build quotient networks and compare the reduced flow with the full one.

Run with ``python3 demos/quotients.py``.
"""

from polydiag import load_fixture, parse_partition, quotient, quotient_to_dot, restriction_consistency

cases = [
    ("f_um", "1,1,1,2,2,3", "exo", "I_G0"),
    ("odd3cell", "1,-1,-1", "odd_symbolic", "I_Godd"),
    ("linear_i", "1,1,2,-1,-1,-2", "linear_symbolic", "I_Gl"),
]
for name, labels, kind, cls in cases:
    net = load_fixture(name)
    P = parse_partition(labels, net.n)
    Qn = quotient(net, P, kind)
    print(f"{name} [{P}] {kind}: edges {[(s, t, str(w)) for s, t, w in Qn.edges()]}")
    rep = restriction_consistency(net, P, cls)
    print(f"  full vs reduced flow, max deviation {rep.max_deviation:.1e}")
print(quotient_to_dot(quotient(load_fixture("f_um"), parse_partition("1,1,1,2,2,3"), "exo")))
