"""Acceptance criteria 1 to 9.

Each test prints one ``ACCEPTANCE <k> ... PASS|FAIL`` line and asserts the
criterion at its stated tolerance. The lines are also repeated in the pytest
terminal summary (see ``conftest.py``). Run this file alone with::

    pytest tests/test_acceptance.py -v
"""

import io
import json
import time
from contextlib import redirect_stdout

import numpy as np

from polydiag import (
    Network,
    SystemClass,
    certify_flow_invariance,
    classify,
    is_regular,
    lattice_bruteforce,
    lattice_eigen,
    linear_span_check,
    load_fixture,
    parse_partition,
    restriction_consistency,
    synchrony_antisynchrony_report,
)
from polydiag.cli import main as cli_main
from polydiag.core import rational_matrix
from polydiag.fixtures import fixture_path
from polydiag.invariance import check_block_conditions_L_via_W, check_block_conditions_W, leaves_invariant
from polydiag.quotient import quotient_exo, quotient_linear_symbolic, quotient_odd_symbolic

from conftest import QUTRO
from matrices import any_matrix, random_cases, real_spectrum_matrix, regular_matrix

RESULTS: list[str] = []


def report(k: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE {k} {title}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    RESULTS.append(line)
    print(line)


def _names(parts):
    inv = {parse_partition(v, 4).labels: k for k, v in QUTRO.items()}
    return {inv.get(P.labels, str(P)) for P in parts}


# -- 1 ---------------------------------------------------------------------------

EXPECTED_W = {f"P{i}" for i in range(1, 10)} | {"full", "null"}
EXPECTED_L = {f"P{i}" for i in (1, 2, 5, 6, 7, 8, 9, 10, 11, 12, 13)} | {"full", "null"}
# per system class: the non-trivial synchrony (standard) or anti-synchrony
# (non-standard) subspaces of the four-cell example
EXPECTED_ITEMS = {
    "synchrony strict": (("I_G", "I_Geo"), True, {"P6", "P8"}),
    "synchrony weak": (("I_G0", "I_Godd", "I_Gl"), True, {"P6", "P8", "P10", "P12", "P13"}),
    "anti-synchrony odd": (("I_Godd",), False, {"P1", "P2", "P5", "P7", "P9"}),
    "anti-synchrony linear": (("I_Gl",), False, {"P1", "P2", "P5", "P7", "P9", "P11"}),
    "anti-synchrony eo": (("I_Geo",), False, {"P1", "P2", "P3", "P4", "P5", "P7", "P9"}),
}


def test_acceptance_1_four_cell_lattice():
    path = str(fixture_path("ex_qutro"))
    argv = ["lattice", "--network", path, "--matrix", "both", "--method", "brute", "--out", "json"]
    cli_main(argv)  # warm the compiled kernels
    buf = io.StringIO()
    t0 = time.perf_counter()
    with redirect_stdout(buf):
        code = cli_main(argv)
    elapsed = time.perf_counter() - t0
    out = json.loads(buf.getvalue())
    got = {t: _names(parse_partition(",".join(map(str, e["labels"])), 4) for e in out["lattices"][t]["elements"])
           for t in ("W", "L")}

    net = load_fixture("ex_qutro")
    rows = synchrony_antisynchrony_report(net, "brute").rows
    problems = []
    if got["W"] != EXPECTED_W:
        problems.append(f"|L_W|={len(got['W'])}, extra {sorted(got['W'] - EXPECTED_W)}, "
                        f"missing {sorted(EXPECTED_W - got['W'])}")
    if got["L"] != EXPECTED_L:
        problems.append(f"|L_L|={len(got['L'])}, extra {sorted(got['L'] - EXPECTED_L)}, "
                        f"missing {sorted(EXPECTED_L - got['L'])}")
    for item, (classes, standard, want) in EXPECTED_ITEMS.items():
        for c in classes:
            have = _names(r["partition"] for r in rows
                          if r["partition"].is_standard == standard
                          and not r["partition"].is_null and r["partition"].p < 4
                          and SystemClass(c) in r["flags"].preserving)
            if have != want:
                problems.append(f"{item} {c}: extra {sorted(have - want)}, missing {sorted(want - have)}")
    if elapsed >= 1.0:
        problems.append(f"runtime {elapsed:.2f}s")
    ok = code == 0 and not problems
    report(1, "four-cell lattice reproduction", ok,
           f"{elapsed:.3f}s; " + ("; ".join(problems) if problems else "exact match"))
    assert ok, problems


# -- 2 ---------------------------------------------------------------------------


def test_acceptance_2_eigen_brute_agreement():
    t0 = time.perf_counter()
    net = load_fixture("ex_qutro")
    bad = []
    for tag, M in (("W", net.W), ("L", net.L)):
        if lattice_eigen(M, tag=tag).elements != lattice_bruteforce(M, tag=tag).elements:
            bad.append(f"four-cell {tag}")
    rng = np.random.default_rng(2024)
    for k in range(100):
        n = int(rng.integers(1, 6))
        M = rational_matrix(real_spectrum_matrix(rng, n))
        if lattice_eigen(M).elements != lattice_bruteforce(M).elements:
            bad.append(f"random #{k}")
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 60
    report(2, "eigen/brute agreement", ok, f"102 matrices, {len(bad)} disagreements, {elapsed:.1f}s")
    assert ok, bad


# -- 3 ---------------------------------------------------------------------------

FIXTURE_FLAGS = [
    ("ex_notequal", "1,1,-1,-1", dict(invariant_under_W=True, invariant_under_L=False)),
    ("five_cell", "1,2,2,-1,0", dict(invariant_under_W=True)),
    ("linear_i", "1,1,2,-1,-1,-2", dict(linear_balanced=True, odd_balanced=False)),
    ("linear_ii", "1,1,-1,-1,0,0", dict(linear_balanced=True, odd_balanced=False)),
    ("odd_eo_path", "1,0,-1,-1,0,1", dict(odd_balanced=True, even_odd_balanced=False)),
    ("eo_odd", "1,1,2,2,-1,-1,-2,-2", dict(even_odd_balanced=True, odd_balanced=False)),
    ("odd_dif_num", "1,-1,-1,0", dict(odd_balanced=True)),
]


def test_acceptance_3_invariance_fixtures():
    bad = []
    for name, labels, flags in FIXTURE_FLAGS:
        P = parse_partition(labels)
        f = classify(load_fixture(name), P)
        bad += [f"{name}.{k}" for k, v in flags.items() if getattr(f, k) is not v]
    P = parse_partition("1,-1,-1,0")
    if len(P.part(1)) == len(P.counterpart(1)):
        bad.append("odd_dif_num part sizes equal")
    ok = not bad
    report(3, "invariance fixtures", ok, f"{len(FIXTURE_FLAGS)} fixtures" + (f", wrong: {bad}" if bad else ""))
    assert ok, bad


# -- 4 ---------------------------------------------------------------------------


def test_acceptance_4_oracle_equivalence():
    cases = random_cases(520, 4040)
    bad = 0
    for net, P in cases:
        w, l_inv = leaves_invariant(net.W, P), leaves_invariant(net.L, P)
        bad += check_block_conditions_W(net, P).passed != w
        bad += check_block_conditions_L_via_W(net, P).passed != l_inv
    ok = bad == 0 and len(cases) >= 500
    report(4, "block conditions vs basis invariance", ok, f"{len(cases)} pairs, {bad} mismatches")
    assert ok


# -- 5 ---------------------------------------------------------------------------


def test_acceptance_5_regularity_dichotomy():
    rng = np.random.default_rng(55)
    bad = []
    for k in range(50):
        n = int(rng.integers(2, 6))
        net = Network(rational_matrix(regular_matrix(rng, n)))
        assert is_regular(net.W) is not None
        if set(lattice_bruteforce(net.W).elements) != set(lattice_bruteforce(net.L).elements):
            bad.append(f"regular #{k}")
    k = 0
    while k < 50:
        n = int(rng.integers(2, 6))
        net = Network(rational_matrix(any_matrix(rng, n)))
        if is_regular(net.W) is not None:
            continue
        sw = {P for P in lattice_bruteforce(net.W).elements if P.is_standard}
        sl = {P for P in lattice_bruteforce(net.L).elements if P.is_standard}
        if not sw < sl:
            bad.append(f"non-regular #{k}")
        k += 1
    ok = not bad
    report(5, "regularity dichotomy", ok, f"50 regular + 50 non-regular, {len(bad)} violations")
    assert ok, bad


# -- 6 ---------------------------------------------------------------------------

NEGATIVE = [
    ("ex_qutro", QUTRO["P11"], "I_Godd"),
    ("fig1_three_cell", "1,1,2", "I_G"),
    ("ex_qutro", QUTRO["P3"], "I_Gl"),
    ("ex_qutro", QUTRO["P11"], "I_Geo"),
    ("ex_qutro", QUTRO["P10"], "I_G"),
]


def test_acceptance_6_flow_certification():
    t0 = time.perf_counter()
    net = load_fixture("ex_qutro")
    rows = synchrony_antisynchrony_report(net, "brute").rows
    pos_bad, pairs, worst = [], 0, 0.0
    for r in rows:
        for c in r["flags"].preserving:
            rep = certify_flow_invariance(net, r["partition"], c, trials=5, horizon=10, tol=1e-8, dt=1e-3)
            pairs += 1
            worst = max(worst, rep.max_residual)
            if not rep.passed:
                pos_bad.append(f"[{r['partition']}] {c.value}")
    neg_bad = []
    for name, labels, c in NEGATIVE:
        g = load_fixture(name)
        rep = certify_flow_invariance(g, parse_partition(labels, g.n), c, trials=20, horizon=10,
                                      tol=1e-3, dt=1e-3)
        if not any(t.residual > 1e-3 and not t.blew_up for t in rep.trials):
            neg_bad.append(f"[{labels}] {c} max {rep.max_residual:.1e}")
    elapsed = time.perf_counter() - t0
    ok = not pos_bad and not neg_bad and elapsed < 120
    detail = (f"{pairs} positive pairs, worst residual {worst:.1e}; "
              f"{len(NEGATIVE) - len(neg_bad)}/{len(NEGATIVE)} negative pairs separated; {elapsed:.0f}s")
    if pos_bad:
        detail += f"; positive failures {pos_bad}"
    if neg_bad:
        detail += f"; negative pairs never exceeding 1e-3: {neg_bad}"
    report(6, "flow-invariance certification", ok, detail)
    assert ok, (pos_bad, neg_bad)


# -- 7 ---------------------------------------------------------------------------

RESTRICTIONS = [
    ("odd3cell", "1,-1,-1", "I_Godd"),
    ("linear_i", "1,1,2,-1,-1,-2", "I_Gl"),
    ("f_um", "1,1,1,2,2,3", "I_G0"),
]


def test_acceptance_7_restriction_consistency():
    devs, bad = [], []
    for name, labels, c in RESTRICTIONS:
        g = load_fixture(name)
        rep = restriction_consistency(g, parse_partition(labels, g.n), c, seed=0, dt=1e-3, steps=10_000, tol=1e-6)
        devs.append(rep.max_deviation)
        if not rep.passed or rep.steps_done != 10_000:
            bad.append(name)
    ok = not bad
    report(7, "restriction consistency", ok, "max deviations " + ", ".join(f"{d:.1e}" for d in devs))
    assert ok, bad


# -- 8 ---------------------------------------------------------------------------


def test_acceptance_8_linear_span():
    net = load_fixture("ex_notequal")
    gl = linear_span_check(net, "I_Gl")
    geo = linear_span_check(net, "I_Geo")
    reg = load_fixture("odd3cell")
    coincide = [linear_span_check(reg, c).spans_coincide for c in ("I_Gl", "I_Geo")]
    worst = max(f["residual"] for f in gl.fits + geo.fits)
    ok = (gl.basis == "L" and gl.passed and geo.basis == "W" and geo.passed
          and all(x is True for x in coincide))
    report(8, "linear-span check", ok, f"worst fit residual {worst:.1e}; regular spans coincide {coincide}")
    assert ok


# -- 9 ---------------------------------------------------------------------------


def test_acceptance_9_quotient_fixtures():
    bad = []
    q = quotient_exo(load_fixture("f_um"), parse_partition("1,1,1,2,2,3"))
    if sorted(q.edges()) != [("[1]", "[4]", 1), ("[4]", "[6]", 2)] or any(q.matrix[i, i] != 0 for i in range(3)):
        bad.append("exo f_um")
    q = quotient_odd_symbolic(load_fixture("odd3cell"), parse_partition("1,-1,-1"))
    if q.edges() != [("-[1]", "[1]", 2)]:
        bad.append("odd symbolic odd3cell")
    q = quotient_linear_symbolic(load_fixture("linear_i"), parse_partition("1,1,2,-1,-1,-2"))
    p = q.partition.p
    if [q.matrix[i, p] for i in range(p)] != [2, 2] or any(q.matrix[i, j] != 0 for i in range(p) for j in range(p)):
        bad.append("linear symbolic linear_i")
    ok = not bad
    report(9, "quotient fixtures", ok, "3 quotients" + (f", wrong: {bad}" if bad else ""))
    assert ok, bad
