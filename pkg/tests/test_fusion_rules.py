import json

import pytest

from oracles import connected_graphs_upto, fusion_rule
from pyrofuse import fusion_rules as fr
from pyrofuse.stabilizer import FusionOutcome, GraphState, graph_state, lc_equivalent, to_graph_form

CONNECTED = list(connected_graphs_upto(4))


def test_connected_graph_enumeration_size():
    # 1 + 1 + 4 + 38 connected labelled graphs on up to four vertices
    assert len(CONNECTED) == 44


def fuse_pair(n1, e1, n2, e2, outcome):
    nodes = [("a", v) for v in range(n1)] + [("b", v) for v in range(n2)]
    edges = [(("a", u), ("a", v)) for u, v in e1] + [(("b", u), ("b", v)) for u, v in e2]
    s = graph_state(GraphState.from_edges(edges, nodes))
    s.fuse(("a", 0), ("b", 0), outcome)
    s.remove_qubits([("a", 0), ("b", 0)])
    g, _ = to_graph_form(s)
    return g


def check_success_rule(outcome) -> int:
    checked = 0
    for n1, e1 in CONNECTED:
        for n2, e2 in CONNECTED:
            if n1 + n2 == 2:
                continue  # nothing survives
            nodes, edges = fusion_rule(n1, e1, n2, e2)
            g = fuse_pair(n1, e1, n2, e2, outcome)
            assert lc_equivalent(g, GraphState.from_edges(edges, nodes)), (e1, e2)
            checked += 1
    return checked


def test_success_rule_exhaustive():
    assert check_success_rule(FusionOutcome.succeeded("phi+")) == 44 * 44 - 1


@pytest.mark.parametrize("branch", ["phi-", "psi+", "psi-"])
def test_success_rule_other_branches_on_small_graphs(branch):
    outcome = FusionOutcome.succeeded(branch)
    for n1, e1 in CONNECTED[:6]:
        for n2, e2 in CONNECTED[:6]:
            if n1 + n2 == 2:
                continue
            nodes, edges = fusion_rule(n1, e1, n2, e2)
            assert lc_equivalent(fuse_pair(n1, e1, n2, e2, outcome), GraphState.from_edges(edges, nodes))


def test_default_scenarios_pass():
    verdicts = [fr.run_scenario(s) for s in fr.default_scenarios()]
    assert len(verdicts) >= 8
    failed = [v for v in verdicts if not v.passed]
    assert not failed, failed


def test_bowtie_has_seven_qubits_and_shared_centre():
    v = fr.run_scenario(fr.bowtie())
    assert v.passed and v.qubits == 7
    s = fr.bowtie()
    assert s.expected.neighbors("C.1") == ["T1", "T2", "T3", "U1", "U2", "U3"]


def test_triangle_scenarios_produce_expected_shapes():
    ok = fr.run_scenario(fr.triangle_fusion(FusionOutcome.succeeded()))
    assert ok.passed and ok.qubits == 4
    bad = fr.run_scenario(fr.triangle_fusion(FusionOutcome.failed()))
    assert bad.passed and len(bad.edges) == 2


def test_wrong_expectation_fails_with_diagnostic():
    s = fr.triangle_fusion(FusionOutcome.failed())
    wrong = fr.Scenario("wrong", s.resources, s.steps, GraphState.complete(["A1", "A2", "B1", "B2"]))
    v = fr.run_scenario(wrong)
    assert not v.passed
    assert "expected" in v.detail


def test_execution_error_becomes_verdict():
    s = fr.Scenario(
        "conflict",
        (GraphState.from_edges([("a", "b")], ["a", "b", "c"]),),
        (fr.FusionStep("a", "b", FusionOutcome.succeeded("psi-")),),
        GraphState.empty(["c"]),
    )
    v = fr.run_scenario(s)
    assert not v.passed and v.detail.startswith("execution failed")


def test_scenario_validation():
    with pytest.raises(ValueError):
        fr.Scenario("dup", (fr.triangle("A"), fr.triangle("A")), (), GraphState.empty(["A0"]))
    with pytest.raises(ValueError):
        fr.Scenario("cover", (fr.triangle("A"),), (), GraphState.empty(["A0"]))


def test_certifications_pass():
    report = fr.certify_lattice_rules()
    names = [c.name for c in report.certifications]
    assert len(names) == 4
    for c in report.certifications:
        assert c.passed, (c.name, [v for v in c.verdicts if not v.passed])


def test_k4_assembly_is_order_independent():
    graphs = [fr.execute(fr.chain_ring(o)) for o in [(0, 1, 2, 3), (3, 2, 1, 0), (2, 0, 3, 1)]]
    assert all(lc_equivalent(graphs[0], g) for g in graphs[1:])


@pytest.mark.parametrize("k", range(4))
def test_chain_failure_deletes_exactly_that_centre(k):
    g = fr.execute(fr.chain_ring(failures={k: FusionOutcome.failed()}))
    assert g.neighbors(f"C{k}.1") == []
    centres = [f"C{j}.1" for j in range(4) if j != k]
    sub = g.subgraph(centres)
    assert lc_equivalent(sub, GraphState.complete(centres))


def test_failed_triangle_pairing_follows_origin():
    s = fr.failed_triangle_ring(("A1", "B1", "A2", "B2"))
    v = fr.run_scenario(s)
    assert v.passed
    assert s.expected.has_edge("C0.1", "C2.1") and s.expected.has_edge("C1.1", "C3.1")
    # a crossed pairing must be rejected
    crossed = fr.Scenario(
        "crossed", s.resources, s.steps,
        GraphState.from_edges(
            [("C0.1", "C1.1"), ("C2.1", "C3.1")] + [(f"C{k}.1", f"C{k}.2") for k in range(4)],
            s.expected.labels,
        ),
    )
    assert not fr.run_scenario(crossed).passed


def test_five_tetrahedra_failure_pattern():
    s = fr.five_tetrahedra(failed=(0, 1))
    g = fr.execute(s)
    assert g.neighbors("C0.1") == [] and g.neighbors("C1.1") == []
    assert g.has_edge("C2.1", "C3.1")
    assert fr.run_scenario(s).passed


def test_report_is_deterministic_json():
    a = fr.verify_all().to_json()
    b = fr.verify_all().to_json()
    assert a == b
    doc = json.loads(a)
    assert doc["passed"] is True
    assert len(doc["scenarios"]) >= 8
    assert any(s["name"] == "bowtie" and s["qubits"] == 7 for s in doc["scenarios"])
    assert "cert i-k4-assembly" in fr.verify_all().table()
