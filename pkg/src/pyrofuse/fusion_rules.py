"""Fusion scenarios checked exactly with the stabilizer engine.

Each scenario starts from a product of small graph states, runs a sequence of
Bell-measurement fusions with forced outcomes and compares the surviving
qubits with an expected graph up to local Cliffords. Between fusions the
state is brought back to graph form, i.e. the local Clifford corrections left
by each measurement are applied before the next fusion.

``certify_lattice_rules`` checks the three rules the percolation model relies
on (K4 assembly, site deletion on chain failure, two-edge remnant of a failed
triangle fusion) plus a five-tetrahedron assembly with two failures.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from itertools import permutations
from typing import Hashable

import numpy as np

from .stabilizer import (
    FusionOutcome,
    GraphState,
    graph_state,
    lc_equivalent_by_component,
    to_graph_form,
)

SUCCESS = FusionOutcome.succeeded()
FAIL = FusionOutcome.failed()
FAILURE_SIGNS = [FusionOutcome.failed(za, xb) for za in (1, -1) for xb in (1, -1)]


@dataclass(frozen=True)
class FusionStep:
    a: Hashable  # plain qubit
    b: Hashable  # Hadamard-side qubit
    outcome: FusionOutcome


@dataclass(frozen=True)
class Scenario:
    name: str
    resources: tuple[GraphState, ...]
    steps: tuple[FusionStep, ...]
    expected: GraphState
    description: str = ""

    def __post_init__(self):
        labels = [q for g in self.resources for q in g.labels]
        if len(set(labels)) != len(labels):
            raise ValueError(f"{self.name}: resource states share qubit labels")
        consumed = [q for s in self.steps for q in (s.a, s.b)]
        if len(set(consumed)) != len(consumed):
            raise ValueError(f"{self.name}: a qubit is fused twice")
        survivors = set(labels) - set(consumed)
        if survivors != set(self.expected.labels):
            raise ValueError(f"{self.name}: expected graph must cover exactly the surviving qubits")

    @property
    def total_qubits(self) -> int:
        return sum(g.n for g in self.resources)


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    qubits: int
    edges: tuple[tuple[str, str], ...]
    detail: str = ""


def disjoint_union(graphs) -> GraphState:
    labels = [q for g in graphs for q in g.labels]
    edges = [e for g in graphs for e in g.edges()]
    return GraphState.from_edges(edges, labels)


def execute(s: Scenario) -> GraphState:
    """Run the fusion sequence and return the final graph (before LC comparison)."""
    state = graph_state(disjoint_union(s.resources))
    for step in s.steps:
        state.fuse(step.a, step.b, step.outcome)
        state.remove_qubits([step.a, step.b])
        g, _ = to_graph_form(state)
        state = graph_state(g)
    g, _ = to_graph_form(state)
    return g


def _edge_list(g: GraphState) -> tuple[tuple[str, str], ...]:
    return tuple(sorted(tuple(sorted((str(a), str(b)))) for a, b in g.edges()))


def run_scenario(s: Scenario) -> Verdict:
    """Execute ``s`` and compare with its expectation; never raises on a mismatch."""
    try:
        final = execute(s)
    except Exception as exc:  # a verdict, not an error
        return Verdict(s.name, False, 0, (), f"execution failed: {exc}")
    try:
        ok = lc_equivalent_by_component(final, s.expected)
        detail = "" if ok else f"expected {_edge_list(s.expected)}"
    except ValueError as exc:
        ok, detail = False, f"not decidable: {exc}"
    return Verdict(s.name, ok, final.n, _edge_list(final), detail)


# -- resource states -------------------------------------------------------


def triangle(p: str) -> GraphState:
    return GraphState.complete([f"{p}0", f"{p}1", f"{p}2"])


def tetrahedron(p: str) -> GraphState:
    return GraphState.complete([f"{p}0", f"{p}1", f"{p}2", f"{p}3"])


def chain(p: str) -> GraphState:
    """3-qubit linear cluster ``p.0 - p.1 - p.2``; ``p.1`` becomes a lattice site."""
    return GraphState.path([f"{p}.0", f"{p}.1", f"{p}.2"])


def _graph(nodes, edges) -> GraphState:
    return GraphState.from_edges(edges, nodes)


def _k(nodes) -> list[tuple]:
    return [(a, b) for i, a in enumerate(nodes) for b in nodes[i + 1:]]


# -- assembly scenarios ----------------------------------------------------


def triangle_fusion(outcome: FusionOutcome) -> Scenario:
    survivors = ["A1", "A2", "B1", "B2"]
    if outcome.success:
        expected = GraphState.complete(survivors)
        note = "two triangles fuse into a tetrahedron"
    else:
        expected = _graph(survivors, [("A1", "A2"), ("B1", "B2")])
        note = "failed fusion leaves one Bell pair per triangle"
    return Scenario(
        f"triangle-{'success' if outcome.success else 'failure'}-{_tag(outcome)}",
        (triangle("A"), triangle("B")),
        (FusionStep("A0", "B0", outcome),),
        expected,
        note,
    )


def chain_failure(outcome: FusionOutcome = FAIL) -> Scenario:
    return Scenario(
        f"chain-failure-{_tag(outcome)}",
        (triangle("A"), chain("C")),
        (FusionStep("A0", "C.0", outcome),),
        _graph(["A1", "A2", "C.1", "C.2"], [("A1", "A2")]),
        "failure on the Hadamard end of a chain disentangles the chain",
    )


def bowtie(first: FusionOutcome = SUCCESS, second: FusionOutcome = SUCCESS) -> Scenario:
    nodes = ["T1", "T2", "T3", "C.1", "U1", "U2", "U3"]
    if first.success and second.success:
        edges = _k(["T1", "T2", "T3", "C.1"]) + _k(["U1", "U2", "U3", "C.1"])
        name, note = "bowtie", "chain-mediated fusion of two tetrahedra sharing the chain centre"
    else:
        edges = _k(["T1", "T2", "T3"]) + _k(["U1", "U2", "U3"])
        name, note = f"bowtie-failure-{_tag(first)}-{_tag(second)}", "any chain failure deletes the centre"
    return Scenario(
        name,
        (tetrahedron("T"), chain("C"), tetrahedron("U")),
        (FusionStep("T0", "C.0", first), FusionStep("U0", "C.2", second)),
        _graph(nodes, edges),
        note,
    )


def five_tetrahedra(failed: tuple[int, ...] = (), outcome: FusionOutcome = FAIL) -> Scenario:
    """Central tetrahedron ``T`` linked to outer tetrahedra ``O0..O3`` by chains ``C0..C3``.

    Chain ``k`` in ``failed`` has its fusion with ``T`` fail. Chains 0 and 1 are
    the top and top-left links.
    """
    resources = (tetrahedron("T"),) + tuple(chain(f"C{k}") for k in range(4)) + tuple(
        GraphState.complete([f"O{k}.{i}" for i in range(4)]) for k in range(4)
    )
    steps = tuple(FusionStep(f"T{k}", f"C{k}.0", outcome if k in failed else SUCCESS) for k in range(4))
    steps += tuple(FusionStep(f"O{k}.0", f"C{k}.2", SUCCESS) for k in range(4))
    centres = [f"C{k}.1" for k in range(4) if k not in failed]
    nodes = [f"C{k}.1" for k in range(4)] + [f"O{k}.{i}" for k in range(4) for i in (1, 2, 3)]
    edges = _k(centres)
    for k in range(4):
        outer = [f"O{k}.{i}" for i in (1, 2, 3)]
        edges += _k(outer + ([f"C{k}.1"] if k not in failed else []))
    name = "five-tetrahedra" if not failed else "five-tetrahedra-failure-" + "".join(map(str, failed))
    return Scenario(name, resources, steps, _graph(nodes, edges), "chains join five tetrahedra")


def default_scenarios() -> list[Scenario]:
    out = [triangle_fusion(o) for o in FusionOutcome.all()]
    out.append(chain_failure())
    out.append(bowtie())
    out.append(bowtie(FAIL, SUCCESS))
    out.append(bowtie(SUCCESS, FAIL))
    out.append(five_tetrahedra())
    out.append(five_tetrahedra(failed=(0, 1)))
    return out


def _tag(o: FusionOutcome) -> str:
    if o.success:
        return o.branch
    return f"{'p' if o.za == 1 else 'm'}{'p' if o.xb == 1 else 'm'}"


# -- lattice-rule certifications -------------------------------------------


def _ring_expected() -> GraphState:
    centres = [f"C{k}.1" for k in range(4)]
    nodes = centres + [f"C{k}.2" for k in range(4)]
    return _graph(nodes, _k(centres) + [(f"C{k}.1", f"C{k}.2") for k in range(4)])


def chain_ring(order=(0, 1, 2, 3), failures: dict[int, FusionOutcome] | None = None) -> Scenario:
    """Tetrahedron ``T`` whose four corners are each fused with the end of a chain."""
    failures = failures or {}
    steps = tuple(FusionStep(f"T{k}", f"C{k}.0", failures.get(k, SUCCESS)) for k in order)
    expected = _ring_expected()
    for k in failures:
        expected = expected.isolate(f"C{k}.1")
    fail_tag = ",".join(f"{k}:{_tag(o)}" for k, o in sorted(failures.items()))
    return Scenario(
        f"chain-ring[{''.join(map(str, order))}]" + (f"-fail[{fail_tag}]" if failures else ""),
        (tetrahedron("T"),) + tuple(chain(f"C{k}") for k in range(4)),
        steps,
        expected,
    )


def failed_triangle_ring(assignment=("A1", "A2", "B1", "B2"), outcome: FusionOutcome = FAIL) -> Scenario:
    """Failed triangle fusion whose four remaining corners are then fused with chains.

    ``assignment[k]`` is the corner fused with chain ``k``. The surviving
    centres pair up according to the triangle each corner came from.
    """
    steps = (FusionStep("A0", "B0", outcome),) + tuple(
        FusionStep(corner, f"C{k}.0", SUCCESS) for k, corner in enumerate(assignment)
    )
    centre = {corner: f"C{k}.1" for k, corner in enumerate(assignment)}
    nodes = [f"C{k}.1" for k in range(4)] + [f"C{k}.2" for k in range(4)]
    edges = [(centre["A1"], centre["A2"]), (centre["B1"], centre["B2"])]
    edges += [(f"C{k}.1", f"C{k}.2") for k in range(4)]
    return Scenario(
        f"failed-triangle-ring[{'-'.join(assignment)}]-{_tag(outcome)}",
        (triangle("A"), triangle("B")) + tuple(chain(f"C{k}") for k in range(4)),
        steps,
        _graph(nodes, edges),
    )


@dataclass(frozen=True)
class Certification:
    name: str
    passed: bool
    summary: str
    verdicts: tuple[Verdict, ...] = field(default=())


@dataclass(frozen=True)
class CertificationReport:
    certifications: tuple[Certification, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certifications)


def _certify(name: str, summary: str, scenarios: list[Scenario]) -> Certification:
    verdicts = tuple(run_scenario(s) for s in scenarios)
    return Certification(name, all(v.passed for v in verdicts), summary, verdicts)


def certify_lattice_rules() -> CertificationReport:
    ring = _certify(
        "i-k4-assembly",
        "four chain fusions around a tetrahedron join the chain centres into K4, in any order",
        [chain_ring(order) for order in permutations(range(4))],
    )
    deletion = _certify(
        "ii-chain-failure-deletes-site",
        "one failed chain fusion equals deleting that centre; remaining centres form K3",
        [chain_ring(failures={k: o}) for k in range(4) for o in FAILURE_SIGNS],
    )
    remnant = _certify(
        "iii-failed-tetrahedron-two-edges",
        "failed triangle fusion then chain fusions leaves two disjoint edges, paired by triangle",
        [
            failed_triangle_ring(assign, o)
            for assign in (("A1", "A2", "B1", "B2"), ("A1", "B1", "A2", "B2"), ("B2", "A1", "B1", "A2"))
            for o in FAILURE_SIGNS
        ],
    )
    assembly = _certify(
        "iv-five-tetrahedra-failure",
        "five tetrahedra joined by chains with the top and top-left fusions failing",
        [five_tetrahedra(failed=(0, 1), outcome=o) for o in FAILURE_SIGNS],
    )
    return CertificationReport((ring, deletion, remnant, assembly))


# -- reporting -------------------------------------------------------------


@dataclass(frozen=True)
class FusionReport:
    scenarios: tuple[Verdict, ...]
    certifications: CertificationReport

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.scenarios) and self.certifications.passed

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "scenarios": [asdict(v) for v in self.scenarios],
            "certifications": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "summary": c.summary,
                    "runs": len(c.verdicts),
                    "failures": [asdict(v) for v in c.verdicts if not v.passed],
                    "example": asdict(c.verdicts[0]) if c.verdicts else None,
                }
                for c in self.certifications.certifications
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        lines = [f"{'check':<48} {'qubits':>6}  result"]
        for v in self.scenarios:
            lines.append(f"{v.name:<48} {v.qubits:>6}  {'PASS' if v.passed else 'FAIL ' + v.detail}")
        for c in self.certifications.certifications:
            runs = len(c.verdicts)
            lines.append(f"{'cert ' + c.name:<48} {runs:>4}x  {'PASS' if c.passed else 'FAIL'}")
        return "\n".join(lines)


def verify_all() -> FusionReport:
    return FusionReport(
        tuple(run_scenario(s) for s in default_scenarios()),
        certify_lattice_rules(),
    )


def final_adjacency(s: Scenario) -> np.ndarray:
    return execute(s).reordered(s.expected.labels).adjacency
