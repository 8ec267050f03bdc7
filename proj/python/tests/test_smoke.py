import itertools
import pathlib

import pytest

import protosynth

FIXTURES = pathlib.Path(__file__).resolve().parents[2] / "fixtures"
ABP = FIXTURES / "abp"


def test_parse_and_format():
    text = "automaton A\ninputs x\noutputs y\ninitial s\ntrans s y t\ntrans t x s\n"
    info = protosynth.parse_automaton(text)
    assert info == {"name": "A", "states": 2, "transitions": 2}
    formatted = protosynth.format_automaton(text)
    assert protosynth.format_automaton(formatted) == formatted
    assert protosynth.to_dot(text).startswith('digraph "A"')


def test_parse_error_is_value_error():
    with pytest.raises(ValueError, match=":2:"):
        protosynth.parse_automaton("automaton A\nfrobnicate\n")


def test_manual_solution_verifies():
    assert protosynth.validate(str(ABP / "manual.manifest")) == []
    report = protosynth.verify(str(ABP / "manual.manifest"))
    assert report["passed"]
    assert report["deadlock"] and report["safety"] and report["liveness"]


def test_skeleton_sizes():
    sizes = [c["states"] for c in protosynth.components(str(ABP / "all_scenarios.manifest"))[:2]]
    assert sizes == [12, 8]


def test_synthesize_all_scenarios():
    result = protosynth.synthesize(str(ABP / "all_scenarios.manifest"))
    assert result["found"] and result["verified"]
    assert result["added"] == 8


def test_budget_exhaustion_raises():
    with pytest.raises(RuntimeError):
        protosynth.synthesize(str(ABP / "all_scenarios.manifest"), budget=1)


def brute(clauses, n):
    for bits in itertools.product([False, True], repeat=n):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return True
    return False


def test_sat_engines_agree():
    example = (FIXTURES / "reduction" / "example.cnf").read_text()
    unsat = (FIXTURES / "reduction" / "unsat.cnf").read_text()
    for engine in ("explicit", "bdd", "brute"):
        model = protosynth.sat_solve(example, engine)
        assert model is not None and len(model) == 3
        assert protosynth.sat_solve(unsat, engine) is None
    clauses = [(1, -2, 3), (-1, 2, 2), (2, 3, -3)]
    text = "p cnf 3 3\n" + "".join(" ".join(map(str, c)) + " 0\n" for c in clauses)
    assert (protosynth.sat_solve(text, "bdd") is not None) == brute(clauses, 3)


def test_reduction_sizes():
    sizes = protosynth.reduction_sizes((FIXTURES / "reduction" / "example.cnf").read_text())
    assert sizes["process_states"] == 2 * 3 + 1
    assert sizes["environment_states"] == 6 * 2 + 2
    assert sizes["environment_transitions"] == 9 * 2 + 1
