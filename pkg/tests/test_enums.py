from __future__ import annotations

from swiptcap import Signalling, SolveStatus


def test_solve_status_enum() -> None:
    assert SolveStatus.get("optimal") is SolveStatus.OPTIMAL
    assert SolveStatus.get("INFEASIBLE") is SolveStatus.INFEASIBLE
    assert SolveStatus.get("max_ITERATIONS") is SolveStatus.MAX_ITERATIONS

    assert SolveStatus.get(0) is SolveStatus.OPTIMAL
    assert SolveStatus.get(1) is SolveStatus.INFEASIBLE
    assert SolveStatus.get(2) is SolveStatus.MAX_ITERATIONS

    assert SolveStatus.get(SolveStatus.INFEASIBLE) is SolveStatus.INFEASIBLE

    assert SolveStatus.get(999999999999) is SolveStatus.OPTIMAL
    assert SolveStatus.get("non-existent-key") is SolveStatus.OPTIMAL
    assert SolveStatus.get(999999999999, "infeasible") is SolveStatus.INFEASIBLE
    assert SolveStatus.get("non-existent-key", SolveStatus.MAX_ITERATIONS) is SolveStatus.MAX_ITERATIONS
    assert SolveStatus.get(None) is SolveStatus.OPTIMAL


def test_signalling_enum() -> None:
    assert Signalling.get("real") is Signalling.REAL
    assert Signalling.get("Complex") is Signalling.COMPLEX
    assert Signalling.get(1) is Signalling.REAL
    assert Signalling.get(2) is Signalling.COMPLEX
    assert Signalling.get(Signalling.COMPLEX) is Signalling.COMPLEX

    assert Signalling.get("quaternion") is Signalling.REAL
    assert Signalling.get(3, "complex") is Signalling.COMPLEX
    assert Signalling.get(None, Signalling.COMPLEX) is Signalling.COMPLEX
