"""Smoke test for the dscluster_py extension module."""

import json
import math

import dscluster_py as ds


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def main():
    a = ds.Evidence([1], 0.5, 0)
    b = ds.Evidence([2], 0.5, 1)
    assert close(ds.pairwise_conflict(a, b), 0.25)
    assert close(ds.weight_of_conflict(0.25), -math.log(0.75))

    three = [ds.Evidence([k], m, k - 1) for k, m in [(1, 0.3), (2, 0.4), (3, 0.5)]]
    assert close(ds.combine_conflict(three), 0.35)
    assert close(ds.brute_force_conflict(three), 0.35)

    ev = ds.gen_exhaustive(3, 7)
    assert len(ev) == 7
    lowest = ds.lowest_element_assignment(ev, 3)
    assert ds.metaconflict(ev, lowest, 3) == 0.0
    assert ds.log_sum_objective(ev, lowest, 3) == 0.0
    assignment, best = ds.brute_force_min_mcf(ev, 3)
    assert best == 0.0 and len(assignment) == 7

    _, mcf, moves = ds.optimize(ev, [0] * 7, 3)
    assert mcf >= 0.0 and moves >= 1

    for method in ("neural", "iterative", "hybrid"):
        report = ds.run(method, ev, 3, seed=7, trace=True)
        assert report.method == method
        assert len(report.assignment) == 7
        again = ds.run(method, ev, 3, seed=7, trace=True)
        assert report.to_json() == again.to_json()
        assert json.loads(report.to_json())["final_mcf"] == report.final_mcf

    hybrid = ds.run("hybrid", ev, 3, seed=7)
    assert hybrid.final_mcf <= hybrid.decode_mcf

    params = json.loads(ds.default_params())
    assert params["u0"] == 0.02

    text = ds.evidence_to_json(6, ds.gen_random(6, 20, 1))
    assert ds.evidence_from_json(text) == ds.gen_random(6, 20, 1)

    for bad in (lambda: ds.Evidence([1], 1.0), lambda: ds.run("warp", ev, 3)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
