#!/usr/bin/env python3
"""Smoke test for the qdecouple_py extension module.

Build the module and put it on the import path first, e.g.:

    cargo build -p qdecouple-py --release
    cp target/release/libqdecouple_py.so python/qdecouple_py.so
    python3 python/smoke_test.py
"""

import json
import math
import sys
import pathlib

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

import qdecouple_py as qd


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    # operators and entropies
    phi = qd.Operator.max_entangled(2, "A", "R")
    assert phi.dim() == 4
    assert phi.labels() == ["A", "R"]
    approx(phi.trace()[0], 1.0)
    approx(phi.min_entropy(["A"]), -1.0, 1e-5)
    pi = qd.Operator.mixed_state([("A", 2), ("R", 2)])
    approx(pi.min_entropy(["A"]), 1.0, 1e-5)
    assert phi.smooth_min_entropy(["A"], 0.05) >= phi.min_entropy(["A"]) - 1e-9

    # JSON round trip
    again = qd.Operator.from_json(phi.to_json())
    approx(again.trace_norm(), phi.trace_norm(), 1e-12)

    # channels
    deph = qd.Channel.dephasing([("A", 2)])
    classical = deph.apply(phi.partial_trace(["R"]))
    approx(classical.trace()[0], 1.0)

    # design quality of the Clifford ensemble
    lower, upper = qd.clifford_delta("choi-trace-bounds")
    assert upper <= 1e-9, (lower, upper)

    # decoupling bounds and the exact Clifford experiment
    inst = qd.DecouplingInstance.fixture("bell-identity")
    approx(inst.haar_bound(), 2.0, 1e-5)
    mean, exact = inst.empirical_clifford()
    assert exact
    approx(mean, 1.5, 1e-9)
    assert mean <= inst.approx_bound(upper)
    assert inst.smooth_bound(0.0, 0.05) > 0.0

    inst2 = qd.DecouplingInstance(
        qd.Operator.mixed_state([("A", 2), ("R", 2)]),
        qd.Channel.identity([("A", 2)]),
    )
    mean2, _ = inst2.empirical_haar(5, 1)
    approx(mean2, 0.0, 1e-10)

    # Monte Carlo identity check
    (mc, stderr), rhs = qd.identity_check(2, 200, 1)
    approx(rhs, 0.75, 1e-12)
    assert abs(mc - rhs) <= 5 * stderr + 1e-9

    # circuit sweeps
    rows = qd.circuit_sweep(2, [0, 4], 20, 3)
    assert [t for t, _, _ in rows] == [0, 4]
    assert rows[0][1] >= rows[1][1]

    # full experiment runner
    report = json.loads(
        qd.run_experiment(
            json.dumps(
                {
                    "version": 1,
                    "command": "decouple-run",
                    "fixture": "bell-identity",
                    "source": {"type": "ensemble", "name": "clifford1q"},
                    "seed": 7,
                }
            )
        )
    )
    approx(report["results"]["empirical_mean"], 1.5, 1e-9)
    assert report["results"]["exact_average"] is True
    assert not math.isnan(report["results"]["bound_approx"])

    print("smoke test passed")


if __name__ == "__main__":
    main()
