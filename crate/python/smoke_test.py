"""Smoke test for the pybernlog extension module.

Build and install first:

    pip install maturin
    maturin develop -m crates/py/Cargo.toml --release
    python python/smoke_test.py
"""

import math

import pybernlog as bl


def close(a, b, rel=1e-12):
    return math.isclose(a, b, rel_tol=rel, abs_tol=0.0)


def main():
    assert close(bl.mgf(0.5, 0.5), 1.0150517651282178, 1e-12)
    assert bl.mgf(0.3, 0.7) <= bl.envelope(0.7)
    try:
        bl.envelope(1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("envelope(1.0) should raise")

    b = bl.new_tail_bound(100, 50.0)
    assert b.method == "new"
    assert close(b.bound, 4.807389528390284e-4)

    rows = bl.compare([math.exp(-100.0)] * 100, [50.0])
    assert [r.method for r in rows] == ["new", "hoeffding", "classical_bernstein"]
    assert close(rows[1].bound, 1.9900249583853646)
    assert rows[1].trivial

    assert close(bl.multinoulli_bound(100, 2, 0.5).bound, 0.3283399944955952)

    verdict, limit = bl.boundary_scan(-1.0, [10.0 ** -k for k in range(1, 13)])
    assert verdict == "converges" and abs(limit - 2.0) < 1e-4
    assert bl.boundary_scan(-2.0, [10.0 ** -k for k in range(1, 13)])[0] == "diverges"

    exact, dominating = bl.grouped_mgf([0.2, 0.8], 0.5)
    assert exact <= dominating

    sol = bl.chernoff_optimize(100, 50.0)
    assert abs(sol.lambda_star + 1.0 - math.sqrt(0.5)) < 1e-8
    assert sol.objective_value < sol.closed_form_objective

    e = bl.Ensemble.bernoulli([0.5, 0.5])
    assert e.kind == "bernoulli" and len(e) == 2
    assert e.exact_distribution() == [(-math.log(2.0), 0.25), (0.0, 0.5), (math.log(2.0), 0.25)]
    assert e.exact_tail_probability(0.5) == 0.5
    est = e.simulate_tail(0.5, replicates=200_000, seed=7, workers=2)
    assert est.ci_low <= 0.5 <= est.ci_high
    assert e.simulate_tail(0.5, replicates=200_000, seed=7, workers=1).hits == est.hits
    assert bl.Ensemble.from_json(e.to_json()).to_json() == e.to_json()

    passed, ratio = bl.Ensemble.grouped([[0.2, 0.8], [0.5]]).verify()
    assert passed and ratio <= 1.0
    try:
        bl.Ensemble.multinoulli([[0.5, 0.4]])
    except ValueError:
        pass
    else:
        raise AssertionError("bad row sum should raise")

    print("pybernlog smoke test: ok")


if __name__ == "__main__":
    main()
