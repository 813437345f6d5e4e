"""Quick check that the compiled `lhz_cd` module imports and runs.

    pip install maturin
    pip install --no-build-isolation ./crates/python
    python python/smoke_test.py
"""

import json
import math

import lhz_cd


def main():
    print("lhz_cd", lhz_cd.version())

    ann = lhz_cd.sweep(3, 0, 1e-3, protocol="annealing", n_samples=3)
    n_phys = 4
    assert abs(ann["final_fidelity_sq"] * 2**n_phys - 1) < 0.1, ann["final_fidelity_sq"]
    assert ann["max_norm_drift"] < 1e-10

    opt = lhz_cd.optimize(4, 1, 0.01, n_grid=21, tol=1e-2)
    zero = opt["scan_lambda"].index(0.0)
    assert opt["fidelity_sq"] >= opt["scan_fidelity_sq"][zero]
    cd = lhz_cd.sweep(4, 1, 0.01, protocol="cd", lambda_f=opt["lambda_f"], n_samples=2, integrator="split")
    print("quench N=4 seed 1: F2 %.4f at lambda_f %.4f" % (cd["final_fidelity_sq"], opt["lambda_f"]))

    spec = lhz_cd.spectrum(3, 2, 1.0, n_times=51)
    assert len(spec["levels"]) == 51 and spec["min_gap"] > 0

    cells = json.loads(lhz_cd.ensemble_summary(json.dumps({
        "n_logical": 3, "n_instances": 3, "tau_grid": [0.5],
        "optimizer": {"n_grid": 5, "tol": 0.1},
    })))
    assert len(cells) == 2 and all(math.isfinite(c["mean_fidelity_sq"]) for c in cells)

    try:
        lhz_cd.sweep(3, 0, 1.0, protocol="nope")
    except ValueError as e:
        print("rejected:", e)
    else:
        raise AssertionError("bad protocol accepted")

    print("smoke test ok")


if __name__ == "__main__":
    main()
