#!/usr/bin/env python3
"""Smoke test for the onebit_cs_py extension module.

Build the module first:

    cargo build --release -p onebit-cs-py

The script locates the compiled cdylib under target/, exposes it under the
importable name, and exercises the main types and operations end to end.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        REPO_ROOT / "target" / "release" / "libonebit_cs_py.so",
        REPO_ROOT / "target" / "debug" / "libonebit_cs_py.so",
        REPO_ROOT / "target" / "release" / "libonebit_cs_py.dylib",
        REPO_ROOT / "target" / "debug" / "libonebit_cs_py.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("extension not built; run: cargo build --release -p onebit-cs-py")
    staging = Path(tempfile.mkdtemp(prefix="onebit_cs_py_"))
    suffix = ".so" if built.suffix == ".so" else ".so"  # CPython loads .so on mac too
    shutil.copy2(built, staging / f"onebit_cs_py{suffix}")
    sys.path.insert(0, str(staging))
    import onebit_cs_py

    return onebit_cs_py


def approx(a, b, tol=1e-12):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    ob = load_module()

    # Probability laws.
    approx(ob.app_probability(0.0), 0.5)
    approx(ob.app_probability(0.5), 1.0 / 3.0, 1e-15)
    approx(ob.flip_probability(1.0, 0.2), 0.2, 1e-15)
    approx(ob.expected_hamming(0.0, 0.1, 4000), 2000.0, 1e-9)
    approx(ob.adaptive_alpha(1000, 1000, 4.0, 1.0), 1.0 + 4.0 * math.exp(-1.0), 1e-12)
    bound = ob.lemma2_lower_bound(1000, 0.1, 0.3)
    approx(bound, 0.9574131753424941, 1e-12)
    try:
        ob.flip_probability(0.0, 0.5)
    except ValueError:
        pass
    else:
        raise AssertionError("rho = 0.5 must be rejected")

    # Deterministic generation.
    x = ob.SparseSignal.generate(64, 3, seed=7)
    x_again = ob.SparseSignal.generate(64, 3, seed=7)
    assert x.values == x_again.values
    assert x.sparsity == 3
    approx(sum(v * v for v in x.values), 1.0, 1e-12)

    a = ob.MeasurementEnsemble.generate(800, 64, seed=8)
    assert (a.m, a.n) == (800, 64)

    # Measure, flip, recover.
    y_clean = ob.measure(a, x)
    assert set(y_clean.bits) <= {-1, 1}
    y = ob.apply_sign_flips(y_clean, 0.1, seed=9)
    flipped = sum(1 for u, v in zip(y_clean.bits, y.bits) if u != v)
    assert 0 < flipped < 200, f"unexpected flip count {flipped}"

    result = ob.history_recover(y, a, k=3)
    assert result.ok and result.status == "ok"
    approx(sum(v * v for v in result.x_star), 1.0, 1e-12)
    assert len(result.support) <= 3
    error = ob.recovery_error(x, result.x_star)
    assert error < 0.5, f"recovery error {error} unexpectedly large"
    sda = ob.support_detection_accuracy(x.support, result.support)
    assert sda >= 2.0 / 3.0 * 100.0 - 1e-9, f"SDA {sda}"

    # Baselines return unit-norm sparse estimates too.
    biht = ob.biht_l2_recover(y, a, k=3, max_iters=80)
    passive = ob.passive_recover(y, a, k=3)
    for r in (biht, passive):
        assert r.status in ("ok", "zero_solution")
        if r.status == "ok":
            approx(sum(v * v for v in r.x_star), 1.0, 1e-12)
            assert len(r.support) <= 3

    # Operators.
    assert ob.hard_threshold([3.0, -5.0, 1.0], 1) == [0.0, -5.0, 0.0]
    assert ob.normalize([3.0, 4.0]) == [0.6, 0.8]
    assert ob.find_supp([0.1, 0.9, 0.5], 2) == [1, 2]
    proxies = ob.estimate_proxy(y, a)
    assert len(proxies) == 64 and all(-1.0 <= h <= 1.0 for h in proxies)
    col0 = a.column(0)
    assert 0 <= ob.hamming_distance(y, col0) <= 800

    # Forced-support recovery isolates the least-squares stage.
    forced = ob.history_recover_with_support(y, a, x.support, 3)
    assert forced.ok and forced.support == x.support

    # Law report.
    passed, lines = ob.verify_laws(20000, seed=5)
    assert passed, "\n".join(lines)
    assert len(lines) == 4

    # Harness access: a tiny sweep returns CSV with the standard header.
    csv_text = ob.run_sweep_json(
        '{"experiment": "error_vs_m", "m": 60, "n": 24, "k": 3, '
        '"trials": 2, "base_seed": 7, "algorithms": ["history", "passive"]}'
    )
    lines = csv_text.strip().split("\n")
    assert lines[0] == (
        "experiment,m,n,k,rho,k_select,alpha,trial,seed,algorithm,error,sda,time_s,status"
    )
    assert len(lines) == 1 + 2 * 2
    seed = ob.derive_seed(7, "error_vs_m", 60, 24, 3, 0)
    assert str(seed) in csv_text

    print("smoke test passed")


if __name__ == "__main__":
    main()
