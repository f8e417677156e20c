"""Fast internal consistency suites, runnable from the CLI.

Each suite exercises one family of invariants with reduced instance
counts so the whole battery stays within a couple of minutes; the full
counts live in the test-suite.  Returns a nonzero status on any failure.
"""

import time

from . import checks


def _suite_oracle():
    gaps = checks.oracle_equivalence_errors(count=60, seed=11)
    return gaps.max() <= 1e-6, f"max gap {gaps.max():.3e} over {gaps.size} instances"


def _suite_representation():
    gaps = checks.representation_errors(count=40, seed=22)
    return gaps.max() <= 1e-6, f"max gap {gaps.max():.3e} over {gaps.size} instances"


def _suite_stable():
    gaps = checks.stable_agreement_errors(count=40, seed=33)
    return gaps.max() <= 1e-6, f"max gap {gaps.max():.3e} over {gaps.size} instances"


def _suite_metric():
    errs = checks.metric_inversion_errors(count=60, seed=44)
    return errs.max() <= 1e-10, f"max error {errs.max():.3e} over {errs.size} draws"


def _suite_derivatives():
    worst_k = checks.kernel_derivative_errors(count=40, seed=55)
    worst_m = checks.model_jacobian_errors(count=40, seed=66)
    worst = {**worst_k, **worst_m}
    top = max(worst.values())
    return top <= 1e-4, "max FD error " + ", ".join(
        f"{k}={v:.2e}" for k, v in worst.items()
    )


SUITES = {
    "oracle": _suite_oracle,
    "representation": _suite_representation,
    "stable": _suite_stable,
    "metric": _suite_metric,
    "derivatives": _suite_derivatives,
}


def run_selftest(filter_name=None, out=print):
    """Run the suites (optionally only those matching a substring).

    Prints one pass/fail line per suite and returns 0 if all passed.
    """
    names = [n for n in SUITES if filter_name is None or filter_name in n]
    if not names:
        out(f"no suite matches filter {filter_name!r}")
        return 3
    failures = 0
    for name in names:
        start = time.perf_counter()
        try:
            ok, detail = SUITES[name]()
        except Exception as exc:  # a crash counts as a failure
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        took = time.perf_counter() - start
        out(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail} ({took:.1f}s)")
        failures += 0 if ok else 1
    return 0 if failures == 0 else 3
