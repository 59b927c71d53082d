"""Shared fixtures: a cached instance builder and the acceptance-line
summary that prints one pass/fail line per acceptance check."""

import functools

ACCEPTANCE_LINES = []


def record_acceptance(line):
    ACCEPTANCE_LINES.append(line)


def run_acceptance(name, fn):
    """Run one acceptance check; record its pass/fail line and re-raise
    failures so the test stays honest."""
    try:
        detail = fn()
    except BaseException as exc:
        record_acceptance(f"{name}: FAIL ({exc})")
        raise
    record_acceptance(f"{name}: PASS ({detail})")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance summary:")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line("  " + line)


@functools.lru_cache(maxsize=None)
def cached_instance(p, d, ell, seed=0):
    """One deterministic solvable instance per (p, d, ell, seed)."""
    from isogeny.cli import generate_instance

    return generate_instance(p, d, ell, seed)
