import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from clocklam.terms import App, Free, Lam, Var  # noqa: E402

settings.register_profile(
    "default", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FREE_NAMES = ("x", "y", "z", "f")
HINTS = ("a", "b", "x", "y", "f")


def terms(max_depth=5, binders=0):
    """Well-scoped terms: a Var index never exceeds the binders in scope."""
    leaves = [st.sampled_from(FREE_NAMES).map(Free)]
    if binders:
        leaves.append(st.integers(0, binders - 1).map(Var))
    leaf = st.one_of(leaves)
    if max_depth == 0:
        return leaf
    return st.one_of(
        leaf,
        st.builds(Lam, st.deferred(lambda: terms(max_depth - 1, binders + 1)), st.sampled_from(HINTS)),
        st.builds(App, st.deferred(lambda: terms(max_depth - 1, binders)), st.deferred(lambda: terms(max_depth - 1, binders))),
    )


closed_or_open_terms = terms(5)


# acceptance criteria report one PASS/FAIL line each in the terminal summary
_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    n, title = mark.args
    failed = call.excinfo is not None
    prev = _criteria.get(n, ("PASS", title))[0]
    _criteria[n] = ("FAIL" if failed or prev == "FAIL" else "PASS", title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        verdict, title = _criteria[n]
        terminalreporter.write_line(f"{verdict} criterion {n:>2}: {title}")
