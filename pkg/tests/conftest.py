from functools import lru_cache

import pytest

from xmodrep.exactla import parse_field
from xmodrep.fixtures import bundled_corpus, load_bundled
from xmodrep.gray import theta
from xmodrep.grpalg import quotient_cat2
from xmodrep.regrep import build_representation


class Built:
    """Per-session cache of the expensive objects for each bundled fixture."""

    def spec(self, name):
        return _spec(name)

    def module(self, name):
        return _spec(name).module

    def gray(self, name):
        return _gray(name)

    def field(self, name):
        return _field(name)

    def bundle(self, name, field=None):
        return _bundle(name, field or _spec(name).field)

    def rep(self, name, field=None):
        return _rep(name, field or _spec(name).field)


@lru_cache(maxsize=None)
def _spec(name):
    return load_bundled(name)


@lru_cache(maxsize=None)
def _field(text):
    return parse_field(text, allow_modular=True)


@lru_cache(maxsize=None)
def _gray(name):
    return theta(_spec(name).module)


@lru_cache(maxsize=None)
def _bundle(name, field):
    return quotient_cat2(_gray(name), _field(field))


@lru_cache(maxsize=None)
def _rep(name, field):
    return build_representation(_gray(name), _bundle(name, field))


CORPUS = bundled_corpus()
POSITIVE = [s.name for s in CORPUS if s.expect_pass]
NEGATIVE = [s.name for s in CORPUS if not s.expect_pass]
L_TRIVIAL = [s.name for s in CORPUS if s.expect_pass and s.l_trivial]
L_NONTRIVIAL = [s.name for s in CORPUS if s.expect_pass and not s.l_trivial]


@pytest.fixture(scope="session")
def built():
    return Built()


def pytest_terminal_summary(terminalreporter):
    mod = next((m for n, m in __import__("sys").modules.items() if n.endswith("test_acceptance")), None)
    if mod is None or not mod.RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(mod.TITLES):
        items = mod.RESULTS.get(n)
        if not items:
            tr.write_line(f"criterion {n}: NOT RUN  {mod.TITLES[n]}")
            continue
        red = [i for i, ok in items if not ok]
        status = "PASS" if not red else "FAIL"
        extra = f"  (red: {'; '.join(red)})" if red else ""
        tr.write_line(f"criterion {n}: {status}  {mod.TITLES[n]}{extra}")
