"""Session-wide fixtures.

Solves, operators and spectra are deterministic, so every test module
shares one memoized pipeline instead of re-solving per test.  The hook at
the bottom prints one PASS/FAIL line per acceptance test after the run.
"""

import numpy as np
import pytest

import oracles
from shrinker_index import (SolveConfig, assemble_L0, assemble_Lk,
                            normal_field, run_study, solve_geodesic,
                            spectrum)

FD_SURVEY_SEED = 20240817
FD_SURVEY_COUNT = 1000


class Pipeline:
    """Memoized solve -> normals -> operator -> spectrum chain."""

    def __init__(self):
        self._curves = {}
        self._normals = {}
        self._L0 = {}
        self._modes = {}

    def curve(self, m):
        if m not in self._curves:
            self._curves[m] = solve_geodesic(SolveConfig(M=m))
        return self._curves[m]

    def normals(self, m):
        if m not in self._normals:
            self._normals[m] = normal_field(self.curve(m))
        return self._normals[m]

    def L0(self, m):
        if m not in self._L0:
            self._L0[m] = assemble_L0(self.curve(m), self.normals(m))
        return self._L0[m]

    def Lk(self, m, k):
        return assemble_Lk(self.L0(m), self.curve(m), k)

    def modes(self, m, k, count):
        key = (m, k)
        cached = self._modes.get(key)
        if cached is None or len(cached) < count:
            self._modes[key] = spectrum(self.Lk(m, k), count)
        return self._modes[key][:count]

    def eigenvalues(self, m, k, count):
        return np.array([md.eigenvalue for md in self.modes(m, k, count)])


@pytest.fixture(scope="session")
def pipe():
    return Pipeline()


@pytest.fixture(scope="session")
def study16():
    """The full 16-quantity refinement study over M = 128..2048."""
    quantities = [(k, j) for k in range(4) for j in range(4)]
    return run_study(quantities, m_values=(128, 256, 512, 1024, 2048))


@pytest.fixture(scope="session")
def fd_survey():
    """Closed forms vs mpmath finite differences over 1000 random segments."""
    max_grad = 0.0
    max_hess = 0.0
    for a, b in oracles.random_segments(FD_SURVEY_COUNT, FD_SURVEY_SEED):
        rel_g, rel_h = oracles.fd_compare(a, b)
        max_grad = max(max_grad, rel_g)
        max_hess = max(max_hess, rel_h)
    return {"count": FD_SURVEY_COUNT, "max_rel_grad": max_grad,
            "max_rel_hess": max_hess}


_notes = {}


@pytest.fixture
def note(request):
    """Record a measurement string shown in the acceptance summary."""
    name = request.node.nodeid.split("::")[-1]

    def _note(text):
        _notes[name] = text
    return _note


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    status = {}
    for key, ok in (("passed", True), ("failed", False), ("error", False)):
        for rep in terminalreporter.stats.get(key, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            if ok and getattr(rep, "when", "call") != "call":
                continue
            name = nodeid.split("::")[-1]
            status[name] = status.get(name, True) and ok
    if not status:
        return
    terminalreporter.section("acceptance")
    for name in sorted(status):
        verdict = "PASS" if status[name] else "FAIL"
        detail = _notes.get(name)
        terminalreporter.write_line(
            "%s %s%s" % (verdict, name, "  [%s]" % detail if detail else ""))
