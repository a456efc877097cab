import time

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from trimode import phase_space as ps

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")


def random_symplectic(rng, n_modes, depth=4, max_r=1.0):
    """Random Gaussian unitary built from phase shifts, squeezers and beam splitters."""
    S = np.eye(2 * n_modes)
    for _ in range(depth):
        for k in range(1, n_modes + 1):
            S = ps.phase_rotation(k, rng.uniform(0, np.pi), n_modes) @ S
            S = ps.squeezer(k, rng.uniform(-max_r, max_r), n_modes) @ S
        for i in range(1, n_modes):
            for j in range(i + 1, n_modes + 1):
                S = ps.beam_splitter(i, j, rng.uniform(0, 1), n_modes) @ S
    return S


def random_state(rng, n_modes, pure=False, max_r=1.0):
    nus = np.ones(n_modes) if pure else 1.0 + rng.exponential(1.0, n_modes)
    sigma = np.diag(np.repeat(nus, 2))
    return ps.apply_symplectic(sigma, random_symplectic(rng, n_modes, max_r=max_r))


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ---------------------------------------------------------------------------
# acceptance bookkeeping: one line per criterion in the terminal summary
# ---------------------------------------------------------------------------

ACCEPTANCE_LINES = {}


class Criterion:
    def __init__(self, number, title, limit=None):
        self.number, self.title, self.limit = number, title, limit
        self.notes = []

    def note(self, text):
        self.notes.append(text)

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        over = self.limit is not None and elapsed > self.limit
        ok = exc_type is None and not over
        if over:
            self.note(f"runtime {elapsed:.1f}s exceeds {self.limit}s")
        if exc_type is AssertionError and str(exc):
            self.note(str(exc).splitlines()[0])
        detail = "; ".join(self.notes)
        ACCEPTANCE_LINES[self.number] = (
            f"criterion {self.number:>2} {'PASS' if ok else 'FAIL'} [{elapsed:6.2f}s] {self.title}"
            + (f" -- {detail}" if detail else "")
        )
        if over and exc_type is None:
            raise AssertionError(f"criterion {self.number} took {elapsed:.1f}s (limit {self.limit}s)")
        return False


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
