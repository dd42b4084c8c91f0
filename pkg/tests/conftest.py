import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cdga_blowup.blowup import blowup_model  # noqa: E402
from cdga_blowup.corpus import cp5_family, mcduff  # noqa: E402

ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def mcduff_example():
    return mcduff()


@pytest.fixture(scope="session")
def mcduff_model(mcduff_example):
    ex = mcduff_example
    return blowup_model(ex.embedding, ex.shriek(), ex.chern)


@pytest.fixture(scope="session")
def cp5_models():
    out = {}
    for l in (1, 2, 3):
        ex = cp5_family(l)
        out[l] = (ex, blowup_model(ex.embedding, ex.shriek(), ex.chern))
    return out


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, note = ACCEPTANCE[key]
        terminalreporter.write_line("criterion %s: %s%s" % (key, "PASS" if ok else "FAIL", "  " + note if note else ""))
