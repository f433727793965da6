import pytest


@pytest.fixture
def report(capsys):
    """Print one PASS/FAIL line that survives output capture."""

    def emit(criterion: str, ok: bool, detail: str = ""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {criterion}" + (f": {detail}" if detail else ""))
        return ok

    return emit
