"""Shared fixtures plus the acceptance-criteria summary table."""
from __future__ import annotations

import numpy as np
import pytest

from mammocad.imaging import GrayImage

_ACCEPTANCE: list[tuple[str, bool, str]] = []


class AcceptanceRecorder:
    """Collects one pass/fail line per criterion for the terminal summary."""

    def check(self, name: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE.append((name, bool(passed), detail))
        assert passed, f"{name}: {detail or 'criterion not met'}"


@pytest.fixture
def acceptance() -> AcceptanceRecorder:
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        status = "PASS" if passed else "FAIL"
        suffix = f"  ({detail})" if detail else ""
        terminalreporter.write_line(f"{status}: {name}{suffix}")


# --- images and masks -------------------------------------------------------

def gray(levels, bit_depth: int = 8, spacing_mm: float = 1.0) -> GrayImage:
    return GrayImage(np.asarray(levels, dtype=np.int64), bit_depth, spacing_mm)


@pytest.fixture
def square_mask() -> np.ndarray:
    m = np.zeros((12, 12), dtype=bool)
    m[3:9, 3:9] = True
    return m


@pytest.fixture
def disk_mask() -> np.ndarray:
    yy, xx = np.indices((21, 21))
    return (yy - 10) ** 2 + (xx - 10) ** 2 <= 49


@pytest.fixture
def plus_mask() -> np.ndarray:
    m = np.zeros((15, 15), dtype=bool)
    m[6:9, 2:13] = True
    m[2:13, 6:9] = True
    return m


def random_blob(rng: np.random.Generator, side: int = 24) -> np.ndarray:
    """A connected random mask: a disk warped by a few random lobes."""
    yy, xx = np.indices((side, side), dtype=float)
    cy = side / 2 + rng.uniform(-1.5, 1.5)
    cx = side / 2 + rng.uniform(-1.5, 1.5)
    theta = np.arctan2(yy - cy, xx - cx)
    r0 = side * rng.uniform(0.22, 0.3)
    r = r0 * (
        1
        + 0.2 * np.sin(int(rng.integers(2, 6)) * theta + rng.uniform(0, 6.28))
    )
    return np.hypot(yy - cy, xx - cx) <= r
