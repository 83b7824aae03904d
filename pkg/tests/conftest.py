from pathlib import Path
import sys

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from shifteq.matrices import IndexSet, NatMatrix

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

DATA = Path(__file__).parent / "data"


def nat(rows, row_set="V", col_set=None) -> NatMatrix:
    return NatMatrix.from_rows(rows, row_set, col_set)


def to_np(M) -> np.ndarray:
    return np.array(M.data, dtype=np.int64).reshape(M.rows.size, M.cols.size)


@st.composite
def nat_matrices(draw, rows=None, cols=None, max_size=4, max_entry=3, row_name="V", col_name=None):
    n = rows if rows is not None else draw(st.integers(1, max_size))
    k = cols if cols is not None else draw(st.integers(1, max_size))
    data = draw(st.lists(st.lists(st.integers(0, max_entry), min_size=k, max_size=k), min_size=n, max_size=n))
    col_name = col_name or (row_name if rows is None and cols is None and n == k else "W")
    return NatMatrix(IndexSet(row_name, n), IndexSet(col_name, k), tuple(map(tuple, data)))


@st.composite
def square_matrices(draw, max_size=4, max_entry=3, name="V"):
    n = draw(st.integers(1, max_size))
    return draw(nat_matrices(rows=n, cols=n, max_entry=max_entry, row_name=name, col_name=name))


@pytest.fixture
def data_dir() -> Path:
    return DATA


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
