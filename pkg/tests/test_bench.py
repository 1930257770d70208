import sys
from pathlib import Path

import pytest

from rectbar import _backend

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "benchmarks"))


@pytest.mark.skipif(_backend.BACKEND != "cython", reason="compiled kernels not built")
def test_benchmark_runs(capsys):
    import bench_kernels

    assert bench_kernels.main(["--sizes", "32", "80", "--repeat", "1"]) == 0
    out = capsys.readouterr().out
    assert out.count("x\n") == 4
