import os
import runpy

BENCH = os.path.join(os.path.dirname(__file__), "..", "benchmarks", "bench_kernels.py")


def test_benchmark_runs_and_backends_agree(capsys):
    main = runpy.run_path(BENCH)["main"]
    assert main(["--repeats", "2", "--sizes", "16"]) == 0
    assert "ev/s" in capsys.readouterr().out
