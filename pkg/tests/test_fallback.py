import os
import subprocess
import sys


def test_pure_python_switch():
    env = dict(os.environ, GRAPHWORDS_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import graphwords.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
