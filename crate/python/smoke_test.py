"""Builds the extension module with cargo and exercises it from Python.

Run from anywhere: python3 python/smoke_test.py
"""

import importlib.util
import json
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "immobilize2d-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    suffix = {"darwin": "dylib", "win32": "dll"}.get(sys.platform, "so")
    prefix = "" if sys.platform == "win32" else "lib"
    return ROOT / "target" / "release" / f"{prefix}immobilize2d_py.{suffix}"


def load(lib, tmp):
    target = pathlib.Path(tmp) / ("immobilize2d_py.pyd" if sys.platform == "win32" else "immobilize2d_py.so")
    shutil.copy(lib, target)
    found = importlib.util.spec_from_file_location("immobilize2d_py", target)
    module = importlib.util.module_from_spec(found)
    found.loader.exec_module(module)
    return module


def main():
    lib = build()
    with tempfile.TemporaryDirectory() as tmp:
        m = load(lib, tmp)

        body, pts = m.Body.fixture("remark")
        assert len(body) == 4 and body.is_exact()
        v = json.loads(m.classify(body, pts, "fix"))
        assert v["status"] == "FIRST_ORDER_INDETERMINATE", v["status"]
        esc = json.loads(m.escape(body, pts))
        assert esc["family"]["kind"] == "translation"

        body, pts = m.Body.fixture("opposite-corners")
        v = json.loads(m.classify(body, pts, "fix"))
        assert v["status"] == "NOT_WEAKLY_FIX"
        assert json.loads(m.classify(body, pts, mode="almost"))["status"] == "POSITIVE"
        r = json.loads(m.refine(body, pts, "1/5"))
        assert r["verdict"]["status"] == "POSITIVE"
        assert "<svg" in m.render(body, pts, json.dumps(v))

        square = m.Body.polygon([(-1, -1), (1, -1), (1, 1), (-1, 1)])
        assert square.contains(("1/2", 0.5)) == "interior"
        assert square.contains((1, "1/3")) == "boundary"
        assert square.locate((1, 0.5)) == (1, "3/4")
        straddle = [(1, "9/10"), (0.9, 1), (-1, -0.9), ("-9/10", -1)]
        assert json.loads(m.classify(square, straddle))["status"] == "POSITIVE"
        assert m.escape(square, straddle, samples=300, seed=3) is None
        assert m.Body.from_json(square.to_json()).to_json() == square.to_json()

        summary = json.loads(m.fuzz(seed=2, trials=5, escape_samples=200))
        assert summary["trials"] == 5 and not summary["violations"]

        for bad in (lambda: m.classify(square, [(2, 2)]), lambda: m.classify(square, [(1, 2, 3)]), lambda: m.Body.fixture("nope"), lambda: m.refine(square, straddle, 0)):
            try:
                bad()
            except ValueError:
                pass
            else:
                raise AssertionError("expected ValueError")
    print("smoke test passed")


if __name__ == "__main__":
    main()
