"""End-to-end checks of the streamprop executable."""

import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

BIN = sys.argv[1]
failures = []


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("STREAMPROP_THREADS", None)
    full_env.update(env or {})
    return subprocess.run([BIN, *map(str, args)], capture_output=True, text=True, env=full_env)


def check(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + (f"  ({detail})" if detail and not cond else ""))
    if not cond:
        failures.append(name)


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    data = tmp / "synth"
    r = run("synth", "--out-dir", data, "--count", 6, "--seed", 100)
    check("synth exits 0", r.returncode == 0, r.stderr)
    images = sorted((data / "images").glob("*.ppm"))
    check("synth writes images", len(images) == 6)
    model = data / "model.txt"

    outs = {}
    for label, extra, env in [("t1", [], {}), ("env4", [], {"STREAMPROP_THREADS": "4"}),
                              ("flag3", ["--threads", 3], {"STREAMPROP_THREADS": "1"}),
                              ("pingpong", ["--scheduler", "pingpong"], {})]:
        out = tmp / f"{label}.csv"
        r = run("propose", "--image", images[0], "--model", model, "--out", out, *extra, env=env)
        check(f"propose {label} exits 0", r.returncode == 0, r.stderr)
        outs[label] = out.read_bytes() if out.exists() else b""
    check("proposals CSV header", outs["t1"].startswith(b"x0,y0,x1,y1,score\n"))
    check("proposals byte-identical across threads and schedulers", len(set(outs.values())) == 1)
    check("at most top_k proposals", outs["t1"].count(b"\n") - 1 <= 1000)

    cfg = tmp / "cfg.txt"
    cfg.write_text("budgets = [1, 1000]\ntop_k = 50\n")
    r = run("eval", "--images", data / "images", "--ann", data / "annotations.csv", "--model", model,
            "--config", cfg, "--out-dir", tmp / "eval")
    check("eval exits 0", r.returncode == 0, r.stderr)
    for name in ("dr.csv", "mabo.csv"):
        lines = (tmp / "eval" / name).read_text().splitlines() if (tmp / "eval" / name).exists() else []
        check(f"eval {name} has header + 2 rows", len(lines) == 3 and lines[0] == "nwin,value", lines)

    r = run("bench", "--images", data / "images", "--model", model, "--repeats", 2, "--scheduler", "pingpong")
    check("bench exits 0", r.returncode == 0, r.stderr)
    try:
        report = json.loads(r.stdout)
        check("bench report fields", all(k in report for k in ("fps", "stage_stats", "digests", "per_image")))
        check("bench deterministic", report["deterministic"] and len(set(report["digests"])) == 1)
        windows = sum((s["target"][0] - 7) * (s["target"][1] - 7)
                      for img in report["per_image"] for s in img["scales"])
        check("bench svm count closed form", report["stage_stats"]["svm"]["items_out"] == windows)
        check("bench pingpong traces", all("trace" in s for img in report["per_image"] for s in img["scales"]))
    except (json.JSONDecodeError, KeyError) as e:
        check("bench report parses", False, str(e))

    bad_model = tmp / "bad_model.txt"
    bad_model.write_text("1\n" * 63)
    bad_cfg = tmp / "bad_cfg.txt"
    bad_cfg.write_text("top_k = 0\n")
    p3 = tmp / "ascii.ppm"
    p3.write_text("P3\n1 1\n255\n0 0 0\n")
    for name, args in [
        ("missing image", ["propose", "--image", tmp / "nope.ppm", "--model", model, "--out", tmp / "x.csv"]),
        ("ascii ppm", ["propose", "--image", p3, "--model", model, "--out", tmp / "x.csv"]),
        ("short model", ["propose", "--image", images[0], "--model", bad_model, "--out", tmp / "x.csv"]),
        ("bad config", ["propose", "--image", images[0], "--model", model, "--config", bad_cfg, "--out", tmp / "x.csv"]),
        ("no model", ["propose", "--image", images[0], "--out", tmp / "x.csv"]),
        ("unknown flag", ["propose", "--frobnicate"]),
        ("empty bench dir", ["bench", "--images", tmp / "eval", "--model", model]),
    ]:
        r = run(*args)
        check(f"{name} exits 2", r.returncode == 2, f"rc={r.returncode} {r.stderr.strip()}")

    r = run("propose", "--image", images[0], "--model", model, "--out", tmp / "x.csv",
            env={"STREAMPROP_THREADS": "zero"})
    check("bad STREAMPROP_THREADS exits 2", r.returncode == 2, r.stderr)

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
