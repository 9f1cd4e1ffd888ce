#!/usr/bin/env python3
"""Smoke test for the rqt_ladder_py extension module.

Build the module first, then run this script:

    cargo build -p rqt-ladder-py --release --features extension-module
    python3 python/smoke_test.py
"""

import math
import os
import shutil
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def ensure_module():
    built = os.path.join(ROOT, "target", "release", "librqt_ladder_py.so")
    staged = os.path.join(ROOT, "python", "rqt_ladder_py.so")
    if os.path.exists(built):
        shutil.copyfile(built, staged)
    if not os.path.exists(staged):
        sys.exit("build the extension first: "
                 "cargo build -p rqt-ladder-py --release --features extension-module")
    sys.path.insert(0, os.path.dirname(staged))


ensure_module()
import rqt_ladder_py as rl  # noqa: E402


def test_generate_and_validate():
    space = rl.generate_space(seed=7)
    assert len(space) == 6 * 21
    assert space.sequence_id == "synth-00007"
    report = space.validate()
    assert report["findings"] == []
    points = space.points()
    assert all(p["bitrate"] > 0 and p["decode_time"] > 0 for p in points)


def test_parse_roundtrip():
    csv_text = (
        "sequence_id,resolution,qp,bitrate_kbps,xpsnr_db,decode_time_s\n"
        "clip,1080,30,2500,38.9,12.5\n"
        "clip,2160,30,9000,42.0,33.0\n"
    )
    spaces = rl.parse_measurements(csv_text)
    assert len(spaces) == 1 and len(spaces[0]) == 2
    try:
        rl.parse_measurements(csv_text, strict=False)
        rl.parse_measurements("sequence_id,resolution\nclip,1080\n")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed csv must raise")


def test_fronts():
    space = rl.generate_space(seed=3)
    jqt = rl.front_jqt(space, "xpsnr", 2.0)
    jrqt = rl.front_jrqt(space, "xpsnr", 0.75)
    assert jqt and jrqt
    # bitrate strictly increases along an exported front
    rates = [row["bitrate_kbps"] for row in jqt]
    assert rates == sorted(rates)
    qualities = [row["quality"] for row in jrqt]
    assert qualities == sorted(qualities)


def test_ladders():
    space = rl.generate_space(seed=3)
    jrqt = rl.build_ladder(space, "jrqt", metric="xpsnr", alpha=0.75)
    assert jrqt.monotonic and jrqt.quality_is_monotone()
    rungs = jrqt.rungs()
    assert rungs, "ladder must have rungs"
    for rung in rungs:
        assert rung["achieved_kbps"] <= rung["target_kbps"]

    dynres = rl.build_ladder(space, "dynres")
    alpha0 = rl.build_ladder(space, "jrqt", alpha=0.0)
    key = [(r["target_kbps"], r["resolution"], r["qp"]) for r in dynres.rungs()]
    assert key == [(r["target_kbps"], r["resolution"], r["qp"]) for r in alpha0.rungs()]

    capped = rl.build_ladder(space, "timecap", tau_limit=24.0)
    assert all(r["decode_time_s"] <= 24.0 for r in capped.rungs())

    custom = rl.build_ladder(space, "jqt", alpha=2.0, targets=[500.0, 2000.0, 8000.0])
    assert [r["target_kbps"] for r in custom.rungs()] == [500.0, 2000.0, 8000.0]


def test_compare_and_bd():
    spaces = [rl.generate_space(seed=s) for s in range(5)]
    method = [rl.build_ladder(s, "jrqt", alpha=0.75) for s in spaces]
    reference = [rl.build_ladder(s, "fixed") for s in spaces]
    report = rl.compare(method, reference)
    assert len(report["sequences"]) == 5
    assert report["aggregate"]["bdr_xpsnr"]["count"] == 5
    assert report["aggregate"]["delta_t_d"]["mean"] < 0.0

    curve = [(1000.0, 34.0), (2000.0, 38.0), (4000.0, 42.0), (8000.0, 45.0)]
    doubled = [(2 * r, q) for r, q in curve]
    assert abs(rl.bd_rate(doubled, curve) - 100.0) < 1e-4
    lifted = [(r, q + 1.0) for r, q in curve]
    assert abs(rl.bd_quality(lifted, curve) - 1.0) < 1e-9
    halved = [(r / 2, q) for r, q in curve]
    assert abs(rl.bdde(halved, curve) + 50.0) < 5e-5

    assert rl.delta_decode_time([3.0, 3.0], [2.0, 2.0]) == 50.0
    assert math.isclose(rl.pearson([1, 2, 3, 4], [2, 4, 6, 8]), 1.0)


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} smoke tests passed")


if __name__ == "__main__":
    main()
