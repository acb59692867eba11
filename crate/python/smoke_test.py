#!/usr/bin/env python3
"""Smoke test for the scsim extension module.

Builds nothing itself: run `cargo build -p scsim-py` first (or pass
--release and build that profile). The script locates the compiled
cdylib, stages it under the importable name, and exercises each exposed
surface once.
"""

import argparse
import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def stage_module(profile: str) -> Path:
    built = REPO / "target" / profile / "libscsim.so"
    if not built.exists():
        sys.exit(f"{built} not found; run `cargo build -p scsim-py` first")
    stage = Path(tempfile.mkdtemp(prefix="scsim-py-"))
    shutil.copy2(built, stage / "scsim.so")
    return stage


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--release", action="store_true", help="use target/release")
    args = parser.parse_args()

    sys.path.insert(0, str(stage_module("release" if args.release else "debug")))
    import scsim

    # Encoding and decoding.
    s = scsim.encode(0.7, 100_000, seed=1)
    assert len(s) == 100_000
    assert abs(s.value() - 0.7) < 0.01, s.value()
    assert scsim.encode(0.7, 100_000, seed=1) == s, "same seed must reproduce"

    # Correlation control.
    a, b = scsim.encode_pair(0.6, 0.3, 100_000, "positive", seed=2)
    assert scsim.scc(a, b) > 0.95
    assert scsim.gate_apply("and", a, b) == b, "positive streams nest"

    # Gate closed forms and measurement.
    assert math.isclose(scsim.oracle("xor", "positive", 0.7, 0.2), 0.5)
    report = scsim.verify_gate("xor", "positive", 0.7, 0.2, 100_000, seed=7)
    assert report["abs_error"] < 0.01, report

    # MUX with an explicit select stream (half rate, each bit held twice).
    sel = scsim.encode(0.5, 500, seed=3)
    x, y = scsim.encode_pair(0.9, 0.1, 1000, "uncorrelated", seed=4)
    mux = scsim.gate_mux(x, y, sel)
    assert abs(mux.value() - 0.5) < 0.1

    # Fault injection: a shared mask cancels in XOR, independent flips do not.
    fa, fb = scsim.inject_flips_pair(a, b, "shared-mask", 0.5, seed=5)
    assert scsim.gate_apply("xor", fa, fb) == scsim.gate_apply("xor", a, b)
    flipped = scsim.inject_flips(s, "independent", 0.5, seed=6)
    assert abs(flipped.value() - 0.5) < 0.01

    # Device model curves and sampling.
    assert math.isclose(scsim.p_uncorrelated(1.34), 0.5)
    assert math.isclose(scsim.v_in_for(0.25), scsim.v_in_for(0.25))
    da, db = scsim.sne_sample_pair(0.42, 0.42, 10_000, seed=8)
    assert da == db, "equal targets share every bit"
    traj = scsim.vth_trajectory(10_000, seed=9)
    mean = sum(traj) / len(traj)
    assert abs(mean - 0.729) < 0.05, mean

    # Imaging pipeline end to end.
    img = scsim.read_pgm(str(REPO / "assets" / "horse_stand_in.pgm"))
    assert (img.width, img.height) == (64, 64)
    exact = scsim.reference_roberts(img)
    noisy = scsim.stochastic_roberts(img, 256, seed=10)
    assert noisy.width == img.width - 1
    got, want = noisy.to_image(), exact.to_image()
    quality = scsim.ssim(got, want)
    assert quality.mean() > 0.95, quality.mean()
    assert scsim.psnr(got, want) > 30.0
    assert scsim.psnr(want, want) == math.inf

    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "roundtrip.pgm"
        scsim.write_pgm(got, str(out))
        assert scsim.read_pgm(str(out)) == got

    # Errors surface as exceptions.
    try:
        scsim.encode(1.5, 10, seed=0)
    except ValueError:
        pass
    else:
        sys.exit("out-of-range probability must raise")

    print("smoke test passed")


if __name__ == "__main__":
    main()
