#!/usr/bin/env python3
"""Freeze soft-limiter reference outputs from the channel simulator.

Regenerating: python3 scripts/make-softclip-fixture.py > tests/fixtures/softclip.json
Inputs are seeded, so the file is stable; it pins the TypeScript port of
the limiter to the simulator's float64 arithmetic.
"""
import json

import numpy as np
from paprsim.core import TimeFrame
from paprsim.gradients import SoftClipConfig, soft_clip


def build_cases():
    rng = np.random.default_rng(20260822)
    cases = []
    specs = [
        ("gaussian", 64, 1.0, 1e-12, 1.0),
        ("gaussian", 64, 1.4, 1e-12, 1.0),
        ("gaussian", 64, 2.0, 1e-12, 1.0),
        ("gaussian", 32, 1.4, 1e-6, 1.0),
        ("tiny", 64, 1.4, 1e-12, 1e-8),
        ("huge", 64, 1.4, 1e-12, 1e6),
        ("with-zero", 64, 1.2, 1e-12, 1.0),
    ]
    for kind, n, rho, gamma, scale in specs:
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        z = z * (scale / np.sqrt(2.0))
        if kind == "with-zero":
            z[5] = 0.0
            z[17] = 0.0
        clipped, _ = soft_clip(TimeFrame(np.asarray(z)), SoftClipConfig(rho=rho, gamma=gamma))
        out = clipped.samples
        cases.append(
            {
                "kind": kind,
                "rho": rho,
                "gamma": gamma,
                "re": z.real.tolist(),
                "im": z.imag.tolist(),
                "outRe": out.real.tolist(),
                "outIm": out.imag.tolist(),
            }
        )
    return cases


if __name__ == "__main__":
    print(json.dumps({"cases": build_cases()}, indent=1))
