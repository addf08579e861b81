#!/usr/bin/env python3
"""Regenerates the bundled sample spectra under data/.

The curves are synthetic stand-ins for measured databases: smooth
reflectances, blackbody / fluorescent / LED illuminants, and a
three-channel camera response with equal channel areas.
"""
import math
import os
import sys

GRID = list(range(400, 701, 10))


def write_curve(path, values):
    with open(path, "w") as f:
        f.write("wavelength_nm,value\n")
        for wl, v in zip(GRID, values):
            f.write(f"{wl},{v:.10g}\n")


def gauss(mu, sigma):
    return [math.exp(-0.5 * ((wl - mu) / sigma) ** 2) for wl in GRID]


def sigmoid(mu, width):
    return [1.0 / (1.0 + math.exp(-(wl - mu) / width)) for wl in GRID]


def trapz(values):
    return sum(0.5 * (values[i] + values[i + 1]) * (GRID[i + 1] - GRID[i])
               for i in range(len(GRID) - 1))


def blackbody(kelvin):
    c2 = 1.4388e7  # nm*K
    vals = [1.0 / (wl ** 5 * (math.exp(c2 / (wl * kelvin)) - 1.0)) for wl in GRID]
    peak = max(vals)
    return [v / peak for v in vals]


def main(root):
    # Camera response: blue/green/red lobes with equal integrals.
    resp = [gauss(450, 22), gauss(545, 28), gauss(605, 30)]
    areas = [trapz(c) for c in resp]
    target = areas[1]
    resp = [[v * target / a for v in c] for c, a in zip(resp, areas)]
    with open(os.path.join(root, "response_default.csv"), "w") as f:
        f.write("wavelength_nm,r,g,b\n")
        for i, wl in enumerate(GRID):
            f.write(f"{wl},{resp[2][i]:.10g},{resp[1][i]:.10g},{resp[0][i]:.10g}\n")

    refl_dir = os.path.join(root, "reflectance")
    os.makedirs(refl_dir, exist_ok=True)
    refl = {}
    for level in (0.2, 0.5, 0.8):
        refl[f"gray_{int(level * 100):02d}"] = [level] * len(GRID)
    for i, (mu, width, lo, hi) in enumerate([
            (480, 15, 0.05, 0.85), (520, 20, 0.08, 0.9), (560, 12, 0.05, 0.8),
            (590, 18, 0.1, 0.9), (620, 10, 0.06, 0.75), (650, 25, 0.1, 0.7)]):
        s = sigmoid(mu, width)
        refl[f"rising_{i}"] = [lo + (hi - lo) * v for v in s]
        refl[f"falling_{i}"] = [hi - (hi - lo) * v for v in s]
    for i, (mu, sigma, lo, amp) in enumerate([
            (450, 30, 0.05, 0.7), (500, 35, 0.08, 0.6), (540, 30, 0.1, 0.75),
            (580, 40, 0.05, 0.5), (470, 50, 0.15, 0.5), (530, 60, 0.1, 0.6)]):
        g = gauss(mu, sigma)
        refl[f"peaked_{i}"] = [lo + amp * v for v in g]
    for name, vals in refl.items():
        write_curve(os.path.join(refl_dir, f"{name}.csv"), vals)

    illum_dir = os.path.join(root, "illuminants")
    os.makedirs(illum_dir, exist_ok=True)
    illum = {"equal_energy": [1.0] * len(GRID)}
    for k in (2700, 3200, 4000, 5000, 5500, 6500, 7500, 9000, 12000):
        illum[f"blackbody_{k}K"] = blackbody(k)
    base = blackbody(4200)
    spikes = [gauss(436, 4), gauss(546, 4), gauss(611, 5)]
    illum["fluorescent_cool"] = [0.5 * b + 0.9 * s0 + 1.0 * s1 + 0.5 * s2
                                 for b, s0, s1, s2 in zip(base, *spikes)]
    illum["fluorescent_green"] = [0.3 * b + 0.3 * s0 + 1.2 * s1 + 0.2 * s2
                                  for b, s0, s1, s2 in zip(base, *spikes)]
    illum["led_warm"] = [0.35 * a + b for a, b in zip(gauss(450, 10), gauss(590, 55))]
    illum["led_cool"] = [1.0 * a + 0.7 * b for a, b in zip(gauss(452, 11), gauss(560, 50))]
    for name, vals in illum.items():
        peak = max(vals)
        write_curve(os.path.join(illum_dir, f"{name}.csv"), [v / peak for v in vals])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "data"))
