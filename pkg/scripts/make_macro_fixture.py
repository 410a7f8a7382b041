"""Generate src/decovid/data/macro_sample.csv, the bundled monthly panel.

Six synthetic series in the FRED-MD wire format, 1960-01 through 2020-12,
with a two-factor stationary core and a distributed-lag virus term entering
the final ten months on each series' transformed scale.  The virus growth
path is the P indicator from the bundled daily fixture, so a q=2 model-4
regression can remove the injected variation almost exactly.

Deterministic: rerunning reproduces the file byte for byte.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from decovid.indicators import build_indicator
from decovid.ingest import parse_covid_tracking

OUT = Path(__file__).resolve().parents[1] / "src" / "decovid" / "data" / "macro_sample.csv"
COVID = OUT.parent / "national_history_20210221.csv"

T_RAW = 732              # 1960-01 .. 2020-12
BURN = 120
SEED = 20210221

SERIES = ["OUTPUT", "EMPLOY", "URATE", "PRICES", "FFRATE", "HSTART"]
TCODES = [5, 5, 2, 6, 1, 4]


def ar1(rng, phi, sigma, T, size=1):
    x = np.zeros((T + BURN, size))
    shocks = rng.normal(0, sigma, size=(T + BURN, size))
    for t in range(1, T + BURN):
        x[t] = phi * x[t - 1] + shocks[t]
    return x[BURN:]


def main():
    rng = np.random.default_rng(SEED)
    months = np.arange(np.datetime64("1960-01", "M"), np.datetime64("2021-01", "M"))
    assert len(months) == T_RAW

    f = np.column_stack([ar1(rng, 0.7, 1.0, T_RAW)[:, 0], ar1(rng, 0.4, 1.0, T_RAW)[:, 0]])
    lam = np.array([
        [0.9, 0.2],
        [0.8, -0.3],
        [-0.7, 0.4],
        [0.3, 0.6],
        [0.4, -0.5],
        [0.5, 0.5],
    ])
    e = ar1(rng, 0.2, 0.6, T_RAW, size=6)
    z = f @ lam.T + e
    z /= z.std(axis=0, ddof=1)

    v = np.zeros(T_RAW)
    daily = parse_covid_tracking(COVID.read_text())
    ind = build_indicator(daily, "P")
    for i, m in enumerate(ind.months):
        if m >= np.datetime64("2020-03", "M"):
            j = np.flatnonzero(months == m)
            if j.size:
                v[j[0]] = ind.v[i]

    def dlag(theta):
        out = np.zeros(T_RAW)
        for k, th in enumerate(theta):
            if k:
                out[k:] += th * v[:-k]
            else:
                out += th * v
        return out

    raw = np.zeros((T_RAW, 6))
    # OUTPUT, EMPLOY: tcode 5, factor structure in the growth rate.  The
    # virus terms are sized so the 2020 collapse dwarfs the historical IQR,
    # as in the real data: March lands 14-16 sd below trend, then a partial
    # rebound.
    for j, (scale, theta) in enumerate([(0.009, (-1.70, -0.55, 0.25)),
                                        (0.007, (-1.50, -0.70, 0.30))]):
        growth = scale * z[:, j] + scale * dlag(theta)
        raw[:, j] = 100.0 * np.exp(np.cumsum(growth))
    # URATE: tcode 2, stationary level around 5 with a pandemic spike
    raw[:, 2] = 5.0 + 1.5 * z[:, 2] + dlag((0.90, 0.35))
    # PRICES: tcode 6, stationary inflation with a small positive drift
    infl = 0.003 + 0.0012 * z[:, 3] + 0.0012 * dlag((0.80, 0.30))
    raw[:, 3] = 30.0 * np.exp(np.cumsum(infl))
    # FFRATE: tcode 1, stationary level, cut toward zero in the outbreak
    raw[:, 4] = 4.0 + 1.8 * z[:, 4] + dlag((-0.45, -0.20, 0.10))
    # HSTART: tcode 4, stationary log level
    raw[:, 5] = np.exp(np.log(1400.0) + 0.12 * z[:, 5] + 0.12 * dlag((-0.55, -0.20, 0.12)))

    missing = [("1974-06", 1), ("1975-11", 3), ("1983-02", 5), ("1991-07", 1), ("1995-04", 3)]
    miss_idx = [(int(np.flatnonzero(months == np.datetime64(m, "M"))[0]), j) for m, j in missing]

    lines = ["sasdate," + ",".join(SERIES)]
    lines.append("Transform:," + ",".join(str(c) for c in TCODES))
    for t, m in enumerate(months):
        y, mo = str(m).split("-")
        cells = []
        for j in range(6):
            if (t, j) in miss_idx:
                cells.append("")
            else:
                cells.append(repr(float(raw[t, j])))
        lines.append(f"{int(mo)}/1/{y}," + ",".join(cells))
    OUT.write_text("\n".join(lines) + "\n")
    print(f"wrote {OUT} ({T_RAW} months x 6 series)")


if __name__ == "__main__":
    main()
