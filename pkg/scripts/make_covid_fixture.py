"""Reconstruct the bundled 2021-02-21 national-history daily file.

The shipped fixture reproduces the published monthly aggregates of the
covidtracking.com national-history download (hospitalizedIncrease,
positiveIncrease, deathIncrease).  Daily values are spread flat within each
month with the remainder pushed to the last days; the file is written newest
row first, matching the original wire format.

Run from the repo root:  python scripts/make_covid_fixture.py
"""

import calendar
import datetime as dt
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "decovid" / "data" / "national_history_20210221.csv"

# Monthly totals for the 2021-02-21 vintage (H, P, D).  March H and D carry
# the values implied by the published monthly growth rates (the integer
# aggregates printed elsewhere differ by <= 6 counts due to truncation in the
# source); the 4-count March/July D offset keeps the cumulative December 2020
# death total at 336802.
MONTHLY = {
    "2020-01": (0, 2, 0),
    "2020-02": (0, 16, 5),
    "2020-03": (6694, 196830, 4322),
    "2020-04": (38399, 876304, 55315),
    "2020-05": (73150, 718191, 41137),
    "2020-06": (31513, 831681, 19475),
    "2020-07": (63105, 1900163, 25253),
    "2020-08": (61144, 1457252, 30244),
    "2020-09": (37446, 1192663, 23329),
    "2020-10": (53485, 1892016, 23545),
    "2020-11": (92675, 4475990, 37065),
    "2020-12": (126244, 6323266, 77112),
    "2021-01": (120837, 6112572, 95387),
    "2021-02": (61054, 2374243, 71058),
}

FIRST_DAY = dt.date(2020, 1, 13)   # first row of the original download
LAST_DAY = dt.date(2021, 2, 21)    # vintage date


def spread(total: int, ndays: int) -> list[int]:
    base, rem = divmod(total, ndays)
    return [base + (1 if i >= ndays - rem else 0) for i in range(ndays)]


def main() -> None:
    rows = []
    for ym, (h, p, d) in MONTHLY.items():
        year, month = map(int, ym.split("-"))
        start = dt.date(year, month, 1)
        end = dt.date(year, month, calendar.monthrange(year, month)[1])
        if start < FIRST_DAY:
            start = FIRST_DAY
        if end > LAST_DAY:
            end = LAST_DAY
        days = [start + dt.timedelta(n) for n in range((end - start).days + 1)]
        for day, hh, pp, dd in zip(days, spread(h, len(days)), spread(p, len(days)), spread(d, len(days))):
            rows.append((day, hh, pp, dd))

    rows.sort(key=lambda r: r[0], reverse=True)
    death_cum = sum(r[3] for r in rows)
    pos_cum = sum(r[2] for r in rows)

    lines = ["date,death,deathIncrease,hospitalizedIncrease,positive,positiveIncrease,states"]
    for day, hh, pp, dd in rows:
        lines.append(f"{day.isoformat()},{death_cum},{dd},{hh},{pos_cum},{pp},56")
        death_cum -= dd
        pos_cum -= pp

    OUT.write_text("\n".join(lines) + "\n")
    print(f"wrote {OUT} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
