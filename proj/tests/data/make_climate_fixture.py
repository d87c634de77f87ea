"""Regenerates the synthetic daily-climate fixture and its expected yearly table.

The expected table is computed here, independently of the C++ code.
"""
import calendar
import math

YEARS = range(2001, 2006)
SCALE = 0.1


def tmax(y, m, d):
    return 10 + m + d / 100 + 2 * (y - 2001)


def tmin(y, m, d):
    return 4 + m + 2 * (y - 2001)


def missing_tmax(y, m, d):
    return y == 2004 and (m == 7 or (m == 8 and d <= 10))


def days(y):
    for m in range(1, 13):
        for d in range(1, calendar.monthrange(y, m)[1] + 1):
            yield m, d


def fmt(v):
    return repr(float(v))


with open("climate_daily.csv", "w") as f:
    f.write("date,tmax,tmin,prcp,snow\n")
    for y in YEARS:
        for m, d in days(y):
            tx = "NA" if missing_tmax(y, m, d) else fmt(tmax(y, m, d))
            snow = 2 * (y - 2000) if m <= 2 else 0
            f.write(f"{y:04d}-{m:02d}-{d:02d},{tx},{fmt(tmin(y, m, d))},{y - 2000},{snow}\n")


def season(y, first, fn):
    vals = [fn(y, m, d) for m, d in days(y) if first <= m < first + 3]
    return max(vals) - min(vals), sum(vals) / len(vals)


def stats(y):
    out = {}
    for name, fn in (("tmax", tmax), ("tmin", tmin)):
        for sname, first in (("spring", 4), ("summer", 7)):
            out[(name, sname)] = season(y, first, fn)
    prcp = sum(y - 2000 for _ in days(y))
    snow = sum(2 * (y - 2000) for m, _ in days(y) if m <= 2)
    return out, math.log(prcp), math.log(snow)


names = []
for v in ("tmax", "tmin"):
    for s in ("spring", "summer"):
        names.append(f"range_{v}_{s}")
for v in ("tmax", "tmin"):
    for s in ("spring", "summer"):
        names.append(f"diff_mean_{v}_{s}")
names += ["log_prcp", "log_snow", "diff_log_prcp", "diff_log_snow"]
names += [n + "_sq" for n in names[:8]]

with open("climate_expected.csv", "w") as f:
    f.write("year," + ",".join(names) + "\n")
    for y in (2002, 2003):
        cur, lp, ls = stats(y)
        prev, plp, pls = stats(y - 1)
        row = []
        for v in ("tmax", "tmin"):
            for s in ("spring", "summer"):
                row.append(SCALE * cur[(v, s)][0])
        for v in ("tmax", "tmin"):
            for s in ("spring", "summer"):
                row.append(SCALE * (cur[(v, s)][1] - prev[(v, s)][1]))
        row += [lp, ls, lp - plp, ls - pls]
        row += [x * x for x in row[:8]]
        f.write(str(y) + "," + ",".join(fmt(x) for x in row) + "\n")
