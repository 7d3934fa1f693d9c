#!/usr/bin/env python3
"""Regenerates the bundled 200-trading-day MSFT fixture under data/fixtures/msft200.

The output is deterministic. Prices follow a random walk whose daily drift
depends on that day's headline tone, so the sentiment channel carries signal.
"""
import csv
import datetime as dt
import math
import os
import random

TITLE_WS = " \t\r\n"


def fnv1a64(text: str) -> str:
    h = 0xCBF29CE484222325
    for b in text.strip(TITLE_WS).encode("utf-8"):
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


POSITIVE = [
    "Microsoft beats quarterly earnings estimates on cloud growth",
    "Microsoft raises full-year revenue guidance",
    "Analysts upgrade Microsoft to buy, citing Azure momentum",
    "Microsoft wins multibillion-dollar defense cloud contract",
    "Microsoft profits soar as enterprise demand accelerates",
    "Microsoft announces record buyback and higher dividend",
]
NEGATIVE = [
    "Microsoft shares slide after weak PC license sales",
    "Regulators open antitrust probe into Microsoft bundling",
    "Microsoft cuts outlook amid slowing hardware demand",
    "Analysts downgrade Microsoft on margin pressure",
    "Microsoft hit by outage across Office 365 services",
    "Microsoft misses revenue forecast as gaming weakens",
]
NEUTRAL = [
    "Microsoft to present at technology conference next week",
    "Microsoft names new head of developer division",
    "Microsoft schedules annual shareholder meeting",
    "Microsoft updates Windows release calendar",
]
HOLIDAYS = {dt.date(2019, 1, 21), dt.date(2019, 2, 18), dt.date(2019, 4, 19), dt.date(2019, 5, 27),
            dt.date(2019, 7, 4), dt.date(2019, 9, 2)}


def trading_days(start: dt.date, n: int):
    d = start
    out = []
    while len(out) < n:
        if d.weekday() < 5 and d not in HOLIDAYS:
            out.append(d)
        d += dt.timedelta(days=1)
    return out


def triple(tone: str, rng: random.Random):
    if tone == "pos":
        p = rng.uniform(0.70, 0.95)
        n = rng.uniform(0.0, 1.0 - p) * 0.4
    elif tone == "neg":
        n = rng.uniform(0.70, 0.95)
        p = rng.uniform(0.0, 1.0 - n) * 0.4
    else:
        u = rng.uniform(0.70, 0.95)
        p = (1.0 - u) * rng.uniform(0.3, 0.7)
        n = 1.0 - u - p
        return round(p, 6), round(n, 6), round(1.0 - round(p, 6) - round(n, 6), 6)
    p, n = round(p, 6), round(n, 6)
    return p, n, round(1.0 - p - n, 6)


def main():
    rng = random.Random(20190102)
    root = os.path.join(os.path.dirname(__file__), "..", "data", "fixtures", "msft200")
    os.makedirs(root, exist_ok=True)
    days = trading_days(dt.date(2019, 1, 2), 200)

    news = []  # (date, ticker, title, tone)
    scores = {}
    daily_tone = []
    for i, d in enumerate(days):
        k = rng.randint(0, 3)
        tones = []
        for j in range(k):
            tone = rng.choice(["pos", "pos", "neg", "neg", "neu"])
            pool = {"pos": POSITIVE, "neg": NEGATIVE, "neu": NEUTRAL}[tone]
            title = f"{rng.choice(pool)} ({d.isoformat()} #{j + 1})"
            news.append((d, "MSFT", title, tone))
            tones.append(tone)
        daily_tone.append(tones)
        # Friday news sometimes lands on Saturday and rolls to Monday.
        if d.weekday() == 4 and rng.random() < 0.5:
            sat = d + dt.timedelta(days=1)
            tone = rng.choice(["pos", "neg"])
            pool = POSITIVE if tone == "pos" else NEGATIVE
            news.append((sat, "MSFT", f"{rng.choice(pool)} (weekend {sat.isoformat()})", tone))

    for d, t, title, tone in news:
        scores[title] = (d, t, triple(tone, rng))

    # Tone of the day (including weekend news attached to Monday) drives the move.
    day_score = {d: [] for d in days}
    for d, _, title, _ in news:
        attach = next((x for x in days if x >= d and (x - d).days <= 5), None)
        if attach is not None:
            p, n, _ = scores[title][2]
            day_score[attach].append(p - n)

    rows = []
    prev_close = 101.5
    for d in days:
        s = sum(day_score[d]) / len(day_score[d]) if day_score[d] else 0.0
        open_ = prev_close * (1.0 + rng.gauss(0.0, 0.002))
        close = open_ * (1.0 + 0.012 * s + rng.gauss(0.0, 0.006))
        high = max(open_, close) * (1.0 + abs(rng.gauss(0.0, 0.003)))
        low = min(open_, close) * (1.0 - abs(rng.gauss(0.0, 0.003)))
        vol = int(2.0e7 * (1.0 + 0.5 * abs(s)) * math.exp(rng.gauss(0.0, 0.2)))
        rows.append([d.isoformat(), f"{open_:.4f}", f"{high:.4f}", f"{low:.4f}", f"{close:.4f}", str(vol)])
        prev_close = close

    # One corrupt bar (low above open) that ingestion must drop.
    bad = list(rows[57])
    bad[3] = f"{float(bad[1]) * 1.05:.4f}"
    bad_day = dt.date.fromisoformat(bad[0]) + dt.timedelta(days=0)
    rows_out = rows[:57] + [bad] + rows[58:]
    # ...and its clean replacement is missing, so that date has no bar.
    with open(os.path.join(root, "prices.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["Date", "Open", "High", "Low", "Close", "Volume"])
        for r in reversed(rows_out):  # newest first, like many exports
            w.writerow(r)

    with open(os.path.join(root, "news.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["date", "ticker", "title"])
        for d, t, title, _ in news:
            w.writerow([f"{d.isoformat()} 09:30:00", t, title])
        w.writerow([f"{days[3].isoformat()} 09:30:00", "MSFT", news[0][2] if news else "x"])  # duplicate-ish
        w.writerow([news[5][0].isoformat(), "MSFT", news[5][2]])  # exact duplicate after date parsing
        w.writerow(["not-a-date", "MSFT", "Headline with a broken date"])
        w.writerow([days[10].isoformat(), "MSFT", "   "])
        w.writerow([days[10].isoformat(), "AAPL", "Apple unveils new iPhone lineup"])

    with open(os.path.join(root, "sentiment.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["date", "ticker", "title_hash", "positive", "negative", "neutral"])
        for title, (d, t, (p, n, u)) in scores.items():
            w.writerow([d.isoformat(), t, fnv1a64(title), f"{p:.6f}", f"{n:.6f}", f"{u:.6f}"])
        w.writerow([days[10].isoformat(), "AAPL", fnv1a64("Apple unveils new iPhone lineup"), "0.6", "0.1", "0.3"])


if __name__ == "__main__":
    main()
