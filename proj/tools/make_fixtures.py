#!/usr/bin/env python3
# Copyright 2026 The ppbench Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the synthetic stand-in datasets under data/.

The files mimic the column layout and row counts of the UCI Dow Jones Index
(750 rows) and Bank Marketing (bank.csv, 4521 rows) datasets. Values are drawn
from a fixed seed; they are not the real data.
"""

import csv
import datetime
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data"

DOW_STOCKS = [
    "AA", "AXP", "BA", "BAC", "CAT", "CSCO", "CVX", "DD", "DIS", "GE",
    "HD", "HPQ", "IBM", "INTC", "JNJ", "JPM", "KO", "KRFT", "MCD", "MMM",
    "MRK", "MSFT", "PFE", "PG", "T", "TRV", "UTX", "VZ", "WMT", "XOM",
]


def dow_jones(rng):
    header = [
        "quarter", "stock", "date", "open", "high", "low", "close", "volume",
        "percent_change_price", "percent_change_volume_over_last_wk",
        "previous_weeks_volume", "next_weeks_open", "next_weeks_close",
        "percent_change_next_weeks_price", "days_to_next_dividend",
        "percent_return_next_dividend",
    ]
    rows = []
    start = datetime.date(2011, 1, 7)
    for stock in DOW_STOCKS:
        price = rng.uniform(15, 110)
        prev_volume = None
        for week in range(25):
            date = start + datetime.timedelta(weeks=week)
            quarter = 1 if date.month <= 3 else 2
            open_ = price
            close = max(1.0, open_ * (1 + rng.gauss(0, 0.03)))
            high = max(open_, close) * (1 + abs(rng.gauss(0, 0.01)))
            low = min(open_, close) * (1 - abs(rng.gauss(0, 0.01)))
            volume = int(rng.lognormvariate(17.5, 0.9))
            next_open = close * (1 + rng.gauss(0, 0.005))
            next_close = next_open * (1 + rng.gauss(0, 0.03))
            rows.append([
                quarter, stock, f"{date.month}/{date.day}/{date.year}",
                f"{open_:.2f}", f"{high:.2f}", f"{low:.2f}", f"{close:.2f}", volume,
                f"{100 * (close - open_) / open_:.5f}",
                "" if prev_volume is None else f"{100 * (volume - prev_volume) / prev_volume:.5f}",
                "" if prev_volume is None else prev_volume,
                f"{next_open:.2f}", f"{next_close:.2f}",
                f"{100 * (next_close - next_open) / next_open:.5f}",
                rng.randint(0, 120), f"{rng.uniform(0, 1.5):.5f}",
            ])
            prev_volume = volume
            price = close
    with open(ROOT / "dow_jones_index.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return len(rows)


def bank(rng):
    header = [
        "age", "job", "marital", "education", "default", "balance", "housing",
        "loan", "contact", "day", "month", "duration", "campaign", "pdays",
        "previous", "poutcome", "y",
    ]
    jobs = ["admin.", "blue-collar", "entrepreneur", "housemaid", "management",
            "retired", "self-employed", "services", "student", "technician",
            "unemployed", "unknown"]
    months = ["jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep",
              "oct", "nov", "dec"]
    rows = []
    for _ in range(4521):
        pdays = -1 if rng.random() < 0.8 else rng.randint(1, 400)
        rows.append([
            rng.randint(19, 87), rng.choice(jobs),
            rng.choice(["married", "single", "divorced"]),
            rng.choice(["primary", "secondary", "tertiary", "unknown"]),
            rng.choice(["no"] * 9 + ["yes"]),
            int(rng.expovariate(1 / 1400)),
            rng.choice(["yes", "no"]), rng.choice(["no"] * 5 + ["yes"]),
            rng.choice(["cellular", "telephone", "unknown"]),
            rng.randint(1, 31), rng.choice(months), rng.randint(4, 3025),
            rng.randint(1, 50), pdays, 0 if pdays < 0 else rng.randint(1, 25),
            "unknown" if pdays < 0 else rng.choice(["failure", "other", "success"]),
            rng.choice(["no"] * 8 + ["yes"]),
        ])
    # The UCI file is semicolon separated with quoted text fields.
    with open(ROOT / "bank.csv", "w", newline="") as f:
        w = csv.writer(f, delimiter=";", quoting=csv.QUOTE_NONNUMERIC, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return len(rows)


if __name__ == "__main__":
    ROOT.mkdir(exist_ok=True)
    rng = random.Random(20190501)
    print("dow_jones_index.csv", dow_jones(rng))
    print("bank.csv", bank(rng))
