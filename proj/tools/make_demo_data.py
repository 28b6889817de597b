#!/usr/bin/env python3
"""Writes the synthetic demo CSVs under data/demo.

These series are generated, not observed. They exist so the CLI, service and
tests have realistic-shaped inputs (cumulative case counts with gaps, daily
closing prices on trading days) without shipping third-party data.
"""
import csv
import json
import datetime as dt
import sys
from pathlib import Path

import numpy as np

COUNTRIES = {
    "ALB": ("Albania", 2.8e6), "AUT": ("Austria", 8.9e6), "BEL": ("Belgium", 11.6e6),
    "BGR": ("Bulgaria", 6.9e6), "BIH": ("Bosnia and Herzegovina", 3.3e6),
    "BLR": ("Belarus", 9.4e6), "CHE": ("Switzerland", 8.7e6), "CYP": ("Cyprus", 1.2e6),
    "CZE": ("Czechia", 10.7e6), "DEU": ("Germany", 83.2e6), "DNK": ("Denmark", 5.8e6),
    "ESP": ("Spain", 47.4e6), "EST": ("Estonia", 1.3e6), "FIN": ("Finland", 5.5e6),
    "FRA": ("France", 67.4e6), "GBR": ("United Kingdom", 67.2e6), "GEO": ("Georgia", 3.7e6),
    "GRC": ("Greece", 10.7e6), "HRV": ("Croatia", 4.0e6), "HUN": ("Hungary", 9.7e6),
    "IRL": ("Ireland", 5.0e6), "ISL": ("Iceland", 0.37e6), "ITA": ("Italy", 59.1e6),
    "KAZ": ("Kazakhstan", 18.8e6), "LTU": ("Lithuania", 2.8e6), "LUX": ("Luxembourg", 0.63e6),
    "LVA": ("Latvia", 1.9e6), "MDA": ("Moldova", 2.6e6), "MKD": ("North Macedonia", 2.1e6),
    "MLT": ("Malta", 0.52e6), "MNE": ("Montenegro", 0.62e6), "NLD": ("Netherlands", 17.4e6),
    "NOR": ("Norway", 5.4e6), "POL": ("Poland", 38.0e6), "PRT": ("Portugal", 10.3e6),
    "ROU": ("Romania", 19.1e6), "RUS": ("Russia", 145.9e6), "SRB": ("Serbia", 6.9e6),
    "SVK": ("Slovakia", 5.5e6), "SVN": ("Slovenia", 2.1e6), "SWE": ("Sweden", 10.4e6),
    "TUR": ("Turkey", 84.3e6), "UKR": ("Ukraine", 44.1e6), "ARM": ("Armenia", 3.0e6),
    "AZE": ("Azerbaijan", 10.1e6), "ISR": ("Israel", 9.2e6), "USA": ("United States", 331.9e6),
    "CAN": ("Canada", 38.0e6), "JPN": ("Japan", 125.7e6), "KOR": ("South Korea", 51.7e6),
}

TICKERS = [
    "AAPL", "ABT", "ADI", "AMT", "AMZN", "APH", "BDX", "CAH", "CCI", "CHD", "CHTR", "CI",
    "CL", "CLX", "CMCSA", "COR", "COST", "CVS", "DG", "DIS", "DOV", "EL", "ELV", "EMR",
    "ETN", "GLW", "GOOGL", "GRMN", "GIS", "HD", "HON", "HSIC", "HSY", "HUBB", "IBM", "INTC",
    "JNJ", "JPM", "K", "KEYS", "KMB", "KO", "KR", "LMT", "MCD", "MCK", "MDLZ", "MMM", "MRK",
    "MSFT", "NFLX", "NVDA", "OMC", "ORCL", "PEP", "PFE", "PG", "ROK", "SBAC", "SJM", "SYY",
    "T", "TEL", "TGT", "TMUS", "TXN", "UNH", "VZ", "WBA", "WMT", "XOM", "ZBRA",
]

# NYSE full-day closures in 2024.
HOLIDAYS_2024 = {
    "2024-01-01", "2024-01-15", "2024-02-19", "2024-03-29", "2024-05-27", "2024-06-19",
    "2024-07-04", "2024-09-02", "2024-11-28", "2024-12-25",
}


def covid(out: Path, rng: np.random.Generator) -> None:
    start, end = dt.date(2020, 3, 1), dt.date(2021, 9, 30)
    days = (end - start).days + 1
    t = np.arange(days)
    with out.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["iso_code", "location", "date", "total_cases", "population"])
        for code, (name, pop) in sorted(COUNTRIES.items()):
            attack = rng.uniform(0.02, 0.16)
            waves = rng.integers(2, 5)
            centers = np.sort(rng.uniform(60, days - 30, waves))
            widths = rng.uniform(12, 35, waves)
            shares = rng.dirichlet(np.ones(waves))
            frac = sum(s / (1 + np.exp(-(t - c) / wd)) for s, c, wd in zip(shares, centers, widths))
            cases = np.floor(pop * attack * frac * rng.uniform(0.97, 1.03))
            cases = np.maximum.accumulate(np.maximum(cases, 1))
            gap_rate = 0.3 if code == "TUR" else 0.01  # one country fails validation
            for i in range(days):
                if rng.random() < gap_rate:
                    continue
                d = start + dt.timedelta(days=int(i))
                w.writerow([code, name, d.isoformat(), int(cases[i]), int(pop)])


def stocks(out: Path, rng: np.random.Generator) -> None:
    d, end = dt.date(2024, 1, 2), dt.date(2024, 12, 31)
    dates = []
    while d <= end:
        if d.weekday() < 5 and d.isoformat() not in HOLIDAYS_2024:
            dates.append(d)
        d += dt.timedelta(days=1)
    with out.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["ticker", "name", "date", "close"])
        names = json.loads((Path(__file__).resolve().parent.parent / "data/aliases/sp500.json").read_text())
        for ticker in TICKERS:
            drift = rng.normal(0.0004, 0.0012)
            vol = rng.uniform(0.006, 0.025)
            price = rng.uniform(20, 400) * np.exp(np.cumsum(rng.normal(drift, vol, len(dates))))
            for day, p in zip(dates, price):
                w.writerow([ticker, names[ticker][0], day.isoformat(), f"{p:.2f}"])


def main() -> None:
    root = Path(sys.argv[1] if len(sys.argv) > 1 else "data/demo")
    root.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20240101)
    covid(root / "covid_demo.csv", rng)
    stocks(root / "sp500_demo.csv", rng)
    print(f"wrote synthetic demo data to {root}")


if __name__ == "__main__":
    main()
