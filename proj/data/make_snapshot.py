"""Regenerate the bundled illustrative snapshot.

GDP is synthetic (quarterly, USD bn, deterministic from a fixed seed).
CPI columns are annual index values typed in by hand; they are rough and
only meant to exercise the pipeline.
"""

import csv
import pathlib

import numpy as np

HERE = pathlib.Path(__file__).resolve().parent
CODES = ["BRA", "IND", "CHI", "MEX", "PER", "GER", "CAN", "FRA", "ITA", "JAP", "ESP", "UK", "USA"]
LEVEL_2012 = [620, 460, 2100, 300, 48, 950, 460, 700, 520, 1550, 340, 680, 4050]

CPI = {
    "BRA": [43, 42, 43, 38, 40, 37, 35, 35, 38, 38, 38, 36],
    "IND": [36, 36, 38, 38, 40, 40, 41, 41, 40, 40, 40, 39],
    "CHI": [72, 71, 73, 70, 66, 67, 67, 67, 67, 67, 67, 66],
    "MEX": [34, 34, 35, 35, 30, 29, 28, 29, 31, 31, 31, 31],
    "PER": [38, 38, 38, 36, 35, 37, 35, 36, 38, 36, 36, 33],
    "GER": [79, 78, 79, 81, 81, 81, 80, 80, 80, 80, 79, 78],
    "CAN": [84, 81, 81, 83, 82, 82, 81, 77, 77, 74, 74, 76],
    "FRA": [71, 71, 69, 70, 69, 70, 72, 69, 69, 71, 72, 71],
    "ITA": [42, 43, 43, 44, 47, 50, 52, 53, 53, 56, 56, 56],
    "JAP": [74, 74, 76, 75, 72, 73, 73, 73, 74, 73, 73, 73],
    "ESP": [65, 59, 60, 58, 58, 57, 58, 62, 62, 61, 60, 60],
    "UK": [74, 76, 78, 81, 81, 82, 80, 77, 77, 78, 73, 71],
    "USA": [73, 73, 74, 76, 74, 75, 71, 69, 67, 67, 69, 69],
}


def quarters():
    out = ["2012Q4"]
    for year in range(2013, 2024):
        out += [f"{year}Q{q}" for q in range(1, 5)]
    return out


def main():
    rng = np.random.default_rng(20240101)
    periods = quarters()
    growth = rng.normal(0.006, 0.012, size=(len(periods), len(CODES)))
    growth[29:31] -= 0.05  # 2020Q1-Q2 dip
    levels = np.array(LEVEL_2012, dtype=float) * np.exp(np.cumsum(growth, axis=0))

    with open(HERE / "gdp_quarterly.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["period"] + CODES)
        for t, period in enumerate(periods):
            w.writerow([period] + [f"{v:.1f}" for v in levels[t]])

    with open(HERE / "cpi_annual.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["period"] + CODES)
        for k, year in enumerate(range(2012, 2024)):
            w.writerow([year] + [CPI[c][k] for c in CODES])


if __name__ == "__main__":
    main()
