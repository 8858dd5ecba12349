"""Regenerate the bundled CSV snapshots.

Sources (offline, packaged with the `rdatasets` wheel, v0.2.10):
  * Ecdat::USGDPpresidents  - US CPI-U (1982-84=100), GDP deflator (2012=100),
    real GDP per capita (2012 $) from MeasuringWorth, BLS unemployment (LNS14000000
    annual averages, 1948 onward).
  * stevedata::pwt_sample   - Penn World Table 10.0 extract (rgdpna, rgdpe, rgdpo, pop).

Usage:  pip download --no-deps rdatasets==0.2.10 && python extract_snapshots.py <unpacked-wheel-dir>
"""
import csv
import os
import sys

sys.path.insert(0, sys.argv[1] if len(sys.argv) > 1 else ".")
import rdatasets  # noqa: E402

HERE = os.path.dirname(os.path.abspath(__file__))

PWT_COUNTRIES = {
    "USA": "us", "FRA": "fr", "DEU": "de", "GBR": "uk", "CAN": "ca",
    "AUS": "au", "ESP": "es", "AUT": "at", "JPN": "jp", "CHE": "ch",
}


def write(path, rows, fmt):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["year", "value"])
        for year, value in rows:
            w.writerow([int(year), fmt.format(value)])


def main():
    us = rdatasets.data("Ecdat", "USGDPpresidents")
    us = us[(us.Year >= 1929) & (us.Year <= 2020)]
    write(f"{HERE}/us/cpi.csv", zip(us.Year, us.CPI), "{:.2f}")
    write(f"{HERE}/us/dgdp.csv", zip(us.Year, us.GDPdeflator), "{:.2f}")
    write(f"{HERE}/us/gdppc_mw.csv", zip(us.Year, us.realGDPperCapita), "{:.0f}")
    bls = us[us.Year >= 1948]
    write(f"{HERE}/us/unemployment_bls.csv", zip(bls.Year, bls.unemployment), "{:.4f}")

    pwt = rdatasets.data("stevedata", "pwt_sample")
    for iso, code in PWT_COUNTRIES.items():
        c = pwt[pwt.isocode == iso].sort_values("year")
        for var in ("rgdpna", "rgdpe", "rgdpo"):
            ok = c[c[var].notna() & c["pop"].notna()]
            # millions of 2017 US$ / millions of persons -> 2017 US$ per person
            write(f"{HERE}/{code}/gdppc_pwt_{var[4:]}.csv",
                  zip(ok.year, ok[var] / ok["pop"]), "{:.2f}")


if __name__ == "__main__":
    main()
