#!/usr/bin/env python3
"""Regenerates data/aliases/countries.json from pycountry (ISO 3166-1)."""
import json
import sys
from pathlib import Path

import pycountry

# Short names people actually write, where ISO's are formal.
COMMON = {
    "BOL": "Bolivia", "BRN": "Brunei", "COD": "DR Congo", "CZE": "Czechia",
    "FSM": "Micronesia", "GBR": "United Kingdom", "IRN": "Iran", "KOR": "South Korea",
    "PRK": "North Korea", "LAO": "Laos", "MDA": "Moldova", "PSE": "Palestine",
    "RUS": "Russia", "SYR": "Syria", "TWN": "Taiwan", "TZA": "Tanzania",
    "USA": "United States", "VEN": "Venezuela", "VNM": "Vietnam", "TUR": "Turkey",
    "CIV": "Cote d'Ivoire", "MKD": "North Macedonia", "VAT": "Vatican",
}
EXTRA = {
    "GBR": ["UK", "Great Britain", "Britain"],
    "USA": ["US", "USA", "United States of America", "America"],
    "NLD": ["Holland", "The Netherlands"],
    "CZE": ["Czech Republic"],
    "TUR": ["Turkiye", "Türkiye"],
    "KOR": ["Korea"],
    "RUS": ["Russian Federation"],
    "MDA": ["Republic of Moldova"],
}

out = {}
for c in pycountry.countries:
    code = c.alpha_3
    names = [COMMON.get(code, getattr(c, "common_name", None) or c.name)]
    for n in (c.name, getattr(c, "official_name", None), getattr(c, "common_name", None)):
        if n and n not in names:
            names.append(n)
    for n in EXTRA.get(code, []):
        if n not in names:
            names.append(n)
    out[code] = names

dest = Path(sys.argv[1] if len(sys.argv) > 1 else "data/aliases/countries.json")
dest.write_text(json.dumps(out, indent=1, sort_keys=True, ensure_ascii=False) + "\n")
print(f"wrote {len(out)} countries to {dest}")
