#!/usr/bin/env python3
"""Generates the offline fixture corpus under fixtures/.

Output is deterministic for a given seed. Layout:
  cdo/<endpoint>.json        CDO emulator corpora {"results": [...], "filters": {...}}
  nominatim/reverse_*.json   jsonv2 reverse-geocoding answers, one per station
  wikidata.nt                Wikidata extract (labels, P31, P206)
  supplementary.nt           cross-domain data keyed on station IRIs
  config.json                sync config pointing at this directory
"""

import argparse
import datetime as dt
import json
import random
from pathlib import Path

BASE = "http://jresearch.ucd.ie/climate-kg/"
WD = "http://www.wikidata.org/entity/"
WDT = "http://www.wikidata.org/prop/direct/"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
ENV = "http://jresearch.ucd.ie/climate-kg/env#"

FIRST_DAY = dt.date(2023, 6, 1)
DAYS = 122  # through 2023-09-30

# Water bodies (Q-ids are illustrative).
WATER = {
    "Q97": "Atlantic Ocean",
    "Q1693": "North Sea",
    "Q38279": "Irish Sea",
    "Q131257": "Celtic Sea",
    "Q1129519": "Dublin Bay",
    "Q218744": "River Liffey",
    "Q1476178": "River Lee",
    "Q19686": "River Thames",
    "Q211716": "River Clyde",
    "Q191033": "River Shannon",
}

# Administrative areas: key -> (level, name, qid, parent key, water bodies).
AREAS = {
    "ie": ("country", "Ireland", "Q27", None, ["Q97", "Q38279", "Q131257"]),
    "gb": ("country", "United Kingdom", "Q145", None, ["Q97", "Q1693", "Q38279"]),
    "leinster": ("state", "Leinster", "Q83049", "ie", ["Q38279"]),
    "munster": ("state", "Munster", "Q83048", "ie", ["Q97", "Q131257"]),
    "connacht": ("state", "Connacht", "Q83058", "ie", ["Q97"]),
    "ulster": ("state", "Ulster", "Q83051", "ie", []),
    "england": ("state", "England", "Q21", "gb", ["Q1693"]),
    "scotland": ("state", "Scotland", "Q22", "gb", ["Q1693", "Q97"]),
    "wales": ("state", "Wales", "Q25", "gb", ["Q38279"]),
    "nireland": ("state", "Northern Ireland", "Q26", "gb", ["Q38279"]),
    "co-dublin": ("county", "County Dublin", "Q173500", "leinster", ["Q38279", "Q1129519"]),
    "co-cork": ("county", "County Cork", "Q162475", "munster", ["Q131257", "Q97"]),
    "co-kerry": ("county", "County Kerry", "Q184469", "munster", ["Q97"]),
    "co-galway": ("county", "County Galway", "Q183337", "connacht", ["Q97", "Q191033"]),
    "co-offaly": ("county", "County Offaly", "Q184533", "leinster", ["Q191033"]),
    "co-donegal": ("county", "County Donegal", "Q179325", "ulster", ["Q97"]),
    "co-wexford": ("county", "County Wexford", "Q184480", "leinster", ["Q38279"]),
    "co-mayo": ("county", "County Mayo", "Q178284", "connacht", ["Q97"]),
    "gt-london": ("county", "Greater London", "Q23306", "england", ["Q19686"]),
    "devon": ("county", "Devon", "Q23156", "england", ["Q97"]),
    "yorkshire": ("county", "North Yorkshire", "Q179722", "england", ["Q1693"]),
    "glasgow-ca": ("county", "Glasgow City", "Q1020000", "scotland", ["Q211716"]),
    "highland": ("county", "Highland", "Q208279", "scotland", ["Q97", "Q1693"]),
    "cardiff-ca": ("county", "Cardiff", "Q1020001", "wales", []),
    "antrim": ("county", "County Antrim", "Q189592", "nireland", ["Q38279"]),
    "dublin": ("city", "Dublin", "Q1761", "co-dublin", ["Q1129519", "Q218744"]),
    "cork": ("city", "Cork", "Q36647", "co-cork", ["Q1476178"]),
    "galway": ("city", "Galway", "Q129610", "co-galway", ["Q97"]),
    "london": ("city", "London", "Q84", "gt-london", ["Q19686"]),
    "glasgow": ("city", "Glasgow", "Q4093", "glasgow-ca", ["Q211716"]),
    "cardiff": ("city", "Cardiff", "Q10690", "cardiff-ca", []),
    "belfast": ("city", "Belfast", "Q10686", "antrim", []),
    "york": ("city", "York", "Q42462", "yorkshire", []),
    "birr": ("town", "Birr", "Q1016823", "co-offaly", []),
    "killarney": ("town", "Killarney", "Q1016955", "co-kerry", []),
    "letterkenny": ("town", "Letterkenny", "Q1017136", "co-donegal", []),
    "rosslare": ("town", "Rosslare", "Q1017357", "co-wexford", ["Q38279"]),
    "belmullet": ("town", "Belmullet", "Q1016785", "co-mayo", ["Q97"]),
    "exeter": ("city", "Exeter", "Q134672", "devon", []),
    "inverness": ("city", "Inverness", "Q160493", "highland", []),
    "phoenix-park": ("suburb", "Phoenix Park", "Q1130766", "dublin", []),
    "ballincollig": ("suburb", "Ballincollig", "Q1017001", "cork", []),
    "valentia": ("village", "Valentia Island", "Q1058906", "co-kerry", ["Q97"]),
    "heathrow": ("suburb", "Heathrow", "Q1045002", "london", []),
}

# Stations: (id suffix, name, lat, lon, elevation m, finest area key or None, datatypes, country).
# None means the coordinate is offshore and the geocoder has nothing for it.
FIXED_STATIONS = [
    ("EI000003969", "DUBLIN PHOENIX PARK", 53.364, -6.350, 48.0, "phoenix-park", "TTP", "EI"),
    ("EI000003955", "CORK AIRPORT", 51.847, -8.486, 155.0, "co-cork", "TTP", "EI"),
    ("EI000003953", "VALENTIA OBSERVATORY", 51.938, -10.241, 24.9, "valentia", "TTP", "EI"),
    ("EI000003965", "BIRR", 53.090, -7.890, 72.0, "birr", "TTP", "EI"),
    ("EI000003976", "BELMULLET", 54.228, -10.007, 9.0, "belmullet", "TTP", "EI"),
    ("EI000003957", "ROSSLARE", 52.250, -6.333, 25.0, "rosslare", "TP", "EI"),
    ("EI000003980", "MALIN HEAD", 55.372, -7.339, 20.0, "co-donegal", "TTP", "EI"),
    ("EI000003962", "DUBLIN MERRION SQUARE", 53.339, -6.249, 14.0, "dublin", "TP", "EI"),
    ("EI000003904", "CORK CITY HALL", 51.898, -8.470, 8.0, "cork", "P", "EI"),
    ("EI000003920", "BALLINCOLLIG", 51.888, -8.590, 40.0, "ballincollig", "TP", "EI"),
    ("EI000003971", "GALWAY UNIVERSITY", 53.278, -9.061, 10.0, "galway", "TTP", "EI"),
    ("EI000003940", "KILLARNEY", 52.059, -9.504, 34.0, "killarney", "TP", "EI"),
    ("EI000003990", "LETTERKENNY", 54.950, -7.733, 18.0, "letterkenny", "P", "EI"),
    ("EIM00062095", "M5 BUOY", 51.690, -6.704, 0.0, None, "T", "EI"),
    ("UK000003772", "LONDON HEATHROW", 51.479, -0.449, 25.3, "heathrow", "TTP", "UK"),
    ("UK000056225", "LONDON ST JAMES PARK", 51.504, -0.129, 5.0, "london", "TTP", "UK"),
    ("UK000003844", "EXETER AIRPORT", 50.737, -3.405, 27.0, "exeter", "TTP", "UK"),
    ("UK000003162", "GLASGOW BISHOPTON", 55.907, -4.533, 59.0, "glasgow", "TTP", "UK"),
    ("UK000003717", "CARDIFF BUTE PARK", 51.488, -3.187, 9.0, "cardiff", "TP", "UK"),
    ("UK000003917", "BELFAST NEWFORGE", 54.560, -5.950, 40.0, "belfast", "TTP", "UK"),
    ("UK000003063", "INVERNESS", 57.477, -4.225, 4.0, "inverness", "TTP", "UK"),
    ("UK000003377", "YORK", 53.958, -1.080, 17.0, "york", "TP", "UK"),
]

# Extra stations scattered around anchor areas: (area key, country, lat, lon, count).
SCATTER = [
    ("co-cork", "EI", 51.95, -8.70, 4),
    ("co-kerry", "EI", 52.10, -9.70, 3),
    ("co-galway", "EI", 53.35, -8.90, 3),
    ("co-offaly", "EI", 53.20, -7.60, 2),
    ("co-donegal", "EI", 54.90, -8.00, 2),
    ("co-wexford", "EI", 52.45, -6.60, 2),
    ("co-mayo", "EI", 53.90, -9.30, 2),
    ("co-dublin", "EI", 53.45, -6.20, 2),
    ("devon", "UK", 50.70, -3.80, 3),
    ("yorkshire", "UK", 54.10, -1.50, 3),
    ("highland", "UK", 57.30, -5.00, 3),
    ("antrim", "UK", 54.80, -6.20, 3),
    ("gt-london", "UK", 51.55, -0.20, 2),
]

DATATYPE_SETS = {"TTP": ["PRCP", "TMAX", "TMIN"], "TP": ["PRCP", "TMAX"], "P": ["PRCP"],
                 "T": ["TMAX", "TMIN"]}


def chain(key):
    """Area keys from `key` up to the country, finest first."""
    out = []
    while key:
        out.append(key)
        key = AREAS[key][3]
    return out


def country_code(key):
    return chain(key)[-1]


def build_stations(rng):
    stations = []
    for sid, name, lat, lon, elev, area, dts, ctry in FIXED_STATIONS:
        stations.append(dict(id="GHCND:" + sid, name=name, lat=lat, lon=lon, elev=elev,
                             area=area, datatypes=DATATYPE_SETS[dts], country=ctry))
    serial = 100
    for area, ctry, lat0, lon0, count in SCATTER:
        for _ in range(count):
            serial += 1
            lat = round(lat0 + rng.uniform(-0.25, 0.25), 3)
            lon = round(lon0 + rng.uniform(-0.35, 0.35), 3)
            label = AREAS[area][1].upper().replace("COUNTY ", "")
            prefix = "EIE00" if ctry == "EI" else "UKE00"
            dts = rng.choice(["TTP", "TTP", "TTP", "TP", "P"])
            stations.append(dict(id=f"GHCND:{prefix}{serial:06d}",
                                 name=f"{label} {['NORTH', 'SOUTH', 'EAST', 'WEST', 'HILL'][serial % 5]} {serial}",
                                 lat=lat, lon=lon, elev=round(rng.uniform(2, 300), 1), area=area,
                                 datatypes=DATATYPE_SETS[dts], country=ctry))
    stations.sort(key=lambda s: s["id"])
    return stations


def station_record(s):
    return {
        "elevation": s["elev"],
        "mindate": "1990-01-01",
        "maxdate": (FIRST_DAY + dt.timedelta(days=DAYS - 1)).isoformat(),
        "latitude": s["lat"],
        "name": s["name"],
        "datacoverage": 0.95,
        "id": s["id"],
        "elevationUnit": "METERS",
        "longitude": s["lon"],
    }


def observations(stations, rng):
    out = []
    for day in range(DAYS):
        date = (FIRST_DAY + dt.timedelta(days=day)).isoformat() + "T00:00:00"
        season = 1.0 - abs(day - 50) / 80.0
        for s in stations:
            warm = 40 if s["country"] == "UK" else 0
            base_t = 150 + int(60 * season) + warm - int(s["lat"] - 51) * 8
            for dtype in s["datatypes"]:
                if rng.random() < 0.04:
                    continue  # station did not report that day
                if dtype == "TMAX":
                    value = base_t + rng.randint(-25, 35)
                elif dtype == "TMIN":
                    value = base_t - 80 + rng.randint(-30, 25)
                else:
                    value = 0 if rng.random() < 0.45 else rng.randint(1, 250)
                out.append({"date": date, "datatype": dtype, "station": s["id"],
                            "attributes": ",,E," if dtype != "PRCP" else ",,E,0700",
                            "value": value})
    return out


def metadata(stations):
    dtypes = ["PRCP", "TMAX", "TMIN"]
    last = (FIRST_DAY + dt.timedelta(days=DAYS - 1)).isoformat()
    corp = {}
    corp["datasets"] = {"results": [
        {"uid": "gov.noaa.ncdc:C00861", "mindate": "1763-01-01", "maxdate": last,
         "name": "Daily Summaries", "datacoverage": 1, "id": "GHCND"},
        {"uid": "gov.noaa.ncdc:C00946", "mindate": "1763-01-01", "maxdate": "2023-09-01",
         "name": "Global Summary of the Month", "datacoverage": 1, "id": "GSOM"},
    ], "filters": {}}
    corp["datacategories"] = {"results": [
        {"name": "Precipitation", "id": "PRCP"},
        {"name": "Air Temperature", "id": "TEMP"},
    ], "filters": {"datasetid": {"GHCND": ["PRCP", "TEMP"], "GSOM": ["PRCP", "TEMP"]}}}
    corp["datatypes"] = {"results": [
        {"mindate": "1781-01-01", "maxdate": last, "name": "Precipitation", "datacoverage": 1,
         "id": "PRCP"},
        {"mindate": "1763-01-01", "maxdate": last, "name": "Maximum temperature",
         "datacoverage": 1, "id": "TMAX"},
        {"mindate": "1763-01-01", "maxdate": last, "name": "Minimum temperature",
         "datacoverage": 1, "id": "TMIN"},
    ], "filters": {"datasetid": {"GHCND": dtypes},
                   "datacategoryid": {"PRCP": ["PRCP"], "TEMP": ["TMAX", "TMIN"]}}}
    corp["locationcategories"] = {"results": [
        {"name": "City", "id": "CITY"},
        {"name": "Country", "id": "CNTRY"},
    ], "filters": {}}
    corp["locations"] = {"results": [
        {"mindate": "1872-01-01", "maxdate": last, "name": "France", "datacoverage": 1,
         "id": "FIPS:FR"},
        {"mindate": "1831-01-01", "maxdate": last, "name": "Ireland", "datacoverage": 1,
         "id": "FIPS:EI"},
        {"mindate": "1853-01-01", "maxdate": last, "name": "United Kingdom", "datacoverage": 1,
         "id": "FIPS:UK"},
    ], "filters": {"datasetid": {"GHCND": ["FIPS:EI", "FIPS:FR", "FIPS:UK"]},
                   "locationcategoryid": {"CNTRY": ["FIPS:EI", "FIPS:FR", "FIPS:UK"]}}}
    ids = [s["id"] for s in stations]
    by_country = {"FIPS:EI": [s["id"] for s in stations if s["country"] == "EI"],
                  "FIPS:UK": [s["id"] for s in stations if s["country"] == "UK"]}
    corp["stations"] = {"results": [station_record(s) for s in stations],
                        "filters": {"datasetid": {"GHCND": ids}, "locationid": by_country}}
    return corp, ids, by_country


def reverse_doc(s, rng, place_id):
    if s["area"] is None:
        return {"error": "Unable to geocode"}
    keys = chain(s["area"])
    cc = country_code(s["area"])
    address = {}
    for k in keys:
        level, name = AREAS[k][0], AREAS[k][1]
        address[level] = name
    address["country_code"] = cc
    finest = AREAS[keys[0]]
    doc = {
        "place_id": place_id,
        "licence": "Data (c) OpenStreetMap contributors, ODbL 1.0. https://osm.org/copyright",
        "osm_type": "relation",
        "osm_id": 100000 + place_id,
        "lat": f"{s['lat']:.7f}",
        "lon": f"{s['lon']:.7f}",
        "category": "boundary",
        "type": "administrative",
        "place_rank": 16,
        "importance": round(rng.uniform(0.3, 0.7), 4),
        "addresstype": finest[0],
        "name": finest[1],
        "display_name": ", ".join(AREAS[k][1] for k in keys),
        "address": address,
        "extratags": {"wikidata": finest[2]},
        "boundingbox": [f"{s['lat'] - 0.1:.7f}", f"{s['lat'] + 0.1:.7f}",
                        f"{s['lon'] - 0.1:.7f}", f"{s['lon'] + 0.1:.7f}"],
    }
    return doc


def nt_literal(text):
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def wikidata_nt():
    lines = []
    for key, (level, name, qid, _, water) in AREAS.items():
        lines.append(f"<{WD}{qid}> <{RDFS_LABEL}> {nt_literal(name)}@en .")
        klass = {"country": "Q6256", "state": "Q10864048", "county": "Q28575",
                 "city": "Q515", "town": "Q3957", "village": "Q532", "suburb": "Q188509"}[level]
        lines.append(f"<{WD}{qid}> <{WDT}P31> <{WD}{klass}> .")
        for w in water:
            lines.append(f"<{WD}{qid}> <{WDT}P206> <{WD}{w}> .")
    for qid, name in WATER.items():
        lines.append(f"<{WD}{qid}> <{RDFS_LABEL}> {nt_literal(name)}@en .")
    return "\n".join(sorted(set(lines))) + "\n"


def supplementary_nt(stations, rng):
    lines = []
    for s in stations:
        if s["country"] != "EI" or s["area"] is None:
            continue
        iri = f"{BASE}resource/station/{s['id']}"
        pm = round(rng.uniform(4.0, 14.0), 1)
        lines.append(f'<{iri}> <{ENV}annualMeanPm25> "{pm}"^^<http://www.w3.org/2001/XMLSchema#double> .')
        lines.append(f'<{iri}> <{ENV}landCover> "{rng.choice(["urban", "pasture", "coastal", "peat bog"])}" .')
    return "\n".join(sorted(lines)) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "fixtures"))
    ap.add_argument("--seed", type=int, default=20230601)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    out = Path(args.out)
    (out / "cdo").mkdir(parents=True, exist_ok=True)
    (out / "nominatim").mkdir(parents=True, exist_ok=True)
    for stale in (out / "nominatim").glob("reverse_*.json"):
        stale.unlink()

    stations = build_stations(rng)
    corp, ids, by_country = metadata(stations)
    obs = observations(stations, rng)
    corp["data"] = {"results": obs,
                    "filters": {"datasetid": {"GHCND": ids}, "locationid": by_country}}
    for name, doc in corp.items():
        (out / "cdo" / f"{name}.json").write_text(json.dumps(doc, indent=None, separators=(",", ":")) + "\n")

    for i, s in enumerate(stations):
        path = out / "nominatim" / f"reverse_{s['lat']:.4f}_{s['lon']:.4f}.json"
        path.write_text(json.dumps(reverse_doc(s, rng, 2000 + i), indent=1) + "\n")

    (out / "wikidata.nt").write_text(wikidata_nt())
    (out / "supplementary.nt").write_text(supplementary_nt(stations, rng))
    (out / "config.json").write_text(json.dumps({
        "datasets": ["GHCND"],
        "locations": ["FIPS:EI", "FIPS:UK"],
        "window_days": 28,
        "schedule_interval_days": 7,
        "fixture_dir": ".",
        "snapshot_path": "linkclimate.nq",
    }, indent=2) + "\n")
    print(f"{len(stations)} stations, {len(obs)} observations -> {out}")


if __name__ == "__main__":
    main()
