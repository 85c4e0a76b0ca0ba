#!/usr/bin/env python3
"""Rebuild crates/core/fixtures/ from published per-edition percentages.

Each edition gets a participant CSV whose community sizes, gender and sector
shares and country/continent counts approximate the published tables. Names
come from the bundled lexicon so the offline provider labels them; rows whose
gender the tables leave unaccounted for get ambiguous names and stay unknown.

Deterministic: rerunning produces identical files.
"""

import csv
import math
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "crates" / "core"
OUT = ROOT / "fixtures"

# conference, year, sample size,
# gender %female (auth, key, org), %male (auth, key, org),
# countries (auth, key, org), continents (auth, key, org), geodi/3.5,
# %academia, %industry, %research centre (auth, key, org each)
EDITIONS = [
    ("NeurIPS", 2020, 851, (20.01, 42.90, 47.10), (79.09, 57.10, 52.90), (28, 5, 9), (5, 3, 5), 0.50,
     (52.60, 57.10, 41.20), (31.70, 14.30, 47.10), (15.70, 28.60, 11.80)),
    ("NeurIPS", 2019, 549, (16.60, 42.90, 51.90), (83.40, 57.10, 48.10), (5, 2, 8), (3, 1, 4), 0.19,
     (49.10, 85.70, 44.40), (39.50, 14.30, 40.07), (11.40, 0, 14.80)),
    ("NeurIPS", 2018, 215, (7.10, 42.90, 20.90), (92.90, 57.10, 79.10), (15, 3, 11), (4, 2, 3), 0.36,
     (72.30, 57.10, 59.70), (9.22, 42.90, 31.30), (18.40, 0, 8.96)),
    ("NeurIPS", 2017, 343, (9.45, 42.90, 21.30), (90.05, 57.10, 78.70), (19, 3, 10), (4, 2, 3), 0.36,
     (73.10, 57.10, 63.90), (22.20, 42.90, 29.50), (4.73, 0, 6.56)),
    ("RecSys", 2020, 70, (8.46, 33.30, 23.70), (91.50, 66.70, 76.30), (9, 2, 16), (4, 2, 4), 0.48,
     (69.00, 66.70, 78.90), (27.60, 33.30, 18.40), (3.40, 0, 2.60)),
    ("RecSys", 2019, 69, (12.70, 100, 23.10), (87.30, 0, 76.90), (5, 2, 8), (3, 1, 3), 0.36,
     (40.00, 100.00, 69.20), (55.40, 0, 23.10), (4.62, 0, 7.69)),
    ("RecSys", 2018, 68, (14.30, 66.70, 30.40), (85.70, 33.30, 69.60), (9, 2, 9), (3, 1, 3), 0.42,
     (23.80, 33.30, 56.50), (47.60, 66.70, 39.10), (28.60, 0, 4.35)),
    ("RecSys", 2017, 41, (15.30, 0, 13.60), (84.70, 100, 86.40), (5, 2, 10), (3, 2, 4), 0.37,
     (70.80, 50.00, 81.80), (28.30, 50.00, 13.60), (0.89, 0, 4.55)),
    ("ICML", 2020, 450, (15.50, 33.30, 37.90), (84.50, 66.70, 62.10), (25, 2, 5), (5, 2, 3), 0.33,
     (48.70, 66.70, 58.60), (39.20, 33.30, 20.70), (12.10, 0, 20.70)),
    ("ICML", 2019, 358, (11.40, 66.70, 38.10), (88.60, 33.30, 61.90), (20, 2, 3), (3, 2, 2), 0.30,
     (43.10, 66.70, 76.20), (42.50, 33.30, 19.00), (14.40, 0, 4.76)),
    ("ICML", 2018, 264, (9.80, 50.00, 28.90), (90.20, 50.00, 71.10), (14, 2, 7), (4, 2, 2), 0.34,
     (66.70, 100.00, 77.80), (27.10, 0, 17.80), (6.19, 0, 4.44)),
    ("ICML", 2017, 137, (7.70, 50.00, 29.40), (92.30, 50.00, 70.60), (13, 3, 6), (3, 2, 4), 0.41,
     (51.80, 50.00, 88.20), (34.20, 25.00, 11.80), (14.00, 25.00, 0)),
]

AUTH, KEY, ORG = 0, 1, 2
ROLES = ["author", "keynote", "organiser"]

# No least-developed countries, by construction.
CONTINENT_POOLS = [
    ["US", "CA", "MX"],
    ["GB", "DE", "FR", "CH", "NL", "ES", "IT", "SE", "DK", "FI", "BE", "AT", "IE", "PL", "PT", "NO", "CZ", "GR"],
    ["CN", "JP", "KR", "IN", "SG", "IL", "TW", "HK", "AE", "VN"],
    ["AU", "NZ"],
    ["BR", "CL", "AR", "CO"],
    ["ZA", "EG", "NG", "KE", "MA"],
]

AFFILIATIONS = {
    "academia": [
        "University of Toronto", "Stanford University", "University of Oxford", "ETH Zurich",
        "Tsinghua University", "University of Amsterdam", "Universitat Pompeu Fabra",
        "Massachusetts Institute of Technology", "University of Melbourne", "KAIST",
        "Universidade de Sao Paulo", "University of Cape Town", "Politecnico di Milano",
        "Carnegie Mellon University", "University of Tokyo", "EPFL",
    ],
    "industry": [
        "Google", "Microsoft Research", "Facebook AI", "Amazon", "DeepMind", "IBM Research",
        "NVIDIA", "Spotify", "Netflix", "Criteo", "Zalando", "Huawei", "Baidu Inc.",
        "Booking.com", "Adobe", "Telefonica",
    ],
    "research_centre": [
        "Max Planck Institute for Intelligent Systems", "Inria", "CNRS", "Allen Institute for AI",
        "Vector Institute", "Alan Turing Institute", "RIKEN", "CSIRO Data61",
        "Barcelona Supercomputing Center", "Fraunhofer IAIS",
    ],
}

FAMILY = [
    "Garcia", "Smith", "Mueller", "Rossi", "Dubois", "Wang", "Kim", "Tanaka", "Silva", "Novak",
    "Johansson", "Kowalski", "Nguyen", "Patel", "Cohen", "Okafor", "Hernandez", "Brown", "Ivanova",
    "Larsen", "Moreau", "Schmidt", "Fernandez", "Costa", "Yamamoto", "Li", "Zhang", "Park", "Singh",
    "Martin", "Lopez", "Bianchi", "Jansen", "Nielsen", "Haddad", "Mensah", "Petrov", "Andersson",
    "Ferrari", "Romero", "Kaur", "Sato", "Chen", "Liu", "Wilson", "Taylor", "Anderson", "Thomas",
    "Moore", "Jackson", "White", "Harris", "Clark", "Lewis", "Walker", "Hall", "Young", "King",
    "Wright", "Scott", "Green", "Baker", "Adams", "Nelson", "Hill", "Campbell", "Mitchell", "Roberts",
    "Carter", "Phillips", "Evans", "Turner", "Torres", "Parker", "Collins", "Edwards", "Stewart",
    "Morris", "Murphy", "Cook", "Rogers", "Morgan", "Cooper", "Peterson", "Reed", "Bailey", "Bell",
    "Gomez", "Kelly", "Howard", "Ward", "Cox", "Diaz", "Richardson", "Wood", "Watson", "Brooks",
    "Bennett", "Gray", "James", "Reyes", "Cruz", "Hughes", "Price", "Myers", "Long", "Foster",
    "Sanders", "Ross", "Morales", "Powell", "Sullivan", "Russell", "Ortiz", "Jenkins", "Gutierrez",
]


def load_lexicon():
    female, male, ambiguous = [], [], []
    with open(ROOT / "data" / "name_lexicon.csv") as f:
        rows = csv.DictReader(line for line in f if not line.startswith("#"))
        for r in rows:
            share = float(r["female_share"])
            name = r["given_name"]
            if "-" in name:
                continue
            if share >= 0.95:
                female.append(name)
            elif share <= 0.05:
                male.append(name)
            elif 0.2 <= share <= 0.8:
                ambiguous.append(name)
    return female, male, ambiguous


def closeness(n, shares):
    return sum(abs(round(p * n / 100) / n - p / 100) for p in shares)


def community_size(shares, lo, hi):
    """Smallest size whose integer counts best reproduce the given shares."""
    best = min(range(lo, hi + 1), key=lambda n: (round(closeness(n, shares), 4), n))
    return best


def apportion(n, shares):
    """Integer counts summing to n, largest-remainder method."""
    total = sum(shares)
    raw = [n * s / total for s in shares]
    counts = [math.floor(x) for x in raw]
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[: n - sum(counts)]:
        counts[i] += 1
    return counts


def countries_for(c, m):
    """c countries spanning exactly m continents; one per continent first."""
    picks = [CONTINENT_POOLS[i][0] for i in range(m)]
    idx = [1] * m
    k = 0
    while len(picks) < c:
        pool = CONTINENT_POOLS[k % m]
        if idx[k % m] < len(pool):
            picks.append(pool[idx[k % m]])
            idx[k % m] += 1
        k += 1
    return picks


def decay_counts(n, c, r):
    """n people over c countries, each country at least one, rest decaying by r."""
    if n <= c:
        return [1] * n + [0] * (c - n)
    extra = apportion(n - c, [r**i for i in range(c)])
    return [1 + e for e in extra]


def shannon(counts):
    total = sum(counts)
    return -sum(x / total * math.log(x / total) for x in counts if x)


def pielou_obs(counts):
    s = sum(1 for x in counts if x)
    return 0.0 if s <= 1 else shannon(counts) / math.log(s)


def pielou(counts, s):
    return shannon(counts) / math.log(s)


def country_plan(sizes, ncountries, ncontinents, target):
    """Shared decay rate tuned so the role-averaged Shannon hits target."""
    lists = [countries_for(c, m) for c, m in zip(ncountries, ncontinents)]

    def mean_h(r):
        return sum(shannon(decay_counts(n, c, r)) for n, c in zip(sizes, ncountries)) / 3

    lo, hi = 1e-4, 1.0
    if mean_h(hi) <= target:
        r = hi
    else:
        for _ in range(80):
            mid = (lo + hi) / 2
            if mean_h(mid) < target:
                lo = mid
            else:
                hi = mid
        r = lo if abs(mean_h(lo) - target) <= abs(mean_h(hi) - target) else hi
    plans = []
    for n, c, names in zip(sizes, ncountries, lists):
        counts = decay_counts(n, c, r)
        seq = []
        for name, k in zip(names, counts):
            seq += [name] * k
        plans.append(seq)
    return plans


class Names:
    def __init__(self):
        self.female, self.male, self.ambiguous = load_lexicon()
        self.i = 0

    def take(self, gender):
        pool = {"female": self.female, "male": self.male, "unknown": self.ambiguous}[gender]
        given = pool[self.i % len(pool)]
        family = FAMILY[(self.i * 7) % len(FAMILY)]
        suffix = self.i // len(FAMILY)
        if suffix:
            family = f"{family}-{FAMILY[(suffix * 13) % len(FAMILY)]}"
        self.i += 1
        return given.capitalize(), family


def spread(items_by_label):
    """Interleave labels so each label's rows are spread through the community."""
    out = []
    for label, n in items_by_label:
        out += [label] * n
    # deterministic shuffle: stride through the list with a step coprime to its length
    if len(out) < 2:
        return out
    step = next((s for s in range(len(out) // 2 + 1, len(out)) if math.gcd(s, len(out)) == 1), 1)
    return [out[(i * step) % len(out)] for i in range(len(out))]


def build(edition):
    conf, year, total, fem, mal, ncountries, ncontinents, geodi_n, aca, ind, res = edition
    key = community_size([fem[KEY], mal[KEY], aca[KEY], ind[KEY], res[KEY]], 2, 12)
    org = community_size([fem[ORG], mal[ORG], aca[ORG], ind[ORG], res[ORG]], 5, 60)
    auth = total - key - org
    sizes = [auth, key, org]

    plans = country_plan(sizes, ncountries, ncontinents, geodi_n * 3.5)
    names = Names()
    rows = []
    stats = {}
    for role in (KEY, AUTH, ORG):
        n = sizes[role]
        f = round(fem[role] * n / 100)
        m = round(mal[role] * n / 100)
        if fem[role] + mal[role] > 99.95:
            f, m = apportion(n, [fem[role], mal[role]])
        genders = spread([("female", f), ("male", m), ("unknown", n - f - m)])
        sectors = spread(list(zip(["academia", "industry", "research_centre"], apportion(n, [aca[role], ind[role], res[role]]))))
        countries = plans[role]
        stats[ROLES[role]] = {
            "n": n,
            "gender": (f, m),
            "sector": [sectors.count(s) for s in ("academia", "industry", "research_centre")],
            "countries": sorted({c: countries.count(c) for c in countries}.values(), reverse=True),
        }
        counter = {s: 0 for s in AFFILIATIONS}
        for i in range(n):
            given, family = names.take(genders[i])
            sector = sectors[i]
            pool = AFFILIATIONS[sector]
            aff = pool[counter[sector] % len(pool)]
            counter[sector] += 1
            if role == AUTH and i % 10 == 9:
                other = "industry" if sector != "industry" else "academia"
                aff = f"{aff};{AFFILIATIONS[other][i % len(AFFILIATIONS[other])]}"
            paper = f"{conf.lower()}{year}-p{i // 3 + 1:03d}" if role == AUTH else ""
            rows.append([conf, year, ROLES[role], given, family, aff, countries[i], "", "", paper])
    return rows, stats


def oracle(stats, geodi_target):
    j = lambda counts, s: 0.0 if sum(1 for x in counts if x) == 0 else pielou(counts, s)
    gdi = sum(j(stats[r]["gender"], 2) for r in ROLES) / 3
    bdi = sum(j(stats[r]["sector"], 3) for r in ROLES) / 3
    geodi = sum(shannon(stats[r]["countries"]) for r in ROLES) / 3
    return gdi, bdi, geodi / 3.5


def main():
    OUT.mkdir(exist_ok=True)
    header = ["conference", "year", "role", "given_name", "family_name", "affiliations", "country", "sector", "gender", "paper_id"]
    for e in EDITIONS:
        rows, stats = build(e)
        path = OUT / f"{e[0].lower()}_{e[1]}.csv"
        with open(path, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        gdi, bdi, geo = oracle(stats, e[7])
        sizes = {r: stats[r]["n"] for r in ROLES}
        print(f"{path.name}: {sizes} gdi={gdi:.4f} bdi={bdi:.4f} geodi/3.5={geo:.4f} (table {e[7]:.2f})")


if __name__ == "__main__":
    main()
