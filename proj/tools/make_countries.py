#!/usr/bin/env python3
"""Builds the Countries link-prediction splits (S1, S2, S3) from the
world-countries dataset (https://github.com/mledoze/countries, ODbL).

Entities are countries, subregions and regions. Relations are
locatedIn(country, subregion), locatedIn(country, region),
locatedIn(subregion, region) and the symmetric neighborOf(country, country).

A random set of test and validation countries is held out; every held-out
country keeps at least one neighbour in the training countries.

  S1: locatedIn(c, region) removed for held-out c (these are the queries).
  S2: S1 plus locatedIn(c, subregion) removed for held-out c.
  S3: S2 plus locatedIn(n, region) removed for every neighbour n of a
      held-out c.

Usage:
  make_countries.py [--json countries.json] [--out data/countries]

Without --json the script fetches world-countries@5.1.0 with `npm pack`.
"""

import argparse
import json
import os
import random
import re
import subprocess
import tarfile
import tempfile
import unicodedata

N_TEST = 24
N_VALID = 24
SEED = 1234

RULES = {
    "s1": ["locatedIn(X,Z) :- locatedIn(X,W), locatedIn(W,Z)."],
    "s2": ["locatedIn(X,Z) :- locatedIn(X,W), locatedIn(W,Z).",
           "locatedIn(X,Z) :- neighborOf(X,Y), locatedIn(Y,Z)."],
    "s3": ["locatedIn(X,Z) :- locatedIn(X,W), locatedIn(W,Z).",
           "locatedIn(X,Z) :- neighborOf(X,Y), locatedIn(Y,Z).",
           "locatedIn(X,Z) :- neighborOf(X,Y), neighborOf(Y,K), locatedIn(K,Z)."],
    "ablation": ["locatedIn(X,Z) :- neighborOf(X,Y), locatedIn(Y,Z)."],
}


def slug(name):
    s = unicodedata.normalize("NFKD", name).encode("ascii", "ignore").decode()
    s = re.sub(r"[^A-Za-z0-9]+", "_", s).strip("_").lower()
    return s


def fetch_json():
    tmp = tempfile.mkdtemp()
    subprocess.run(["npm", "pack", "world-countries@5.1.0"], cwd=tmp,
                   check=True, capture_output=True)
    with tarfile.open(os.path.join(tmp, "world-countries-5.1.0.tgz")) as tf:
        tf.extractall(tmp)
    return os.path.join(tmp, "package", "countries.json")


def write_tsv(path, triples):
    with open(path, "w") as f:
        for s, r, o in triples:
            f.write(f"{s}\t{r}\t{o}\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--json")
    ap.add_argument("--out", default="data/countries")
    args = ap.parse_args()

    with open(args.json or fetch_json()) as f:
        raw = json.load(f)
    raw = [c for c in raw if c["region"] and c["subregion"]]

    by_code = {c["cca3"]: slug(c["name"]["common"]) for c in raw}
    assert len(set(by_code.values())) == len(by_code), "name collision"

    region = {by_code[c["cca3"]]: slug(c["region"]) for c in raw}
    subregion = {by_code[c["cca3"]]: slug(c["subregion"]) for c in raw}
    neighbors = {by_code[c["cca3"]]: sorted(by_code[b] for b in c["borders"] if b in by_code)
                 for c in raw}

    countries = sorted(region)
    sub_region = {}
    for c in countries:
        sub_region[subregion[c]] = region[c]

    facts = set()
    for c in countries:
        facts.add((c, "locatedIn", subregion[c]))
        facts.add((c, "locatedIn", region[c]))
        for n in neighbors[c]:
            facts.add((c, "neighborOf", n))
            facts.add((n, "neighborOf", c))
    for s, r in sub_region.items():
        facts.add((s, "locatedIn", r))

    rng = random.Random(SEED)
    pool = [c for c in countries if neighbors[c]]
    rng.shuffle(pool)
    held = []
    for c in pool:
        if len(held) == N_TEST + N_VALID:
            break
        if any(n not in held for n in neighbors[c]):
            held.append(c)
    # Re-check: every held-out country needs a neighbour that stays in training.
    held = [c for c in held if any(n not in held for n in neighbors[c])]
    test, valid = sorted(held[:N_TEST]), sorted(held[N_TEST:N_TEST + N_VALID])
    held_set = set(test) | set(valid)

    queries_test = [(c, "locatedIn", region[c]) for c in test]
    queries_valid = [(c, "locatedIn", region[c]) for c in valid]

    removed = {
        "s1": {(c, "locatedIn", region[c]) for c in held_set},
    }
    removed["s2"] = removed["s1"] | {(c, "locatedIn", subregion[c]) for c in held_set}
    removed["s3"] = removed["s2"] | {(n, "locatedIn", region[n])
                                     for c in held_set for n in neighbors[c]}

    os.makedirs(args.out, exist_ok=True)
    write_tsv(os.path.join(args.out, "full.tsv"), sorted(facts))
    for task in ("s1", "s2", "s3"):
        d = os.path.join(args.out, task)
        os.makedirs(d, exist_ok=True)
        train = sorted(facts - removed[task])
        write_tsv(os.path.join(d, "train.tsv"), train)
        write_tsv(os.path.join(d, "valid.tsv"), queries_valid)
        write_tsv(os.path.join(d, "test.tsv"), queries_test)
        with open(os.path.join(d, "rules.pl"), "w") as f:
            f.write("% Countries " + task.upper() + " rules\n")
            f.write("\n".join(RULES[task]) + "\n")
        ents = {x for s, _, o in train for x in (s, o)}
        print(f"{task}: {len(train)} train facts, {len(ents)} entities")
    with open(os.path.join(args.out, "ablation_rules.pl"), "w") as f:
        f.write("% Single-rule theory used to build the AS_k ablation splits\n")
        f.write("\n".join(RULES["ablation"]) + "\n")
    print(f"{len(countries)} countries, {len(sub_region)} subregions, "
          f"{len(set(region.values()))} regions, {len(facts)} facts")


if __name__ == "__main__":
    main()
