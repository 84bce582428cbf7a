#!/usr/bin/env python3
"""Independent reference implementation of the seeded gold-dataset sampler.

Reimplements, from the documented algorithm (not from the C++ sources), the
thesaurus extraction and the deterministic sampling procedure:

  * splitmix64 stream seeded with `seed`
  * below(n) = (next() * n) >> 64
  * per-class pools sorted by (subject, object), drawn by swap-remove,
    skipping unordered pairs already taken
  * negatives drawn as term-index pairs (i then j), rejecting equal terms,
    directly related pairs and duplicates
  * one Fisher-Yates shuffle pass over the concatenated records

Usage: gold_oracle.py THESAURUS_TXT PER_CLASS SEED > expected.csv
"""

import sys

MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def below(self, n):
        return (self.next() * n) >> 64


def parse_thesaurus(path):
    entries = {}
    current = None
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip():
                current = None
                continue
            indented = line[0] in " \t"
            norm = " ".join(line.split())
            if not indented:
                current = entries.setdefault(
                    norm, {"BT": set(), "NT": set(), "USE": None, "UF": set()})
                current["term"] = norm
                continue
            tag, _, target = norm.partition(" ")
            if tag in ("BT", "NT", "UF"):
                current["BT" if tag == "BT" else "NT" if tag == "NT" else "UF"].add(target)
            elif tag == "USE":
                current["USE"] = target
            # RT and unknown tags emit nothing
    return entries


def extract(entries):
    triples = set()
    for term, e in entries.items():
        for parent in e["BT"]:
            triples.add((term, parent, "narrower"))
        for child in e["NT"]:
            triples.add((term, child, "broader"))
        if e["USE"]:
            lo, hi = sorted([term, e["USE"]])
            triples.add((lo, hi, "same-as"))
        for np_ in e["UF"]:
            lo, hi = sorted([term, np_])
            triples.add((lo, hi, "same-as"))
    return triples


def byte_key(s):
    return s.encode("utf-8")


def build_gold(triples, all_terms, per_class, seed):
    pools = {}
    related = set()
    for label in ("broader", "narrower", "same-as"):
        pool = sorted({(s, o) for (s, o, l) in triples if l == label},
                      key=lambda t: (byte_key(t[0]), byte_key(t[1])))
        pools[label] = pool
    for (s, o, _l) in triples:
        related.add(tuple(sorted([s, o])))

    terms = sorted(set(all_terms), key=byte_key)
    rng = SplitMix64(seed)
    used = set()
    records = []

    for label in ("broader", "narrower", "same-as"):
        pool = list(pools[label])
        chosen = 0
        while chosen < per_class:
            if not pool:
                raise SystemExit(f"capacity error in class {label}")
            i = rng.below(len(pool))
            subj, obj = pool[i]
            pool[i] = pool[-1]
            pool.pop()
            key = tuple(sorted([subj, obj]))
            if key in used:
                continue
            used.add(key)
            records.append((subj, obj, label))
            chosen += 1

    accepted = 0
    while accepted < per_class:
        a = terms[rng.below(len(terms))]
        b = terms[rng.below(len(terms))]
        if a == b:
            continue
        key = tuple(sorted([a, b]))
        if key in related or key in used:
            continue
        used.add(key)
        records.append((a, b, "other"))
        accepted += 1

    for i in range(len(records) - 1, 0, -1):
        j = rng.below(i + 1)
        records[i], records[j] = records[j], records[i]
    return records


def csv_field(s):
    if any(c in s for c in ',"\n\r'):
        return '"' + s.replace('"', '""') + '"'
    return s


def main():
    path, per_class, seed = sys.argv[1], int(sys.argv[2]), int(sys.argv[3])
    entries = parse_thesaurus(path)
    triples = extract(entries)
    records = build_gold(triples, list(entries.keys()), per_class, seed)
    print("topic_a,topic_b,label")
    for a, b, label in records:
        print(",".join(csv_field(x) for x in (a, b, label)))


if __name__ == "__main__":
    main()
