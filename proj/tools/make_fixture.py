#!/usr/bin/env python3
"""Write the bundled mini corpus used by the end-to-end golden test.

Output lands in fixtures/mini/: two corpus shards, embeddings, prize cases,
intellectual neighbors, an analysis spec and a pipeline config.
"""
import argparse
import json
import math
import pathlib
import random

NOUNS = ("cell protein membrane enzyme receptor lattice crystal plasma electron photon spectrum fluid vortex "
         "channel kernel polymer catalyst genome neuron circuit signal sensor alloy fiber wave field particle "
         "reaction solvent ligand mutation tissue isotope magnet laser grain tumor virus").split()
ADJS = ("thermal optical magnetic elastic cellular molecular quantum nuclear chemical genetic linear "
        "stable dense rapid weak strong").split()
VERBS = "show measure describe observe examine report".split()
# compounds introduced by one paper and picked up by later ones
INVENTIONS = [("polymerase", "chain"), ("spin", "glass"), ("dark", "matter"), ("gene", "editing"),
              ("soliton", "train"), ("laser", "cooling"), ("quasi", "crystal"), ("plasmid", "vector"),
              ("graphene", "sheet"), ("prion", "fold"), ("meson", "decay"), ("zeolite", "cage")]
VENUES = [f"V{i}" for i in range(6)]
SUBFIELDS = {101: 1, 102: 1, 103: 1, 201: 2, 202: 2, 301: 3, 302: 3, 303: 3}
DIM = 8


def sentence(rng, extra=()):
    words = [rng.choice(ADJS), rng.choice(NOUNS), "of", rng.choice(NOUNS)]
    words[1:1] = list(extra)
    return f"We {rng.choice(VERBS)} the {' '.join(words)} in {rng.choice(NOUNS)} {rng.choice(NOUNS)}."


def make(rng, n_baseline, n_papers):
    papers = []
    start = 1901
    for i in range(n_baseline + n_papers):
        pid = f"P{i:04d}"
        if i < n_baseline:
            year = rng.randint(1890, 1900)
        else:
            year = start + (i - n_baseline) * 12 // n_papers
        date = f"{year}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
        subfield = rng.choice(sorted(SUBFIELDS))
        papers.append({"id": pid, "date": date, "venue": rng.choice(VENUES),
                       "subfield": subfield, "field": SUBFIELDS[subfield]})
    papers.sort(key=lambda p: (p["date"], p["id"]))

    # inventor papers spread across the analysis period
    analysis = [p for p in papers if p["date"] >= "1901"]
    inventors = {analysis[5 + k * 14]["id"]: inv for k, inv in enumerate(INVENTIONS)}
    seen = []
    for idx, p in enumerate(papers):
        sentences = [sentence(rng) for _ in range(rng.randint(1, 3))]
        if p["id"] in inventors:
            sentences.append(sentence(rng, inventors[p["id"]]).replace("We", "We propose a new method:", 1))
        for inv in (inventors[q] for q in seen if rng.random() < 0.25):
            sentences.append(sentence(rng, inv))
        if p["id"] in inventors:
            seen.append(p["id"])
        title_words = [rng.choice(ADJS).capitalize(), rng.choice(NOUNS), "and", rng.choice(NOUNS)]
        p["title"] = " ".join(title_words)
        if rng.random() < 0.08:
            p["abstract_inverted_index"] = None
        elif rng.random() < 0.5:
            words = " ".join(sentences).split()
            inverted = {}
            for pos, w in enumerate(words):
                inverted.setdefault(w, []).append(pos)
            p["abstract_inverted_index"] = inverted
        else:
            p["abstract"] = " ".join(sentences)
        earlier = [q["id"] for q in papers[:idx]]
        k = min(len(earlier), rng.randint(0, 6))
        # prefer recent work, with an occasional reach back
        refs = set()
        while len(refs) < k:
            j = len(earlier) - 1 - int(abs(rng.gauss(0, 25)))
            if j >= 0:
                refs.add(earlier[j])
        p["references"] = sorted(refs)
        if p.get("abstract_inverted_index", 1) is None:
            del p["abstract_inverted_index"]
    return papers


def embeddings(rng, papers):
    topics = {sf: [rng.gauss(0, 1) for _ in range(DIM)] for sf in SUBFIELDS}
    lines = [f"dim\t{DIM}"]
    for p in papers:
        if rng.random() < 0.05:
            continue
        v = [t + rng.gauss(0, 0.6) for t in topics[p["subfield"]]]
        lines.append(p["id"] + "\t" + ",".join(f"{x:.6f}" for x in v))
    return "\n".join(lines) + "\n"


ANALYSIS = {
    "missing": "zero",
    "describe": {
        "columns": ["new_word", "new_phrase", "new_word_comb", "new_phrase_comb", "new_word_reuse",
                    "new_phrase_reuse", "semantic_distance", "uzzi", "wang", "cd", "citations"],
        "log1p": ["new_word_comb", "new_phrase_comb", "new_word_reuse", "new_phrase_reuse", "wang"],
    },
    "variance": [
        {"column": "new_phrase", "log1p": True, "g1": "subfield", "g2": "year"},
        {"column": "citations", "log1p": True, "g1": "field", "g2": "year"},
    ],
    "case_control": {
        "columns": ["new_word", "new_phrase", "new_word_comb", "new_phrase_comb", "new_word_reuse", "citations"],
        "log1p": [],
    },
    "models": [
        {"name": "top_cited", "family": "logit", "outcome": "top_cited_95",
         "covariates": ["new_word_bin", "new_phrase", "cd", "word_count", "n_refs", "has_abstract"],
         "log1p": ["new_phrase"], "fixed_effects": ["year"], "ame": ["new_phrase", "cd"]},
        {"name": "prize", "sample": "matched", "family": "logit", "outcome": "case",
         "covariates": ["new_word_bin", "new_phrase_bin", "new_word_reuse"], "log1p": ["new_word_reuse"],
         "ame": ["new_word_reuse"]},
        {"name": "after_share", "family": "fractional_logit", "outcome": "after_share",
         "covariates": ["new_phrase", "new_word_comb", "word_count"], "log1p": ["new_phrase", "new_word_comb"]},
        {"name": "reuse_absorbed", "family": "identity", "outcome": "new_phrase_reuse",
         "covariates": ["new_phrase", "word_count"], "log1p": ["new_phrase_reuse"],
         "fixed_effects": ["subfield", "year"], "absorb": True},
        {"name": "citations", "family": "poisson", "outcome": "citations",
         "covariates": ["new_word", "n_refs"], "fixed_effects": ["field"]},
    ],
    "reuse": {"kinds": ["word", "phrase"], "min_reuse": 2, "max_terms": 50},
    "plots": [
        {"name": "bucket_top_cited", "type": "bucket_prediction", "outcome": "top_cited_95",
         "metrics": ["new_phrase", "uzzi"], "covariates": ["word_count"], "groups": ["field"]},
        {"name": "field_year_new_phrase", "type": "group_mean", "groups": ["field", "year"], "column": "new_phrase"},
    ],
}

CONFIG = """\
corpus = corpus_a.jsonl, corpus_b.jsonl
output = out
lexicon_dir = ../../data
embeddings = embeddings.tsv
cases = cases.txt
neighbors = neighbors.tsv
analysis = analysis.json
analysis_start_year = 1901
common_word_min_papers = 60
memory_budget = 1048576
shards = 4
window_days = 1826
uzzi_seed = 7
uzzi_rewirings = 5
matching_seed = 11
"""


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=pathlib.Path,
                    default=pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "mini")
    ap.add_argument("--seed", type=int, default=20240601)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    papers = make(rng, 30, 200)
    args.out.mkdir(parents=True, exist_ok=True)

    # shards interleave so that input order differs from date order
    shards = [papers[0::2], papers[1::2]]
    for name, shard in zip(("corpus_a.jsonl", "corpus_b.jsonl"), shards):
        shard = sorted(shard, key=lambda p: p["id"], reverse=True)
        (args.out / name).write_text("".join(json.dumps(p, sort_keys=True) + "\n" for p in shard))
    (args.out / "embeddings.tsv").write_text(embeddings(rng, papers))

    analysis = [p for p in papers if p["date"] >= "1901"]
    cases = sorted(rng.sample([p["id"] for p in analysis], 15))
    (args.out / "cases.txt").write_text("".join(c + "\n" for c in cases))
    ids = [p["id"] for p in papers]
    rows = ["paper_id\tneighbors"]
    for p in analysis:
        rows.append(p["id"] + "\t" + ",".join(sorted(rng.sample(ids, 5))))
    (args.out / "neighbors.tsv").write_text("\n".join(rows) + "\n")
    (args.out / "analysis.json").write_text(json.dumps(ANALYSIS, indent=2) + "\n")
    (args.out / "pipeline.conf").write_text(CONFIG)


if __name__ == "__main__":
    main()
