#!/usr/bin/env python3
# Copyright 2026 The segsurp Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the synthetic fixtures under data/fixtures/.

The licensed corpora cannot ship with the repository, so the fixtures mimic
their formats: a lowercased one-sentence-per-line training corpus, two
reading-time corpora (eyetracking-style and self-paced-style TSV), and a
segmentation lexicon in the format a morphological segmenter would emit.

Output is deterministic for a given --seed.
"""

import argparse
import math
import os
import random
from collections import Counter

# (surface, morphs). Morph lists may be canonicalized ("commune ity").
NOUNS = [
    ("cat", ["cat"]), ("dog", ["dog"]), ("court", ["court"]),
    ("reporter", ["re", "port", "er"]), ("tulip", ["tulip"]), ("bulb", ["bulb"]),
    ("garden", ["garden"]), ("farmer", ["farm", "er"]), ("teacher", ["teach", "er"]),
    ("story", ["story"]), ("city", ["city"]), ("journalist", ["journal", "ist"]),
    ("community", ["commune", "ity"]), ("nature", ["nature"]), ("press", ["press"]),
    ("fringe", ["fringe"]), ("river", ["river"]), ("window", ["window"]),
    ("letter", ["letter"]), ("market", ["market"]), ("worker", ["work", "er"]),
    ("painter", ["paint", "er"]), ("singer", ["sing", "er"]), ("player", ["play", "er"]),
    ("house", ["house"]), ("friend", ["friend"]), ("doctor", ["doctor"]),
    ("student", ["student"]), ("kindness", ["kind", "ness"]),
    ("darkness", ["dark", "ness"]), ("movement", ["move", "ment"]),
    ("government", ["govern", "ment"]), ("agreement", ["agree", "ment"]),
    ("development", ["develop", "ment"]), ("coverage", ["cover", "age"]),
    ("teacup", ["tea", "cup"]), ("sunflower", ["sun", "flower"]),
    ("neighbor", ["neighbor"]), ("village", ["village"]), ("mountain", ["mountain"]),
    ("station", ["station"]), ("driver", ["drive", "er"]), ("writer", ["write", "er"]),
    ("baker", ["bake", "er"]), ("bread", ["bread"]), ("flower", ["flower"]),
    ("paper", ["paper"]), ("report", ["re", "port"]), ("problem", ["problem"]),
    ("question", ["question"]), ("answer", ["answer"]), ("idea", ["idea"]),
]

# verb root -> morphs of root; inflections add s/ed/ing morphs
VERBS = [
    ("walk", ["walk"]), ("talk", ["talk"]), ("play", ["play"]), ("work", ["work"]),
    ("paint", ["paint"]), ("report", ["re", "port"]), ("cover", ["cover"]),
    ("visit", ["visit"]), ("watch", ["watch"]), ("help", ["help"]), ("open", ["open"]),
    ("plant", ["plant"]), ("relegate", ["relegate"]), ("follow", ["follow"]),
    ("answer", ["answer"]), ("expect", ["expect"]), ("carry", ["carry"]),
    ("describe", ["describe"]), ("notice", ["notice"]), ("protect", ["protect"]),
    ("replant", ["re", "plant"]), ("revisit", ["re", "visit"]), ("discover", ["dis", "cover"]),
    ("misread", ["mis", "read"]), ("move", ["move"]), ("bake", ["bake"]),
]

ADJECTIVES = [
    ("careful", ["care", "ful"]), ("careless", ["care", "less"]), ("quick", ["quick"]),
    ("slow", ["slow"]), ("bright", ["bright"]), ("dark", ["dark"]), ("kind", ["kind"]),
    ("happy", ["happy"]), ("sporadic", ["sporadic"]), ("journalistic", ["journal", "istic"]),
    ("helpful", ["help", "ful"]), ("hopeful", ["hope", "ful"]), ("useful", ["use", "ful"]),
    ("beautiful", ["beauty", "ful"]), ("powerful", ["power", "ful"]),
    ("unhappy", ["un", "happy"]), ("unkind", ["un", "kind"]), ("small", ["small"]),
    ("old", ["old"]), ("quiet", ["quiet"]), ("loud", ["loud"]), ("strange", ["strange"]),
    ("local", ["local"]), ("national", ["nation", "al"]), ("musical", ["music", "al"]),
]

# adverbs derived from adjectives with -ly
ADVERB_BASES = ["careful", "quick", "slow", "bright", "kind", "happy", "hopeful",
                "quiet", "loud", "strange", "local", "beautiful", "powerful"]

DETERMINERS = ["the", "the", "the", "a", "its", "their", "his", "her", "this", "that"]
PREPOSITIONS = ["of", "to", "in", "on", "with", "near", "from", "for"]
FUNCTION_ADVERBS = ["often", "never", "always", "very", "soon", "still"]
CONJUNCTIONS = ["and", "but"]

TABLE3 = ("the sporadic nature of press coverage of the court often relegates "
          "its reporters to the fringes of the journalistic community")

# Entries the morphological segmenter would emit for the illustrative sentence.
TABLE3_LEXICON = {
    "coverage": ["cover", "age"],
    "relegates": ["relegate", "s"],
    "its": ["it", "s"],
    "reporters": ["re", "port", "er", "s"],
    "fringes": ["fringe", "s"],
    "journalistic": ["journal", "istic"],
    "community": ["commune", "ity"],
}

# Words that only appear in the reading-time texts (out of vocabulary).
RARE_WORDS = ["zeppelin", "quixotic", "marmalade", "wombat"]


def plural(word):
    if word.endswith(("s", "ch", "sh")):
        return word + "es"
    if word.endswith("y") and word[-2] not in "aeiou":
        return word[:-1] + "ies"
    return word + "s"


def plural_morphs(morphs):
    return morphs + ["s"]


def third_person(word):
    if word.endswith(("s", "ch", "sh")):
        return word + "es"
    if word.endswith("y") and word[-2] not in "aeiou":
        return word[:-1] + "ies"
    return word + "s"


def past(word):
    if word.endswith("e"):
        return word + "d"
    if word.endswith("y") and word[-2] not in "aeiou":
        return word[:-1] + "ied"
    return word + "ed"


def gerund(word):
    if word.endswith("e") and not word.endswith("ee"):
        return word[:-1] + "ing"
    return word + "ing"


def adverb(word):
    if word.endswith("y"):
        return word[:-1] + "ily"
    if word.endswith("le"):
        return word[:-1] + "y"
    return word + "ly"


class Lexicon:
    """Collects word -> morph segmentations for every generated surface form."""

    def __init__(self):
        self.entries = {}

    def add(self, surface, morphs):
        self.entries.setdefault(surface, list(morphs))
        return surface


def build_vocabulary(lex):
    nouns = []
    for surface, morphs in NOUNS:
        nouns.append((lex.add(surface, morphs), lex.add(plural(surface), plural_morphs(morphs))))
    verbs = []
    for surface, morphs in VERBS:
        verbs.append({
            "base": lex.add(surface, morphs),
            "s": lex.add(third_person(surface), morphs + ["s"]),
            "ed": lex.add(past(surface), morphs + ["ed"]),
            "ing": lex.add(gerund(surface), morphs + ["ing"]),
        })
    adjs = [lex.add(surface, morphs) for surface, morphs in ADJECTIVES]
    adj_morphs = dict(ADJECTIVES)
    advs = [lex.add(adverb(a), adj_morphs[a] + ["ly"]) for a in ADVERB_BASES]
    for w in DETERMINERS + PREPOSITIONS + FUNCTION_ADVERBS + CONJUNCTIONS + ["is", "was", "were"]:
        lex.add(w, [w])
    for w, morphs in TABLE3_LEXICON.items():
        lex.entries[w] = morphs
    for w in TABLE3.split():
        lex.add(w, [w])
    return nouns, verbs, adjs, advs


class Grammar:
    def __init__(self, rng, nouns, verbs, adjs, advs):
        self.rng = rng
        self.nouns, self.verbs, self.adjs, self.advs = nouns, verbs, adjs, advs
        # Zipf-like preferences so frequencies are skewed.
        self.noun_w = [1.0 / (i + 1) ** 0.8 for i in range(len(nouns))]
        self.verb_w = [1.0 / (i + 1) ** 0.8 for i in range(len(verbs))]
        self.adj_w = [1.0 / (i + 1) ** 0.8 for i in range(len(adjs))]

    def pick(self, items, weights=None):
        return self.rng.choices(items, weights)[0]

    def np(self):
        out = [self.pick(DETERMINERS)]
        if self.rng.random() < 0.35:
            out.append(self.pick(self.adjs, self.adj_w))
        sg, pl = self.pick(self.nouns, self.noun_w)
        out.append(pl if self.rng.random() < 0.35 else sg)
        return out

    def pp(self):
        return [self.pick(PREPOSITIONS)] + self.np()

    def vp(self):
        verb = self.pick(self.verbs, self.verb_w)
        form = self.pick(["s", "ed", "ed", "s", "ing"])
        out = []
        if self.rng.random() < 0.25:
            out.append(self.pick(FUNCTION_ADVERBS + self.advs))
        if form == "ing":
            out += [self.pick(["is", "was", "were"]), verb["ing"]]
        else:
            out.append(verb[form])
        out += self.np()
        if self.rng.random() < 0.4:
            out += self.pp()
        if self.rng.random() < 0.2:
            out.append(self.pick(self.advs))
        return out

    def sentence(self):
        roll = self.rng.random()
        if roll < 0.08:
            return ["the", "farmer", self.pick(["planted", "replanted", "watched"]), "tulips",
                    "and", "bulbs", "in", "the", "garden"]
        out = self.np()
        if self.rng.random() < 0.3:
            out += self.pp()
        out += self.vp()
        if self.rng.random() < 0.2:
            out += [self.pick(CONJUNCTIONS)] + self.vp()
        return out


def write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line + "\n")


class BigramScorer:
    """Add-k bigram surprisal used only to give the synthetic reading times structure."""

    def __init__(self, sentences, k=0.1):
        self.uni = Counter()
        self.bi = Counter()
        for s in sentences:
            toks = ["<s>"] + s
            self.uni.update(toks)
            self.bi.update(zip(toks, toks[1:]))
        self.k = k
        self.v = len(self.uni) + 1

    def surprisal(self, prev, word):
        num = self.bi[(prev, word)] + self.k
        den = self.uni[prev] + self.k * self.v
        return -math.log2(num / den)


def make_rt_corpus(rng, grammar, scorer, freq, text_count, sentences_per_text, spill_lags,
                   prefix, rare_rate):
    rows = []
    for t in range(text_count):
        text_id = f"{prefix}{t + 1:02d}"
        index = 0
        prev_feats = []
        for _ in range(sentences_per_text):
            words = grammar.sentence()
            if rng.random() < rare_rate:
                words.insert(rng.randrange(1, len(words)), rng.choice(RARE_WORDS))
            surface = list(words)
            surface[0] = surface[0].capitalize()
            if len(surface) > 6 and rng.random() < 0.25:
                pos = rng.randrange(2, len(surface) - 2)
                if words[pos] not in DETERMINERS + PREPOSITIONS:
                    surface[pos] = surface[pos] + ","
            surface[-1] = surface[-1] + "."
            prev = "<s>"
            for word, shown in zip(words, surface):
                s = scorer.surprisal(prev, word)
                lf = math.log(freq[word]) if freq[word] > 0 else 0.0
                rt = 180.0 + 6.0 * s + 4.0 * len(word) - 3.0 * lf
                for lag, (ps, plen) in enumerate(reversed(prev_feats[-spill_lags:])):
                    rt += (3.0 / (lag + 1)) * ps + 0.5 * plen
                rt += rng.gauss(0.0, 12.0)
                rt = max(rt, 60.0)
                rows.append((text_id, index, shown, round(rt, 1)))
                prev_feats.append((s, len(word)))
                prev = word
                index += 1
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "fixtures"))
    parser.add_argument("--seed", type=int, default=20231)
    parser.add_argument("--sentences", type=int, default=1000)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    os.makedirs(args.out, exist_ok=True)

    lex = Lexicon()
    nouns, verbs, adjs, advs = build_vocabulary(lex)
    grammar = Grammar(rng, nouns, verbs, adjs, advs)

    training = [TABLE3.split()]
    while len(training) < args.sentences:
        training.append(grammar.sentence())
    write_lines(os.path.join(args.out, "toy_train.txt"), [" ".join(s) for s in training])

    freq = Counter(w for s in training for w in s)
    scorer = BigramScorer(training)
    eye = make_rt_corpus(rng, grammar, scorer, freq, text_count=10, sentences_per_text=40,
                         spill_lags=1, prefix="eye", rare_rate=0.05)
    spr = make_rt_corpus(rng, grammar, scorer, freq, text_count=5, sentences_per_text=80,
                         spill_lags=3, prefix="story", rare_rate=0.05)
    header = "text_id\tword_index\tword\trt_ms"
    write_lines(os.path.join(args.out, "toy_eyetracking.tsv"),
                [header] + [f"{a}\t{b}\t{c}\t{d}" for a, b, c, d in eye])
    write_lines(os.path.join(args.out, "toy_selfpaced.tsv"),
                [header] + [f"{a}\t{b}\t{c}\t{d}" for a, b, c, d in spr])

    for w in RARE_WORDS:
        lex.add(w, [w])
    write_lines(os.path.join(args.out, "toy_lexicon.tsv"),
                [f"{w}\t{' '.join(m)}" for w, m in sorted(lex.entries.items())])
    write_lines(os.path.join(args.out, "example_sentence.txt"), [TABLE3])


if __name__ == "__main__":
    main()
