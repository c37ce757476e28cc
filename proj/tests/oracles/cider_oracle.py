"""Dense TF-IDF re-implementation of CIDEr used to freeze test vectors.

Writes tests/data/cider_oracle.json: 20 random three-image corpora with
candidate scores. Run from the repository root:

    python3 tests/oracles/cider_oracle.py
"""
import json
import math
import random

from nltk.stem.porter import PorterStemmer

VOCAB = ("a dog dogs cat cats running runs sitting sits man men woman grass field "
         "ball balls playing plays red white bench street table eating food").split()
STEM = PorterStemmer(PorterStemmer.ORIGINAL_ALGORITHM)
MAX_N = 4
SCALE = 10.0


def tokens(text):
    for ch in '.,!?;:"\'()[]':
        text = text.replace(ch, "")
    return [STEM.stem(t) for t in text.lower().split()]


def grams(toks, n):
    return [" ".join(toks[i:i + n]) for i in range(len(toks) - n + 1)]


def cider(candidate, refs, refsets):
    n_images = len(refsets)
    total = 0.0
    for n in range(1, MAX_N + 1):
        docs = [set(g for r in rs for g in grams(tokens(r), n)) for rs in refsets]
        space = sorted(set(grams(tokens(candidate), n)) | set(g for r in refs for g in grams(tokens(r), n)))

        def vec(text):
            gs = grams(tokens(text), n)
            out = []
            for g in space:
                df = max(1, sum(1 for d in docs if g in d))
                out.append(gs.count(g) * math.log(n_images / df))
            return out

        c = vec(candidate)
        acc = 0.0
        for r in refs:
            v = vec(r)
            nc = math.sqrt(sum(x * x for x in c))
            nv = math.sqrt(sum(x * x for x in v))
            if nc > 0 and nv > 0:
                acc += sum(x * y for x, y in zip(c, v)) / (nc * nv)
        total += acc / len(refs) / MAX_N
    return SCALE * total


def sentence(rng):
    return " ".join(rng.choice(VOCAB) for _ in range(rng.randint(1, 7)))


def main():
    rng = random.Random(20240601)
    cases = []
    for _ in range(20):
        refsets = [[sentence(rng) for _ in range(rng.randint(2, 4))] for _ in range(3)]
        candidates = []
        for image in range(3):
            for _ in range(2):
                text = sentence(rng)
                candidates.append({"image": image, "text": text,
                                   "score": cider(text, refsets[image], refsets)})
        cases.append({"refsets": refsets, "candidates": candidates})
    with open("tests/data/cider_oracle.json", "w") as f:
        json.dump({"max_order": MAX_N, "scale": SCALE, "cases": cases}, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
