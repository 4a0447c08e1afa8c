#!/usr/bin/env python3
"""Regenerates the synthetic fixture dataset and its companion resources.

Outputs (all under data/):
  fixture.tsv      300 rows in the OLID TSV layout; label counts proportional
                   to the benchmark corpus: NOT 201 / OFF 99, TIN 87 / UNT 12,
                   IND 54 / GRP 24 / OTH 9.
  contractions.tsv contraction -> expansion map used by the pipeline
  lemmas.tsv       inflected form -> base form map
  wordfreq.txt     frequency dictionary; closed over every token the pipeline
                   can emit for the fixture, so re-preprocessing is a no-op
  glove/*.txt      miniature embedding files in GloVe text format (the real
                   vectors are multi-GB downloads; these keep tests hermetic)

Design notes. Targeted-insult rows and their inoffensive decoys are built in
pairs from the same plan: one reads "<you are> ... <a complete idiot>", the
other carries the identical blocks swapped inside the same interjection
stream, so only long-range block order separates the classes. Filler slots
are tied so both orientations of a plan share their full 1/2/3-gram multisets
(pads included): no width-3 window carries the label. Rows also carry
@USER/URL noise, hashtags, contractions, deliberate misspellings, and
inflected forms to exercise every pipeline step. The script verifies its own
invariants (block symmetry, spell-correction uniqueness, dictionary closure,
label counts) before writing anything.

Byte-identical on reruns: everything derives from one seeded RNG.
"""

import os
import random
from collections import Counter

SEED = 20190506
OUT_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")

# ---------------------------------------------------------------------------
# vocabulary pools
# ---------------------------------------------------------------------------

INSULTS = ["idiot", "fool", "clown", "loser"]
INSULT_PLURALS = {w: w + "s" for w in INSULTS}
MODS = ["complete", "total", "utter", "absolute", "proper"]
ADVS = ["honestly", "really", "truly", "seriously", "frankly"]
# interjection filler stream shared by the offensive rows and their decoys
FILLERS = ["honestly", "really", "truly", "seriously", "frankly",
           "lol", "omg", "smh", "tbh", "mate", "wow", "innit"]
NOUNS = ["game", "show", "match", "season", "weekend", "derby"]
TIMES = ["tonight", "today", "yesterday"]
GROUPS = ["fans", "players", "referees", "drivers", "pundits"]
THINGS = ["league", "channel", "network", "format", "schedule"]
TAILS = ["my friend", "for sure", "after all", "once again", "to be fair"]
HASHTAGS = ["#banter", "#matchday", "#fuming", "#classic", "#mood"]

# token -> misspelling actually written into the tweet; the dictionary word
# must be the unique nearest candidate so correction is unambiguous
MISSPELLINGS = {
    "idiot": "idiiot",
    "fool": "foool",
    "clown": "clwon",
    "loser": "losre",
    "awful": "awfull",
    "garbage": "garbbage",
    "really": "realy",
    "tonight": "tonigth",
    "complete": "compelte",
    "honestly": "honestlly",
}

CONTRACTIONS = [
    ("ain't", "am not"), ("aren't", "are not"), ("can't", "can not"),
    ("can't've", "can not have"), ("'cause", "because"), ("could've", "could have"),
    ("couldn't", "could not"), ("didn't", "did not"), ("doesn't", "does not"),
    ("don't", "do not"), ("hadn't", "had not"), ("hasn't", "has not"),
    ("haven't", "have not"), ("he'd", "he would"), ("he'll", "he will"),
    ("he's", "he is"), ("how'd", "how did"), ("how'll", "how will"),
    ("how's", "how is"), ("i'd", "i would"), ("i'll", "i will"),
    ("i'm", "i am"), ("i've", "i have"), ("isn't", "is not"),
    ("it'd", "it would"), ("it'll", "it will"), ("it's", "it is"),
    ("let's", "let us"), ("ma'am", "madam"), ("mayn't", "may not"),
    ("might've", "might have"), ("mightn't", "might not"), ("must've", "must have"),
    ("mustn't", "must not"), ("needn't", "need not"), ("o'clock", "of the clock"),
    ("oughtn't", "ought not"), ("shan't", "shall not"), ("she'd", "she would"),
    ("she'll", "she will"), ("she's", "she is"), ("should've", "should have"),
    ("shouldn't", "should not"), ("that'd", "that would"), ("that's", "that is"),
    ("there'd", "there would"), ("there's", "there is"), ("they'd", "they would"),
    ("they'll", "they will"), ("they're", "they are"), ("they've", "they have"),
    ("wasn't", "was not"), ("we'd", "we would"), ("we'll", "we will"),
    ("we're", "we are"), ("we've", "we have"), ("weren't", "were not"),
    ("what'll", "what will"), ("what're", "what are"), ("what's", "what is"),
    ("what've", "what have"), ("when's", "when is"), ("where'd", "where did"),
    ("where's", "where is"), ("where've", "where have"), ("who'll", "who will"),
    ("who's", "who is"), ("who've", "who have"), ("why's", "why is"),
    ("won't", "will not"), ("would've", "would have"), ("wouldn't", "would not"),
    ("y'all", "you all"), ("you'd", "you would"), ("you'll", "you will"),
    ("you're", "you are"), ("you've", "you have"),
    ("aren't've", "are not have"), ("couldn't've", "could not have"),
    ("didn't've", "did not have"), ("hadn't've", "had not have"),
    ("he'd've", "he would have"), ("he'll've", "he will have"),
    ("how've", "how have"), ("i'd've", "i would have"),
    ("i'll've", "i will have"), ("it'd've", "it would have"),
    ("it'll've", "it will have"), ("mightn't've", "might not have"),
    ("mustn't've", "must not have"), ("needn't've", "need not have"),
    ("oughtn't've", "ought not have"), ("shan't've", "shall not have"),
    ("she'd've", "she would have"), ("she'll've", "she will have"),
    ("shouldn't've", "should not have"), ("that's've", "that is have"),
    ("there'd've", "there would have"), ("they'd've", "they would have"),
    ("they'll've", "they will have"), ("we'd've", "we would have"),
    ("we'll've", "we will have"), ("what'll've", "what will have"),
    ("who'll've", "who will have"), ("won't've", "will not have"),
    ("would've've", "would have have"), ("wouldn't've", "would not have"),
    ("y'all'd", "you all would"), ("y'all're", "you all are"),
    ("y'all've", "you all have"), ("you'd've", "you would have"),
    ("you'll've", "you will have"), ("ne'er", "never"),
    ("o'er", "over"), ("'tis", "it is"), ("'twas", "it was"),
    ("e'en", "even"), ("ol'", "old"), ("'em", "them"),
    ("g'day", "good day"), ("s'pose", "suppose"), ("c'mon", "come on"),
]

LEMMAS = [
    ("idiots", "idiot"), ("fools", "fool"), ("clowns", "clown"),
    ("losers", "loser"), ("jokes", "joke"), ("costumes", "costume"),
    ("games", "game"), ("shows", "show"), ("matches", "match"),
    ("teams", "team"), ("crowds", "crowd"), ("fans", "fan"),
    ("players", "player"), ("referees", "referee"), ("drivers", "driver"),
    ("pundits", "pundit"), ("channels", "channel"), ("leagues", "league"),
    ("weekends", "weekend"), ("days", "day"), ("friends", "friend"),
    ("seasons", "season"), ("derbies", "derby"), ("memes", "meme"),
    ("watched", "watch"), ("loved", "love"), ("enjoyed", "enjoy"),
    ("played", "play"), ("called", "call"), ("laughed", "laugh"),
    ("made", "make"), ("suits", "suit"), ("sounded", "sound"),
    ("looked", "look"), ("turned", "turn"), ("waved", "wave"),
    ("smiled", "smile"), ("missed", "miss"), ("started", "start"),
    ("saw", "see"), ("dogs", "dog"), ("went", "go"), ("said", "say"),
]


def osa_distance(a, b):
    """Optimal string alignment (restricted Damerau-Levenshtein)."""
    rows = len(a) + 1
    cols = len(b) + 1
    d = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        d[i][0] = i
    for j in range(cols):
        d[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost)
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
                d[i][j] = min(d[i][j], d[i - 2][j - 2] + 1)
    return d[rows - 1][cols - 1]


# ---------------------------------------------------------------------------
# tweet slices
# ---------------------------------------------------------------------------

def block_plan(i):
    mod = MODS[i % len(MODS)]
    article = "an" if mod[0] in "aeiou" else "a"
    insult_block = [article, mod, INSULTS[i % len(INSULTS)]]
    you_block = ["you're"] if i % 20 < 9 else ["you", "are"]
    n = len(FILLERS)
    f_a, f_e, f_b, f_c = (FILLERS[(5 * i + k) % n] for k in (0, 2, 4, 8))
    mid = [f_a, f_b] if (i // 2) % 2 == 0 else [f_a, f_c, f_b]
    lead = mid[-2:]
    trail = mid[:2] + ([f_e] if (i // 4) % 2 == 0 else [])
    return lead, you_block, mid, insult_block, trail


def materialize(plan, offensive):
    lead, you_block, mid, insult_block, trail = plan
    first, second = (you_block, insult_block) if offensive else \
                    (insult_block, you_block)
    return lead + first + mid + second + trail


def verify_block_symmetry(count, max_len):
    # Both orientations of every plan must agree on their 1/2/3-gram
    # multisets as the model sees them: contractions expanded, truncated to
    # max_len, post-padded. A mismatch means some window carries the label.
    def model_view(tokens):
        flat = []
        for t in tokens:
            flat.extend(CONTRACTIONS[t].split() if t in CONTRACTIONS else [t])
        flat = flat[:max_len]
        return flat + ["<pad>"] * (max_len - len(flat))

    def grams(seq):
        bag = Counter()
        for k in (1, 2, 3):
            bag.update(tuple(seq[j:j + k]) for j in range(len(seq) - k + 1))
        return bag

    for i in range(count):
        plan = block_plan(i)
        off = grams(model_view(materialize(plan, True)))
        dec = grams(model_view(materialize(plan, False)))
        if off != dec:
            diff = (off - dec) + (dec - off)
            raise AssertionError(f"plan {i} leaks windows: {sorted(diff)}")


def gen_rows(rng):
    rows = []  # (tokens, label_a, label_b, label_c)

    def noun():
        return rng.choice(NOUNS)

    def tail():
        return rng.choice(TAILS).split() if rng.random() < 0.5 else []

    # --- NOT, plain (121 rows): benign chatter, half of it mentioning "you"
    plain_templates = [
        lambda: ["what", "a", "lovely", noun(), "with", "the", "team"],
        lambda: ["i", "loved", "the", noun(), "we", "watched", rng.choice(TIMES)],
        lambda: ["the", noun(), "was", "fantastic", rng.choice(TIMES)],
        lambda: ["you", "did", "so", "well", rng.choice(TIMES), "i'm", "proud"],
        lambda: ["we", "laughed", "so", "much", "at", "the", noun()],
        lambda: ["that", "was", "a", "great", noun()] + tail(),
        lambda: ["don't", "forget", "the", noun(), "starts", rng.choice(TIMES)],
        lambda: ["the", "crowd", "made", "the", noun(), "so", "fun"],
        lambda: ["i", "can't", "wait", "for", "the", noun(), rng.choice(TIMES)],
        lambda: ["it's", "a", "lovely", "evening", "to", "watch", "the", noun()],
        lambda: ["the", "costumes", "made", "the", "crowd", "laugh", rng.choice(TIMES)],
        lambda: ["you", "and", "the", "team", "played", "so", "well"],
        lambda: ["the", "jokes", "at", "the", noun(), "made", "us", "smile"],
        lambda: ["what's", "better", "than", "a", "quiet", rng.choice(["weekend", "evening"])],
        lambda: ["my", "dogs", "slept", "through", "the", "whole", noun()],
        lambda: ["i", "saw", "the", "best", noun(), "of", "the", "season"],
    ]
    for i in range(121):
        rows.append((plain_templates[i % len(plain_templates)](), "NOT", None, None))

    # --- block-swap pairs. Offensive rows read "<you are> ... <a MOD insult>";
    # their decoys carry the identical blocks in the opposite order inside the
    # same interjection stream, so only the long-range block order separates
    # the classes. The filler slots touching each block are tied together
    # (lead repeats mid's last two words, trail opens with mid's first two)
    # which makes the two orientations of a plan agree on their entire
    # 1/2/3-gram multisets, pads included: no width-3 window carries label
    # information, by construction rather than by sampling luck.
    # verify_block_symmetry() below checks exactly that before anything is
    # written.
    def block_rows(offensive, count):
        out = [materialize(block_plan(i), offensive) for i in range(count)]
        rng.shuffle(out)
        return out

    for tokens in block_rows(False, 80):
        rows.append((tokens, "NOT", None, None))

    # --- OFF/TIN/IND (54 rows): the offensive orientation of the same blocks
    for tokens in block_rows(True, 54):
        rows.append((tokens, "OFF", "TIN", "IND"))

    # --- OFF/TIN/GRP (24 rows): plural-people target before the insult
    def off_grp():
        grp = rng.choice(GROUPS)
        ins = INSULT_PLURALS[rng.choice(INSULTS)]
        pick = rng.randrange(3)
        if pick == 0:
            return ["those", grp, "are", rng.choice(ADVS), rng.choice(MODS), ins]
        if pick == 1:
            return ["the", grp, "played", "like", rng.choice(MODS), ins, rng.choice(TIMES)]
        return [grp, "like", "these", "are", "a", rng.choice(MODS), "disgrace"]

    for _ in range(24):
        rows.append((off_grp(), "OFF", "TIN", "GRP"))

    # --- OFF/TIN/OTH (9 rows): institution target before the insult
    def off_oth():
        thing = rng.choice(THINGS)
        pick = rng.randrange(3)
        if pick == 0:
            return ["the", thing, "is", rng.choice(ADVS), "a", rng.choice(MODS), "disgrace"]
        if pick == 1:
            return ["this", thing, "turned", "into", rng.choice(MODS), "garbage", rng.choice(TIMES)]
        return ["the", thing, "is", "a", rng.choice(MODS), rng.choice(INSULTS), "magnet"]

    for _ in range(9):
        rows.append((off_oth(), "OFF", "TIN", "OTH"))

    # --- OFF/UNT (12 rows): offensive exclamations with no target tokens
    def off_unt():
        pick = rng.randrange(4)
        if pick == 0:
            return ["what", "an", "utterly", "awful", "mess", rng.choice(TIMES)]
        if pick == 1:
            return ["everything", "about", rng.choice(TIMES), "was", "utter", "garbage"]
        if pick == 2:
            return ["i", "can't", "stand", "this", rng.choice(MODS), "nonsense", "anymore"]
        return ["such", "awful", "rubbish", rng.choice(TIMES), "i'm", "done"]

    for _ in range(12):
        rows.append((off_unt(), "OFF", "UNT", None))

    return rows


def add_noise(tokens, rng, misspell_budget):
    """Sprinkles platform noise and at most one misspelling per tweet."""
    out = list(tokens)
    spelled = 0
    if misspell_budget > 0:
        candidates = [i for i, t in enumerate(out) if t in MISSPELLINGS]
        if candidates and rng.random() < 0.55:
            i = rng.choice(candidates)
            out[i] = MISSPELLINGS[out[i]]
            spelled = 1
    if rng.random() < 0.25:
        i = rng.randrange(len(out))
        out[i] = out[i].capitalize()
    if rng.random() < 0.55:
        out.insert(0, "@USER")
        if rng.random() < 0.15:
            out.insert(0, "@USER")
    if rng.random() < 0.20:
        out.append("URL")
    if rng.random() < 0.18:
        out.append(rng.choice(HASHTAGS))
    return out, spelled


# ---------------------------------------------------------------------------
# dictionary closure + self-checks
# ---------------------------------------------------------------------------

def build_dictionary(rows):
    """Collects every token the pipeline can emit and assigns frequencies."""
    vocab = set()
    lemma_map = dict(LEMMAS)
    contraction_map = dict(CONTRACTIONS)
    for tokens, *_ in rows:
        for t in tokens:
            t = t.lower()
            if t in ("@user", "url") or t.startswith("#"):
                continue
            for word in contraction_map.get(t, t).split():
                vocab.add(word)
                vocab.add(lemma_map.get(word, word))
    for src, dst in LEMMAS:
        vocab.add(src)
        for w in dst.split():
            vocab.add(w)
    for _, expansion in CONTRACTIONS:
        for w in expansion.split():
            vocab.add(w)
    # frequency: deterministic, descending in sorted order; insults boosted so
    # ties (if any slipped through) resolve toward them
    words = sorted(vocab)
    freq = {}
    for rank, w in enumerate(words):
        freq[w] = 9000 - 3 * rank
    for w in INSULTS + ["awful", "garbage", "really", "tonight", "complete",
                        "honestly"]:
        freq[w] = 9500
    return freq


def check_misspellings(freq):
    """Every planted misspelling must resolve to its intended word."""
    words = sorted(freq)
    for target, typo in MISSPELLINGS.items():
        assert typo not in freq, f"misspelling {typo} is itself in the dictionary"
        scored = sorted(
            (osa_distance(typo, w), -freq[w], w) for w in words
            if osa_distance(typo, w) <= 3
        )
        assert scored, f"no candidate for {typo}"
        assert scored[0][2] == target, (
            f"{typo} corrects to {scored[0][2]}, wanted {target}")


def simulate_pipeline(tokens, freq, contraction_map, lemma_map):
    """Mirror of the C++ pipeline, used only to verify closure."""
    out = []
    for t in tokens:
        if t in ("@USER", "URL") or t.startswith("#") or t.startswith("@"):
            continue
        low = t.lower()
        expanded = contraction_map.get(low, low).split()
        for w in expanded:
            if w not in freq:
                best = sorted((osa_distance(w, d), -freq[d], d) for d in sorted(freq)
                              if osa_distance(w, d) <= 3)
                assert best, f"token {w} has no correction"
                w = best[0][2]
            w = lemma_map.get(w, w)
            assert w in freq, f"pipeline output {w} not in dictionary"
            out.append(w)
    return out


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def write_files(rows, freq, rng):
    os.makedirs(OUT_DIR, exist_ok=True)
    os.makedirs(os.path.join(OUT_DIR, "glove"), exist_ok=True)

    with open(os.path.join(OUT_DIR, "fixture.tsv"), "w") as f:
        f.write("id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n")
        for i, (tokens, a, b, c) in enumerate(rows):
            f.write("{}\t{}\t{}\t{}\t{}\n".format(
                10001 + i, " ".join(tokens), a, b or "NULL", c or "NULL"))

    with open(os.path.join(OUT_DIR, "contractions.tsv"), "w") as f:
        for src, dst in sorted(CONTRACTIONS):
            f.write(f"{src}\t{dst}\n")

    with open(os.path.join(OUT_DIR, "lemmas.tsv"), "w") as f:
        for src, dst in sorted(LEMMAS):
            f.write(f"{src}\t{dst}\n")

    with open(os.path.join(OUT_DIR, "wordfreq.txt"), "w") as f:
        for w in sorted(freq):
            f.write(f"{w}\t{freq[w]}\n")

    # miniature embedding files: most content words get vectors, a handful are
    # left out so the coverage statistic is exercised
    content = sorted(w for w in freq if len(w) > 2)
    missing = set(rng.sample(content, max(1, len(content) // 10)))
    covered = [w for w in content if w not in missing]
    for name, dim in [("twitter-100d", 100), ("twitter-200d", 200),
                      ("commoncrawl-300d", 300)]:
        with open(os.path.join(OUT_DIR, "glove", name + ".txt"), "w") as f:
            for w in covered:
                vec = " ".join(f"{rng.uniform(-0.5, 0.5):.4f}" for _ in range(dim))
                f.write(f"{w} {vec}\n")


def main():
    # Block rows span 11..13 raw tokens; truncation below 12 would cut into
    # the tied trail, so the symmetry guarantee starts at max_len 12.
    for max_len in range(12, 21):
        verify_block_symmetry(80, max_len)

    rng = random.Random(SEED)
    raw = gen_rows(rng)

    noisy = []
    for tokens, a, b, c in raw:
        with_noise, _ = add_noise(tokens, rng, misspell_budget=1)
        noisy.append((with_noise, a, b, c))
    rng.shuffle(noisy)

    counts = {}
    for _, a, b, c in noisy:
        counts[a] = counts.get(a, 0) + 1
        if b:
            counts[b] = counts.get(b, 0) + 1
        if c:
            counts[c] = counts.get(c, 0) + 1
    expected = {"NOT": 201, "OFF": 99, "TIN": 87, "UNT": 12,
                "IND": 54, "GRP": 24, "OTH": 9}
    assert counts == expected, counts

    freq = build_dictionary(raw)
    check_misspellings(freq)
    contraction_map = dict(CONTRACTIONS)
    lemma_map = dict(LEMMAS)
    for tokens, *_ in noisy:
        simulate_pipeline(tokens, freq, contraction_map, lemma_map)

    write_files(noisy, freq, rng)
    print(f"wrote {len(noisy)} rows, dictionary of {len(freq)} words")


if __name__ == "__main__":
    main()
