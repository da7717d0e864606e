#!/usr/bin/env python3
"""Generate the bundled synthetic corpus splits.

The official benchmark release cannot be redistributed here, so this
script builds deterministic stand-in splits in the same TSV format whose
marginal statistics (entries, tags, content/function, singular/plural)
match the published ones exactly:

    test: 841 entries, 2479 tags, 1539 content, 940 function,
          1316 singular, 1163 plural
    dev:  100 entries,  345 tags,  211 content, 134 function,
          184 singular,  161 plural

Every generated entry is built from noun-phrase units whose annotation is
correct by construction: function words carry anchors pointing at their
noun, gendered forms appear token-for-token in their references, and all
filler vocabulary is disjoint from annotated forms. The script has no
dependencies; the test suite checks the output with the real parser.

Usage: python3 tools/synthgen.py [--out-dir data]
"""

from __future__ import annotations

import argparse
import random
from pathlib import Path

TEST_TARGET = dict(entries=841, tags=2479, content=1539, function=940, singular=1316, plural=1163)
DEV_TARGET = dict(entries=100, tags=345, content=211, function=134, singular=184, plural=161)

TEST_SEED = 74301
DEV_SEED = 18223

HEADER = "ID\tSOURCE\tREF-M\tREF-F\tREF-TAGGED\tANNOTATION"

# stem, masc sg, fem sg, masc pl, fem pl, phonotype, gloss sg, gloss pl.
# Stems are a sub-word of all four forms, so they can serve as anchors.
NOUNS = [
    ("maestr", "maestro", "maestra", "maestri", "maestre", "plain", "teacher", "teachers"),
    ("professor", "professore", "professoressa", "professori", "professoresse", "plain", "professor", "professors"),
    ("dottor", "dottore", "dottoressa", "dottori", "dottoresse", "plain", "doctor", "doctors"),
    ("ragazz", "ragazzo", "ragazza", "ragazzi", "ragazze", "plain", "kid", "kids"),
    ("sciaman", "sciamano", "sciamana", "sciamani", "sciamane", "plain", "shaman", "shamans"),
    ("cuoc", "cuoco", "cuoca", "cuochi", "cuoche", "plain", "cook", "cooks"),
    ("vicin", "vicino", "vicina", "vicini", "vicine", "plain", "neighbor", "neighbors"),
    ("sart", "sarto", "sarta", "sarti", "sarte", "plain", "tailor", "tailors"),
    ("segretari", "segretario", "segretaria", "segretari", "segretarie", "plain", "secretary", "secretaries"),
    ("bambin", "bambino", "bambina", "bambini", "bambine", "plain", "child", "children"),
    ("candidat", "candidato", "candidata", "candidati", "candidate", "plain", "candidate", "candidates"),
    ("impiegat", "impiegato", "impiegata", "impiegati", "impiegate", "plain", "clerk", "clerks"),
    ("student", "studente", "studentessa", "studenti", "studentesse", "impure", "student", "students"),
    ("psicolog", "psicologo", "psicologa", "psicologi", "psicologhe", "impure", "psychologist", "psychologists"),
    ("amic", "amico", "amica", "amici", "amiche", "vowel", "friend", "friends"),
    ("avvocat", "avvocato", "avvocata", "avvocati", "avvocate", "vowel", "lawyer", "lawyers"),
]

# (family, number) -> tag, per-phonotype (masc, fem) surfaces, gloss, oblique verbs.
# Oblique families hang the noun phrase off a verb; the rest are subjects.
FAMILIES = {
    ("DART", "s"): ("DARTS", {"plain": ("il", "la"), "impure": ("lo", "la"), "vowel": ("l'", "l'")}, "the", None),
    ("DART", "p"): ("DARTP", {"plain": ("i", "le"), "impure": ("gli", "le"), "vowel": ("gli", "le")}, "the", None),
    ("IART", "s"): ("IART", {"plain": ("un", "una"), "impure": ("uno", "una"), "vowel": ("un", "un'")}, "a", None),
    ("PARTP", "p"): ("PARTP", {"plain": ("dei", "delle"), "impure": ("degli", "delle"), "vowel": ("degli", "delle")}, "some", None),
    ("PREPdi", "s"): ("PREPdiS", {"plain": ("del", "della"), "impure": ("dello", "della"), "vowel": ("dell'", "dell'")}, "the",
                      [("parla", "speaks about"), ("scrive", "writes about")]),
    ("PREPdi", "p"): ("PREPdiP", {"plain": ("dei", "delle"), "impure": ("degli", "delle"), "vowel": ("degli", "delle")}, "the",
                      [("parla", "speaks about"), ("scrive", "writes about")]),
    ("PREPa", "s"): ("PREPaS", {"plain": ("al", "alla"), "impure": ("allo", "alla"), "vowel": ("all'", "all'")}, "the",
                     [("pensa", "thinks about"), ("telefona", "is calling")]),
    ("PREPa", "p"): ("PREPaP", {"plain": ("ai", "alle"), "impure": ("agli", "alle"), "vowel": ("agli", "alle")}, "the",
                     [("pensa", "thinks about"), ("telefona", "is calling")]),
    ("DADJquest", "s"): ("DADJquestS", {"plain": ("questo", "questa"), "impure": ("questo", "questa"), "vowel": ("quest'", "quest'")}, "this", None),
    ("DADJquest", "p"): ("DADJquestP", {"plain": ("questi", "queste"), "impure": ("questi", "queste"), "vowel": ("questi", "queste")}, "these", None),
}

SUBJECT_FAMILIES = {"s": ["DART", "IART", "DADJquest"], "p": ["DART", "PARTP", "DADJquest"]}
OBLIQUE_FAMILIES = {"s": ["PREPdi", "PREPa"], "p": ["PREPdi", "PREPa"]}

POSSESSIVES = {
    "s": [("mio", "mia", "POSS1S", "my"), ("tuo", "tua", "POSS2S", "your"),
          ("suo", "sua", "POSS3S", "their"), ("nostro", "nostra", "POSS4S", "our")],
    "p": [("miei", "mie", "POSS1P", "my"), ("tuoi", "tue", "POSS2P", "your"),
          ("suoi", "sue", "POSS3P", "their"), ("nostri", "nostre", "POSS4P", "our")],
}

# Gender-invariant verb phrases; none of these words equals an annotated form.
TAILS = {
    "s": [("lavora in ufficio", "works in the office"), ("arriverà domani", "will arrive tomorrow"),
          ("parla in pubblico", "speaks in public"), ("ha risposto subito", "replied right away"),
          ("vive in centro", "lives downtown"), ("insegna matematica", "teaches math")],
    "p": [("lavorano in ufficio", "work in the office"), ("arriveranno domani", "will arrive tomorrow"),
          ("parlano in pubblico", "speak in public"), ("hanno risposto subito", "replied right away"),
          ("vivono in centro", "live downtown"), ("insegnano matematica", "teach math")],
}

NAMES = ["Alex", "Sam", "Kim", "Robin", "Noa", "Charlie"]

JOINERS = [(" e ", " and "), (", mentre ", ", while ")]

# Hand-checked entries mirroring the published format examples; anchors use
# the longest sub-word common to the three forms.
PLANTED_TEST = (
    "The department chair said they might hire new professors",
    "Il direttore del dipartimento ha detto che potrebbero assumere nuovi professori",
    "La direttrice del dipartimento ha detto che potrebbero assumere nuove professoresse",
    "<DARTS> direttor<ENDS> del dipartimento ha detto che potrebbero assumere nuov<ENDP> professor<ENDP>",
    "il la <DARTS> dirett=1; direttore direttrice direttor<ENDS>; nuovi nuove nuov<ENDP>; professori professoresse professor<ENDP>;",
    # 1 function + 3 content; 2 singular + 2 plural
    dict(content=3, function=1, singular=2, plural=2),
)
PLANTED_DEV = (
    "I never buy flowers for my friends.",
    "Non compro mai fiori per i miei amici.",
    "Non compro mai fiori per le mie amiche.",
    "Non compro mai fiori per <DARTP> <POSS1P> amic<ENDP>.",
    "i le <DARTP> amic=2; miei mie <POSS1P> amic=1; amici amiche amic<ENDP>;",
    dict(content=1, function=2, singular=0, plural=3),
)


def solve_units(target: dict, planted: dict) -> list[tuple[str, str]]:
    """Pick deterministic counts of unit shapes matching the remaining tags.

    Unit shapes: "c" = bare content word (1 content tag), "fc" = function
    word + content word (2 tags), "ffc" = article + possessive + content
    word (3 tags). Returns one (shape, number) pair per unit.
    """
    function = target["function"] - planted["function"]
    content = target["content"] - planted["content"]
    singular = target["singular"] - planted["singular"]

    ffc = function // 9
    fc = function - 2 * ffc
    c = content - function + ffc
    if fc < 0 or c < 0:
        raise ValueError("infeasible unit counts")

    center = ffc // 2
    for ffc_s in sorted(range(ffc + 1), key=lambda v: (abs(v - center), v)):
        low = max(0, -(-(singular - 3 * ffc_s - c) // 2))  # ceil division
        high = min(fc, (singular - 3 * ffc_s) // 2)
        if low <= high:
            fc_s = (low + high) // 2
            c_s = singular - 3 * ffc_s - 2 * fc_s
            break
    else:
        raise ValueError("no feasible singular split")

    units = (
        [("ffc", "s")] * ffc_s + [("ffc", "p")] * (ffc - ffc_s)
        + [("fc", "s")] * fc_s + [("fc", "p")] * (fc - fc_s)
        + [("c", "s")] * c_s + [("c", "p")] * (c - c_s)
    )
    return units


def cap_first(text: str) -> str:
    for i, ch in enumerate(text):
        if ch.isalpha():
            return text[:i] + ch.upper() + text[i + 1:] if ch.islower() else text
    return text


def glue(article: str, word: str) -> str:
    return article + word if article.endswith("'") else f"{article} {word}"


class Clause:
    def __init__(self, it_m: str, it_f: str, it_tag: str, en: str, annotation: list[str], counts: dict):
        self.it_m = it_m
        self.it_f = it_f
        self.it_tag = it_tag
        self.en = en
        self.annotation = annotation
        self.counts = counts


def build_clause(rng: random.Random, shape: str, number: str) -> Clause:
    stem, m_s, f_s, m_p, f_p, phono, gl_s, gl_p = rng.choice(NOUNS)
    noun_m, noun_f = (m_s, f_s) if number == "s" else (m_p, f_p)
    gloss = gl_s if number == "s" else gl_p
    end_tag = "ENDS" if number == "s" else "ENDP"
    tagged_noun = f"{stem}<{end_tag}>"
    counts = dict(content=0, function=0, singular=0, plural=0)
    numkey = "singular" if number == "s" else "plural"

    def bump(kind: str) -> None:
        counts[kind] += 1
        counts[numkey] += 1

    if shape == "c":
        bump("content")
        ann = [f"{noun_m} {noun_f} {tagged_noun}"]
        if number == "s":
            name = rng.choice(NAMES)
            return Clause(f"{name} è {noun_m}", f"{name} è {noun_f}", f"{name} è {tagged_noun}",
                          f"{name} is a {gloss}", ann, counts)
        n1, n2 = rng.sample(NAMES, 2)
        return Clause(f"{n1} e {n2} sono {noun_m}", f"{n1} e {n2} sono {noun_f}",
                      f"{n1} e {n2} sono {tagged_noun}", f"{n1} and {n2} are {gloss}", ann, counts)

    if shape == "ffc":
        art_m, art_f = ("il", "la") if number == "s" else ("i", "le")
        dart_tag = "DARTS" if number == "s" else "DARTP"
        poss_m, poss_f, poss_tag, poss_gloss = rng.choice(POSSESSIVES[number])
        tail_it, tail_en = rng.choice(TAILS[number])
        bump("function")
        bump("function")
        bump("content")
        ann = [
            f"{art_m} {art_f} <{dart_tag}> {stem}=2",
            f"{poss_m} {poss_f} <{poss_tag}> {stem}=1",
            f"{noun_m} {noun_f} {tagged_noun}",
        ]
        return Clause(
            f"{art_m} {poss_m} {noun_m} {tail_it}",
            f"{art_f} {poss_f} {noun_f} {tail_it}",
            f"<{dart_tag}> <{poss_tag}> {tagged_noun} {tail_it}",
            f"{poss_gloss} {gloss} {tail_en}",
            ann,
            counts,
        )

    # "fc": either a subject noun phrase with a tail, or an oblique one.
    oblique = rng.random() < 0.4
    family = rng.choice((OBLIQUE_FAMILIES if oblique else SUBJECT_FAMILIES)[number])
    tag, surfaces, art_gloss, verbs = FAMILIES[(family, number)]
    art_m, art_f = surfaces[phono]
    bump("function")
    bump("content")
    ann = [
        f"{art_m} {art_f} <{tag}> {stem}=1",
        f"{noun_m} {noun_f} {tagged_noun}",
    ]
    if verbs is not None:
        verb_it, verb_en = rng.choice(verbs)
        name = rng.choice(NAMES)
        return Clause(
            f"{name} {verb_it} {glue(art_m, noun_m)}",
            f"{name} {verb_it} {glue(art_f, noun_f)}",
            f"{name} {verb_it} <{tag}> {tagged_noun}",
            f"{name} {verb_en} the {gloss}",
            ann,
            counts,
        )
    tail_it, tail_en = rng.choice(TAILS[number])
    return Clause(
        f"{glue(art_m, noun_m)} {tail_it}",
        f"{glue(art_f, noun_f)} {tail_it}",
        f"<{tag}> {tagged_noun} {tail_it}",
        f"{art_gloss} {gloss} {tail_en}",
        ann,
        counts,
    )


def build_entry(rng: random.Random, entry_id: str, shapes: list[tuple[str, str]]) -> tuple[str, dict]:
    clauses = [build_clause(rng, shape, number) for shape, number in shapes]
    it_m, it_f, it_tag, en = clauses[0].it_m, clauses[0].it_f, clauses[0].it_tag, clauses[0].en
    annotation: list[str] = list(clauses[0].annotation)
    counts = dict(clauses[0].counts)
    for clause in clauses[1:]:
        join_it, join_en = rng.choice(JOINERS)
        it_m += join_it + clause.it_m
        it_f += join_it + clause.it_f
        it_tag += join_it + clause.it_tag
        en += join_en + clause.en
        annotation += clause.annotation
        for key, value in clause.counts.items():
            counts[key] += value
    it_m, it_f, en = cap_first(it_m) + ".", cap_first(it_f) + ".", cap_first(en) + "."
    it_tag = (it_tag if it_tag.startswith("<") else cap_first(it_tag)) + "."
    ann = "; ".join(annotation) + ";"
    row = "\t".join((entry_id, en, it_m, it_f, it_tag, ann))
    return row, counts


def build_split(target: dict, seed: int, planted: tuple) -> str:
    *planted_row, planted_counts = planted
    rng = random.Random(seed)
    units = solve_units(target, planted_counts)
    rng.shuffle(units)

    n_entries = target["entries"] - 1
    base, rem = divmod(len(units), n_entries)
    sizes = [base + 1] * rem + [base] * (n_entries - rem)
    rng.shuffle(sizes)

    rows = ["\t".join(["0001", *planted_row])]
    totals = dict(planted_counts)
    cursor = 0
    for i, size in enumerate(sizes, start=2):
        shapes = units[cursor:cursor + size]
        cursor += size
        row, counts = build_entry(rng, f"{i:04d}", shapes)
        rows.append(row)
        for key, value in counts.items():
            totals[key] += value
    assert cursor == len(units)

    totals["entries"] = len(rows)
    totals["tags"] = totals["content"] + totals["function"]
    for key, expected in target.items():
        if totals[key] != expected:
            raise AssertionError(f"{key}: generated {totals[key]}, target {expected}")
    return HEADER + "\n" + "\n".join(rows) + "\n"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="data")
    args = parser.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, target, seed, planted in (
        ("synthetic-test.tsv", TEST_TARGET, TEST_SEED, PLANTED_TEST),
        ("synthetic-dev.tsv", DEV_TARGET, DEV_SEED, PLANTED_DEV),
    ):
        text = build_split(target, seed, planted)
        (out / name).write_text(text, encoding="utf-8")
        print(f"wrote {out / name} ({target['entries']} entries, {target['tags']} tags)")


if __name__ == "__main__":
    main()
