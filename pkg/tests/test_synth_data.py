"""The bundled synthetic splits: deterministic regeneration and soundness."""

from __future__ import annotations

import subprocess
import sys
from pathlib import Path

from neogate import adapt_corpus, corpus_stats, evaluate_hypotheses, validate_corpus

from .conftest import DATA_DIR

REPO_ROOT = Path(__file__).resolve().parent.parent


def test_regeneration_reproduces_committed_files(tmp_path):
    subprocess.run(
        [sys.executable, str(REPO_ROOT / "tools" / "synthgen.py"), "--out-dir", str(tmp_path)],
        check=True,
        capture_output=True,
    )
    for name in ("synthetic-test.tsv", "synthetic-dev.tsv"):
        regenerated = (tmp_path / name).read_bytes()
        committed = (DATA_DIR / name).read_bytes()
        assert regenerated == committed, f"{name} drifted from tools/synthgen.py output"


def test_splits_are_clean(test_split, dev_split):
    assert validate_corpus(test_split) == []
    assert validate_corpus(dev_split) == []


def test_every_function_triplet_has_anchor(test_split, dev_split):
    for split in (test_split, dev_split):
        for entry in split:
            for t in entry.triplets:
                assert (t.anchor is not None) == (t.kind == "function")


def test_planted_examples_present(test_split, dev_split):
    by_id = {e.entry_id: e for e in test_split}
    chair = by_id["0001"]
    assert chair.ref_tagged.startswith("<DARTS> direttor<ENDS>")
    flowers = {e.entry_id: e for e in dev_split}["0001"]
    assert flowers.ref_masc == "Non compro mai fiori per i miei amici."


def test_dev_split_feminine_references_match(dev_split, schwa):
    # feminine references also score full coverage with zero neomorphemes
    adapted = adapt_corpus(dev_split, schwa)
    evals = evaluate_hypotheses(adapted, [e.ref_fem for e in dev_split], schwa.markers)
    for ev in evals:
        assert ev.matched == ev.annotations
        assert ev.correct == 0 and ev.found == 0


def test_split_shapes(test_split, dev_split):
    test_stats = corpus_stats(test_split)
    dev_stats = corpus_stats(dev_split)
    assert test_stats.entries == 841 and dev_stats.entries == 100
    # every entry carries at least one triplet, none is absurdly dense
    for split in (test_split, dev_split):
        assert all(1 <= len(e.triplets) <= 9 for e in split)
