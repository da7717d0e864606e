"""Corpus parsing, serialization, validation, statistics, and kappa."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from neogate import (
    cohen_kappa,
    corpus_stats,
    parse_annotation,
    parse_corpus,
    serialize_corpus,
    validate_corpus,
)
from neogate.corpus import (
    BadAnchor,
    DegenerateAgreement,
    EmptyAnnotation,
    EmptyInput,
    EncodingError,
    LengthMismatch,
    MalformedRow,
    MalformedTriplet,
    aligned_tag_labels,
    serialize_annotation,
)
from neogate.paradigm import UnknownTag

from .conftest import EXAMPLE_CORPUS_TEXT, HEADER_LINE


def test_parse_example_entry(example_corpus):
    (entry,) = example_corpus
    assert entry.entry_id == "0001"
    assert len(entry.triplets) == 4
    kinds = [(t.kind, t.number) for t in entry.triplets]
    assert kinds == [
        ("function", "singular"),
        ("content", "singular"),
        ("content", "plural"),
        ("content", "plural"),
    ]
    assert entry.triplets[0].masc_form == "il"
    assert entry.triplets[0].fem_form == "la"
    assert entry.triplets[1].tagged_form == "direttor<ENDS>"


def test_parse_annotation_single_anchor(tagset):
    ann = (
        "lo la <DARTS> student=1; studente studentessa student<ENDS>; "
        "preoccupato preoccupata preoccupat<ENDS>;"
    )
    triplets = parse_annotation(ann, tagset)
    assert len(triplets) == 3
    assert triplets[0].anchor is not None
    assert (triplets[0].anchor.text, triplets[0].anchor.distance) == ("student", 1)
    assert triplets[1].anchor is None


def test_parse_annotation_two_anchors(tagset):
    ann = "i le <DARTP> amic=2; tuoi tue <POSS2P> amic=1; amici amiche amic<ENDP>;"
    triplets = parse_annotation(ann, tagset)
    anchors = [(t.anchor.text, t.anchor.distance) for t in triplets if t.anchor]
    assert anchors == [("amic", 2), ("amic", 1)]


def test_parse_annotation_arity_violation(tagset):
    with pytest.raises(MalformedTriplet):
        parse_annotation("il la", tagset)


def test_parse_annotation_rejects_bad_anchors(tagset):
    with pytest.raises(BadAnchor):
        parse_annotation("il la <DARTS> stem=x;", tagset)
    with pytest.raises(BadAnchor):
        parse_annotation("il la <DARTS> stem=0;", tagset)
    with pytest.raises(BadAnchor):
        # anchors belong to function words only
        parse_annotation("amico amica amic<ENDS> amic=1;", tagset)


def test_parse_annotation_rejects_unknown_and_tagless(tagset):
    with pytest.raises(UnknownTag):
        parse_annotation("il la <NOPE>;", tagset)
    with pytest.raises(MalformedTriplet):
        parse_annotation("il la lo;", tagset)
    with pytest.raises(MalformedTriplet):
        parse_annotation("il la <DARTS><ENDS>;", tagset)


def test_parse_corpus_structural_errors(tagset):
    with pytest.raises(MalformedRow):
        parse_corpus("WRONG\tHEADER\n", tagset)
    with pytest.raises(MalformedRow):
        parse_corpus(HEADER_LINE + "\nonly\tthree\tcolumns\n", tagset)
    row = "\t".join(("e1", "src", "ref m", "ref f", "ref <DARTS>", " "))
    with pytest.raises(EmptyAnnotation):
        parse_corpus(HEADER_LINE + "\n" + row + "\n", tagset)
    with pytest.raises(EncodingError):
        parse_corpus(EXAMPLE_CORPUS_TEXT.encode("utf-16"), tagset)


def test_round_trip_is_byte_identical(tagset, example_corpus):
    assert serialize_corpus(example_corpus) == EXAMPLE_CORPUS_TEXT
    again = parse_corpus(serialize_corpus(example_corpus), tagset)
    assert again == example_corpus


def test_round_trip_full_split(tagset, test_split):
    text = serialize_corpus(test_split)
    assert parse_corpus(text, tagset) == test_split


def test_parse_tolerates_crlf_and_bom(tagset, example_corpus):
    windowsish = "﻿" + EXAMPLE_CORPUS_TEXT.replace("\n", "\r\n")
    assert parse_corpus(windowsish, tagset) == example_corpus


def test_parse_errors_carry_entry_context(tagset):
    text = EXAMPLE_CORPUS_TEXT.replace("<DARTS>", "<BOGUS>")
    with pytest.raises(UnknownTag, match=r"line 2 \(entry 0001\)"):
        parse_corpus(text, tagset)


def test_serialize_annotation_keeps_anchors(tagset):
    ann = "i le <DARTP> amic=2; tuoi tue <POSS2P> amic=1; amici amiche amic<ENDP>;"
    assert serialize_annotation(parse_annotation(ann, tagset)) == ann


def test_tag_count_matches_triplets(test_split):
    from neogate.paradigm import TAG_RE

    for entry in test_split:
        assert len(TAG_RE.findall(entry.ref_tagged)) == len(entry.triplets)


def test_example_entry_stats(example_corpus):
    stats = corpus_stats(example_corpus)
    assert (stats.tags, stats.content, stats.function) == (4, 3, 1)
    assert (stats.singular, stats.plural) == (2, 2)


def test_stats_totals_add_up(test_split, dev_split):
    for split in (test_split, dev_split):
        stats = corpus_stats(split)
        assert stats.content + stats.function == stats.tags
        assert stats.singular + stats.plural == stats.tags


def test_validation_flags_missing_forms(tagset):
    row = "\t".join(
        ("e1", "src", "Il maestro dorme", "La maestra dorme",
         "<DARTS> maestr<ENDS> dorme", "il la <DARTS> maestr=1; maestri maestre maestr<ENDS>;")
    )
    corpus = parse_corpus(HEADER_LINE + "\n" + row + "\n", tagset)
    issues = validate_corpus(corpus)
    errors = [i for i in issues if i.severity == "error"]
    assert len(errors) == 2  # both gendered forms are plural, refs are singular
    assert all(i.entry_id == "e1" for i in errors)
    assert {i.location for i in errors} == {"ANNOTATION[1]"}


def test_validation_flags_tag_mismatch(tagset):
    row = "\t".join(
        ("e1", "src", "Il maestro dorme", "La maestra dorme",
         "<DARTS> maestro dorme", "il la <DARTS> maestr=1; maestro maestra maestr<ENDS>;")
    )
    corpus = parse_corpus(HEADER_LINE + "\n" + row + "\n", tagset)
    errors = [i for i in validate_corpus(corpus) if i.severity == "error"]
    assert any("do not match" in i.message for i in errors)


def test_validation_warns_on_missing_anchor(example_corpus):
    issues = validate_corpus(example_corpus)
    assert [i.severity for i in issues] == ["warning"]
    assert "anchor" in issues[0].message
    assert issues[0].render().startswith("warning\t0001\t")


def test_bundled_splits_validate_cleanly(test_split, dev_split):
    assert validate_corpus(test_split) == []
    assert validate_corpus(dev_split) == []


def test_kappa_fixed_values():
    assert cohen_kappa(["A", "B", "A"], ["A", "B", "A"]) == 1.0
    assert cohen_kappa(["A", "A", "B", "B"], ["A", "B", "A", "B"]) == 0.0
    assert cohen_kappa(["A", "B"], ["B", "A"]) == -1.0


def test_kappa_errors():
    with pytest.raises(LengthMismatch):
        cohen_kappa(["A"], ["A", "B"])
    with pytest.raises(EmptyInput):
        cohen_kappa([], [])
    # p_e = 1 only happens for identical constant lists, which short-circuit
    # to 1.0 instead of raising DegenerateAgreement
    assert cohen_kappa(["A", "A"], ["A", "A"]) == 1.0


labels = st.lists(st.sampled_from(["A", "B", "C"]), min_size=1, max_size=30)


@given(labels)
def test_kappa_self_agreement(xs):
    assert cohen_kappa(xs, xs) == 1.0


@given(st.tuples(labels, labels).filter(lambda ab: len(ab[0]) == len(ab[1])))
def test_kappa_symmetry(ab):
    a, b = ab
    try:
        left = cohen_kappa(a, b)
        right = cohen_kappa(b, a)
    except DegenerateAgreement:
        return
    assert left == right


@given(st.text(max_size=300))
def test_parser_never_crashes_unexpectedly(text):
    from neogate import load_builtin_tagset
    from neogate.errors import NeoGateError

    try:
        parse_corpus(text, load_builtin_tagset())
    except NeoGateError:
        pass


@given(st.text(max_size=200))
def test_annotation_parser_never_crashes_unexpectedly(text):
    from neogate import load_builtin_tagset
    from neogate.errors import NeoGateError

    try:
        parse_annotation(text, load_builtin_tagset())
    except NeoGateError:
        pass


def test_aligned_tag_labels(tagset):
    text_a = EXAMPLE_CORPUS_TEXT
    text_b = EXAMPLE_CORPUS_TEXT.replace("<ENDP>; professori", "<ENDS>; professori", 1)
    a = parse_corpus(text_a, tagset)
    b = parse_corpus(text_b.replace("nuov<ENDP> professor", "nuov<ENDS> professor", 1), tagset)
    la, lb = aligned_tag_labels(a, b)
    assert len(la) == len(lb) == 4
    assert la.count("ENDP") == 2 and lb.count("ENDP") == 1
    assert cohen_kappa(la, lb) < 1.0
