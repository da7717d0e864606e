"""Parsing, validation, and summary statistics for tagged-reference corpora,
plus Cohen's kappa for inter-annotator agreement.

A corpus is a UTF-8 TSV file with header
``ID<TAB>SOURCE<TAB>REF-M<TAB>REF-F<TAB>REF-TAGGED<TAB>ANNOTATION``.
The annotation column holds one triplet per gendered word:
``masc fem tagged[ anchor=distance]`` terminated by ``;``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NeoGateError
from .paradigm import CONTENT, SINGULAR, TAG_RE, TagsetDefinition

HEADER = ("ID", "SOURCE", "REF-M", "REF-F", "REF-TAGGED", "ANNOTATION")


class MalformedRow(NeoGateError):
    """A data row does not have the expected number of columns."""


class EmptyAnnotation(NeoGateError):
    """An entry has no annotated triplets."""


class MalformedTriplet(NeoGateError):
    """A triplet does not consist of exactly three forms."""


class BadAnchor(NeoGateError):
    """An anchor has a non-numeric distance or sits on a content triplet."""


class EncodingError(NeoGateError):
    """The input is not valid UTF-8."""


class LengthMismatch(NeoGateError):
    """Label lists have different lengths."""


class EmptyInput(NeoGateError):
    """Label lists are empty."""


class DegenerateAgreement(NeoGateError):
    """Chance agreement is 1 while the label lists differ."""


@dataclass(frozen=True)
class Anchor:
    """Sub-word shared with the governing content word, and its token offset."""

    text: str
    distance: int


@dataclass(frozen=True)
class Triplet:
    """The (masculine, feminine, tagged) forms annotated for one word."""

    masc_form: str
    fem_form: str
    tagged_form: str
    tag: str
    kind: str
    number: str
    anchor: Anchor | None = None


@dataclass(frozen=True)
class Entry:
    """One benchmark item: source, three references, and its triplets."""

    entry_id: str
    source: str
    ref_masc: str
    ref_fem: str
    ref_tagged: str
    triplets: tuple[Triplet, ...]


@dataclass(frozen=True)
class CorpusStats:
    entries: int
    tags: int
    content: int
    function: int
    singular: int
    plural: int


@dataclass(frozen=True)
class ValidationIssue:
    entry_id: str
    severity: str  # "error" | "warning"
    message: str
    location: str

    def render(self) -> str:
        return f"{self.severity}\t{self.entry_id}\t{self.location}\t{self.message}"


def parse_annotation(ann: str, tagset: TagsetDefinition) -> list[Triplet]:
    """Parse one annotation column into triplets, in source order."""
    triplets = []
    for chunk in ann.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(" ")
        anchor = None
        if len(parts) == 4:
            anchor_part = parts.pop()
            text, sep, dist = anchor_part.rpartition("=")
            if not sep:
                raise MalformedTriplet(
                    f"triplet {chunk!r} has 4 forms and no anchor"
                )
            if not text:
                raise BadAnchor(f"empty anchor string in {chunk!r}")
            if not dist.isdigit() or int(dist) < 1:
                raise BadAnchor(
                    f"anchor distance {dist!r} in {chunk!r} is not a positive integer"
                )
            anchor = Anchor(text, int(dist))
        if len(parts) != 3:
            raise MalformedTriplet(
                f"triplet {chunk!r} has {len(parts)} forms, expected 3"
            )
        masc, fem, tagged = parts
        if TAG_RE.search(masc) or TAG_RE.search(fem):
            raise MalformedTriplet(
                f"gendered forms in {chunk!r} must not contain tags"
            )
        tags_in_form = TAG_RE.findall(tagged)
        if len(tags_in_form) != 1:
            raise MalformedTriplet(
                f"tagged form {tagged!r} must contain exactly one tag"
            )
        tag_name = tags_in_form[0]
        spec = tagset[tag_name]  # raises UnknownTag
        kind = "content" if spec.kind == CONTENT else "function"
        if anchor is not None and kind == "content":
            raise BadAnchor(f"content triplet {chunk!r} carries an anchor")
        triplets.append(
            Triplet(
                masc_form=masc,
                fem_form=fem,
                tagged_form=tagged,
                tag=tag_name,
                kind=kind,
                number=spec.number,
                anchor=anchor,
            )
        )
    return triplets


def serialize_annotation(triplets: tuple[Triplet, ...] | list[Triplet]) -> str:
    parts = []
    for t in triplets:
        fields = [t.masc_form, t.fem_form, t.tagged_form]
        if t.anchor is not None:
            fields.append(f"{t.anchor.text}={t.anchor.distance}")
        parts.append(" ".join(fields))
    return "; ".join(parts) + ";" if parts else ""


def parse_corpus(raw: bytes | str, tagset: TagsetDefinition) -> list[Entry]:
    """Parse a corpus TSV into entries.

    Structural problems (wrong column count, unknown tags, empty
    annotations, bad encoding) raise; semantic invariants are checked
    separately by :func:`validate_corpus`.
    """
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EncodingError(f"corpus is not valid UTF-8: {exc}") from exc
    else:
        text = raw
    lines = text.lstrip("﻿").splitlines()
    if not lines or tuple(lines[0].split("\t")) != HEADER:
        raise MalformedRow(
            "missing or wrong header; expected " + "\\t".join(HEADER)
        )
    entries = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        columns = line.split("\t")
        if len(columns) != len(HEADER):
            raise MalformedRow(
                f"line {line_no}: expected {len(HEADER)} columns, got {len(columns)}"
            )
        entry_id, source, ref_masc, ref_fem, ref_tagged, annotation = columns
        if not annotation.strip():
            raise EmptyAnnotation(f"line {line_no} (entry {entry_id}): empty annotation")
        try:
            triplets = parse_annotation(annotation, tagset)
        except NeoGateError as exc:
            raise type(exc)(f"line {line_no} (entry {entry_id}): {exc}") from exc
        if not triplets:
            raise EmptyAnnotation(f"line {line_no} (entry {entry_id}): empty annotation")
        entries.append(
            Entry(entry_id, source, ref_masc, ref_fem, ref_tagged, tuple(triplets))
        )
    return entries


def serialize_corpus(corpus: list[Entry]) -> str:
    """Render entries back into the canonical TSV form (LF line endings)."""
    lines = ["\t".join(HEADER)]
    for e in corpus:
        lines.append(
            "\t".join(
                (
                    e.entry_id,
                    e.source,
                    e.ref_masc,
                    e.ref_fem,
                    e.ref_tagged,
                    serialize_annotation(e.triplets),
                )
            )
        )
    return "\n".join(lines) + "\n"


def load_corpus(path, tagset: TagsetDefinition) -> list[Entry]:
    with open(path, "rb") as fh:
        return parse_corpus(fh.read(), tagset)


def _reference_words(text: str) -> set[str]:
    """Case-folded token set of a reference, tokenized like hypotheses are."""
    from .evaluator import tokenize

    return {t.surface.casefold() for t in tokenize(text)}


def validate_corpus(corpus: list[Entry]) -> list[ValidationIssue]:
    """Check entry invariants and return the found issues.

    Errors: triplet/tag accounting mismatches and gendered forms missing
    from their references. Warnings: function triplets without anchors.
    """
    issues = []
    seen_ids: set[str] = set()
    for entry in corpus:
        if entry.entry_id in seen_ids:
            issues.append(
                ValidationIssue(entry.entry_id, "error", "duplicate entry id", "ID")
            )
        seen_ids.add(entry.entry_id)

        ref_tags = sorted(TAG_RE.findall(entry.ref_tagged))
        triplet_tags = sorted(t.tag for t in entry.triplets)
        if ref_tags != triplet_tags:
            issues.append(
                ValidationIssue(
                    entry.entry_id,
                    "error",
                    f"tags in tagged reference {ref_tags} do not match "
                    f"annotation tags {triplet_tags}",
                    "REF-TAGGED",
                )
            )

        masc_words = _reference_words(entry.ref_masc)
        fem_words = _reference_words(entry.ref_fem)
        for i, t in enumerate(entry.triplets):
            where = f"ANNOTATION[{i}]"
            if t.masc_form.casefold() not in masc_words:
                issues.append(
                    ValidationIssue(
                        entry.entry_id,
                        "error",
                        f"masculine form {t.masc_form!r} not found in REF-M",
                        where,
                    )
                )
            if t.fem_form.casefold() not in fem_words:
                issues.append(
                    ValidationIssue(
                        entry.entry_id,
                        "error",
                        f"feminine form {t.fem_form!r} not found in REF-F",
                        where,
                    )
                )
            if t.kind == "function" and t.anchor is None:
                issues.append(
                    ValidationIssue(
                        entry.entry_id,
                        "warning",
                        f"function triplet {t.tagged_form!r} has no anchor",
                        where,
                    )
                )
    return issues


def corpus_stats(corpus: list[Entry]) -> CorpusStats:
    """Tally entries and triplets by kind and number."""
    content = function = singular = plural = 0
    for entry in corpus:
        for t in entry.triplets:
            if t.kind == "content":
                content += 1
            else:
                function += 1
            if t.number == SINGULAR:
                singular += 1
            else:
                plural += 1
    return CorpusStats(
        entries=len(corpus),
        tags=content + function,
        content=content,
        function=function,
        singular=singular,
        plural=plural,
    )


def cohen_kappa(labels_a: list[str], labels_b: list[str]) -> float:
    """Cohen's kappa between two aligned categorical label lists.

    kappa = (p_o - p_e) / (1 - p_e), where p_o is the observed agreement
    and p_e the chance agreement from the marginal label frequencies.
    """
    if len(labels_a) != len(labels_b):
        raise LengthMismatch(
            f"label lists differ in length: {len(labels_a)} vs {len(labels_b)}"
        )
    if not labels_a:
        raise EmptyInput("label lists are empty")
    n = len(labels_a)
    p_o = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    labelset = sorted(set(labels_a) | set(labels_b))
    p_e = sum(
        (labels_a.count(label) / n) * (labels_b.count(label) / n)
        for label in labelset
    )
    if p_e == 1.0:
        if labels_a == labels_b:
            return 1.0
        raise DegenerateAgreement("chance agreement is 1 for differing lists")
    return (p_o - p_e) / (1.0 - p_e)


def aligned_tag_labels(
    corpus_a: list[Entry], corpus_b: list[Entry]
) -> tuple[list[str], list[str]]:
    """Build aligned per-tag label lists from two annotation passes.

    Alignment is by (entry id, triplet index); triplets without a
    counterpart are skipped.
    """
    by_id_b = {e.entry_id: e for e in corpus_b}
    labels_a: list[str] = []
    labels_b: list[str] = []
    for ea in corpus_a:
        eb = by_id_b.get(ea.entry_id)
        if eb is None:
            continue
        for ta, tb in zip(ea.triplets, eb.triplets):
            labels_a.append(ta.tag)
            labels_b.append(tb.tag)
    return labels_a, labels_b
