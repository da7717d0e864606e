"""Neomorpheme paradigms: tagset definitions, tag-to-form mappings, and
adaptation of tagged references and annotations to a concrete paradigm.

A paradigm (e.g. Asterisk or Schwa) is described by a mapping file that
assigns one replacement string to every placeholder tag, plus the marker
characters that identify neomorphemes in the singular and in the plural.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import NeoGateError

SINGULAR = "singular"
PLURAL = "plural"
CONTENT = "content-suffix"
FUNCTION = "function-word"

TAG_RE = re.compile(r"<([A-Za-z0-9]+)>")

# Letters that occur in standard Italian orthography, including accented
# vowels and the foreign letters j/k/w/x/y. Marker characters must fall
# outside this set so that neomorpheme forms can never collide with
# gendered Italian words.
ITALIAN_LETTERS = frozenset("abcdefghijklmnopqrstuvwxyzàèéìíîòóùú")

BUILTIN_PARADIGMS = ("asterisk", "schwa")


class UnknownTag(NeoGateError):
    """A placeholder tag is not part of the tagset."""


class MissingTag(NeoGateError):
    """A mapping file leaves a tagset tag without a replacement."""


class MissingMarker(NeoGateError):
    """A replacement string lacks the marker of its grammatical number."""


class IllegalMarker(NeoGateError):
    """A marker character belongs to the Italian alphabet."""


@dataclass(frozen=True)
class TagSpec:
    """One tag of the tagset: its name, grammatical class, number, and kind."""

    name: str
    category: str
    number: str
    kind: str

    @property
    def token(self) -> str:
        return f"<{self.name}>"


@dataclass(frozen=True)
class TagsetDefinition:
    """The full set of placeholder tags a corpus may use."""

    tags: tuple[TagSpec, ...]
    _by_name: dict[str, TagSpec] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        by_name = {t.name: t for t in self.tags}
        if len(by_name) != len(self.tags):
            raise ValueError("duplicate tag names in tagset")
        for tag in self.tags:
            if tag.kind == CONTENT and tag.name not in ("ENDS", "ENDP"):
                raise ValueError(f"unexpected content-suffix tag {tag.name!r}")
        object.__setattr__(self, "_by_name", by_name)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __getitem__(self, name: str) -> TagSpec:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownTag(f"tag <{name}> is not in the tagset") from None

    def names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.tags)


@dataclass(frozen=True)
class TagsetMapping:
    """A paradigm: one replacement string per tag plus the marker characters."""

    paradigm_name: str
    replacements: dict[str, str]
    marker_singular: str
    marker_plural: str

    @property
    def markers(self) -> frozenset[str]:
        return frozenset((self.marker_singular, self.marker_plural))

    def replacement(self, tag_name: str) -> str:
        try:
            return self.replacements[tag_name]
        except KeyError:
            raise UnknownTag(
                f"tag <{tag_name}> has no replacement in paradigm "
                f"{self.paradigm_name!r}"
            ) from None


@dataclass(frozen=True)
class AdaptedTriplet:
    """A triplet with its tagged form realized in a concrete paradigm."""

    masc_form: str
    fem_form: str
    neo_form: str
    kind: str
    number: str
    anchor: "Anchor | None"


@dataclass(frozen=True)
class AdaptedEntry:
    """A corpus entry with reference and triplets adapted to a paradigm."""

    entry_id: str
    ref_adapted: str
    triplets: tuple[AdaptedTriplet, ...]


def load_builtin_tagset() -> TagsetDefinition:
    """Load the bundled tagset definition (29 tags)."""
    text = resources.files("neogate.data").joinpath("tagset.tsv").read_text("utf-8")
    tags = []
    for line in text.splitlines()[1:]:
        if not line.strip():
            continue
        name, category, number, kind = line.split("\t")
        tags.append(TagSpec(name, category, number, kind))
    return TagsetDefinition(tuple(tags))


def parse_mapping(raw: bytes | str, tagset: TagsetDefinition) -> TagsetMapping:
    """Parse and validate a paradigm mapping file.

    The file format is line oriented: ``!name``, ``!marker-singular`` and
    ``!marker-plural`` directives, ``TAG<TAB>REPLACEMENT`` data lines, and
    ``#`` comments.
    """
    if isinstance(raw, bytes):
        text = raw.decode("utf-8")
    else:
        text = raw
    name = ""
    marker_s = ""
    marker_p = ""
    replacements: dict[str, str] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("!"):
            directive, _, value = line.partition(" ")
            value = value.strip()
            if directive == "!name":
                name = value
            elif directive == "!marker-singular":
                marker_s = value
            elif directive == "!marker-plural":
                marker_p = value
            else:
                raise NeoGateError(f"line {line_no}: unknown directive {directive!r}")
            continue
        tag_name, sep, replacement = line.partition("\t")
        if not sep or not replacement:
            raise NeoGateError(f"line {line_no}: expected TAG<TAB>REPLACEMENT")
        if tag_name not in tagset:
            raise UnknownTag(f"line {line_no}: tag <{tag_name}> is not in the tagset")
        if any(ch.isspace() for ch in replacement):
            # multi-word forms would break token-level matching downstream
            raise NeoGateError(
                f"line {line_no}: replacement {replacement!r} must be a single token"
            )
        replacements[tag_name] = replacement

    for marker, label in ((marker_s, "singular"), (marker_p, "plural")):
        if len(marker) != 1:
            raise NeoGateError(f"marker-{label} must be exactly one character")
        if marker.lower() in ITALIAN_LETTERS:
            raise IllegalMarker(
                f"marker {marker!r} is an Italian-alphabet letter"
            )

    missing = [t.name for t in tagset.tags if t.name not in replacements]
    if missing:
        raise MissingTag(f"mapping lacks replacements for: {', '.join(missing)}")
    for tag in tagset.tags:
        marker = marker_s if tag.number == SINGULAR else marker_p
        if marker not in replacements[tag.name]:
            raise MissingMarker(
                f"replacement {replacements[tag.name]!r} for {tag.token} lacks "
                f"the {tag.number} marker {marker!r}"
            )
    return TagsetMapping(name or "unnamed", replacements, marker_s, marker_p)


def load_builtin_mapping(name: str, tagset: TagsetDefinition | None = None) -> TagsetMapping:
    """Load one of the bundled paradigm mappings by name ('asterisk', 'schwa')."""
    if name not in BUILTIN_PARADIGMS:
        raise NeoGateError(
            f"unknown built-in paradigm {name!r}; available: "
            + ", ".join(BUILTIN_PARADIGMS)
        )
    raw = resources.files("neogate.data").joinpath(f"{name}.map").read_text("utf-8")
    return parse_mapping(raw, tagset or load_builtin_tagset())


def replace_tags(text: str, mapping: TagsetMapping) -> str:
    """Replace every placeholder tag in ``text`` with its mapped form."""

    def sub(match: re.Match[str]) -> str:
        return mapping.replacement(match.group(1))

    return TAG_RE.sub(sub, text)


def adapt_reference(ref_tagged: str, mapping: TagsetMapping) -> str:
    """Realize a tagged reference in a concrete paradigm.

    Content-suffix replacements concatenate to the preceding stem because
    the tag is already glued to it in the tagged reference. When the
    reference opened with a tag the replaced sentence would start
    lowercase, so its first alphabetic character is uppercased (markers
    are never uppercased).
    """
    adapted = replace_tags(ref_tagged, mapping)
    if TAG_RE.match(ref_tagged):
        for i, ch in enumerate(adapted):
            if ch in mapping.markers:
                break
            if ch.isalpha():
                if ch.islower():
                    adapted = adapted[:i] + ch.upper() + adapted[i + 1:]
                break
    return adapted


def adapt_triplets(triplets, mapping: TagsetMapping) -> tuple[AdaptedTriplet, ...]:
    """Rewrite each triplet's tagged form into its paradigm form."""
    adapted = []
    for t in triplets:
        adapted.append(
            AdaptedTriplet(
                masc_form=t.masc_form,
                fem_form=t.fem_form,
                neo_form=replace_tags(t.tagged_form, mapping),
                kind=t.kind,
                number=t.number,
                anchor=t.anchor,
            )
        )
    return tuple(adapted)


def adapt_entry(entry, mapping: TagsetMapping) -> AdaptedEntry:
    try:
        return AdaptedEntry(
            entry_id=entry.entry_id,
            ref_adapted=adapt_reference(entry.ref_tagged, mapping),
            triplets=adapt_triplets(entry.triplets, mapping),
        )
    except UnknownTag as exc:
        raise UnknownTag(f"entry {entry.entry_id}: {exc}") from exc


def adapt_corpus(corpus, mapping: TagsetMapping) -> list[AdaptedEntry]:
    """Adapt every entry of a parsed corpus to ``mapping``."""
    return [adapt_entry(entry, mapping) for entry in corpus]


def serialize_adapted_annotation(triplets: tuple[AdaptedTriplet, ...]) -> str:
    """Render adapted triplets back into the annotation-column format."""
    parts = []
    for t in triplets:
        fields = [t.masc_form, t.fem_form, t.neo_form]
        if t.anchor is not None:
            fields.append(f"{t.anchor.text}={t.anchor.distance}")
        parts.append(" ".join(fields))
    return "; ".join(parts) + ";" if parts else ""
