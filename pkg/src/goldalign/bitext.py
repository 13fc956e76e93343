"""Verse-aligned bitext loading, rule-based tokenization and word histograms.

A bitext is a pair of UTF-8 text files with one verse per line, line-aligned,
optionally accompanied by a file of verse ids.  Tokenization separates
punctuation from adjacent words and expands elided forms (hyphenated words,
contractions, fused articles) according to per-language rule tables that ship
as editable JSON files under ``goldalign/data/``.  Surfaces are never
case-folded or lemmatized, so the tokenized text stays readable.
"""

from __future__ import annotations

import json
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Literal, Mapping, Sequence

from goldalign.errors import BitextAlignmentError, BitextFormatError

Side = Literal["E", "F"]
SIDES: tuple[Side, Side] = ("E", "F")

WORD = "word"
PUNCT = "punctuation"

# Apostrophes never act as token boundaries on their own; contraction rules
# decide whether and where a form containing one splits.
_WORD_INTERNAL = frozenset("'’")

_FIELD_RE = re.compile(r"\S+")


def _is_punct_char(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


def _is_hyphen_char(ch: str) -> bool:
    return unicodedata.category(ch) == "Pd"


@dataclass(frozen=True)
class Token:
    """One token of a verse half.

    ``position`` is 1-based within the half; ``char_span`` is a half-open byte
    offset pair into the UTF-8 encoding of the raw verse.  Tokens produced by
    rewriting a single form (e.g. a fused article) share the form's span.
    """

    surface: str
    position: int
    char_span: tuple[int, int]
    kind: str

    @property
    def is_word(self) -> bool:
        return self.kind == WORD


@dataclass(frozen=True)
class LanguageProfile:
    """Per-language token-splitting rules, loaded from an editable JSON table.

    ``elisions`` maps an exact surface form to the surfaces that replace it
    (the replacements share the original form's span).  ``contractions`` are
    regexes whose capture groups concatenate back to the matched form; each
    group becomes a token with its own sub-span.
    """

    language: str
    elisions: Mapping[str, tuple[str, ...]]
    contractions: tuple[re.Pattern[str], ...]
    split_hyphens: bool = True

    def __post_init__(self):
        for form, repl in self.elisions.items():
            if not repl or any((not s) or s.split() != [s] for s in repl):
                raise BitextFormatError(
                    f"elision rule for {form!r} must replace it with one or "
                    f"more whitespace-free surfaces, got {repl!r}"
                )

    @classmethod
    def from_dict(cls, spec: dict) -> "LanguageProfile":
        return cls(
            language=spec["language"],
            elisions={k: tuple(v) for k, v in spec.get("elisions", {}).items()},
            contractions=tuple(re.compile(p) for p in spec.get("contractions", ())),
            split_hyphens=bool(spec.get("split_hyphens", True)),
        )

    @classmethod
    def from_json(cls, path: str | Path) -> "LanguageProfile":
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    @classmethod
    def builtin(cls, language: str) -> "LanguageProfile":
        """Load one of the shipped profiles ("en" or "fr")."""
        ref = resources.files("goldalign.data").joinpath(f"profile_{language}.json")
        try:
            text = ref.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise BitextFormatError(f"no builtin profile for language {language!r}")
        return cls.from_dict(json.loads(text))


def resolve_profile(spec: str | Path | LanguageProfile) -> LanguageProfile:
    """Accept a language tag ("en"), a JSON path, or a ready profile."""
    if isinstance(spec, LanguageProfile):
        return spec
    text = str(spec)
    if text.endswith(".json") or "/" in text or "\\" in text:
        return LanguageProfile.from_json(text)
    return LanguageProfile.builtin(text)


def tokenize(raw_verse: str, profile: LanguageProfile) -> list[Token]:
    """Split one verse into word and punctuation tokens.

    Punctuation characters become their own tokens, hyphenated words split
    into word / hyphen / word, and elided forms expand per the profile's rule
    tables.  Empty input yields an empty list.  Re-tokenizing the space-joined
    surfaces of the output reproduces the same surfaces: no rule fires on its
    own output.
    """
    pieces: list[tuple[str, int, int]] = []
    for m in _FIELD_RE.finditer(raw_verse):
        pieces.extend(_split_field(m.group(), m.start(), profile))
    byte_at = _byte_offsets(raw_verse)
    tokens = []
    for i, (surface, lo, hi) in enumerate(pieces, start=1):
        kind = WORD if any(not _is_punct_char(c) for c in surface) else PUNCT
        tokens.append(Token(surface, i, (byte_at[lo], byte_at[hi]), kind))
    return tokens


def _byte_offsets(text: str) -> list[int]:
    offsets = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        offsets.append(total)
    return offsets


def _split_field(field: str, start: int, profile: LanguageProfile):
    """Break one whitespace-delimited field into (surface, char_lo, char_hi).

    Edge punctuation is peeled into single-character pieces, then rule-based
    splitting applies to the core; rule outputs recurse through the same path,
    which is what keeps tokenization idempotent.
    """
    lead: list[tuple[str, int, int]] = []
    trail: list[tuple[str, int, int]] = []
    lo, hi = 0, len(field)
    while lo < hi and _is_punct_char(field[lo]) and field[lo] not in _WORD_INTERNAL:
        lead.append((field[lo], start + lo, start + lo + 1))
        lo += 1
    while hi > lo and _is_punct_char(field[hi - 1]) and field[hi - 1] not in _WORD_INTERNAL:
        trail.append((field[hi - 1], start + hi - 1, start + hi))
        hi -= 1
    trail.reverse()
    out = list(lead)
    if hi > lo:
        out.extend(_split_core(field[lo:hi], start + lo, profile))
    out.extend(trail)
    return out


def _split_core(text: str, start: int, profile: LanguageProfile):
    repl = profile.elisions.get(text)
    if repl is not None:
        # Rewritten surfaces need not concatenate to the original, so all of
        # them share the original form's span.
        return [(surface, start, start + len(text)) for surface in repl]

    if profile.split_hyphens and any(_is_hyphen_char(c) for c in text):
        out = []
        ofs = start
        for part in _hyphen_parts(text):
            if len(part) == 1 and _is_hyphen_char(part):
                out.append((part, ofs, ofs + 1))
            elif part:
                out.extend(_split_field(part, ofs, profile))
            ofs += len(part)
        return out

    for pat in profile.contractions:
        m = pat.fullmatch(text)
        if m is None:
            continue
        groups = [g for g in m.groups() if g]
        if len(groups) < 2 or "".join(groups) != text:
            continue
        out = []
        ofs = start
        for g in groups:
            if g == text:
                out.append((g, ofs, ofs + len(g)))
            else:
                out.extend(_split_field(g, ofs, profile))
            ofs += len(g)
        return out

    return [(text, start, start + len(text))]


def _hyphen_parts(text: str) -> list[str]:
    parts: list[str] = []
    cur: list[str] = []
    for ch in text:
        if _is_hyphen_char(ch):
            parts.append("".join(cur))
            parts.append(ch)
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


@dataclass(frozen=True)
class VersePair:
    """One aligned segment pair: the unit of annotation."""

    verse_id: str
    side_e: tuple[Token, ...]
    side_f: tuple[Token, ...]

    def side(self, side: Side) -> tuple[Token, ...]:
        return self.side_e if side == "E" else self.side_f


@dataclass(frozen=True)
class Bitext:
    lang_e: str
    lang_f: str
    pairs: tuple[VersePair, ...]

    def pairs_by_id(self) -> dict[str, VersePair]:
        return {p.verse_id: p for p in self.pairs}


# A histogram is just a Counter from exact (case-sensitive) surface form to
# occurrence count over the word-kind tokens of one half.
Histogram = Counter


def word_histogram(bitext: Bitext, side: Side) -> Counter:
    """Count every word-kind token's surface form on one side; punctuation is excluded."""
    if not bitext.pairs:
        raise BitextFormatError("cannot build a histogram over an empty bitext")
    counts: Counter = Counter()
    for pair in bitext.pairs:
        for tok in pair.side(side):
            if tok.kind == WORD:
                counts[tok.surface] += 1
    return counts


def token_line(tokens: Iterable[Token]) -> str:
    """Render tokens as one verse line, surfaces separated by single spaces."""
    return " ".join(t.surface for t in tokens)


def _read_lines(path: str | Path) -> list[str]:
    try:
        text = Path(path).read_bytes().decode("utf-8")
    except UnicodeDecodeError as e:
        raise BitextFormatError(f"{path}: not valid UTF-8 ({e})") from e
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln.rstrip("\r") for ln in lines]


def _verse_ids(ids: str | Path | None, n: int) -> list[str]:
    if ids is None:
        return [f"L{i}" for i in range(1, n + 1)]
    id_lines = _read_lines(ids)
    if len(id_lines) != n:
        raise BitextAlignmentError(
            f"id file {ids} has {len(id_lines)} lines for {n} verse pairs "
            f"({len(id_lines)} ≠ {n})"
        )
    seen = set()
    for vid in id_lines:
        if vid in seen:
            raise BitextFormatError(f"duplicate verse id {vid!r}")
        seen.add(vid)
    return id_lines


def _check_line_counts(file_e, file_f, n_e: int, n_f: int) -> None:
    if n_e != n_f:
        raise BitextAlignmentError(
            f"line counts differ: {file_e} has {n_e} lines, {file_f} has {n_f} "
            f"({n_e} ≠ {n_f})"
        )


def load_bitext(
    file_e: str | Path,
    file_f: str | Path,
    ids: str | Path | None = None,
    profile_e: LanguageProfile | None = None,
    profile_f: LanguageProfile | None = None,
) -> Bitext:
    """Load and tokenize a line-aligned bitext.

    Pair i is built from line i of each file; verse ids come from the id file
    or are synthesized as "L<i>".
    """
    profile_e = profile_e or LanguageProfile.builtin("en")
    profile_f = profile_f or LanguageProfile.builtin("fr")
    lines_e = _read_lines(file_e)
    lines_f = _read_lines(file_f)
    _check_line_counts(file_e, file_f, len(lines_e), len(lines_f))
    verse_ids = _verse_ids(ids, len(lines_e))

    pairs = []
    for vid, le, lf in zip(verse_ids, lines_e, lines_f):
        te = tuple(tokenize(le, profile_e))
        tf = tuple(tokenize(lf, profile_f))
        if not te or not tf:
            empty = "E" if not te else "F"
            raise BitextFormatError(f"verse {vid!r}: empty {empty} half")
        pairs.append(VersePair(vid, te, tf))
    return Bitext(profile_e.language, profile_f.language, tuple(pairs))


def _pretokenized_tokens(line: str) -> tuple[Token, ...]:
    byte_at = _byte_offsets(line)
    toks = []
    for i, m in enumerate(_FIELD_RE.finditer(line), start=1):
        s = m.group()
        kind = WORD if any(not _is_punct_char(c) for c in s) else PUNCT
        toks.append(Token(s, i, (byte_at[m.start()], byte_at[m.end()]), kind))
    return tuple(toks)


def load_pretokenized_bitext(
    file_e: str | Path,
    file_f: str | Path,
    ids: str | Path | None = None,
    lang_e: str = "en",
    lang_f: str = "fr",
) -> Bitext:
    """Load a bitext whose lines are already tokenized (space-separated surfaces)."""
    lines_e = _read_lines(file_e)
    lines_f = _read_lines(file_f)
    _check_line_counts(file_e, file_f, len(lines_e), len(lines_f))
    verse_ids = _verse_ids(ids, len(lines_e))
    pairs = []
    for vid, le, lf in zip(verse_ids, lines_e, lines_f):
        te = _pretokenized_tokens(le)
        tf = _pretokenized_tokens(lf)
        if not te or not tf:
            empty = "E" if not te else "F"
            raise BitextFormatError(f"verse {vid!r}: empty {empty} half")
        pairs.append(VersePair(vid, te, tf))
    return Bitext(lang_e, lang_f, tuple(pairs))
