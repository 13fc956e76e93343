"""Forced-choice word-alignment annotations and their file format.

An annotation for a verse pair is a set of link groups (a non-empty set of
positions on each side asserted to correspond) plus Not-Translated marks for
words with no equivalent.  Every token position belongs to at most one
assertion; re-linking supplants whole assertions that touch any selected
position.  An annotation may be finalized only once every position on both
sides is accounted for.

File format (UTF-8, LF), one block per verse pair, blank line between blocks:

    P <ordinal> <verse_id> <annotator_id>
    L e=<p1,p2,...> f=<q1,q2,...>
    N e=<p>
    N f=<p>

Positions are 1-based.  Groups are ordered by their smallest e-position with
positions ascending, NT marks by (side, position), so serialization is
canonical and files are diffable.
"""

from __future__ import annotations

import dataclasses
import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from goldalign.bitext import Side, VersePair
from goldalign.errors import (
    AlignmentParseError,
    AnnotationStateError,
    DuplicatePositionError,
    InvalidPositionError,
)


@dataclass(frozen=True)
class LinkGroup:
    """A many-to-many correspondence assertion between position sets."""

    e_positions: tuple[int, ...]
    f_positions: tuple[int, ...]

    def __post_init__(self):
        e = tuple(sorted(set(self.e_positions)))
        f = tuple(sorted(set(self.f_positions)))
        if not e or not f:
            raise ValueError("a link group needs at least one position on each side")
        if e[0] < 1 or f[0] < 1:
            raise InvalidPositionError(f"positions are 1-based, got e={e} f={f}")
        object.__setattr__(self, "e_positions", e)
        object.__setattr__(self, "f_positions", f)

    def positions(self, side: Side) -> tuple[int, ...]:
        return self.e_positions if side == "E" else self.f_positions

    def touches(self, e_set: frozenset[int], f_set: frozenset[int]) -> bool:
        return bool(e_set.intersection(self.e_positions) or f_set.intersection(self.f_positions))


@dataclass(frozen=True)
class NotTranslated:
    """An explicit assertion that one word has no equivalent on the other side."""

    side: Side
    position: int

    def __post_init__(self):
        if self.side not in ("E", "F"):
            raise ValueError(f"side must be 'E' or 'F', got {self.side!r}")
        if self.position < 1:
            raise InvalidPositionError(f"positions are 1-based, got {self.position}")


@dataclass(frozen=True)
class Annotation:
    """All assertions for one verse pair by one annotator.

    Construction canonicalizes ordering and rejects any position that appears
    in more than one assertion, so every Annotation in the program satisfies
    the partition discipline by construction.
    """

    verse_id: str
    annotator_id: str
    groups: tuple[LinkGroup, ...] = ()
    nt_marks: tuple[NotTranslated, ...] = ()
    finalized: bool = False

    def __post_init__(self):
        groups = tuple(sorted(self.groups, key=lambda g: (g.e_positions[0], g.e_positions, g.f_positions)))
        nts = tuple(sorted(set(self.nt_marks), key=lambda n: (n.side, n.position)))
        for side in ("E", "F"):
            seen: set[int] = set()
            for g in groups:
                for p in g.positions(side):
                    if p in seen:
                        raise DuplicatePositionError(
                            f"{self.verse_id}: position {p} ({side}) is claimed twice"
                        )
                    seen.add(p)
            for n in nts:
                if n.side == side:
                    if n.position in seen:
                        raise DuplicatePositionError(
                            f"{self.verse_id}: position {n.position} ({side}) is both "
                            f"linked and marked not-translated"
                        )
                    seen.add(n.position)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "nt_marks", nts)

    @classmethod
    def empty(cls, verse_id: str, annotator_id: str) -> "Annotation":
        return cls(verse_id, annotator_id)

    def accounted(self, side: Side) -> frozenset[int]:
        positions: set[int] = set()
        for g in self.groups:
            positions.update(g.positions(side))
        positions.update(n.position for n in self.nt_marks if n.side == side)
        return frozenset(positions)


def _check_positions(pair: VersePair, side: Side, positions: Iterable[int]) -> None:
    limit = len(pair.side(side))
    for p in positions:
        if not 1 <= p <= limit:
            raise InvalidPositionError(
                f"{pair.verse_id}: position {p} ({side}) out of range 1..{limit}"
            )


def validate_annotation(ann: Annotation, pair: VersePair) -> None:
    """Check every referenced position against the verse pair's token counts."""
    if ann.verse_id != pair.verse_id:
        raise AnnotationStateError(
            f"annotation is for {ann.verse_id!r}, verse pair is {pair.verse_id!r}"
        )
    for g in ann.groups:
        _check_positions(pair, "E", g.e_positions)
        _check_positions(pair, "F", g.f_positions)
    for n in ann.nt_marks:
        _check_positions(pair, n.side, (n.position,))


def apply_link(
    ann: Annotation,
    e_positions: Iterable[int],
    f_positions: Iterable[int],
    pair: VersePair,
) -> Annotation:
    """Add a link group, supplanting every assertion that touches it.

    Any existing group or NT mark touching any selected position on either
    side is removed in its entirety before the new group is added.
    """
    if ann.finalized:
        raise AnnotationStateError(f"{ann.verse_id}: annotation is finalized")
    e_set = frozenset(e_positions)
    f_set = frozenset(f_positions)
    if not e_set or not f_set:
        raise ValueError("a link needs at least one position on each side")
    _check_positions(pair, "E", e_set)
    _check_positions(pair, "F", f_set)
    groups = tuple(g for g in ann.groups if not g.touches(e_set, f_set))
    nts = tuple(
        n
        for n in ann.nt_marks
        if not (n.position in e_set if n.side == "E" else n.position in f_set)
    )
    return dataclasses.replace(
        ann, groups=groups + (LinkGroup(tuple(e_set), tuple(f_set)),), nt_marks=nts
    )


def mark_not_translated(ann: Annotation, side: Side, position: int, pair: VersePair) -> Annotation:
    """Mark one word as having no equivalent, supplanting whatever touched it."""
    if ann.finalized:
        raise AnnotationStateError(f"{ann.verse_id}: annotation is finalized")
    _check_positions(pair, side, (position,))
    pos = frozenset((position,))
    empty: frozenset[int] = frozenset()
    e_set, f_set = (pos, empty) if side == "E" else (empty, pos)
    groups = tuple(g for g in ann.groups if not g.touches(e_set, f_set))
    nts = tuple(n for n in ann.nt_marks if (n.side, n.position) != (side, position))
    return dataclasses.replace(
        ann, groups=groups, nt_marks=nts + (NotTranslated(side, position),)
    )


@dataclass(frozen=True)
class CompletenessReport:
    missing_e: tuple[int, ...]
    missing_f: tuple[int, ...]

    @property
    def complete(self) -> bool:
        return not self.missing_e and not self.missing_f


def completeness(ann: Annotation, pair: VersePair) -> CompletenessReport:
    """List every unaccounted position per side.

    Punctuation tokens are subject to the same forced choice as words: every
    position must be linked or marked not-translated.
    """
    missing = {}
    for side in ("E", "F"):
        have = ann.accounted(side)
        missing[side] = tuple(
            p for p in range(1, len(pair.side(side)) + 1) if p not in have
        )
    return CompletenessReport(missing["E"], missing["F"])


def finalize(ann: Annotation, pair: VersePair) -> Annotation:
    """Mark the annotation finalized; rejected unless every position is accounted for."""
    validate_annotation(ann, pair)
    report = completeness(ann, pair)
    if not report.complete:
        raise AnnotationStateError(
            f"{ann.verse_id}: cannot finalize, unaccounted positions "
            f"E={list(report.missing_e)} F={list(report.missing_f)}"
        )
    return dataclasses.replace(ann, finalized=True)


def expand_link_tokens(ann: Annotation) -> frozenset[tuple[int, int]]:
    """Expand groups into (e_position, f_position) link tokens (full cross products).

    NT marks contribute no tokens.  Groups are position-disjoint, so the token
    count is exactly the sum of |E|*|F| over groups.
    """
    tokens: set[tuple[int, int]] = set()
    for g in ann.groups:
        for e in g.e_positions:
            for f in g.f_positions:
                tokens.add((e, f))
    return frozenset(tokens)


# ---------------------------------------------------------------------------
# file format


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write a whole file durably: temp file in the same directory, fsync, rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
        dirfd = os.open(path.parent, os.O_RDONLY)
        try:
            os.fsync(dirfd)
        finally:
            os.close(dirfd)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _positions_str(positions: Sequence[int]) -> str:
    return ",".join(str(p) for p in positions)


def render_alignment_block(ann: Annotation, ordinal: int) -> str:
    lines = [f"P {ordinal} {ann.verse_id} {ann.annotator_id}"]
    for g in ann.groups:
        lines.append(f"L e={_positions_str(g.e_positions)} f={_positions_str(g.f_positions)}")
    for n in ann.nt_marks:
        lines.append(f"N {n.side.lower()}={n.position}")
    return "\n".join(lines)


def render_alignment_file(
    annotations: Sequence[Annotation],
    pairs_by_id: Mapping[str, VersePair],
    draft: bool = False,
    ordinals: Sequence[int] | None = None,
) -> str:
    """Serialize annotations canonically; see the module docstring for the format.

    Unless ``draft`` is set, every annotation must be finalized.  Finalized
    annotations must pass the completeness check in either mode.
    """
    if ordinals is None:
        ordinals = list(range(1, len(annotations) + 1))
    if len(ordinals) != len(annotations):
        raise ValueError("ordinals and annotations differ in length")
    if len(set(ordinals)) != len(ordinals):
        raise ValueError(f"ordinals must be unique, got {list(ordinals)}")
    blocks = []
    for ordinal, ann in sorted(zip(ordinals, annotations), key=lambda t: t[0]):
        if " " in ann.annotator_id or not ann.annotator_id:
            raise AnnotationStateError(
                f"annotator id {ann.annotator_id!r} must be non-empty and contain no spaces"
            )
        pair = pairs_by_id.get(ann.verse_id)
        if pair is None:
            raise AnnotationStateError(f"unknown verse id {ann.verse_id!r}")
        validate_annotation(ann, pair)
        if not draft and not ann.finalized:
            raise AnnotationStateError(
                f"{ann.verse_id}: refusing to write a non-finalized annotation "
                f"without draft mode"
            )
        if ann.finalized:
            report = completeness(ann, pair)
            if not report.complete:
                raise AnnotationStateError(
                    f"{ann.verse_id}: finalized annotation has unaccounted positions "
                    f"E={list(report.missing_e)} F={list(report.missing_f)}"
                )
        blocks.append(render_alignment_block(ann, ordinal))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


def write_alignment_file(
    annotations: Sequence[Annotation],
    path: str | Path,
    pairs_by_id: Mapping[str, VersePair],
    draft: bool = False,
    ordinals: Sequence[int] | None = None,
) -> None:
    atomic_write_text(path, render_alignment_file(annotations, pairs_by_id, draft, ordinals))


_P_RE = re.compile(r"^P (\d+) (.+) (\S+)$")
_L_RE = re.compile(r"^L e=(\d+(?:,\d+)*) f=(\d+(?:,\d+)*)$")
_N_RE = re.compile(r"^N ([ef])=(\d+)$")


def parse_alignment_text(text: str, pairs_by_id: Mapping[str, VersePair]) -> list[Annotation]:
    """Parse the alignment format, reporting the line number of any defect."""
    annotations: list[Annotation] = []
    seen_keys: set[tuple[str, str]] = set()
    last_ordinal = 0

    header: tuple[int, str, str] | None = None
    groups: list[LinkGroup] = []
    nts: list[NotTranslated] = []
    used: dict[Side, set[int]] = {"E": set(), "F": set()}
    block_line = 0

    def close_block(lineno: int) -> None:
        nonlocal header, groups, nts, used
        if header is None:
            return
        _, verse_id, annotator_id = header
        try:
            ann = Annotation(verse_id, annotator_id, tuple(groups), tuple(nts))
        except DuplicatePositionError as e:  # pre-checked per line; belt and braces
            raise AlignmentParseError(str(e), block_line) from e
        annotations.append(ann)
        header = None
        groups, nts, used = [], [], {"E": set(), "F": set()}

    def claim(side: Side, positions: Iterable[int], lineno: int) -> None:
        assert header is not None
        verse_id = header[1]
        pair = pairs_by_id[verse_id]
        limit = len(pair.side(side))
        for p in positions:
            if not 1 <= p <= limit:
                raise AlignmentParseError(
                    f"position {p} ({side}) out of range 1..{limit} in verse {verse_id!r}",
                    lineno,
                )
            if p in used[side]:
                raise AlignmentParseError(
                    f"position {p} ({side}) claimed twice in verse {verse_id!r}", lineno
                )
            used[side].add(p)

    for lineno, line in enumerate(text.split("\n"), 1):
        line = line.rstrip("\r")
        if not line.strip():
            close_block(lineno)
            continue
        if line.startswith("P "):
            close_block(lineno)
            m = _P_RE.match(line)
            if m is None:
                raise AlignmentParseError(f"bad header {line!r}", lineno)
            ordinal = int(m.group(1))
            verse_id, annotator_id = m.group(2), m.group(3)
            if verse_id not in pairs_by_id:
                raise AlignmentParseError(f"unknown verse id {verse_id!r}", lineno)
            if ordinal <= last_ordinal:
                raise AlignmentParseError(
                    f"ordinal {ordinal} not increasing (previous was {last_ordinal})", lineno
                )
            if (annotator_id, verse_id) in seen_keys:
                raise AlignmentParseError(
                    f"duplicate block for annotator {annotator_id!r}, verse {verse_id!r}",
                    lineno,
                )
            seen_keys.add((annotator_id, verse_id))
            last_ordinal = ordinal
            header = (ordinal, verse_id, annotator_id)
            block_line = lineno
            continue
        if header is None:
            raise AlignmentParseError(f"expected a P header before {line!r}", lineno)
        m = _L_RE.match(line)
        if m is not None:
            e = [int(p) for p in m.group(1).split(",")]
            f = [int(p) for p in m.group(2).split(",")]
            claim("E", e, lineno)
            claim("F", f, lineno)
            groups.append(LinkGroup(tuple(e), tuple(f)))
            continue
        m = _N_RE.match(line)
        if m is not None:
            side: Side = "E" if m.group(1) == "e" else "F"
            p = int(m.group(2))
            claim(side, (p,), lineno)
            nts.append(NotTranslated(side, p))
            continue
        raise AlignmentParseError(f"unrecognized line {line!r}", lineno)
    close_block(lineno if text else 1)
    return annotations


def read_alignment_file(path: str | Path, pairs_by_id: Mapping[str, VersePair]) -> list[Annotation]:
    """Read an alignment file; annotations come back in draft (non-finalized) state."""
    return parse_alignment_text(Path(path).read_text(encoding="utf-8"), pairs_by_id)


# ---------------------------------------------------------------------------
# interchange with pharaoh-style "e-f" token lines (0 is the NULL position)


def to_pharaoh_line(ann: Annotation, include_null: bool = False) -> str:
    """Render one verse's link tokens as "e-f" pairs, ascending.

    With ``include_null``, NT marks appear as links to position 0 on the
    opposite side.
    """
    tokens = sorted(expand_link_tokens(ann))
    parts = [f"{e}-{f}" for e, f in tokens]
    if include_null:
        for n in ann.nt_marks:
            parts.append(f"{n.position}-0" if n.side == "E" else f"0-{n.position}")
    return " ".join(parts)


def from_pharaoh_line(line: str, verse_id: str, annotator_id: str) -> Annotation:
    """Build an annotation from "e-f" token pairs.

    Tokens sharing a position merge into one many-to-many group (connected
    components), since a position may belong to only one assertion.  Pairs
    with a 0 become NT marks.
    """
    edges: list[tuple[int, int]] = []
    nts: list[NotTranslated] = []
    for part in line.split():
        m = re.fullmatch(r"(\d+)-(\d+)", part)
        if m is None:
            raise ValueError(f"bad link token {part!r}")
        e, f = int(m.group(1)), int(m.group(2))
        if e == 0 and f == 0:
            raise ValueError("0-0 is not a valid link token")
        if e == 0:
            nts.append(NotTranslated("F", f))
        elif f == 0:
            nts.append(NotTranslated("E", e))
        else:
            edges.append((e, f))

    # Union-find over side-qualified positions.
    parent: dict[tuple[str, int], tuple[str, int]] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for e, f in edges:
        union(("E", e), ("F", f))
    components: dict[tuple[str, int], dict[str, set[int]]] = {}
    for e, f in edges:
        comp = components.setdefault(find(("E", e)), {"E": set(), "F": set()})
        comp["E"].add(e)
        comp["F"].add(f)
    groups = tuple(
        LinkGroup(tuple(c["E"]), tuple(c["F"])) for c in components.values()
    )
    return Annotation(verse_id, annotator_id, groups, tuple(nts))
