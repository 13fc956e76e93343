"""Gold translation lexicon extraction and candidate-lexicon scoring.

A lexicon entry maps a headword (E side) to a weighted set of translations
(F side surfaces).  The gold lexicon for a focus set collects, for each focus
word, every F-side type linked to any of its instances by the annotators;
instances marked Not Translated contribute the distinguished translation
``NONE``.  Candidate lexicons are scored entry-by-entry with the same fuzzy
precision / recall / Dice machinery used for agreement.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal, Mapping, Sequence

from goldalign.agreement import dice, precision, recall
from goldalign.alignment import Annotation
from goldalign.bitext import WORD, Bitext
from goldalign.errors import LexiconCoverageError, UndefinedRateError

#: Distinguished translation recorded for instances with no equivalent.
NONE_TRANSLATION = "NONE"

GoldMode = Literal["union", "majority"]


@dataclass(frozen=True)
class LexiconEntry:
    headword: str
    translations: Mapping[str, float]

    def __post_init__(self):
        for t, w in self.translations.items():
            if w <= 0:
                raise ValueError(f"{self.headword!r}: weight for {t!r} must be positive")


def _asserted_translations(ann: Annotation, position: int, f_surfaces: Mapping[int, str]) -> set[str]:
    """What one annotator asserts about one E-side instance; empty if unaccounted."""
    for g in ann.groups:
        if position in g.e_positions:
            return {f_surfaces[f] for f in g.f_positions}
    for n in ann.nt_marks:
        if n.side == "E" and n.position == position:
            return {NONE_TRANSLATION}
    return set()


def extract_gold_lexicon(
    annotations: Mapping[str, Sequence[Annotation]],
    focus_words: Iterable[str],
    bitext: Bitext,
    mode: GoldMode = "union",
) -> list[LexiconEntry]:
    """Collect each focus word's translations from the annotators' link groups.

    In union mode every translation asserted by any annotator for any instance
    is kept (maximally permissive gold); in majority mode a translation must be
    asserted for an instance by more than half of the annotators who accounted
    for that instance.
    """
    by_annotator = {
        name: {ann.verse_id: ann for ann in anns} for name, anns in annotations.items()
    }
    if not by_annotator:
        raise LexiconCoverageError("no annotations supplied")

    instances: dict[str, list[tuple[str, int]]] = defaultdict(list)
    f_surfaces_of: dict[str, dict[int, str]] = {}
    focus = set(focus_words)
    for pair in bitext.pairs:
        f_surfaces_of[pair.verse_id] = {t.position: t.surface for t in pair.side_f}
        for tok in pair.side_e:
            if tok.kind == WORD and tok.surface in focus:
                instances[tok.surface].append((pair.verse_id, tok.position))

    entries = []
    for word in sorted(focus):
        if not instances.get(word):
            raise LexiconCoverageError(f"focus word {word!r} has no instances in the bitext")
        translations: set[str] = set()
        for verse_id, position in instances[word]:
            votes: Counter = Counter()
            voters = 0
            for name, by_verse in by_annotator.items():
                ann = by_verse.get(verse_id)
                if ann is None:
                    raise LexiconCoverageError(
                        f"annotator {name!r} does not cover verse {verse_id!r}, "
                        f"which contains focus word {word!r}"
                    )
                asserted = _asserted_translations(ann, position, f_surfaces_of[verse_id])
                if asserted:
                    voters += 1
                    votes.update(asserted)
            if mode == "union":
                translations.update(votes)
            elif mode == "majority":
                translations.update(t for t, n in votes.items() if 2 * n > voters)
            else:
                raise ValueError(f"unknown gold mode {mode!r}")
        entries.append(LexiconEntry(word, {t: 1.0 for t in sorted(translations)}))
    return entries


@dataclass(frozen=True)
class EntryScore:
    headword: str
    precision: float | None
    recall: float | None
    dice: float | None


@dataclass(frozen=True)
class LexiconEvaluation:
    entries: tuple[EntryScore, ...]
    unmatched_headwords: tuple[str, ...]  # candidate headwords absent from the gold
    micro_precision: float | None
    micro_recall: float | None
    micro_dice: float | None


def evaluate_lexicon(
    candidate: Iterable[LexiconEntry], gold: Iterable[LexiconEntry]
) -> LexiconEvaluation:
    """Score a candidate lexicon against the gold, per headword and micro-averaged.

    Candidate weights (e.g. translation probabilities) are used as given; gold
    translations always weigh 1.  Gold headwords missing from the candidate
    score as empty candidate sets; candidate headwords missing from the gold
    are reported, not scored.
    """
    cand_by_head = {e.headword: e for e in candidate}
    gold_by_head = {e.headword: e for e in gold}
    unmatched = tuple(sorted(set(cand_by_head) - set(gold_by_head)))

    entries = []
    sum_inter = 0.0
    sum_cand = 0.0
    sum_gold = 0.0
    for head in sorted(gold_by_head):
        gold_set = {t: 1.0 for t in gold_by_head[head].translations}
        cand_entry = cand_by_head.get(head)
        cand_set = dict(cand_entry.translations) if cand_entry else {}
        inter = sum(min(w, gold_set[t]) for t, w in cand_set.items() if t in gold_set)
        sum_inter += inter
        sum_cand += sum(cand_set.values())
        sum_gold += sum(gold_set.values())

        def rate(fn, x, y):
            try:
                return float(fn(x, y))
            except UndefinedRateError:
                return None

        entries.append(
            EntryScore(
                head,
                rate(precision, cand_set, gold_set),
                rate(recall, cand_set, gold_set),
                rate(dice, cand_set, gold_set),
            )
        )

    micro_p = (sum_inter / sum_cand) if sum_cand else None
    micro_r = (sum_inter / sum_gold) if sum_gold else None
    micro_d = (2 * sum_inter / (sum_cand + sum_gold)) if (sum_cand + sum_gold) else None
    return LexiconEvaluation(tuple(entries), unmatched, micro_p, micro_r, micro_d)


# ---------------------------------------------------------------------------
# lexicon files: headword<TAB>translation<TAB>weight (weight optional, default 1)


def write_lexicon(entries: Iterable[LexiconEntry], path: str | Path) -> None:
    lines = []
    for entry in sorted(entries, key=lambda e: e.headword):
        for translation in sorted(entry.translations):
            w = entry.translations[translation]
            if w == 1.0:
                lines.append(f"{entry.headword}\t{translation}\n")
            else:
                lines.append(f"{entry.headword}\t{translation}\t{w}\n")
    Path(path).write_text("".join(lines), encoding="utf-8")


def read_lexicon(path: str | Path) -> list[LexiconEntry]:
    table: dict[str, dict[str, float]] = defaultdict(dict)
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) == 2:
            head, translation = parts
            weight = 1.0
        elif len(parts) == 3:
            head, translation = parts[0], parts[1]
            try:
                weight = float(parts[2])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad weight {parts[2]!r}")
        else:
            raise ValueError(f"{path}:{lineno}: expected 2 or 3 tab-separated fields")
        table[head][translation] = weight
    return [LexiconEntry(h, dict(ts)) for h, ts in sorted(table.items())]
