"""Frequency-stratified sampling of focus word types and their verses.

Given a word histogram, draw a fixed number of types at each target frequency,
then collect every verse pair containing any instance of a drawn type.  When
two drawn types co-occur in a verse, the lower-frequency one is discarded and
redrawn from its stratum until the sample is conflict-free, so each selected
verse contains instances of exactly one focus word.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from goldalign.bitext import WORD, Bitext, Side, VersePair
from goldalign.errors import BitextFormatError, SamplingInfeasibleError
from goldalign.rng import SplitMix64


@dataclass(frozen=True)
class Stratum:
    frequency: int
    type_count: int


@dataclass(frozen=True)
class StrataSpec:
    strata: tuple[Stratum, ...]

    def __post_init__(self):
        freqs = [s.frequency for s in self.strata]
        if not self.strata:
            raise ValueError("a strata spec needs at least one stratum")
        if len(set(freqs)) != len(freqs):
            raise ValueError(f"stratum frequencies must be distinct, got {freqs}")
        for s in self.strata:
            if s.frequency < 1 or s.type_count < 1:
                raise ValueError(f"invalid stratum {s}")

    @classmethod
    def default(cls) -> "StrataSpec":
        return cls(tuple(Stratum(f, 25) for f in (1, 2, 3, 4)))

    @classmethod
    def parse(cls, text: str) -> "StrataSpec":
        """Parse "1:25,2:25,3:25,4:25" into a spec."""
        strata = []
        for part in text.split(","):
            freq, _, count = part.partition(":")
            try:
                strata.append(Stratum(int(freq), int(count)))
            except ValueError:
                raise ValueError(f"bad stratum {part!r}; expected FREQ:COUNT")
        return cls(tuple(strata))


@dataclass(frozen=True)
class FocusSet:
    """Map from focus word type to its corpus frequency stratum."""

    frequency_of: Mapping[str, int]

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(sorted(self.frequency_of))

    def by_stratum(self) -> dict[int, tuple[str, ...]]:
        out: dict[int, list[str]] = defaultdict(list)
        for w in self.words:
            out[self.frequency_of[w]].append(w)
        return {f: tuple(ws) for f, ws in sorted(out.items())}


@dataclass(frozen=True)
class SampleResult:
    focus: FocusSet
    pairs: tuple[VersePair, ...]
    discarded: tuple[str, ...]


def _word_occurrences(bitext: Bitext, side: Side) -> dict[str, list[int]]:
    occ: dict[str, list[int]] = defaultdict(list)
    for idx, pair in enumerate(bitext.pairs):
        for tok in pair.side(side):
            if tok.kind == WORD:
                occ[tok.surface].append(idx)
    return occ


def stratified_sample(
    hist: Counter,
    spec: StrataSpec,
    rng: SplitMix64,
    bitext: Bitext,
    side: Side = "E",
) -> SampleResult:
    """Draw the focus set and collect the verses covering all its instances.

    Candidate types within a stratum are ordered lexicographically before any
    draw, so the result depends only on (histogram, spec, seed).  Raises
    SamplingInfeasibleError when a stratum runs out of candidates before a
    conflict-free sample exists.
    """
    occurrences = _word_occurrences(bitext, side)

    pools: dict[int, list[str]] = {}
    for st in spec.strata:
        pools[st.frequency] = sorted(w for w, c in hist.items() if c == st.frequency)

    def draw(freq: int) -> str:
        pool = pools[freq]
        if not pool:
            raise SamplingInfeasibleError(
                f"stratum {freq} exhausted before a conflict-free sample was found",
                stratum_frequency=freq,
            )
        word = pool.pop(rng.below(len(pool)))
        if len(occurrences.get(word, ())) != freq:
            raise BitextFormatError(
                f"histogram says {word!r} occurs {freq} times but the bitext "
                f"side has {len(occurrences.get(word, ()))} instances; "
                f"histogram and bitext do not match"
            )
        return word

    chosen: dict[str, int] = {}
    for st in spec.strata:
        if len(pools[st.frequency]) < st.type_count:
            raise SamplingInfeasibleError(
                f"stratum {st.frequency} has only {len(pools[st.frequency])} "
                f"candidate types, {st.type_count} requested",
                stratum_frequency=st.frequency,
            )
        for _ in range(st.type_count):
            chosen[draw(st.frequency)] = st.frequency

    discarded: list[str] = []
    while True:
        words_in_verse: dict[int, set[str]] = defaultdict(set)
        for w in chosen:
            for v in occurrences[w]:
                words_in_verse[v].add(w)
        to_discard: set[str] = set()
        for v in sorted(words_in_verse):
            ws = words_in_verse[v]
            if len(ws) < 2:
                continue
            # Keep the highest-frequency word; on equal frequency keep the
            # lexicographically earlier one.
            top = max(chosen[w] for w in ws)
            keep = min(w for w in ws if chosen[w] == top)
            to_discard |= ws - {keep}
        if not to_discard:
            break
        for w in sorted(to_discard, key=lambda w: (chosen[w], w)):
            freq = chosen.pop(w)
            discarded.append(w)
            chosen[draw(freq)] = freq

    verse_indices = sorted({v for w in chosen for v in occurrences[w]})
    focus = FocusSet(dict(sorted(chosen.items())))
    pairs = tuple(bitext.pairs[i] for i in verse_indices)
    return SampleResult(focus, pairs, tuple(discarded))


@dataclass(frozen=True)
class CoverageEntry:
    word: str
    in_sample: int
    in_corpus: int


@dataclass(frozen=True)
class CoverageReport:
    entries: tuple[CoverageEntry, ...]

    @property
    def ok(self) -> bool:
        return all(e.in_sample == e.in_corpus and e.in_corpus > 0 for e in self.entries)

    def failures(self) -> tuple[CoverageEntry, ...]:
        return tuple(e for e in self.entries if e.in_sample != e.in_corpus or e.in_corpus == 0)


def verify_focus_coverage(
    bitext: Bitext,
    focus: FocusSet,
    pairs: Iterable[VersePair],
    side: Side = "E",
) -> CoverageReport:
    """Check that the sampled verses contain every corpus instance of every focus word."""
    want = set(focus.frequency_of)

    def count(verses: Iterable[VersePair]) -> Counter:
        c: Counter = Counter()
        for pair in verses:
            for tok in pair.side(side):
                if tok.kind == WORD and tok.surface in want:
                    c[tok.surface] += 1
        return c

    in_sample = count(pairs)
    in_corpus = count(bitext.pairs)
    entries = tuple(
        CoverageEntry(w, in_sample.get(w, 0), in_corpus.get(w, 0)) for w in sorted(want)
    )
    return CoverageReport(entries)


def write_focus_file(focus: FocusSet, path: str | Path) -> None:
    """Emit the focus set as a two-column file: word<TAB>frequency."""
    items = sorted(focus.frequency_of.items(), key=lambda kv: (kv[1], kv[0]))
    text = "".join(f"{w}\t{f}\n" for w, f in items)
    Path(path).write_text(text, encoding="utf-8")


def read_focus_file(path: str | Path) -> FocusSet:
    frequency_of: dict[str, int] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        word, _, freq = line.partition("\t")
        try:
            frequency_of[word] = int(freq)
        except ValueError:
            raise BitextFormatError(f"{path}:{lineno}: bad focus line {line!r}")
    return FocusSet(dict(sorted(frequency_of.items())))
