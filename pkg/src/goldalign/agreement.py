"""Weighted precision/recall/Dice agreement between annotators.

Link tokens are (u, v) pairs of hashable position keys.  Two weighting schemes
are provided:

* fanout weighting: w(u, v) = 1 / max(fanout(u), fanout(v)), where fanout
  counts the links attached to a position; the weight incident to any single
  position then sums to at most 1 (strictly less when the two fanouts differ
  and neither divides the other).
* directional weighting: links are treated as pointers out of one side and
  w = 1 / (number of links sharing the source position), so the weight emitted
  from each source position sums to exactly 1, with no bound on the target
  side.  The directional agreement rate is the mean of the two directions.

Weights are exact rationals (fractions.Fraction), so the emitted-sum identity
holds exactly rather than approximately.  Sets may be fuzzy: |X| is the sum of
the weights in X and |X ∩ Y| sums min(w_X, w_Y) over shared tokens.
"""

from __future__ import annotations

import csv
import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Hashable, Iterable, Literal, Mapping, Sequence, TextIO

from goldalign.alignment import Annotation, LinkGroup
from goldalign.bitext import VersePair
from goldalign.errors import CoverageMismatchError, UndefinedRateError

LinkToken = tuple[Hashable, Hashable]
WeightedLinkSet = Mapping[LinkToken, Fraction]

Direction = Literal["F->E", "E->F"]
Mode = Literal["directional", "fanout"]


def set_size(weights: WeightedLinkSet):
    return sum(weights.values())


def intersection_size(x: WeightedLinkSet, y: WeightedLinkSet):
    total = Fraction(0)
    for token, w in x.items():
        wy = y.get(token)
        if wy is not None:
            total += min(w, wy)
    return total


def precision(x: WeightedLinkSet, y: WeightedLinkSet):
    """|X ∩ Y| / |X|; undefined when X is empty."""
    size = set_size(x)
    if size == 0:
        raise UndefinedRateError("precision of an empty set is undefined")
    return intersection_size(x, y) / size


def recall(x: WeightedLinkSet, y: WeightedLinkSet):
    """|X ∩ Y| / |Y|; undefined when Y is empty."""
    size = set_size(y)
    if size == 0:
        raise UndefinedRateError("recall against an empty set is undefined")
    return intersection_size(x, y) / size


def dice(x: WeightedLinkSet, y: WeightedLinkSet):
    """2|X ∩ Y| / (|X| + |Y|): symmetric, and the harmonic mean of precision and recall."""
    denom = set_size(x) + set_size(y)
    if denom == 0:
        raise UndefinedRateError("Dice of two empty sets is undefined")
    return 2 * intersection_size(x, y) / denom


def fanout_weights(tokens: Iterable[LinkToken]) -> dict[LinkToken, Fraction]:
    """Weight each token by 1 / max(fanout(u), fanout(v)) over the given set."""
    tokens = set(tokens)
    fan_u: Counter = Counter(u for u, _ in tokens)
    fan_v: Counter = Counter(v for _, v in tokens)
    return {(u, v): Fraction(1, max(fan_u[u], fan_v[v])) for u, v in tokens}


def directional_weights(
    tokens: Iterable[LinkToken], direction: Direction
) -> dict[LinkToken, Fraction]:
    """Normalize so the links emitted from each source position sum to exactly 1.

    Tokens are (e, f) pairs; under "F->E" the f side is the source, under
    "E->F" the e side is.  No limit applies to the weight arriving at a target.
    """
    tokens = set(tokens)
    source = (lambda t: t[1]) if direction == "F->E" else (lambda t: t[0])
    emitted: Counter = Counter(source(t) for t in tokens)
    return {t: Fraction(1, emitted[source(t)]) for t in tokens}


def pooled_tokens(
    annotations: Iterable[Annotation], include_null: bool = False
) -> set[LinkToken]:
    """Expand annotations into verse-qualified link tokens for pooled scoring.

    Token sides are (verse_id, position) keys so fanouts never leak across
    verses.  NT marks contribute nothing unless ``include_null`` is set, in
    which case they link to the reserved position 0 on the opposite side.
    """
    tokens: set[LinkToken] = set()
    for ann in annotations:
        vid = ann.verse_id
        for g in ann.groups:
            for e in g.e_positions:
                for f in g.f_positions:
                    tokens.add(((vid, e), (vid, f)))
        if include_null:
            for n in ann.nt_marks:
                if n.side == "E":
                    tokens.add(((vid, n.position), (vid, 0)))
                else:
                    tokens.add(((vid, 0), (vid, n.position)))
    return tokens


def _coverage(annotations: Iterable[Annotation]) -> dict[str, Annotation]:
    by_verse: dict[str, Annotation] = {}
    for ann in annotations:
        if ann.verse_id in by_verse:
            raise CoverageMismatchError(
                f"two annotations for verse {ann.verse_id!r} by {ann.annotator_id!r}"
            )
        by_verse[ann.verse_id] = ann
    return by_verse


def pair_agreement(
    anns_a: Iterable[Annotation],
    anns_b: Iterable[Annotation],
    mode: Mode = "directional",
    include_null: bool = False,
) -> float:
    """Agreement rate between two annotators over the same verses, in [0, 1].

    Links are pooled over all given verses.  In directional mode the rate is
    the mean of the Dice rates under F->E and E->F normalization; in fanout
    mode it is the Dice rate under fanout weighting.
    """
    by_a = _coverage(anns_a)
    by_b = _coverage(anns_b)
    if set(by_a) != set(by_b):
        only_a = sorted(set(by_a) - set(by_b))
        only_b = sorted(set(by_b) - set(by_a))
        raise CoverageMismatchError(
            f"annotators cover different verses (only first: {only_a}, only second: {only_b})"
        )
    ta = pooled_tokens(by_a.values(), include_null)
    tb = pooled_tokens(by_b.values(), include_null)
    if mode == "fanout":
        rate = dice(fanout_weights(ta), fanout_weights(tb))
    elif mode == "directional":
        d_fe = dice(directional_weights(ta, "F->E"), directional_weights(tb, "F->E"))
        d_ef = dice(directional_weights(ta, "E->F"), directional_weights(tb, "E->F"))
        rate = (d_fe + d_ef) / 2
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return float(rate)


# ---------------------------------------------------------------------------
# pooling and reporting


@dataclass(frozen=True)
class PoolingPlan:
    """Ordered list of disjoint verse-index sets (0-based into the part's verse list)."""

    pools: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for pool in self.pools:
            if not pool:
                raise ValueError("pools must be non-empty")
            overlap = seen.intersection(pool)
            if overlap:
                raise ValueError(f"pools overlap on verse indices {sorted(overlap)}")
            seen.update(pool)

    @classmethod
    def contiguous(cls, n_pairs: int, n_pools: int, pool_size: int | None = None) -> "PoolingPlan":
        """Pools of consecutive verse pairs in order: 1..k, k+1..2k, ..."""
        if pool_size is None:
            if n_pairs % n_pools:
                raise ValueError(
                    f"{n_pairs} verse pairs do not divide into {n_pools} equal pools"
                )
            pool_size = n_pairs // n_pools
        if n_pools * pool_size != n_pairs:
            raise ValueError(
                f"{n_pools} pools of {pool_size} cover {n_pools * pool_size} pairs, "
                f"but the part has {n_pairs}"
            )
        return cls(
            tuple(
                tuple(range(i * pool_size, (i + 1) * pool_size)) for i in range(n_pools)
            )
        )


def _mean_std(rates: Sequence[float]) -> tuple[float, float]:
    mean = statistics.fmean(rates)
    std = statistics.stdev(rates) if len(rates) > 1 else 0.0
    return mean, std


@dataclass(frozen=True)
class PairStats:
    annotator_a: str
    annotator_b: str
    rates: tuple[float, ...]  # percent, one per pool
    mean: float
    stddev: float


@dataclass(frozen=True)
class AgreementReport:
    """Pairwise mean ± stddev over pools, per-annotator means, and the grand mean.

    All rates are percentages.  Per-annotator statistics run over every pool
    rate of every pair involving that annotator; the grand statistics run over
    all pool rates of all pairs.
    """

    annotators: tuple[str, ...]
    pair_stats: tuple[PairStats, ...]
    annotator_means: Mapping[str, tuple[float, float]]
    grand_mean: float
    grand_stddev: float
    mode: Mode
    content_only: bool

    def cell(self, a: str, b: str) -> PairStats | None:
        for ps in self.pair_stats:
            if {ps.annotator_a, ps.annotator_b} == {a, b}:
                return ps
        return None

    def render_table(self) -> str:
        """Aligned upper-triangular text table with annotator means and the grand mean."""
        label = f"mode={self.mode}, {'content words only' if self.content_only else 'all words'}"
        cols = self.annotators[1:]
        width = max(14, *(len(a) + 2 for a in self.annotators))

        def fmt(mean: float, std: float) -> str:
            return f"{mean:.2f} ± {std:.2f}"

        lines = [f"Inter-annotator agreement ({label})", ""]
        header = " " * 6 + "".join(a.ljust(width) for a in cols)
        lines.append(header + "| annotator  mean")
        for i, a in enumerate(self.annotators):
            cells = []
            for j, b in enumerate(self.annotators):
                if j == 0:
                    continue
                if j <= i:
                    cells.append(" " * width)
                    continue
                ps = self.cell(a, b)
                cells.append(fmt(ps.mean, ps.stddev).ljust(width) if ps else " " * width)
            am = self.annotator_means[a]
            lines.append(f"{a:<6}" + "".join(cells) + f"| {a:<10} {fmt(am[0], am[1])}")
        pad = 6 + width * len(cols)
        lines.append(" " * pad + f"| grand mean {fmt(self.grand_mean, self.grand_stddev)}")
        return "\n".join(lines)

    def write_csv(self, out: TextIO) -> None:
        """Machine-readable pool rates: annotator_a, annotator_b, pool, rate (percent)."""
        writer = csv.writer(out)
        writer.writerow(["annotator_a", "annotator_b", "pool", "rate"])
        for ps in self.pair_stats:
            for pool_idx, rate in enumerate(ps.rates, start=1):
                writer.writerow([ps.annotator_a, ps.annotator_b, pool_idx, f"{rate:.6f}"])


def pooled_agreement(
    annotations: Mapping[str, Sequence[Annotation]],
    plan: PoolingPlan,
    verse_ids: Sequence[str],
    mode: Mode = "directional",
    include_null: bool = False,
    content_only: bool = False,
) -> AgreementReport:
    """Pool links per plan and compute one rate per (annotator pair, pool).

    ``verse_ids`` fixes the order the plan's indices refer to.  Every annotator
    must cover every verse named by the plan.
    """
    annotators = tuple(sorted(annotations))
    if len(annotators) < 2:
        raise ValueError("agreement needs at least two annotators")
    by_annotator: dict[str, dict[str, Annotation]] = {}
    for name in annotators:
        by_verse = _coverage(annotations[name])
        for pool in plan.pools:
            for idx in pool:
                vid = verse_ids[idx]
                if vid not in by_verse:
                    raise CoverageMismatchError(
                        f"annotator {name!r} has no annotation for verse {vid!r}"
                    )
        by_annotator[name] = by_verse

    pair_stats: list[PairStats] = []
    rates_of: dict[str, list[float]] = defaultdict(list)
    all_rates: list[float] = []
    for i, a in enumerate(annotators):
        for b in annotators[i + 1 :]:
            rates = []
            for pool in plan.pools:
                vids = [verse_ids[idx] for idx in pool]
                rate = 100.0 * pair_agreement(
                    [by_annotator[a][v] for v in vids],
                    [by_annotator[b][v] for v in vids],
                    mode=mode,
                    include_null=include_null,
                )
                rates.append(rate)
            mean, std = _mean_std(rates)
            pair_stats.append(PairStats(a, b, tuple(rates), mean, std))
            rates_of[a].extend(rates)
            rates_of[b].extend(rates)
            all_rates.extend(rates)

    annotator_means = {a: _mean_std(rates_of[a]) for a in annotators}
    grand_mean, grand_std = _mean_std(all_rates)
    return AgreementReport(
        annotators=annotators,
        pair_stats=tuple(pair_stats),
        annotator_means=annotator_means,
        grand_mean=grand_mean,
        grand_stddev=grand_std,
        mode=mode,
        content_only=content_only,
    )


# ---------------------------------------------------------------------------
# content-word filtering


@dataclass(frozen=True)
class Stoplist:
    """Function-word surface forms for one language; matching is case-insensitive."""

    language: str
    forms: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "forms", frozenset(f.casefold() for f in self.forms))

    def __contains__(self, surface: str) -> bool:
        return surface.casefold() in self.forms

    def __len__(self) -> int:
        return len(self.forms)

    @classmethod
    def load(cls, path: str | Path, language: str = "") -> "Stoplist":
        """Read one surface form per line; '#' starts a comment."""
        forms = set()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            form = line.split("#", 1)[0].strip()
            if form:
                forms.add(form)
        return cls(language or Path(path).stem, frozenset(forms))


def content_filter(
    annotations: Iterable[Annotation],
    stoplist_e: Stoplist,
    stoplist_f: Stoplist,
    pairs_by_id: Mapping[str, VersePair],
) -> list[Annotation]:
    """Drop every link token with a stoplisted word on either side.

    Group sides are filtered position-wise (equivalent to dropping all
    cross-product tokens that touch a stoplisted word); groups losing a whole
    side disappear, as do NT marks on stoplisted words.  The results are
    metric inputs only and come back non-finalized, exempt from completeness.
    """
    if not stoplist_e.forms or not stoplist_f.forms:
        raise ValueError("content filtering needs non-empty stoplists for both sides")
    filtered = []
    for ann in annotations:
        pair = pairs_by_id.get(ann.verse_id)
        if pair is None:
            raise CoverageMismatchError(f"no verse pair for annotation {ann.verse_id!r}")
        surf_e = {t.position: t.surface for t in pair.side_e}
        surf_f = {t.position: t.surface for t in pair.side_f}
        groups = []
        for g in ann.groups:
            e_keep = tuple(p for p in g.e_positions if surf_e[p] not in stoplist_e)
            f_keep = tuple(p for p in g.f_positions if surf_f[p] not in stoplist_f)
            if e_keep and f_keep:
                groups.append(LinkGroup(e_keep, f_keep))
        nts = []
        for n in ann.nt_marks:
            surface = surf_e[n.position] if n.side == "E" else surf_f[n.position]
            stop = stoplist_e if n.side == "E" else stoplist_f
            if surface not in stop:
                nts.append(n)
        filtered.append(
            Annotation(ann.verse_id, ann.annotator_id, tuple(groups), tuple(nts), finalized=False)
        )
    return filtered
