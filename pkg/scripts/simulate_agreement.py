#!/usr/bin/env python3
"""Fabricate noisy annotators over a verse set and measure their agreement.

Each synthetic annotator starts from the same 1:1 base alignment and re-targets
links at a configurable rate, with function-word links (per the stoplists)
perturbed more often than content-word links.  The script writes one alignment
file per annotator into the set's annotations/ directory, then prints pooled
agreement tables for all words and for content words only, so the effect of
ignoring function words can be observed directly:

    python3 scripts/make_demo_set.py --out-dir demo_data/part1
    python3 scripts/simulate_agreement.py --part demo_data/part1 --annotators 5
"""

import argparse

from goldalign import alignment
from goldalign.agreement import PoolingPlan, Stoplist, content_filter, pooled_agreement
from goldalign.rng import SplitMix64
from goldalign.sets import load_verse_set


def synth_annotator(name, verse_set, stop_e, rng, p_function, p_content):
    """Perturbed 1:1 annotations; every pair is completed and finalized."""
    anns = []
    for ordinal in range(1, verse_set.total + 1):
        pair = verse_set.pair(ordinal)
        n = min(len(pair.side_e), len(pair.side_f))
        ann = alignment.Annotation.empty(pair.verse_id, name)
        for i in range(1, n + 1):
            ann = alignment.apply_link(ann, {i}, {i}, pair)
        for i in range(1, n + 1):
            p = p_function if pair.side_e[i - 1].surface in stop_e else p_content
            if rng.below(1000) < int(p * 1000):
                ann = alignment.apply_link(ann, {i}, {1 + rng.below(len(pair.side_f))}, pair)
        report = alignment.completeness(ann, pair)
        for pos in report.missing_e:
            ann = alignment.mark_not_translated(ann, "E", pos, pair)
        for pos in report.missing_f:
            ann = alignment.mark_not_translated(ann, "F", pos, pair)
        anns.append(alignment.finalize(ann, pair))
    return anns


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--part", default="demo_data/part1")
    parser.add_argument("--annotators", type=int, default=5)
    parser.add_argument("--seed", type=int, default=2026)
    parser.add_argument("--p-function", type=float, default=0.30,
                        help="re-target probability for function-word links")
    parser.add_argument("--p-content", type=float, default=0.10,
                        help="re-target probability for content-word links")
    parser.add_argument("--pools", type=int, default=4)
    parser.add_argument("--mode", choices=("directional", "fanout"), default="directional")
    parser.add_argument("--stoplist-e", default=None, help="default: <part>/en.stop")
    parser.add_argument("--stoplist-f", default=None, help="default: <part>/fr.stop")
    args = parser.parse_args()

    verse_set = load_verse_set(args.part)
    stop_e_path = args.stoplist_e or verse_set.root / "en.stop"
    stop_f_path = args.stoplist_f or verse_set.root / "fr.stop"
    try:
        stop_e = Stoplist.load(stop_e_path, verse_set.bitext.lang_e)
        stop_f = Stoplist.load(stop_f_path, verse_set.bitext.lang_f)
    except FileNotFoundError as e:
        parser.error(f"stoplist not found: {e.filename} (pass --stoplist-e/--stoplist-f)")
    pairs_by_id = verse_set.bitext.pairs_by_id()

    annotations = {}
    for k in range(args.annotators):
        name = f"S{k + 1}"
        rng = SplitMix64(args.seed * 1000 + k)
        anns = synth_annotator(name, verse_set, stop_e, rng, args.p_function, args.p_content)
        alignment.write_alignment_file(anns, verse_set.alignment_path(name), pairs_by_id)
        annotations[name] = anns
    print(f"wrote {args.annotators} synthetic annotators to {verse_set.annotations_dir}\n")

    verse_ids = [p.verse_id for p in verse_set.bitext.pairs]
    plan = PoolingPlan.contiguous(len(verse_ids), args.pools)
    report = pooled_agreement(annotations, plan, verse_ids, mode=args.mode)
    print(report.render_table())

    filtered = {
        name: content_filter(anns, stop_e, stop_f, pairs_by_id)
        for name, anns in annotations.items()
    }
    content_report = pooled_agreement(
        filtered, plan, verse_ids, mode=args.mode, content_only=True
    )
    print()
    print(content_report.render_table())
    print(
        f"\ngrand mean rises from {report.grand_mean:.2f} to "
        f"{content_report.grand_mean:.2f} when function words are ignored"
    )


if __name__ == "__main__":
    main()
