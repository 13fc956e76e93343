"""Command-line entry points.

Subcommands: tokenize, sample, validate, agree, lexicon, serve.
Exit status: 0 on success, 1 on a domain error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from goldalign import agreement, alignment, lexicon, sampling, sets
from goldalign.bitext import (
    Bitext,
    load_bitext,
    resolve_profile,
    token_line,
    tokenize,
    word_histogram,
)
from goldalign.errors import GoldalignError
from goldalign.rng import SplitMix64


def _cmd_tokenize(args: argparse.Namespace) -> int:
    profile = resolve_profile(args.profile)
    src = open(args.infile, encoding="utf-8") if args.infile else sys.stdin
    dst = open(args.outfile, "w", encoding="utf-8") if args.outfile else sys.stdout
    try:
        for line in src:
            dst.write(token_line(tokenize(line.rstrip("\n"), profile)) + "\n")
    finally:
        if args.infile:
            src.close()
        if args.outfile:
            dst.close()
    return 0


def _cmd_sample(args: argparse.Namespace) -> int:
    profile_e = resolve_profile(args.profile_e)
    profile_f = resolve_profile(args.profile_f)
    bitext = load_bitext(args.text_e, args.text_f, args.ids, profile_e, profile_f)
    hist = word_histogram(bitext, args.side)
    spec = sampling.StrataSpec.parse(args.strata)
    rng = SplitMix64(args.seed)
    result = sampling.stratified_sample(hist, spec, rng, bitext, args.side)

    sampled = Bitext(bitext.lang_e, bitext.lang_f, result.pairs)
    out_dir = Path(args.out_dir)
    sets.write_verse_set(sampled, out_dir)
    sampling.write_focus_file(result.focus, args.focus_out or out_dir / "focus.tsv")

    report = sampling.verify_focus_coverage(bitext, result.focus, result.pairs, args.side)
    print(
        f"sampled {len(result.focus.frequency_of)} focus types into "
        f"{len(result.pairs)} verse pairs ({len(result.discarded)} discarded in conflicts)"
    )
    if not report.ok:
        print("coverage check FAILED for:", file=sys.stderr)
        for entry in report.failures():
            print(
                f"  {entry.word}: {entry.in_sample} of {entry.in_corpus} instances",
                file=sys.stderr,
            )
        return 1
    print("coverage check passed: every instance of every focus word is included")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    verse_set = sets.load_verse_set(args.part)
    pairs_by_id = verse_set.bitext.pairs_by_id()
    annotators = [args.annotator] if args.annotator else verse_set.annotators()
    if not annotators:
        print(f"no alignment files under {verse_set.annotations_dir}", file=sys.stderr)
        return 1
    status = 0
    for annotator in annotators:
        path = verse_set.alignment_path(annotator)
        try:
            annotations = alignment.read_alignment_file(path, pairs_by_id)
        except GoldalignError as e:
            print(f"{path}: PARSE ERROR: {e}", file=sys.stderr)
            status = 1
            continue
        incomplete = []
        for ann in annotations:
            report = alignment.completeness(ann, pairs_by_id[ann.verse_id])
            if not report.complete:
                incomplete.append((ann.verse_id, report))
        print(
            f"{annotator}: {len(annotations)} annotated pairs, "
            f"{len(annotations) - len(incomplete)} complete, {len(incomplete)} incomplete"
        )
        for verse_id, report in incomplete:
            print(
                f"  {verse_id}: unaccounted E={list(report.missing_e)} "
                f"F={list(report.missing_f)}"
            )
        if incomplete and args.require_complete:
            status = 1
    return status


def _load_part_annotations(verse_set: sets.VerseSet):
    pairs_by_id = verse_set.bitext.pairs_by_id()
    annotations = {}
    for annotator in verse_set.annotators():
        annotations[annotator] = alignment.read_alignment_file(
            verse_set.alignment_path(annotator), pairs_by_id
        )
    return annotations, pairs_by_id


def _cmd_agree(args: argparse.Namespace) -> int:
    verse_set = sets.load_verse_set(args.part)
    annotations, pairs_by_id = _load_part_annotations(verse_set)
    if len(annotations) < 2:
        print(f"need at least two annotators under {verse_set.annotations_dir}", file=sys.stderr)
        return 1
    content_only = bool(args.stoplist_e or args.stoplist_f or args.content_only)
    if content_only:
        if not (args.stoplist_e and args.stoplist_f):
            print("--content-only needs both --stoplist-e and --stoplist-f", file=sys.stderr)
            return 1
        stop_e = agreement.Stoplist.load(args.stoplist_e, verse_set.bitext.lang_e)
        stop_f = agreement.Stoplist.load(args.stoplist_f, verse_set.bitext.lang_f)
        annotations = {
            name: agreement.content_filter(anns, stop_e, stop_f, pairs_by_id)
            for name, anns in annotations.items()
        }
    verse_ids = [p.verse_id for p in verse_set.bitext.pairs]
    plan = agreement.PoolingPlan.contiguous(len(verse_ids), args.pools, args.pool_size)
    report = agreement.pooled_agreement(
        annotations,
        plan,
        verse_ids,
        mode=args.mode,
        include_null=args.include_null,
        content_only=content_only,
    )
    print(report.render_table())
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as f:
            report.write_csv(f)
        print(f"\npool rates written to {args.csv}")
    return 0


def _cmd_lexicon(args: argparse.Namespace) -> int:
    if args.lexicon_action == "extract":
        verse_set = sets.load_verse_set(args.part)
        annotations, _ = _load_part_annotations(verse_set)
        if not annotations:
            print(f"no alignment files under {verse_set.annotations_dir}", file=sys.stderr)
            return 1
        focus = sampling.read_focus_file(args.focus)
        entries = lexicon.extract_gold_lexicon(
            annotations, focus.frequency_of, verse_set.bitext, mode=args.mode
        )
        lexicon.write_lexicon(entries, args.out)
        print(f"wrote {len(entries)} gold entries to {args.out}")
        return 0

    candidate = lexicon.read_lexicon(args.candidate)
    gold = lexicon.read_lexicon(args.gold)
    result = lexicon.evaluate_lexicon(candidate, gold)

    def show(value: float | None) -> str:
        return "  n/a" if value is None else f"{100 * value:5.1f}"

    print("headword\tP\tR\tD")
    for entry in result.entries:
        print(
            f"{entry.headword}\t{show(entry.precision)}\t{show(entry.recall)}"
            f"\t{show(entry.dice)}"
        )
    if result.unmatched_headwords:
        print(f"# candidate headwords not in gold: {', '.join(result.unmatched_headwords)}")
    print(
        f"# micro-averages: P={show(result.micro_precision)} "
        f"R={show(result.micro_recall)} D={show(result.micro_dice)}"
    )
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from goldalign.service import make_server

    server = make_server(
        args.data_dir,
        port=args.port,
        host=args.host,
        idle_cutoff_min=args.idle_cutoff_min,
        ui_dir=args.ui_dir,
        verbose=args.verbose,
    )
    host, port = server.server_address[0], server.server_address[1]
    n_sets = len(server.service.sets)
    print(f"serving {n_sets} set(s) from {args.data_dir} at http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="goldalign",
        description="Gold-standard word-alignment toolkit: sampling, annotation, agreement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tokenize", help="tokenize raw verse lines")
    p.add_argument("--profile", default="en", help="language tag (en, fr) or profile JSON path")
    p.add_argument("--in", dest="infile", default=None, help="input file (default stdin)")
    p.add_argument("--out", dest="outfile", default=None, help="output file (default stdout)")
    p.set_defaults(func=_cmd_tokenize)

    p = sub.add_parser("sample", help="draw a frequency-stratified focus sample")
    p.add_argument("--text-e", required=True, help="raw E-side verse file")
    p.add_argument("--text-f", required=True, help="raw F-side verse file")
    p.add_argument("--ids", default=None, help="optional verse-id file")
    p.add_argument("--profile-e", default="en")
    p.add_argument("--profile-f", default="fr")
    p.add_argument("--side", choices=("E", "F"), default="E", help="side sampled for focus words")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--strata", default="1:25,2:25,3:25,4:25", help="FREQ:COUNT pairs")
    p.add_argument("--out-dir", required=True, help="verse-set directory to write")
    p.add_argument("--focus-out", default=None, help="focus file (default OUT_DIR/focus.tsv)")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("validate", help="check alignment files against a verse set")
    p.add_argument("--part", required=True, help="verse-set directory")
    p.add_argument("--annotator", default=None, help="check a single annotator")
    p.add_argument("--require-complete", action="store_true",
                   help="exit non-zero when any annotation is incomplete")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("agree", help="pooled inter-annotator agreement report")
    p.add_argument("--part", required=True, help="verse-set directory with annotations/")
    p.add_argument("--pools", type=int, default=10)
    p.add_argument("--pool-size", type=int, default=None)
    p.add_argument("--mode", choices=("directional", "fanout"), default="directional")
    p.add_argument("--content-only", action="store_true",
                   help="drop links touching stoplisted words before scoring")
    p.add_argument("--stoplist-e", default=None)
    p.add_argument("--stoplist-f", default=None)
    p.add_argument("--include-null", action="store_true",
                   help="count NT marks as links to the reserved position 0")
    p.add_argument("--csv", default=None, help="write per-pool rates to this CSV file")
    p.set_defaults(func=_cmd_agree)

    p = sub.add_parser("lexicon", help="extract or evaluate translation lexicons")
    lex_sub = p.add_subparsers(dest="lexicon_action", required=True)
    pe = lex_sub.add_parser("extract", help="extract the gold lexicon for a focus set")
    pe.add_argument("--part", required=True)
    pe.add_argument("--focus", required=True, help="focus file (word<TAB>frequency)")
    pe.add_argument("--out", required=True)
    pe.add_argument("--mode", choices=("union", "majority"), default="union")
    pe.set_defaults(func=_cmd_lexicon)
    pv = lex_sub.add_parser("eval", help="score a candidate lexicon against a gold one")
    pv.add_argument("--candidate", required=True)
    pv.add_argument("--gold", required=True)
    pv.set_defaults(func=_cmd_lexicon)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--data-dir", required=True, help="directory of verse-set directories")
    p.add_argument("--port", type=int, default=8040)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--idle-cutoff-min", type=float, default=5.0,
                   help="gaps longer than this do not count as annotation time")
    p.add_argument("--ui-dir", default=None, help="serve static UI files from this directory")
    p.add_argument("--verbose", action="store_true", help="log requests")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GoldalignError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
