"""End-to-end acceptance suite.

Each test prints one PASS line when its criterion holds; run with
``pytest tests/test_acceptance.py -v -s`` to see them.
"""

import os
import signal
import subprocess
import sys
import time
from fractions import Fraction

import pytest
import requests

import oracles
from goldalign import alignment
from goldalign.agreement import (
    PoolingPlan,
    Stoplist,
    content_filter,
    dice,
    directional_weights,
    fanout_weights,
    pair_agreement,
    pooled_agreement,
)
from goldalign.alignment import (
    Annotation,
    LinkGroup,
    apply_link,
    finalize,
    mark_not_translated,
    parse_alignment_text,
    render_alignment_file,
    write_alignment_file,
)
from goldalign.bitext import load_bitext, word_histogram
from goldalign.cli import main as cli_main
from goldalign.errors import AnnotationStateError
from goldalign.rng import SplitMix64
from goldalign.sampling import StrataSpec, stratified_sample, verify_focus_coverage
from goldalign.sets import write_verse_set
from tests_support import make_bitext, nway_pair


def _passed(name: str) -> None:
    print(f"ACCEPTANCE PASS: {name}")


def _random_annotation(rng: SplitMix64, verse_id: str, n_e: int, n_f: int, annotator: str):
    """A random complete annotation: random many-to-many groups, NT leftovers."""
    e_pool = rng.choose(range(1, n_e + 1), n_e)
    f_pool = rng.choose(range(1, n_f + 1), n_f)
    groups = []
    while e_pool and f_pool:
        ne = 1 + rng.below(min(2, len(e_pool)))
        nf = 1 + rng.below(min(2, len(f_pool)))
        groups.append(LinkGroup(tuple(e_pool[:ne]), tuple(f_pool[:nf])))
        e_pool = e_pool[ne:]
        f_pool = f_pool[nf:]
    nts = [("E", p) for p in e_pool] + [("F", p) for p in f_pool]
    ann = Annotation(
        verse_id,
        annotator,
        tuple(groups),
        tuple(alignment.NotTranslated(s, p) for s, p in nts),
    )
    return ann


# -- criterion: metric oracle equivalence -------------------------------------


def test_metric_oracle_equivalence():
    started = time.perf_counter()
    rng = SplitMix64(20260809)
    worst = 0.0
    for i in range(1000):
        n_e = 1 + rng.below(8)
        n_f = 1 + rng.below(8)
        vid = f"V{i}"
        a = [_random_annotation(rng, vid, n_e, n_f, "A")]
        b = [_random_annotation(rng, vid, n_e, n_f, "B")]
        for mode in ("directional", "fanout"):
            got = pair_agreement(a, b, mode)
            want = oracles.pair_agreement(a, b, mode)
            worst = max(worst, abs(got - want))
    elapsed = time.perf_counter() - started
    assert worst < 1e-12, f"worst deviation from oracle: {worst}"
    assert elapsed < 10.0, f"took {elapsed:.1f}s, budget is 10s"
    _passed(f"metric oracle equivalence (worst |Δ|={worst:.2e}, {elapsed:.1f}s)")


# -- criterion: weight bounds --------------------------------------------------


def test_fanout_and_directional_weight_bounds():
    started = time.perf_counter()
    rng = SplitMix64(77)
    for _ in range(10_000):
        n = 1 + rng.below(12)
        tokens = {(1 + rng.below(6), 1 + rng.below(6)) for _ in range(n)}
        w = fanout_weights(tokens)
        incident: dict = {}
        for (u, v), weight in w.items():
            incident[("e", u)] = incident.get(("e", u), Fraction(0)) + weight
            incident[("f", v)] = incident.get(("f", v), Fraction(0)) + weight
        assert all(total <= 1 for total in incident.values())

        for direction in ("F->E", "E->F"):
            dw = directional_weights(tokens, direction)
            emitted: dict = {}
            for (u, v), weight in dw.items():
                src = v if direction == "F->E" else u
                emitted[src] = emitted.get(src, Fraction(0)) + weight
            assert all(total == 1 for total in emitted.values())

    # the documented under-weight case: fanouts {2, 3} on one shared token
    w = fanout_weights([(1, 1), (1, 2), (2, 1), (3, 1)])
    incident_e1 = w[(1, 1)] + w[(1, 2)]
    assert incident_e1 == Fraction(5, 6) < 1
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"took {elapsed:.1f}s, budget is 5s"
    _passed(f"weight bounds over 10k random link sets ({elapsed:.1f}s)")


# -- criterion: dice identities -------------------------------------------------


def test_dice_identities_and_self_agreement():
    rng = SplitMix64(3)
    for _ in range(1000):
        n = 1 + rng.below(10)
        x = {
            (1 + rng.below(5), 1 + rng.below(5)): Fraction(1 + rng.below(8), 1 + rng.below(8))
            for _ in range(n)
        }
        m = 1 + rng.below(10)
        y = {
            (1 + rng.below(5), 1 + rng.below(5)): Fraction(1 + rng.below(8), 1 + rng.below(8))
            for _ in range(m)
        }
        assert dice(x, x) == 1
        d = dice(x, y)
        assert d == dice(y, x)
        assert 0 <= d <= 1

    verse_ids = [f"V{i}" for i in range(4)]
    anns = {
        name: [
            _random_annotation(SplitMix64(i), v, 5, 5, name)
            for i, v in enumerate(verse_ids)
        ]
        for name in ("A1", "A2")
    }
    # identical link structures for both annotators: self-agreement
    anns["A2"] = [
        Annotation(a.verse_id, "A2", a.groups, a.nt_marks) for a in anns["A1"]
    ]
    report = pooled_agreement(anns, PoolingPlan.contiguous(4, 2), verse_ids)
    assert f"{report.grand_mean:.2f}" == "100.00"
    _passed("dice identities and 100.00% self-agreement")


# -- criterion: sampling structure ----------------------------------------------


def _write_synthetic_corpus(tmp_path, n_verses=30_000, per_stratum=60):
    """A corpus where every frequency 1-4 type is injected into its own verse.

    Base words repeat hundreds of times, so the stratum candidates are exactly
    the injected types and no two of them can ever share a verse.
    """
    base = [f"base{j:03d}" for j in range(300)]
    lines = [
        [base[(i * 6 + j) % 300] for j in range(6)] for i in range(n_verses)
    ]
    slot = 0
    for freq in (1, 2, 3, 4):
        for k in range(per_stratum):
            word = f"rare{freq}x{k:03d}"
            for _ in range(freq):
                lines[slot * 47 + 5].append(word)
                slot += 1
    e_path = tmp_path / "corpus.e"
    f_path = tmp_path / "corpus.f"
    e_path.write_text("".join(" ".join(ws) + "\n" for ws in lines), encoding="utf-8")
    f_path.write_text("".join(f"mot{i % 97} texte cible\n" for i in range(n_verses)), encoding="utf-8")
    return e_path, f_path


def test_sampling_structure(tmp_path):
    started = time.perf_counter()
    e_path, f_path = _write_synthetic_corpus(tmp_path)
    bitext = load_bitext(e_path, f_path)
    hist = word_histogram(bitext, "E")
    result = stratified_sample(hist, StrataSpec.default(), SplitMix64(42), bitext, "E")

    by_stratum = result.focus.by_stratum()
    assert sorted(by_stratum) == [1, 2, 3, 4]
    assert all(len(words) == 25 for words in by_stratum.values())
    assert len(result.focus.frequency_of) == 100

    verse_ids = [p.verse_id for p in result.pairs]
    assert len(verse_ids) == len(set(verse_ids)), "duplicate verses in the sample"
    assert len(result.pairs) <= 250
    assert result.discarded == ()
    assert len(result.pairs) == 250  # no discards, so the bound is met exactly

    coverage = verify_focus_coverage(bitext, result.focus, result.pairs, "E")
    assert coverage.ok

    # two CLI runs with the same seed are byte-identical
    for out in ("run1", "run2"):
        code = cli_main(
            [
                "sample",
                "--text-e", str(e_path),
                "--text-f", str(f_path),
                "--seed", "42",
                "--out-dir", str(tmp_path / out),
            ]
        )
        assert code == 0
    for name in ("e.txt", "f.txt", "ids.txt", "focus.tsv", "set.json"):
        assert (tmp_path / "run1" / name).read_bytes() == (
            tmp_path / "run2" / name
        ).read_bytes(), f"{name} differs between seeded runs"

    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"took {elapsed:.1f}s, budget is 30s"
    _passed(f"sampling structure on a 30k-verse corpus ({elapsed:.1f}s)")


# -- criterion: pooling shape ----------------------------------------------------


def test_pooling_shape_part1_and_hand_fixture():
    # Part-1-style input: 100 verse pairs, 5 annotators, 10 pools of 10
    verse_ids = [f"V{i}" for i in range(100)]
    annotators = ("A1", "A2", "A3", "A4", "A5")
    base = {
        v: _random_annotation(SplitMix64(i), v, 6, 6, "X") for i, v in enumerate(verse_ids)
    }
    annotations = {
        name: [Annotation(v, name, base[v].groups, base[v].nt_marks) for v in verse_ids]
        for name in annotators
    }
    report = pooled_agreement(
        annotations, PoolingPlan.contiguous(100, 10, 10), verse_ids
    )
    assert len(report.pair_stats) == 10  # C(5,2) pairwise cells
    assert all(len(ps.rates) == 10 for ps in report.pair_stats)
    assert set(report.annotator_means) == set(annotators)
    table = report.render_table()
    assert "grand mean" in table
    assert table.count("±") == 10 + 5 + 1

    # hand-computed fixture: pools at 40% and 60% -> mean 50, sample stddev sqrt(200)
    fixture_ids = ["W1", "W2"]
    one_to_one = lambda v, name: Annotation(
        v, name, tuple(LinkGroup((i,), (i,)) for i in range(1, 6))
    )
    drift = {
        "W1": ((1, 1), (2, 2), (3, 6), (4, 7), (5, 8)),
        "W2": ((1, 1), (2, 2), (3, 3), (4, 7), (5, 8)),
    }
    annotations2 = {
        "A": [one_to_one(v, "A") for v in fixture_ids],
        "B": [
            Annotation(v, "B", tuple(LinkGroup((e,), (f,)) for e, f in drift[v]))
            for v in fixture_ids
        ],
    }
    report2 = pooled_agreement(
        annotations2, PoolingPlan.contiguous(2, 2, 1), fixture_ids
    )
    (ps,) = report2.pair_stats
    assert ps.rates == (40.0, 60.0)
    assert ps.mean == 50.0
    assert ps.stddev == 14.142135623730951
    _passed("pooling shape: 10 cells for 5 annotators; fixture mean 50.00 ± 14.14")


# -- criterion: content-word uplift ----------------------------------------------


def test_content_word_uplift():
    n_verses = 20
    n_fn = 6  # positions 1..6 are function words, 7..12 content words
    n_tok = 12
    lines = [
        (
            f"V{i}",
            " ".join([f"fe{j}" for j in range(1, n_fn + 1)] + [f"ce{j}" for j in range(1, n_fn + 1)]),
            " ".join([f"ff{j}" for j in range(1, n_fn + 1)] + [f"cf{j}" for j in range(1, n_fn + 1)]),
        )
        for i in range(n_verses)
    ]
    bitext = make_bitext(lines)
    pairs_by_id = bitext.pairs_by_id()
    verse_ids = [p.verse_id for p in bitext.pairs]
    stop_e = Stoplist("en", frozenset(f"fe{j}" for j in range(1, n_fn + 1)))
    stop_f = Stoplist("fr", frozenset(f"ff{j}" for j in range(1, n_fn + 1)))
    plan = PoolingPlan.contiguous(n_verses, 4)

    def annotator(name: str, rng: SplitMix64):
        anns = []
        for vid in verse_ids:
            pair = pairs_by_id[vid]
            ann = Annotation(vid, name, tuple(LinkGroup((i,), (i,)) for i in range(1, n_tok + 1)))
            for i in range(1, n_tok + 1):
                # function-word links are perturbed at 3x the content-word rate
                p_mille = 300 if i <= n_fn else 100
                if rng.below(1000) < p_mille:
                    ann = apply_link(ann, {i}, {1 + rng.below(n_tok)}, pair)
            anns.append(ann)
        return anns

    wins = 0
    for seed in range(100):
        annotations = {
            name: annotator(name, SplitMix64(seed * 17 + k))
            for k, name in enumerate(("A1", "A2", "A3"))
        }
        all_words = pooled_agreement(annotations, plan, verse_ids).grand_mean
        filtered = {
            name: content_filter(anns, stop_e, stop_f, pairs_by_id)
            for name, anns in annotations.items()
        }
        content_only = pooled_agreement(
            filtered, plan, verse_ids, content_only=True
        ).grand_mean
        if content_only > all_words:
            wins += 1
    assert wins >= 95, f"content-only beat all-words in only {wins}/100 seeds"
    _passed(f"content-word uplift in {wins}/100 seeds")


# -- criterion: forced-choice enforcement -----------------------------------------


def test_forced_choice_enforcement(tmp_path):
    pair = nway_pair("V1", 5, 5)
    pairs_by_id = {"V1": pair}

    # the serializer rejects a finalized annotation with an unaccounted position
    bogus = Annotation("V1", "A1", (LinkGroup((1,), (1,)),), (), finalized=True)
    with pytest.raises(AnnotationStateError):
        render_alignment_file([bogus], pairs_by_id, draft=True)
    with pytest.raises(AnnotationStateError):
        finalize(Annotation("V1", "A1", (LinkGroup((1,), (1,)),)), pair)

    # fuzz: random operation sequences never persist a partition violation
    rng = SplitMix64(5150)
    path = tmp_path / "fuzz.wa"
    for _ in range(1000):
        ann = Annotation.empty("V1", "A1")
        for _ in range(rng.below(12)):
            op = rng.below(3)
            if op == 0:
                e = {1 + rng.below(5) for _ in range(1 + rng.below(2))}
                f = {1 + rng.below(5) for _ in range(1 + rng.below(2))}
                ann = apply_link(ann, e, f, pair)
            elif op == 1:
                ann = mark_not_translated(ann, "E", 1 + rng.below(5), pair)
            else:
                ann = mark_not_translated(ann, "F", 1 + rng.below(5), pair)
        report = alignment.completeness(ann, pair)
        if report.complete:
            ann = finalize(ann, pair)
        write_alignment_file([ann], path, pairs_by_id, draft=True)
        (back,) = parse_alignment_text(path.read_text(encoding="utf-8"), pairs_by_id)
        for side in ("E", "F"):
            claimed = []
            for g in back.groups:
                claimed.extend(g.positions(side))
            claimed.extend(n.position for n in back.nt_marks if n.side == side)
            assert len(claimed) == len(set(claimed)), "persisted partition violation"

    # the service refuses to advance past an unaccounted position
    from goldalign.service import AnnotationService, ApiError

    verse_set_dir = tmp_path / "svc"
    write_verse_set(make_bitext([("V1", "a b c", "x y z")]), verse_set_dir)
    service = AnnotationService(verse_set_dir)
    service.put_pair(
        "svc", 1, "A1", 0, {"groups": [{"e": [1], "f": [1]}], "not_translated": []}
    )
    with pytest.raises(ApiError) as err:
        service.advance("svc", 1, "A1")
    assert err.value.status == 409
    assert err.value.payload["missing_e"] == [2, 3]
    _passed("forced-choice enforcement (serializer, fuzz x1000, service)")


# -- criterion: crash safety -------------------------------------------------------


def _start_server(data_dir):
    proc = subprocess.Popen(
        [sys.executable, "-m", "goldalign", "serve", "--data-dir", str(data_dir), "--port", "0"],
        stdout=subprocess.PIPE,
        stderr=subprocess.STDOUT,
        text=True,
    )
    line = proc.stdout.readline()
    assert "http://" in line, f"server failed to start: {line!r}"
    port = int(line.rsplit(":", 1)[1])
    return proc, f"http://127.0.0.1:{port}"


def _full_annotation_body(n_tok, rng):
    perm = rng.choose(range(1, n_tok + 1), n_tok)
    groups = [{"e": [i], "f": [perm[i - 1]]} for i in range(1, n_tok + 1)]
    return {"groups": groups, "not_translated": []}


def test_crash_safety(tmp_path):
    n_pairs, n_tok = 8, 3
    lines = [
        (
            f"V{i}",
            " ".join(f"e{i}t{j}" for j in range(n_tok)),
            " ".join(f"f{i}t{j}" for j in range(n_tok)),
        )
        for i in range(1, n_pairs + 1)
    ]
    write_verse_set(make_bitext(lines), tmp_path / "part1")
    wa_path = tmp_path / "part1" / "annotations" / "A1.wa"

    rng = SplitMix64(611)
    proc, base = _start_server(tmp_path)
    acked_bytes = b""
    navigations = 0
    try:
        while navigations < 100:
            ordinal = 1 + rng.below(n_pairs)
            url = f"{base}/api/sets/part1/pairs/{ordinal}"
            version = requests.get(f"{url}?annotator=A1").json()["version"]
            action = rng.below(10)
            if action < 6:
                r = requests.put(
                    f"{url}?annotator=A1&version={version}",
                    json=_full_annotation_body(n_tok, rng),
                )
                assert r.status_code == 200
                r = requests.post(f"{url}/advance?annotator=A1")
                assert r.status_code == 200
            elif action < 8 and ordinal > 1:
                assert requests.post(f"{url}/previous?annotator=A1").status_code == 200
            else:
                assert requests.post(f"{url}/reload?annotator=A1").status_code == 200
            navigations += 1
            acked_bytes = wa_path.read_bytes() if wa_path.exists() else b""

            if navigations % 12 == 0:
                os.kill(proc.pid, signal.SIGKILL)
                proc.wait(timeout=10)
                on_disk = wa_path.read_bytes() if wa_path.exists() else b""
                assert on_disk == acked_bytes, "acknowledged annotations lost in crash"
                proc, base = _start_server(tmp_path)
                # the restarted service must serve exactly the persisted state
                on_disk_after = wa_path.read_bytes() if wa_path.exists() else b""
                assert on_disk_after == acked_bytes
    finally:
        proc.kill()
        proc.wait(timeout=10)
    assert navigations >= 100
    _passed(f"crash safety over {navigations} navigations with kill -9 every 12")
