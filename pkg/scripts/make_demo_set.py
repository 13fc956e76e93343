#!/usr/bin/env python3
"""Build a small English/French demo verse set ready for annotation.

Writes a verse-set directory (tokenized halves, ids, metadata), a focus file,
and small demo stoplists, so the service, agreement and lexicon commands can
be tried end to end:

    python3 scripts/make_demo_set.py --out-dir demo_data/part1
    goldalign serve --data-dir demo_data --port 8040
"""

import argparse
from pathlib import Path

from goldalign.bitext import Bitext, LanguageProfile, VersePair, tokenize
from goldalign.sampling import FocusSet, write_focus_file
from goldalign.sets import write_verse_set

VERSES = [
    ("D 1:1", "In the beginning the shepherd spoke to the king.",
     "Au commencement le berger parla au roi."),
    ("D 1:2", "The king's men came to the gates of the city.",
     "Les hommes du roi vinrent aux portes de la ville."),
    ("D 1:3", "They didn't answer, for the night was cold.",
     "Ils ne répondirent pas, car la nuit était froide."),
    ("D 1:4", "A lamp shone on the water and on the fields.",
     "Une lampe brillait sur l'eau et sur les champs."),
    ("D 1:5", "The shepherd lifted his well-worn staff.",
     "Le berger leva son bâton usé."),
    ("D 1:6", "Bring the grain to the threshing floor, he said.",
     "Apportez le grain jusqu'à l'aire de battage, dit-il."),
    ("D 1:7", "The king gave bread to the visitors at the gate.",
     "Le roi donna du pain aux visiteurs à la porte."),
    ("D 1:8", "No one returned before the morning light.",
     "Personne ne revint avant la lumière du matin."),
]

STOP_EN = ["the", "a", "an", "of", "to", "at", "on", "in", "for", "and", "he",
           "his", "they", "no", "one", "before", "was", "did", "n't", "not"]
STOP_FR = ["le", "la", "les", "l'", "un", "une", "de", "des", "à", "au", "aux",
           "sur", "et", "il", "ils", "ne", "pas", "son", "avant", "était"]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="demo_data/part1")
    args = parser.parse_args()

    profile_en = LanguageProfile.builtin("en")
    profile_fr = LanguageProfile.builtin("fr")
    pairs = tuple(
        VersePair(vid, tuple(tokenize(e, profile_en)), tuple(tokenize(f, profile_fr)))
        for vid, e, f in VERSES
    )
    out_dir = Path(args.out_dir)
    verse_set = write_verse_set(Bitext("en", "fr", pairs), out_dir)

    write_focus_file(FocusSet({"shepherd": 2, "king": 3}), out_dir / "focus.tsv")
    (out_dir / "en.stop").write_text("\n".join(STOP_EN) + "\n", encoding="utf-8")
    (out_dir / "fr.stop").write_text("\n".join(STOP_FR) + "\n", encoding="utf-8")

    print(f"wrote {verse_set.total} verse pairs to {out_dir}")
    print(f"serve it:  goldalign serve --data-dir {out_dir.parent} --port 8040")


if __name__ == "__main__":
    main()
