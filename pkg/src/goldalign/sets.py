"""Prepared verse-set directories.

The sampler writes them, the agreement and lexicon commands read them, and the
annotation service serves them.  Layout:

    <set>/
      e.txt           tokenized E half, one verse per line, space-separated
      f.txt           tokenized F half
      ids.txt         one verse id per line
      set.json        {"lang_e": ..., "lang_f": ...}
      annotations/    one <annotator>.wa alignment file per annotator
                      (plus <annotator>.session.json session metadata)
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from goldalign.bitext import Bitext, VersePair, load_pretokenized_bitext, token_line
from goldalign.errors import BitextFormatError

E_FILE = "e.txt"
F_FILE = "f.txt"
IDS_FILE = "ids.txt"
META_FILE = "set.json"
ANN_DIR = "annotations"


@dataclass(frozen=True)
class VerseSet:
    set_id: str
    root: Path
    bitext: Bitext

    @property
    def total(self) -> int:
        return len(self.bitext.pairs)

    def pair(self, ordinal: int) -> VersePair:
        """1-based lookup."""
        if not 1 <= ordinal <= self.total:
            raise IndexError(f"ordinal {ordinal} out of range 1..{self.total}")
        return self.bitext.pairs[ordinal - 1]

    def ordinal_of(self, verse_id: str) -> int:
        for i, pair in enumerate(self.bitext.pairs, start=1):
            if pair.verse_id == verse_id:
                return i
        raise KeyError(verse_id)

    @property
    def annotations_dir(self) -> Path:
        return self.root / ANN_DIR

    def alignment_path(self, annotator_id: str) -> Path:
        return self.annotations_dir / f"{annotator_id}.wa"

    def session_path(self, annotator_id: str) -> Path:
        return self.annotations_dir / f"{annotator_id}.session.json"

    def annotators(self) -> list[str]:
        if not self.annotations_dir.is_dir():
            return []
        return sorted(p.stem for p in self.annotations_dir.glob("*.wa"))


def write_verse_set(bitext: Bitext, out_dir: str | Path) -> VerseSet:
    """Write the tokenized verse files, id file and metadata for one set."""
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    (root / ANN_DIR).mkdir(exist_ok=True)
    with open(root / E_FILE, "w", encoding="utf-8") as fe:
        for pair in bitext.pairs:
            fe.write(token_line(pair.side_e) + "\n")
    with open(root / F_FILE, "w", encoding="utf-8") as ff:
        for pair in bitext.pairs:
            ff.write(token_line(pair.side_f) + "\n")
    with open(root / IDS_FILE, "w", encoding="utf-8") as fi:
        for pair in bitext.pairs:
            fi.write(pair.verse_id + "\n")
    meta = {"lang_e": bitext.lang_e, "lang_f": bitext.lang_f}
    (root / META_FILE).write_text(json.dumps(meta, sort_keys=True) + "\n", encoding="utf-8")
    return load_verse_set(root)


def load_verse_set(path: str | Path) -> VerseSet:
    root = Path(path)
    for name in (E_FILE, F_FILE, IDS_FILE):
        if not (root / name).is_file():
            raise BitextFormatError(f"{root} is not a verse-set directory (missing {name})")
    lang_e, lang_f = "en", "fr"
    meta_path = root / META_FILE
    if meta_path.is_file():
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        lang_e = meta.get("lang_e", lang_e)
        lang_f = meta.get("lang_f", lang_f)
    bitext = load_pretokenized_bitext(
        root / E_FILE, root / F_FILE, root / IDS_FILE, lang_e, lang_f
    )
    (root / ANN_DIR).mkdir(exist_ok=True)
    return VerseSet(root.name, root, bitext)


def discover_sets(data_dir: str | Path) -> dict[str, VerseSet]:
    """Find every verse-set directory directly under data_dir (or data_dir itself)."""
    data_dir = Path(data_dir)
    sets: dict[str, VerseSet] = {}
    if (data_dir / E_FILE).is_file():
        vs = load_verse_set(data_dir)
        return {vs.set_id: vs}
    for child in sorted(data_dir.iterdir()) if data_dir.is_dir() else ():
        if child.is_dir() and (child / E_FILE).is_file():
            vs = load_verse_set(child)
            sets[vs.set_id] = vs
    return sets
