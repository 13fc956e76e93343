import pytest

from goldalign.bitext import Bitext, LanguageProfile, VersePair, tokenize


@pytest.fixture(scope="session")
def profile_en() -> LanguageProfile:
    return LanguageProfile.builtin("en")


@pytest.fixture(scope="session")
def profile_fr() -> LanguageProfile:
    return LanguageProfile.builtin("fr")


def build_bitext(lines, profile_e=None, profile_f=None, lang_e="en", lang_f="fr") -> Bitext:
    """Build a bitext from (verse_id, raw_e, raw_f) triples without touching disk."""
    profile_e = profile_e or LanguageProfile.builtin("en")
    profile_f = profile_f or LanguageProfile.builtin("fr")
    pairs = tuple(
        VersePair(
            vid,
            tuple(tokenize(raw_e, profile_e)),
            tuple(tokenize(raw_f, profile_f)),
        )
        for vid, raw_e, raw_f in lines
    )
    return Bitext(lang_e, lang_f, pairs)


@pytest.fixture
def mk_bitext():
    return build_bitext
