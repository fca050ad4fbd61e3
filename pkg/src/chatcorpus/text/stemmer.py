"""Snowball stemmer for Spanish.

A direct port of the Snowball ``spanish`` algorithm. Regions are computed
once on the input word; all suffix work happens at the end of the word so
the region marks stay valid while the string shrinks.
"""

from __future__ import annotations

from functools import lru_cache

VOWELS = frozenset("aeiouáéíóúü")

_PRONOUNS = ("me", "se", "sela", "selo", "selas", "selos", "la", "le", "lo",
             "las", "les", "los", "nos")

# verb endings that may carry an attached pronoun, with their replacement
# (None means: keep the ending and drop only the pronoun)
_PRONOUN_HOSTS = {
    "iéndo": "iendo", "ándo": "ando", "ár": "ar", "ér": "er", "ír": "ir",
    "ando": None, "iendo": None, "ar": None, "er": None, "ir": None,
    "yendo": "yendo",
}

_STD_R2_DELETE = ("anza", "anzas", "ico", "ica", "icos", "icas", "ismo", "ismos",
                  "able", "ables", "ible", "ibles", "ista", "istas", "oso", "osa",
                  "osos", "osas", "amiento", "amientos", "imiento", "imientos")
_STD_ADOR = ("adora", "ador", "ación", "adoras", "adores", "aciones",
             "ante", "antes", "ancia", "ancias")
_STD_SUFFIXES: dict[str, str] = {}
_STD_SUFFIXES.update({s: "r2" for s in _STD_R2_DELETE})
_STD_SUFFIXES.update({s: "ador" for s in _STD_ADOR})
_STD_SUFFIXES.update({"logía": "log", "logías": "log"})
_STD_SUFFIXES.update({"ución": "u", "uciones": "u"})
_STD_SUFFIXES.update({"encia": "ente", "encias": "ente"})
_STD_SUFFIXES.update({"amente": "amente", "mente": "mente"})
_STD_SUFFIXES.update({"idad": "idad", "idades": "idad"})
_STD_SUFFIXES.update({"iva": "iva", "ivo": "iva", "ivas": "iva", "ivos": "iva"})

_Y_VERB = ("ya", "ye", "yan", "yen", "yeron", "yendo", "yo", "yó",
           "yas", "yes", "yais", "yamos")

_VERB_GU = ("en", "es", "éis", "emos")
_VERB_DELETE = (
    "arían", "arías", "arán", "arás", "aríais", "aría", "aréis", "aríamos",
    "aremos", "ará", "aré",
    "erían", "erías", "erán", "erás", "eríais", "ería", "eréis", "eríamos",
    "eremos", "erá", "eré",
    "irían", "irías", "irán", "irás", "iríais", "iría", "iréis", "iríamos",
    "iremos", "irá", "iré",
    "aba", "ada", "ida", "ía", "ara", "iera", "ad", "ed", "id", "ase", "iese",
    "aste", "iste", "an", "aban", "ían", "aran", "ieran", "asen", "iesen",
    "aron", "ieron", "ado", "ido", "ando", "iendo", "ió", "ar", "er", "ir",
    "as", "abas", "adas", "idas", "ías", "aras", "ieras", "ases", "ieses",
    "ís", "áis", "abais", "íais", "arais", "ierais", "aseis", "ieseis",
    "asteis", "isteis", "ados", "idos", "amos", "ábamos", "íamos", "imos",
    "áramos", "iéramos", "iésemos", "ásemos",
)

_RESIDUAL = ("os", "a", "o", "á", "í", "ó", "e", "é")

_UNACCENT = str.maketrans("áéíóú", "aeiou")


def _longest_suffix(word: str, end: int, candidates, lower: int = 0) -> str | None:
    """Longest candidate ending at ``end`` and starting at or after ``lower``."""
    best = None
    for cand in candidates:
        start = end - len(cand)
        if start >= lower and word.startswith(cand, start):
            if best is None or len(cand) > len(best):
                best = cand
    return best


def _regions(word: str) -> tuple[int, int, int]:
    n = len(word)
    is_v = [c in VOWELS for c in word]

    def gopast(pos: int, want_vowel: bool) -> int | None:
        while pos < n:
            if is_v[pos] == want_vowel:
                return pos + 1
            pos += 1
        return None

    pv = n
    if n >= 2:
        found = None
        if is_v[0]:
            if not is_v[1]:
                found = gopast(2, True)
            else:
                found = gopast(2, False)
        else:
            if not is_v[1]:
                found = gopast(2, True)
            else:
                found = 3 if n >= 3 else None
        if found is not None:
            pv = found

    p1 = p2 = n
    pos = gopast(0, True)
    if pos is not None:
        pos = gopast(pos, False)
        if pos is not None:
            p1 = pos
            pos = gopast(pos, True)
            if pos is not None:
                pos = gopast(pos, False)
                if pos is not None:
                    p2 = pos
    return pv, p1, p2


def _attached_pronoun(w: str, pv: int) -> str:
    pron = _longest_suffix(w, len(w), _PRONOUNS)
    if pron is None:
        return w
    cut = len(w) - len(pron)
    host = _longest_suffix(w, cut, _PRONOUN_HOSTS)
    if host is None:
        return w
    host_start = cut - len(host)
    if host_start < pv:
        return w
    repl = _PRONOUN_HOSTS[host]
    if host == "yendo":
        if host_start >= 1 and w[host_start - 1] == "u":
            return w[:cut]
        return w
    if repl is None:
        return w[:cut]
    return w[:host_start] + repl


def _standard_suffix(w: str, p1: int, p2: int) -> str | None:
    suf = _longest_suffix(w, len(w), _STD_SUFFIXES)
    if suf is None:
        return None
    start = len(w) - len(suf)
    rule = _STD_SUFFIXES[suf]

    if rule == "r2":
        return w[:start] if start >= p2 else None
    if rule == "ador":
        if start < p2:
            return None
        w = w[:start]
        if w.endswith("ic") and len(w) - 2 >= p2:
            w = w[:-2]
        return w
    if rule in ("log", "u", "ente"):
        return w[:start] + rule if start >= p2 else None
    if rule == "amente":
        if start < p1:
            return None
        w = w[:start]
        inner = _longest_suffix(w, len(w), ("iv", "os", "ic", "ad"))
        if inner is not None and len(w) - len(inner) >= p2:
            w = w[:-len(inner)]
            if inner == "iv" and w.endswith("at") and len(w) - 2 >= p2:
                w = w[:-2]
        return w
    if rule == "mente":
        if start < p2:
            return None
        w = w[:start]
        inner = _longest_suffix(w, len(w), ("ante", "able", "ible"))
        if inner is not None and len(w) - len(inner) >= p2:
            w = w[:-len(inner)]
        return w
    if rule == "idad":
        if start < p2:
            return None
        w = w[:start]
        inner = _longest_suffix(w, len(w), ("abil", "ic", "iv"))
        if inner is not None and len(w) - len(inner) >= p2:
            w = w[:-len(inner)]
        return w
    # iva / ivo / ivas / ivos
    if start < p2:
        return None
    w = w[:start]
    if w.endswith("at") and len(w) - 2 >= p2:
        w = w[:-2]
    return w


def _y_verb_suffix(w: str, pv: int) -> str | None:
    suf = _longest_suffix(w, len(w), _Y_VERB, lower=pv)
    if suf is None:
        return None
    start = len(w) - len(suf)
    # the preceding 'u' may lie outside RV
    if start >= 1 and w[start - 1] == "u":
        return w[:start]
    return None


def _verb_suffix(w: str, pv: int) -> str | None:
    suf = _longest_suffix(w, len(w), _VERB_GU + _VERB_DELETE, lower=pv)
    if suf is None:
        return None
    start = len(w) - len(suf)
    if suf in _VERB_GU and start >= 2 and w[start - 1] == "u" and w[start - 2] == "g":
        return w[:start - 1]
    return w[:start]


def _residual_suffix(w: str, pv: int) -> str:
    suf = _longest_suffix(w, len(w), _RESIDUAL)
    if suf is None:
        return w
    start = len(w) - len(suf)
    if start < pv:
        return w
    w = w[:start]
    if suf in ("e", "é") and w.endswith("gu") and len(w) - 1 >= pv:
        w = w[:-1]
    return w


@lru_cache(maxsize=65536)
def stem(word: str) -> str:
    """Stem one lowercase Spanish word."""
    pv, p1, p2 = _regions(word)
    w = _attached_pronoun(word, pv)
    for step in (lambda s: _standard_suffix(s, p1, p2),
                 lambda s: _y_verb_suffix(s, pv),
                 lambda s: _verb_suffix(s, pv)):
        out = step(w)
        if out is not None:
            w = out
            break
    w = _residual_suffix(w, pv)
    return w.translate(_UNACCENT)
