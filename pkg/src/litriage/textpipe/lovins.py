"""Lovins stemmer: longest-match ending removal plus spelling recoding.

Single-pass design: the longest ending (out of the published ending list,
lengths 11 down to 1) whose context condition holds is removed, the stem is
then undoubled (one of a terminal double b, d, g, l, m, n, p, r, s, t drops)
and respelled through the transformation rules. Stems are never shorter than
2 characters; tokens of length <= 2 pass through untouched.

Recoding runs even when no ending was removed, which is what merges pairs
like matrix/matrices -> matric.
"""

from __future__ import annotations

__all__ = ["stem"]


# Context conditions keyed by the code used in the ending table. Each takes
# the candidate stem; the global minimum stem length of 2 is enforced by the
# caller before these run.
_CONDITIONS = {
    "A": lambda s: True,
    "B": lambda s: len(s) >= 3,
    "C": lambda s: len(s) >= 4,
    "D": lambda s: len(s) >= 5,
    "E": lambda s: not s.endswith("e"),
    "F": lambda s: len(s) >= 3 and not s.endswith("e"),
    "G": lambda s: len(s) >= 3 and s.endswith("f"),
    "H": lambda s: s.endswith("t") or s.endswith("ll"),
    "I": lambda s: not s.endswith(("o", "e")),
    "J": lambda s: not s.endswith(("a", "e")),
    "K": lambda s: len(s) >= 3
    and (s.endswith(("l", "i")) or (s[-1] == "e" and s[-3] == "u")),
    "L": lambda s: not s.endswith(("u", "x"))
    and not (s.endswith("s") and not s.endswith("os")),
    "M": lambda s: not s.endswith(("a", "c", "e", "m")),
    "N": lambda s: len(s) >= 4 if len(s) >= 3 and s[-3] == "s" else len(s) >= 3,
    "O": lambda s: s.endswith(("l", "i")),
    "P": lambda s: not s.endswith("c"),
    "Q": lambda s: len(s) >= 3 and not s.endswith(("l", "n")),
    "R": lambda s: s.endswith(("n", "r")),
    "S": lambda s: s.endswith("dr") or (s.endswith("t") and not s.endswith("tt")),
    "T": lambda s: s.endswith("s") or (s.endswith("t") and not s.endswith("ot")),
    "U": lambda s: s.endswith(("l", "m", "n", "r")),
    "V": lambda s: s.endswith("c"),
    "W": lambda s: not s.endswith(("s", "u")),
    "X": lambda s: s.endswith(("l", "i"))
    or (len(s) >= 3 and s[-1] == "e" and s[-3] == "u"),
    "Y": lambda s: s.endswith("in"),
    "Z": lambda s: not s.endswith("f"),
    "AA": lambda s: s.endswith(
        ("d", "f", "ph", "th", "l", "er", "or", "es", "t")
    ),
    "BB": lambda s: len(s) >= 3 and not s.endswith(("met", "ryst")),
    "CC": lambda s: s.endswith("l"),
}


# Ending -> condition code, bucketed by ending length for suffix lookup.
_ENDINGS: dict[int, dict[str, str]] = {
    11: {
        "alistically": "B", "arizability": "A", "izationally": "B",
    },
    10: {
        "antialness": "A", "arisations": "A", "arizations": "A",
        "entialness": "A",
    },
    9: {
        "allically": "C", "antaneous": "A", "antiality": "A",
        "arisation": "A", "arization": "A", "ationally": "B",
        "ativeness": "A", "eableness": "E", "entations": "A",
        "entiality": "A", "entialize": "A", "entiation": "A",
        "ionalness": "A", "istically": "A", "itousness": "A",
        "izability": "A", "izational": "A",
    },
    8: {
        "ableness": "A", "arizable": "A", "entation": "A", "entially": "A",
        "eousness": "A", "ibleness": "A", "icalness": "A", "ionalism": "A",
        "ionality": "A", "ionalize": "A", "iousness": "A", "izations": "A",
        "lessness": "A",
    },
    7: {
        "ability": "A", "aically": "A", "alistic": "B", "alities": "A",
        "ariness": "E", "aristic": "A", "arizing": "A", "ateness": "A",
        "atingly": "A", "ational": "B", "atively": "A", "ativism": "A",
        "elihood": "E", "encible": "A", "entally": "A", "entials": "A",
        "entiate": "A", "entness": "A", "fulness": "A", "ibility": "A",
        "icalism": "A", "icalist": "A", "icality": "A", "icalize": "A",
        "ication": "G", "icianry": "A", "ination": "A", "ingness": "A",
        "ionally": "A", "isation": "A", "ishness": "A", "istical": "A",
        "iteness": "A", "iveness": "A", "ivistic": "A", "ivities": "A",
        "ization": "F", "izement": "A", "oidally": "A", "ousness": "A",
    },
    6: {
        "aceous": "A", "acious": "B", "action": "G", "alness": "A",
        "ancial": "A", "ancies": "A", "ancing": "B", "ariser": "A",
        "arized": "A", "arizer": "A", "atable": "A", "ations": "B",
        "atives": "A", "eature": "Z", "efully": "A", "encies": "A",
        "encing": "A", "ential": "A", "enting": "C", "entist": "A",
        "eously": "A", "ialist": "A", "iality": "A", "ialize": "A",
        "ically": "A", "icance": "A", "icians": "A", "icists": "A",
        "ifully": "A", "ionals": "A", "ionate": "D", "ioning": "A",
        "ionist": "A", "iously": "A", "istics": "A", "izable": "E",
        "lessly": "A", "nesses": "A", "oidism": "A",
    },
    5: {
        "acies": "A", "acity": "A", "aging": "B", "aical": "A",
        "alism": "B", "alist": "A", "ality": "A", "alize": "A",
        "allic": "BB", "anced": "B", "ances": "B", "antic": "C",
        "arial": "A", "aries": "A", "arily": "A", "arity": "B",
        "arize": "A", "aroid": "A", "ately": "A", "ating": "I",
        "ation": "B", "ative": "A", "ators": "A", "atory": "A",
        "ature": "E", "early": "Y", "ehood": "A", "eless": "A",
        "elity": "A", "ement": "A", "enced": "A", "ences": "A",
        "eness": "E", "ening": "E", "ental": "A", "ented": "C",
        "ently": "A", "fully": "A", "ially": "A", "icant": "A",
        "ician": "A", "icide": "A", "icism": "A", "icist": "A",
        "icity": "A", "idine": "I", "iedly": "A", "ihood": "A",
        "inate": "A", "iness": "A", "ingly": "B", "inism": "J",
        "inity": "CC", "ional": "A", "ioned": "A", "ished": "A",
        "istic": "A", "ities": "A", "itous": "A", "ively": "A",
        "ivity": "A", "izers": "F", "izing": "F", "oidal": "A",
        "oides": "A", "otide": "A", "ously": "A",
    },
    4: {
        "able": "A", "ably": "A", "ages": "B", "ally": "B",
        "ance": "B", "ancy": "B", "ants": "B", "aric": "A",
        "arly": "K", "ated": "I", "ates": "A", "atic": "B",
        "ator": "A", "ealy": "Y", "edly": "E", "eful": "A",
        "eity": "A", "ence": "A", "ency": "A", "ened": "E",
        "enly": "E", "eous": "A", "hood": "A", "ials": "A",
        "ians": "A", "ible": "A", "ibly": "A", "ical": "A",
        "ides": "L", "iers": "A", "iful": "A", "ines": "M",
        "ings": "N", "ions": "B", "ious": "A", "isms": "B",
        "ists": "A", "itic": "H", "ized": "F", "izer": "F",
        "less": "A", "lily": "A", "ness": "A", "ogen": "A",
        "ward": "A", "wise": "A", "ying": "B", "yish": "A",
    },
    3: {
        "acy": "A", "age": "B", "aic": "A", "als": "BB", "ant": "B",
        "ars": "O", "ary": "F", "ata": "A", "ate": "A", "eal": "Y",
        "ear": "Y", "ely": "E", "ene": "E", "ent": "C", "ery": "E",
        "ese": "A", "ful": "A", "ial": "A", "ian": "A", "ics": "A",
        "ide": "L", "ied": "A", "ier": "A", "ies": "P", "ily": "A",
        "ine": "M", "ing": "N", "ion": "Q", "ish": "C", "ism": "B",
        "ist": "A", "ite": "AA", "ity": "A", "ium": "A", "ive": "A",
        "ize": "F", "oid": "A", "one": "R", "ous": "A",
    },
    2: {
        "ae": "A", "al": "BB", "ar": "X", "as": "B", "ed": "E",
        "en": "F", "es": "E", "ia": "A", "ic": "A", "is": "A",
        "ly": "B", "on": "S", "or": "T", "um": "U", "us": "V",
        "yl": "R", "'s": "A", "s'": "A",
    },
    1: {
        "a": "A", "e": "A", "i": "A", "o": "A", "s": "W", "y": "B",
    },
}

_MAX_ENDING = max(_ENDINGS)

_DOUBLES = ("bb", "dd", "gg", "ll", "mm", "nn", "pp", "rr", "ss", "tt")

# Respelling rules, longest pattern first. The third element names stem
# characters that, immediately before the pattern, block the rule.
_TRANSFORMATIONS: tuple[tuple[str, str, str], ...] = (
    ("umpt", "um", ""),
    ("istr", "ister", ""),
    ("metr", "meter", ""),
    ("erid", "eris", ""),
    ("pand", "pans", ""),
    ("iev", "ief", ""),
    ("uct", "uc", ""),
    ("rpt", "rb", ""),
    ("urs", "ur", ""),
    ("olv", "olut", ""),
    ("bex", "bic", ""),
    ("dex", "dic", ""),
    ("pex", "pic", ""),
    ("tex", "tic", ""),
    ("lux", "luc", ""),
    ("uad", "uas", ""),
    ("vad", "vas", ""),
    ("cid", "cis", ""),
    ("lid", "lis", ""),
    ("end", "ens", "s"),
    ("ond", "ons", ""),
    ("lud", "lus", ""),
    ("rud", "rus", ""),
    ("her", "hes", "pt"),
    ("mit", "mis", ""),
    ("ent", "ens", "m"),
    ("ert", "ers", ""),
    ("ul", "l", "aio"),
    ("ax", "ac", ""),
    ("ex", "ec", ""),
    ("ix", "ic", ""),
    ("et", "es", "n"),
    ("yt", "ys", ""),
    ("yz", "ys", ""),
)


def _remove_ending(word: str) -> str:
    # Longest ending whose condition holds wins; a failed condition keeps
    # the search going through shorter endings.
    for length in range(min(_MAX_ENDING, len(word) - 2), 0, -1):
        condition = _ENDINGS[length].get(word[-length:])
        if condition is not None and _CONDITIONS[condition](word[:-length]):
            return word[:-length]
    return word


def _recode(stem: str) -> str:
    if len(stem) >= 2 and stem.endswith(_DOUBLES):
        stem = stem[:-1]
    for pattern, replacement, blocked in _TRANSFORMATIONS:
        if stem.endswith(pattern):
            before = stem[-len(pattern) - 1] if len(stem) > len(pattern) else ""
            if not before or before not in blocked:
                stem = stem[: -len(pattern)] + replacement
            break
    return stem


def stem(token: str) -> str:
    """Stem one lowercase token. Deterministic; not claimed idempotent."""
    if len(token) <= 2:
        return token
    return _recode(_remove_ending(token))
