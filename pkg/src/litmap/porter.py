"""Porter suffix-stripping stemmer.

Reduces inflected English words to a common stem ("house", "housing" ->
"hous") so that title terms can be pooled.  Follows the canonical
definition of the algorithm, including the later refinements that most
reference implementations carry (the "bli" -> "ble" and "logi" -> "log"
rules, and leaving words of length <= 2 untouched).

Input tokens must be lowercase and alphabetic; hyphenated compounds are
split and stemmed per segment by :func:`stem_token`.
"""

from __future__ import annotations


class _Stemmer:
    """Working state for one word: the buffer plus the active end offsets.

    ``k`` is the index of the last live character; ``j`` marks the end of
    the stem left after a candidate suffix has been matched.
    """

    __slots__ = ("b", "k", "j")

    def __init__(self, word: str) -> None:
        self.b = word
        self.k = len(word) - 1
        self.j = 0

    # -- measure machinery -------------------------------------------------

    def _cons(self, i: int) -> bool:
        ch = self.b[i]
        if ch in "aeiou":
            return False
        if ch == "y":
            return True if i == 0 else not self._cons(i - 1)
        return True

    def _m(self) -> int:
        """Count of vowel-consonant sequences in the stem b[0..j]."""
        n = 0
        i = 0
        while True:
            if i > self.j:
                return n
            if not self._cons(i):
                break
            i += 1
        i += 1
        while True:
            while True:
                if i > self.j:
                    return n
                if self._cons(i):
                    break
                i += 1
            i += 1
            n += 1
            while True:
                if i > self.j:
                    return n
                if not self._cons(i):
                    break
                i += 1
            i += 1

    def _vowel_in_stem(self) -> bool:
        return any(not self._cons(i) for i in range(self.j + 1))

    def _double_cons(self, j: int) -> bool:
        if j < 1:
            return False
        return self.b[j] == self.b[j - 1] and self._cons(j)

    def _cvc(self, i: int) -> bool:
        # consonant-vowel-consonant ending where the final consonant is
        # not w, x or y; signals that a trailing "e" should be restored.
        if i < 2 or not self._cons(i) or self._cons(i - 1) or not self._cons(i - 2):
            return False
        return self.b[i] not in "wxy"

    # -- suffix matching ----------------------------------------------------

    def _ends(self, s: str) -> bool:
        length = len(s)
        if length > self.k + 1:
            return False
        if self.b[self.k - length + 1 : self.k + 1] != s:
            return False
        self.j = self.k - length
        return True

    def _set_to(self, s: str) -> None:
        self.b = self.b[: self.j + 1] + s + self.b[self.j + 1 + len(s) :]
        self.k = self.j + len(s)

    def _replace_if_m(self, s: str) -> None:
        if self._m() > 0:
            self._set_to(s)

    # -- algorithm steps ----------------------------------------------------

    def step1ab(self) -> None:
        if self.b[self.k] == "s":
            if self._ends("sses"):
                self.k -= 2
            elif self._ends("ies"):
                self._set_to("i")
            elif self.b[self.k - 1] != "s":
                self.k -= 1
        if self._ends("eed"):
            if self._m() > 0:
                self.k -= 1
        elif (self._ends("ed") or self._ends("ing")) and self._vowel_in_stem():
            self.k = self.j
            if self._ends("at"):
                self._set_to("ate")
            elif self._ends("bl"):
                self._set_to("ble")
            elif self._ends("iz"):
                self._set_to("ize")
            elif self._double_cons(self.k):
                self.k -= 1
                if self.b[self.k] in "lsz":
                    self.k += 1
            elif self._m() == 1 and self._cvc(self.k):
                self._set_to("e")

    def step1c(self) -> None:
        if self._ends("y") and self._vowel_in_stem():
            self.b = self.b[: self.k] + "i" + self.b[self.k + 1 :]

    _STEP2 = {
        "a": (("ational", "ate"), ("tional", "tion")),
        "c": (("enci", "ence"), ("anci", "ance")),
        "e": (("izer", "ize"),),
        "l": (("bli", "ble"), ("alli", "al"), ("entli", "ent"), ("eli", "e"),
              ("ousli", "ous")),
        "o": (("ization", "ize"), ("ation", "ate"), ("ator", "ate")),
        "s": (("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
              ("ousness", "ous")),
        "t": (("aliti", "al"), ("iviti", "ive"), ("biliti", "ble")),
        "g": (("logi", "log"),),
    }

    def step2(self) -> None:
        rules = self._STEP2.get(self.b[self.k - 1])
        if not rules:
            return
        for suffix, repl in rules:
            if self._ends(suffix):
                self._replace_if_m(repl)
                return

    _STEP3 = {
        "e": (("icate", "ic"), ("ative", ""), ("alize", "al")),
        "i": (("iciti", "ic"),),
        "l": (("ical", "ic"), ("ful", "")),
        "s": (("ness", ""),),
    }

    def step3(self) -> None:
        rules = self._STEP3.get(self.b[self.k])
        if not rules:
            return
        for suffix, repl in rules:
            if self._ends(suffix):
                self._replace_if_m(repl)
                return

    _STEP4 = {
        "a": ("al",),
        "c": ("ance", "ence"),
        "e": ("er",),
        "i": ("ic",),
        "l": ("able", "ible"),
        "n": ("ant", "ement", "ment", "ent"),
        "o": ("ion", "ou"),
        "s": ("ism",),
        "t": ("ate", "iti"),
        "u": ("ous",),
        "v": ("ive",),
        "z": ("ize",),
    }

    def step4(self) -> None:
        suffixes = self._STEP4.get(self.b[self.k - 1])
        if not suffixes:
            return
        for suffix in suffixes:
            if self._ends(suffix):
                # "ion" only counts as a suffix after s or t.
                if suffix == "ion" and self.b[self.j] not in "st":
                    continue
                if self._m() > 1:
                    self.k = self.j
                return

    def step5(self) -> None:
        self.j = self.k
        if self.b[self.k] == "e":
            a = self._m()
            if a > 1 or (a == 1 and not self._cvc(self.k - 1)):
                self.k -= 1
        if self.b[self.k] == "l" and self._double_cons(self.k) and self._m() > 1:
            self.k -= 1

    def result(self) -> str:
        return self.b[: self.k + 1]


def stem(token: str) -> str:
    """Stem one lowercase alphabetic token."""
    if len(token) <= 2:
        return token
    w = _Stemmer(token)
    w.step1ab()
    w.step1c()
    w.step2()
    w.step3()
    w.step4()
    w.step5()
    return w.result()


def stem_token(token: str) -> str:
    """Stem a tokenizer output token, handling hyphenated compounds.

    Each hyphen-separated segment is stemmed on its own and the segments
    are rejoined: "life-cycle" -> "life-cycl".
    """
    if "-" in token:
        return "-".join(stem(seg) for seg in token.split("-"))
    return stem(token)
