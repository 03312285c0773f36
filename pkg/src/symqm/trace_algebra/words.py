"""Cyclic words over the two-letter alphabet {CREATE, ANNIHILATE}.

A word ``w`` stands for the single trace ``tr(b_1 b_2 ... b_k)`` where each
letter is either the matrix of creation operators ``a^dagger = sum_A a^dagger_A T_A``
or the matrix of annihilation operators ``a = sum_A a_A T_A``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

CREATE = 0
ANNIHILATE = 1

_SYMBOL = {CREATE: "A", ANNIHILATE: "a"}
_RUN = re.compile(r"([Aa])(\d+)")


def canonical_rotation(letters: tuple[int, ...]) -> tuple[int, ...]:
    """Return the lexicographically smallest rotation of ``letters``."""
    if not letters:
        return letters
    return min(letters[i:] + letters[:i] for i in range(len(letters)))


def word_text(letters: tuple[int, ...]) -> str:
    """Run-length text form, e.g. ``(0, 0, 1)`` -> ``"A2a1"``."""
    out = []
    i = 0
    while i < len(letters):
        j = i
        while j < len(letters) and letters[j] == letters[i]:
            j += 1
        out.append(f"{_SYMBOL[letters[i]]}{j - i}")
        i = j
    return "".join(out)


def parse_word(text: str) -> tuple[int, ...]:
    """Inverse of :func:`word_text`. Accepts bare letters as runs of one."""
    text = text.strip()
    text = re.sub(r"([Aa])(?![\d])", r"\g<1>1", text)
    pos = 0
    letters: list[int] = []
    for m in _RUN.finditer(text):
        if m.start() != pos:
            raise ValueError(f"cannot parse trace word {text!r}")
        letter = CREATE if m.group(1) == "A" else ANNIHILATE
        letters.extend([letter] * int(m.group(2)))
        pos = m.end()
    if pos != len(text) or not letters:
        raise ValueError(f"cannot parse trace word {text!r}")
    return tuple(letters)


@dataclass(frozen=True, order=True)
class TraceWord:
    """A single trace, stored in its canonical (minimal) rotation.

    Parameters
    ----------
    letters : tuple of int
        Sequence of :data:`CREATE` / :data:`ANNIHILATE`. Rotated on
        construction; the empty word is rejected.
    """

    letters: tuple[int, ...]

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        if not letters:
            raise ValueError("the empty trace word is not allowed")
        if any(x not in (CREATE, ANNIHILATE) for x in letters):
            raise ValueError("letters must be CREATE or ANNIHILATE")
        object.__setattr__(self, "letters", canonical_rotation(letters))

    @classmethod
    def parse(cls, text: str) -> "TraceWord":
        return cls(parse_word(text))

    @classmethod
    def creation(cls, k: int) -> "TraceWord":
        """The brick ``tr(a^dagger^k)``."""
        return cls((CREATE,) * k)

    def __len__(self):
        return len(self.letters)

    @property
    def n_create(self) -> int:
        return self.letters.count(CREATE)

    @property
    def n_annihilate(self) -> int:
        return self.letters.count(ANNIHILATE)

    @property
    def is_creation(self) -> bool:
        return ANNIHILATE not in self.letters

    def dagger(self) -> "TraceWord":
        return TraceWord(tuple(1 - x for x in reversed(self.letters)))

    def __str__(self):
        return word_text(self.letters)
