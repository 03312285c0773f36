"""Exact linear combinations of products of single traces.

Internal representation
-----------------------
A term key is a tuple of *blocks*; the key stands for the ordered operator
product ``B_1 B_2 ... B_r``. Each block is a sorted tuple of canonical words
and stands for the *normal-ordered* product of its traces, so inside a block
traces commute and every trace is invariant under rotation. The identity is
the empty key. An expression is normal ordered when every key has at most one
block.

Products of normal-ordered blocks are reduced with Wick's theorem: each
contraction of an annihilation letter (left block) with a creation letter
(right block) applies the completeness relation of the generators,
``sum_A (T_A)_ij (T_A)_kl = (delta_il delta_jk - delta_ij delta_kl / N) / 2``,
which fuses two traces or splits one. An empty trace equals ``N`` and a
length-one trace vanishes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .newton import power_sum
from .words import ANNIHILATE, CREATE, TraceWord, canonical_rotation, parse_word, word_text

Word = tuple  # canonical letters
Block = tuple  # sorted tuple of Word


def _category(w: Word) -> int:
    if ANNIHILATE not in w:
        return 0
    if CREATE not in w:
        return 2
    return 1


def _word_key(w: Word):
    return (_category(w), len(w), w)


def _sort_block(words: Iterable[Word]) -> Block:
    return tuple(sorted(words, key=_word_key))


def _has(block: Block, letter: int) -> bool:
    return any(letter in w for w in block)


def _merge_key(blocks: Iterable[Block]) -> tuple:
    """Fuse neighbouring blocks whose product is already normal ordered."""
    out: list = []
    for b in blocks:
        if not b:
            continue
        if out and (not _has(out[-1], ANNIHILATE) or not _has(b, CREATE)):
            out[-1] = _sort_block(out[-1] + b)
        else:
            out.append(b)
    return tuple(out)


def _clean_words(words, n):
    """Canonicalize raw words; returns (factor, block) or None if zero."""
    factor = 1
    kept = []
    for w in words:
        if len(w) == 0:
            factor *= n
        elif len(w) == 1:
            return None
        else:
            kept.append(canonical_rotation(tuple(w)))
    return factor, _sort_block(kept)


# --- Fierz step on labelled words -------------------------------------------

def _locate(words, label):
    for wi, w in enumerate(words):
        for pos, (lab, _) in enumerate(w):
            if lab == label:
                return wi, pos
    raise KeyError(label)


def _fierz_labelled(words: tuple, x, y, n: int) -> list:
    """Contract labelled letters ``x`` and ``y``; returns [(coeff, words)]."""
    half = Fraction(1, 2)
    inv = Fraction(-1, 2 * n)
    wa, ia = _locate(words, x)
    wc, ic = _locate(words, y)
    others = [w for k, w in enumerate(words) if k not in (wa, wc)]
    if wa != wc:
        u, v = words[wa], words[wc]
        p = u[ia + 1:] + u[:ia]
        q = v[ic + 1:] + v[:ic]
        raw = [(half, [p + q]), (inv, [p, q])]
    else:
        w = words[wa]
        i, j = sorted((ia, ic))
        q = w[i + 1:j]
        p = w[j + 1:] + w[:i]
        raw = [(half, [p, q]), (inv, [p + q])]
    out = []
    for c, new in raw:
        factor = c
        kept = []
        dead = False
        for wd in new:
            if len(wd) == 0:
                factor = factor * n
            elif len(wd) == 1:
                dead = True
                break
            else:
                kept.append(wd)
        if not dead and factor:
            out.append((factor, tuple(others + kept)))
    return out


@lru_cache(maxsize=200000)
def _wick(left: Block, right: Block, n: int) -> tuple:
    """Normal-ordered form of ``:left: :right:`` as ((block, coeff), ...)."""
    words = []
    ann = []
    cre = []
    label = 0
    for side, block in ((0, left), (1, right)):
        for w in block:
            lw = []
            for letter in w:
                lw.append((label, letter))
                if side == 0 and letter == ANNIHILATE:
                    ann.append(label)
                if side == 1 and letter == CREATE:
                    cre.append(label)
                label += 1
            words.append(tuple(lw))
    acc: dict = {}

    def emit(terms):
        for c, ws in terms:
            hit = _clean_words([tuple(l for _, l in w) for w in ws], n)
            if hit is None:
                continue
            f, blk = hit
            v = acc.get(blk, 0) + c * f
            if v:
                acc[blk] = v
            else:
                acc.pop(blk, None)

    def rec(i, used, terms):
        if not terms:
            return
        if i == len(ann):
            emit(terms)
            return
        rec(i + 1, used, terms)
        for y in cre:
            if y in used:
                continue
            new = []
            for c, ws in terms:
                for c2, ws2 in _fierz_labelled(ws, ann[i], y, n):
                    new.append((c * c2, ws2))
            rec(i + 1, used | {y}, new)

    rec(0, frozenset(), [(Fraction(1), tuple(words))])
    return tuple(sorted(acc.items(), key=lambda kv: _block_sort(kv[0])))


def _block_sort(block):
    return tuple(_word_key(w) for w in block)


def _key_sort(key):
    return (sum(len(w) for b in key for w in b), tuple(_block_sort(b) for b in key))


# --- public types ------------------------------------------------------------

@dataclass(frozen=True)
class TraceMonomial:
    """One term: an exact coefficient times a product of traces.

    ``blocks`` keeps the operator order; ``traces`` flattens it.
    """

    coeff: Fraction
    blocks: tuple

    @property
    def traces(self) -> tuple:
        return tuple(TraceWord(w) for b in self.blocks for w in b)

    @property
    def is_normal_ordered(self) -> bool:
        return len(self.blocks) <= 1


class TraceExpr:
    """Exact linear combination of trace products at fixed rank ``n``.

    Examples
    --------
    >>> e = TraceExpr.parse("(a2)(A2)", 3)
    >>> str(e.normal_order())
    '4 + 2*(A1a1) + (A2)(a2)'
    """

    __slots__ = ("n", "_terms")

    def __init__(self, terms: dict | None = None, n: int = 2):
        if int(n) < 2:
            raise ValueError("rank n must be at least 2")
        self.n = int(n)
        clean: dict = {}
        for key, c in (terms or {}).items():
            key = _merge_key(key)
            v = clean.get(key, 0) + Fraction(c)
            if v:
                clean[key] = v
            else:
                clean.pop(key, None)
        self._terms = clean

    # construction ---------------------------------------------------------
    @classmethod
    def identity(cls, n: int, coeff=1) -> "TraceExpr":
        return cls({(): coeff}, n)

    @classmethod
    def zero(cls, n: int) -> "TraceExpr":
        return cls({}, n)

    @classmethod
    def from_words(cls, words: Iterable, n: int, coeff=1, normal=False) -> "TraceExpr":
        """Product of single traces in the given operator order.

        Words may be :class:`TraceWord`, letter tuples or text such as ``"A2"``.
        Empty words contribute ``n`` and length-one words give zero. With
        ``normal=True`` the product is read as normal ordered.
        """
        raw = []
        for w in words:
            if isinstance(w, TraceWord):
                raw.append(w.letters)
            elif isinstance(w, str):
                raw.append(parse_word(w) if w else ())
            else:
                raw.append(tuple(w))
        hit = _clean_words(raw, n)
        if hit is None:
            return cls.zero(n)
        f, blk = hit
        if normal:
            key = (blk,) if blk else ()
        else:
            key = tuple((canonical_rotation(w),) for w in raw if len(w) > 1)
        return cls({key: Fraction(coeff) * f}, n)

    @classmethod
    def creation_brick(cls, k: int, n: int, power: int = 1) -> "TraceExpr":
        return cls.from_words([(CREATE,) * k] * power, n)

    @classmethod
    def parse(cls, text: str, n: int) -> "TraceExpr":
        """Parse the text form produced by ``str``.

        Grammar: ``term (("+"|"-") term)*`` with
        ``term := [rational ["*"]] factor*``, ``factor := "(" word ")"`` or a
        normal-ordered group ``":" ("(" word ")")+ ":"``, and words written as
        runs such as ``A2a1``. ``0`` is the empty sum.
        """
        text = text.strip()
        if text in ("", "0"):
            return cls.zero(n)
        total = cls.zero(n)
        pieces = re.findall(r"([+-]?)\s*([^+-]+)", text)
        if not pieces or "".join(s + b for s, b in pieces).replace(" ", "") != text.replace(" ", ""):
            raise ValueError(f"cannot parse expression {text!r}")
        for sign, body in pieces:
            total = total + cls._parse_term(body.strip(), n, -1 if sign == "-" else 1)
        return total

    @classmethod
    def _parse_term(cls, body: str, n: int, sign: int) -> "TraceExpr":
        m = re.match(r"^(\d+(?:/\d+)?)?\s*\*?\s*(.*)$", body)
        coeff = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        rest = m.group(2).strip()
        blocks = []
        pos = 0
        factor = 1
        for g in re.finditer(r"\s*(:((?:\([^()]*\))+):|\(([^()]*)\))", rest):
            if g.start() != pos:
                raise ValueError(f"cannot parse term {body!r}")
            pos = g.end()
            if g.group(2) is not None:
                ws = [parse_word(w) for w in re.findall(r"\(([^()]*)\)", g.group(2))]
            else:
                ws = [parse_word(g.group(3))]
            hit = _clean_words(ws, n)
            if hit is None:
                return cls.zero(n)
            factor *= hit[0]
            blocks.append(hit[1])
        if pos != len(rest):
            raise ValueError(f"cannot parse term {body!r}")
        return cls({tuple(blocks): sign * coeff * factor}, n)

    # container protocol ---------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def monomials(self) -> list:
        return [TraceMonomial(self._terms[k], k) for k in sorted(self._terms, key=_key_sort)]

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TraceExpr.identity(self.n, other)
        if not isinstance(other, TraceExpr):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, frozenset(self._terms.items())))

    def coefficient(self, other) -> Fraction:
        """Coefficient of a single-term expression (or text) inside ``self``."""
        if isinstance(other, str):
            other = TraceExpr.parse(other, self.n)
        (key, c), = other._terms.items()
        return self._terms.get(key, Fraction(0)) / c

    # arithmetic -------------------------------------------------------------
    def _check(self, other):
        if self.n != other.n:
            raise ValueError("expressions at different rank")

    def _lift(self, other):
        if isinstance(other, TraceExpr):
            self._check(other)
            return other
        return TraceExpr.identity(self.n, other)

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms.get(k, 0) + c
        return TraceExpr(terms, self.n)

    __radd__ = __add__

    def __neg__(self):
        return TraceExpr({k: -c for k, c in self._terms.items()}, self.n)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, TraceExpr):
            c = Fraction(other)
            return TraceExpr({k: v * c for k, v in self._terms.items()}, self.n)
        self._check(other)
        terms: dict = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                key = _merge_key(k1 + k2)
                terms[key] = terms.get(key, 0) + c1 * c2
        return TraceExpr(terms, self.n)

    def __rmul__(self, other):
        return self * other

    def dagger(self) -> "TraceExpr":
        """Hermitian conjugate: reverse operator order and every word."""
        terms = {}
        for key, c in self._terms.items():
            blocks = tuple(
                _sort_block(canonical_rotation(tuple(1 - x for x in reversed(w))) for w in b)
                for b in reversed(key)
            )
            terms[blocks] = c
        return TraceExpr(terms, self.n)

    # normal ordering --------------------------------------------------------
    def is_normal_ordered(self) -> bool:
        return all(len(k) <= 1 for k in self._terms)

    def normal_order(self) -> "TraceExpr":
        """Rewrite as a sum of normal-ordered trace products (exact)."""
        out: dict = {}
        for key, c in self._terms.items():
            if len(key) <= 1:
                out[key] = out.get(key, 0) + c
                continue
            acc = {key[0]: Fraction(1)}
            for blk in key[1:]:
                nxt: dict = {}
                for b, cb in acc.items():
                    for b2, cw in _wick(b, blk, self.n):
                        nxt[b2] = nxt.get(b2, 0) + cb * cw
                acc = {b: v for b, v in nxt.items() if v}
            for b, v in acc.items():
                k = (b,) if b else ()
                out[k] = out.get(k, 0) + c * v
        return TraceExpr(out, self.n)

    def act_on_vacuum(self) -> "TraceExpr":
        """Pure-creation part of the normal-ordered form (the state ``e|0>``)."""
        no = self.normal_order()
        return TraceExpr(
            {k: c for k, c in no._terms.items() if not any(_has(b, ANNIHILATE) for b in k)},
            self.n,
        )

    def vacuum_expectation(self) -> Fraction:
        return self.normal_order()._terms.get((), Fraction(0))

    def is_pure_creation(self) -> bool:
        return all(not _has(b, ANNIHILATE) for k in self._terms for b in k)

    def max_trace_length(self) -> int:
        return max((len(w) for k in self._terms for b in k for w in b), default=0)

    # text -------------------------------------------------------------------
    def _block_text(self, block, many):
        mixed = sum(1 for w in block if _category(w) == 1)
        body = "".join(f"({word_text(w)})" for w in block)
        if mixed >= 2 or (many and len(block) > 1):
            return f":{body}:"
        return body

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for key in sorted(self._terms, key=_key_sort):
            c = self._terms[key]
            body = "".join(self._block_text(b, len(key) > 1) for b in key)
            mag = abs(c)
            if not body:
                s = str(mag)
            elif mag == 1:
                s = body
            else:
                s = f"{mag}*{body}"
            if not parts:
                parts.append(("-" if c < 0 else "") + s)
            else:
                parts.append((" - " if c < 0 else " + ") + s)
        return "".join(parts)

    def __repr__(self):
        return f"TraceExpr({str(self)!r}, n={self.n})"


def normal_order(e: TraceExpr) -> TraceExpr:
    return e.normal_order()


def commutator(x: TraceExpr, y: TraceExpr) -> TraceExpr:
    """Normal-ordered ``xy - yx``."""
    return (x * y - y * x).normal_order()


def vacuum_expectation(e: TraceExpr) -> Fraction:
    return e.vacuum_expectation()


def fierz_contract(left: TraceWord, right: TraceWord | None, positions, n: int) -> TraceExpr:
    """Terms produced by one elementary contraction ``[a_A, a^dagger_B] = delta_AB``.

    Parameters
    ----------
    left, right : TraceWord
        Words holding the annihilation letter (``left``) and the creation
        letter (``right``). Pass ``right=None`` to contract two letters of
        the same word, which splits it in two.
    positions : (int, int)
        Letter positions inside the canonical rotation of each word.
    n : int
        Rank of SU(n).

    Returns
    -------
    TraceExpr
        The remaining letters, normal ordered, with Fierz weights ``1/2`` and
        ``-1/(2n)``.
    """
    i, j = positions
    wl = left.letters
    wr = wl if right is None else right.letters
    if not (0 <= i < len(wl) and 0 <= j < len(wr)):
        raise IndexError("contraction position out of range")
    if right is None and i == j:
        raise ValueError("cannot contract a letter with itself")
    if wl[i] != ANNIHILATE or wr[j] != CREATE:
        raise ValueError("need an ANNIHILATE letter on the left and a CREATE letter on the right")
    lw = tuple(((0, k), x) for k, x in enumerate(wl))
    if right is None:
        words = (lw,)
        y = (0, j)
    else:
        words = (lw, tuple(((1, k), x) for k, x in enumerate(wr)))
        y = (1, j)
    out: dict = {}
    for c, ws in _fierz_labelled(words, (0, i), y, n):
        hit = _clean_words([tuple(l for _, l in w) for w in ws], n)
        if hit is None:
            continue
        f, blk = hit
        key = (blk,) if blk else ()
        out[key] = out.get(key, 0) + c * f
    return TraceExpr(out, n)


class UnsupportedReduction(ValueError):
    """Raised when a trace with annihilation letters is longer than ``n``."""


def cayley_hamilton_reduce(e: TraceExpr) -> TraceExpr:
    """Rewrite pure-creation traces longer than ``n`` via Newton's identities.

    Uses ``tr(a^dagger) = 0`` (tracelessness), so the result involves only
    ``(A2) ... (An)``. Traces carrying annihilation letters are left alone
    when their length is at most ``n`` and rejected otherwise.
    """
    n = e.n
    out: dict = {}
    for key, c in e.terms.items():
        # each alternative: (tuple of blocks so far, coeff)
        partial = {(): c}
        for block in key:
            options = {(): Fraction(1)}  # tuple of words -> coeff
            for w in block:
                options = _mul_parts(options, _reduce_word(w, n))
            partial = {
                pk + (_sort_block(ws),): pc * oc
                for pk, pc in partial.items() for ws, oc in options.items()
            }
        for pk, pc in partial.items():
            out[pk] = out.get(pk, 0) + pc
    return TraceExpr(out, n)


def _reduce_word(w: Word, n: int) -> dict:
    if ANNIHILATE in w:
        if len(w) > n:
            raise UnsupportedReduction(
                f"trace ({word_text(w)}) has annihilators and length > {n}")
        return {(w,): Fraction(1)}
    if len(w) <= n:
        return {(w,): Fraction(1)}
    return {tuple((CREATE,) * k for k in pk): v for pk, v in power_sum(len(w), n).items()}


def _mul_parts(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            out[k] = out.get(k, 0) + ca * cb
    return out
