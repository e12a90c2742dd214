"""WordPiece vocabulary training and greedy subword tokenization.

Continuation pieces carry the ``##`` prefix; specials [PAD] [UNK] [CLS]
[SEP] [MASK] are pinned to ids 0-4. Training seeds every observed
character in both initial and continuation form, then grows the
vocabulary by merging the adjacent pair with the highest
count(ab) / (count(a) * count(b)) score; ties break on the lexicographic
order of the merged token, so training is a pure function of the corpus
multiset and the parameters.

The pipeline is cased: no lowercasing, NFC normalization only.
"""

from __future__ import annotations

import heapq
import itertools
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator

CONTINUATION_PREFIX = "##"
SPECIAL_TOKENS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]")
PAD_ID, UNK_ID, CLS_ID, SEP_ID, MASK_ID = range(5)
UNK_TOKEN = SPECIAL_TOKENS[UNK_ID]

DEFAULT_MAX_WORD_CHARS = 100
DEFAULT_MAX_SEQUENCE_LENGTH = 512
DEFAULT_TARGET_SIZE = 52_000


class VocabularyError(ValueError):
    """Vocabulary construction or file-format violation."""


class Vocabulary:
    """Ordered token inventory; position in ``entries`` is the token id."""

    continuation_prefix = CONTINUATION_PREFIX

    def __init__(self, entries: Iterable[str]):
        self.entries: list[str] = list(entries)
        if self.entries[: len(SPECIAL_TOKENS)] != list(SPECIAL_TOKENS):
            raise VocabularyError(
                f"vocabulary must start with {' '.join(SPECIAL_TOKENS)} at ids 0-4"
            )
        self.index: dict[str, int] = {}
        for i, token in enumerate(self.entries):
            if not token or token != token.strip() or any(c.isspace() for c in token):
                raise VocabularyError(f"invalid token at id {i}: {token!r}")
            if token in self.index:
                raise VocabularyError(f"duplicate token at id {i}: {token!r}")
            self.index[token] = i

    @property
    def size(self) -> int:
        return len(self.entries)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.entries == other.entries


def _is_punctuation(ch: str) -> bool:
    # ASCII blocks that BERT-family pretokenizers split on (includes $, +,
    # <, >, which Unicode classes as symbols), plus every Unicode P* char.
    cp = ord(ch)
    if 33 <= cp <= 47 or 58 <= cp <= 64 or 91 <= cp <= 96 or 123 <= cp <= 126:
        return True
    return unicodedata.category(ch).startswith("P")


def pretokenize(text: str) -> list[str]:
    """NFC-normalize, split on whitespace, isolate punctuation characters."""
    text = unicodedata.normalize("NFC", text)
    words: list[str] = []
    for chunk in text.split():
        start = 0
        for i, ch in enumerate(chunk):
            if _is_punctuation(ch):
                if i > start:
                    words.append(chunk[start:i])
                words.append(ch)
                start = i + 1
        if start < len(chunk):
            words.append(chunk[start:])
    return words


def _word_symbols(word: str) -> list[str]:
    return [word[0]] + [CONTINUATION_PREFIX + ch for ch in word[1:]]


def _merged_token(a: str, b: str) -> str:
    if b.startswith(CONTINUATION_PREFIX):
        b = b[len(CONTINUATION_PREFIX):]
    return a + b


def count_words(texts: Iterable[str]) -> Counter:
    """Word-frequency pass over pretokenized texts (picklable for pools)."""
    counts: Counter = Counter()
    for text in texts:
        counts.update(pretokenize(text))
    return counts


def _count_words_parallel(texts: Iterable[str], threads: int) -> Counter:
    import multiprocessing

    def chunks(stream: Iterator[str], size: int):
        while True:
            block = list(itertools.islice(stream, size))
            if not block:
                return
            yield block

    total: Counter = Counter()
    with multiprocessing.Pool(threads) as pool:
        for part in pool.imap_unordered(count_words, chunks(iter(texts), 2000)):
            total.update(part)
    return total


class _MergeState:
    """Working corpus decomposition with incrementally maintained counts."""

    def __init__(self, word_freqs: Counter, min_frequency: int):
        self.min_frequency = min_frequency
        self.words: list[list[str]] = []
        self.freqs: list[int] = []
        self.sym_counts: dict[str, int] = {}
        self.pair_counts: dict[tuple[str, str], int] = {}
        self.pair_words: dict[tuple[str, str], set[int]] = {}
        self.elem_pairs: dict[str, set[tuple[str, str]]] = {}
        for widx, (word, freq) in enumerate(sorted(word_freqs.items())):
            syms = _word_symbols(word)
            self.words.append(syms)
            self.freqs.append(freq)
            self._count(widx, syms, freq, set())

    def _count(
        self,
        widx: int,
        syms: list[str],
        delta: int,
        changed: set[tuple[str, str]],
    ) -> None:
        sym_counts = self.sym_counts
        for s in syms:
            total = sym_counts.get(s, 0) + delta
            if total:
                sym_counts[s] = total
            else:
                sym_counts.pop(s, None)
        adding = delta > 0
        for i in range(len(syms) - 1):
            pair = (syms[i], syms[i + 1])
            changed.add(pair)
            total = self.pair_counts.get(pair, 0) + delta
            if total:
                if pair not in self.pair_counts:
                    self.elem_pairs.setdefault(pair[0], set()).add(pair)
                    self.elem_pairs.setdefault(pair[1], set()).add(pair)
                self.pair_counts[pair] = total
                members = self.pair_words.setdefault(pair, set())
                if adding:
                    members.add(widx)
                else:
                    members.discard(widx)
            else:
                self.pair_counts.pop(pair, None)
                self.pair_words.pop(pair, None)
                for elem in pair:
                    bucket = self.elem_pairs.get(elem)
                    if bucket is not None:
                        bucket.discard(pair)
                        if not bucket:
                            del self.elem_pairs[elem]

    def score(self, pair: tuple[str, str]) -> float | None:
        count = self.pair_counts.get(pair)
        if count is None or count < self.min_frequency:
            return None
        return count / (self.sym_counts[pair[0]] * self.sym_counts[pair[1]])

    def merge(self, pair: tuple[str, str], merged: str) -> set[tuple[str, str]]:
        """Rewrite every word containing ``pair``; returns pairs whose
        score may have changed (count or denominator)."""
        changed: set[tuple[str, str]] = set()
        for widx in sorted(self.pair_words.get(pair, ())):
            old = self.words[widx]
            freq = self.freqs[widx]
            self._count(widx, old, -freq, changed)
            new = []
            i = 0
            while i < len(old):
                if i < len(old) - 1 and (old[i], old[i + 1]) == pair:
                    new.append(merged)
                    i += 2
                else:
                    new.append(old[i])
                    i += 1
            self.words[widx] = new
            self._count(widx, new, freq, changed)
        for elem in (pair[0], pair[1], merged):
            changed.update(self.elem_pairs.get(elem, ()))
        return changed


def train_wordpiece(
    corpus: Iterable[str],
    target_size: int = DEFAULT_TARGET_SIZE,
    min_frequency: int = 2,
    threads: int = 1,
) -> Vocabulary:
    """Learn a WordPiece vocabulary of min(target_size, attainable) entries.

    The corpus stream is consumed once for word counting; the merge loop
    then runs over unique words. ``threads`` > 1 shards only the counting
    pass (the result is identical for any worker count).
    """
    if min_frequency < 1:
        raise ValueError(f"min_frequency must be >= 1, got {min_frequency}")
    if threads > 1:
        word_freqs = _count_words_parallel(corpus, threads)
    else:
        word_freqs = count_words(corpus)
    if not word_freqs:
        raise ValueError("cannot train a vocabulary on an empty corpus")

    alphabet = sorted({ch for word in word_freqs for ch in word})
    entries = list(SPECIAL_TOKENS) + alphabet + [
        CONTINUATION_PREFIX + ch for ch in alphabet
    ]
    if target_size <= len(entries):
        raise ValueError(
            f"target_size must exceed specials + alphabet = {len(entries)}, "
            f"got {target_size}"
        )
    index = set(entries)

    state = _MergeState(word_freqs, min_frequency)
    heap: list[tuple[float, str, tuple[str, str]]] = []
    for pair in state.pair_counts:
        score = state.score(pair)
        if score is not None:
            heap.append((-score, _merged_token(*pair), pair))
    heapq.heapify(heap)

    while len(entries) < target_size and heap:
        neg_score, merged, pair = heapq.heappop(heap)
        live = state.score(pair)
        if live is None:
            continue
        if -neg_score != live:
            # Stale priority; reinsert at the current score and retry.
            heapq.heappush(heap, (-live, merged, pair))
            continue
        changed = state.merge(pair, merged)
        if merged not in index:
            entries.append(merged)
            index.add(merged)
        for other in changed:
            score = state.score(other)
            if score is not None:
                heapq.heappush(heap, (-score, _merged_token(*other), other))

    return Vocabulary(entries)


def tokenize(
    word: str,
    vocab: Vocabulary,
    max_word_chars: int = DEFAULT_MAX_WORD_CHARS,
) -> list[str]:
    """Greedy longest-match-first split of one pretokenized word.

    Falls back to [UNK] when the word is longer than ``max_word_chars``
    or some remainder has no vocabulary prefix at all.
    """
    if not word:
        return []
    if len(word) > max_word_chars:
        return [UNK_TOKEN]
    index = vocab.index
    pieces: list[str] = []
    start = 0
    while start < len(word):
        end = len(word)
        piece = None
        while start < end:
            candidate = word[start:end]
            if start > 0:
                candidate = CONTINUATION_PREFIX + candidate
            if candidate in index:
                piece = candidate
                break
            end -= 1
        if piece is None:
            return [UNK_TOKEN]
        pieces.append(piece)
        start = end
    return pieces


@dataclass
class EncodedText:
    ids: list[int]
    truncated: bool


def encode(
    text: str,
    vocab: Vocabulary,
    max_sequence_length: int = DEFAULT_MAX_SEQUENCE_LENGTH,
) -> EncodedText:
    """[CLS] + token ids + [SEP], truncating the body beyond the limit."""
    if max_sequence_length < 2:
        raise ValueError(f"max_sequence_length must be >= 2, got {max_sequence_length}")
    body: list[int] = []
    for word in pretokenize(text):
        body.extend(vocab.index[piece] for piece in tokenize(word, vocab))
    budget = max_sequence_length - 2
    truncated = len(body) > budget
    return EncodedText(ids=[CLS_ID] + body[:budget] + [SEP_ID], truncated=truncated)


def detokenize(tokens: Iterable[str]) -> str:
    """Strip continuation prefixes, join pieces into words, words by spaces."""
    words: list[str] = []
    for token in tokens:
        if token in SPECIAL_TOKENS:
            raise ValueError(f"special token {token!r} has no text form")
        if token.startswith(CONTINUATION_PREFIX) and words:
            words[-1] += token[len(CONTINUATION_PREFIX):]
        elif token.startswith(CONTINUATION_PREFIX):
            words.append(token[len(CONTINUATION_PREFIX):])
        else:
            words.append(token)
    return " ".join(words)


def save_vocab(vocab: Vocabulary, path) -> None:
    """One token per line; the line number is the token id."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for token in vocab.entries:
            handle.write(token)
            handle.write("\n")


def load_vocab(path) -> Vocabulary:
    with open(path, "r", encoding="utf-8") as handle:
        entries = [line.rstrip("\r\n") for line in handle]
    try:
        return Vocabulary(entries)
    except VocabularyError as exc:
        raise VocabularyError(f"{path}: {exc}") from exc
