"""Deterministic text processing shared by every other module.

Sentence segmentation, tokenization, vocabulary construction and
pretrained-embedding lookup.  Everything here is pure and seeded: equal
inputs give equal outputs across runs and platforms, which the test
suite relies on heavily.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

PAD = "<pad>"
UNK = "<unk>"
PAD_ID = 0
UNK_ID = 1

# Latent aspect kinds a claim may carry.
ASPECT_KINDS = ("author", "topic", "domain")

# Trailing tokens (lowercased) that never end a sentence.
ABBREVIATIONS = frozenset({"dr.", "mr.", "mrs.", "ms.", "u.s.", "e.g.", "i.e.", "etc."})

_SENTENCE_END = frozenset(".!?")

# A token is a run of word characters (hyphens allowed strictly between
# word characters, so "covid-19" stays whole) or a single punctuation mark.
_TOKEN_RE = re.compile(r"\w+(?:-\w+)*|[^\w\s]")


@dataclass(frozen=True)
class Sentence:
    """One sentence of a source document, positioned by 0-based index."""

    text: str
    index: int


@dataclass(frozen=True)
class Claim:
    """A candidate statement under verification.

    ``tokens`` is always ``tokenize(text)``.  ``aspects`` maps a subset of
    :data:`ASPECT_KINDS` to string attribute values (e.g. the claim's
    author or topic); unknown keys are rejected.
    """

    text: str
    aspects: dict[str, str] = field(default_factory=dict)
    tokens: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        bad = set(self.aspects) - set(ASPECT_KINDS)
        if bad:
            raise ValueError(f"unknown aspect kinds: {sorted(bad)}")
        object.__setattr__(self, "tokens", tuple(tokenize(self.text)))


def segment_sentences(text: str) -> list[Sentence]:
    """Split ``text`` into sentences on '.', '!' or '?' followed by whitespace.

    A fixed abbreviation list ("Dr.", "e.g.", ...) blocks breaks.  The
    multiset of non-whitespace characters is preserved: joining the
    sentence texts with single spaces loses nothing.  Empty or
    whitespace-only input yields an empty list.
    """
    sentences: list[str] = []
    start = 0
    n = len(text)
    for i, ch in enumerate(text):
        if ch not in _SENTENCE_END:
            continue
        if i + 1 < n and not text[i + 1].isspace():
            continue
        # Word ending at this punctuation mark, e.g. "Dr." or "spoke."
        j = i
        while j > start and not text[j - 1].isspace():
            j -= 1
        if text[j : i + 1].lower() in ABBREVIATIONS:
            continue
        chunk = text[start : i + 1].strip()
        if chunk:
            sentences.append(chunk)
        start = i + 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return [Sentence(text=s, index=k) for k, s in enumerate(sentences)]


def tokenize(sentence: str) -> list[str]:
    """Lowercase and split into word and punctuation tokens.

    Intra-word hyphens and digits are kept ("Covid-19" -> "covid-19");
    every other punctuation mark becomes its own token.  Deterministic,
    never produces empty tokens, and idempotent under space-join.
    """
    return _TOKEN_RE.findall(sentence.lower())


def content_tokens(text: str) -> list[str]:
    """Tokens that carry at least one alphanumeric character.

    Used where bare punctuation is noise: claim-worthiness scoring and
    keyword-overlap search.
    """
    return [t for t in tokenize(text) if any(c.isalnum() for c in t)]


class Vocabulary:
    """Bijective token<->id map with PAD=0 and UNK=1 always present.

    Ids are contiguous from 0: specials first, then tokens ordered by
    descending corpus frequency with lexicographic tie-breaks.
    """

    def __init__(self, tokens: list[str]):
        self._id_to_token = [PAD, UNK, *tokens]
        self._token_to_id = {t: i for i, t in enumerate(self._id_to_token)}
        if len(self._token_to_id) != len(self._id_to_token):
            raise ValueError("duplicate tokens in vocabulary")

    def __len__(self) -> int:
        return len(self._id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self._token_to_id

    def id_of(self, token: str) -> int:
        return self._token_to_id.get(token, UNK_ID)

    def token_of(self, idx: int) -> str:
        return self._id_to_token[idx]

    @property
    def tokens(self) -> list[str]:
        """All tokens in id order, specials included."""
        return list(self._id_to_token)

    @classmethod
    def from_tokens(cls, id_ordered: list[str]) -> "Vocabulary":
        """Rebuild from a full id-ordered token list (e.g. a checkpoint)."""
        if id_ordered[:2] != [PAD, UNK]:
            raise ValueError("token list must start with PAD, UNK")
        return cls(id_ordered[2:])


def build_vocabulary(corpus: list[list[str]], min_count: int = 1) -> Vocabulary:
    """Collect tokens with frequency >= ``min_count`` into a Vocabulary."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    freq: dict[str, int] = {}
    for tokens in corpus:
        for t in tokens:
            freq[t] = freq.get(t, 0) + 1
    kept = [t for t, c in freq.items() if c >= min_count]
    kept.sort(key=lambda t: (-freq[t], t))
    return Vocabulary(kept)


class EmbeddingLoadError(Exception):
    """Raised for malformed word-vector lines; carries the line number."""


class EmbeddingTable:
    """|V| x d matrix of real-valued token vectors tied to a Vocabulary.

    The PAD row is always all-zero.
    """

    def __init__(self, vocab: Vocabulary, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.shape[0] != len(vocab):
            raise ValueError(
                f"matrix has {matrix.shape[0]} rows for vocabulary of size {len(vocab)}"
            )
        self.vocab = vocab
        self.matrix = matrix
        self.dim = int(matrix.shape[1])

    def row(self, token: str) -> np.ndarray:
        return self.matrix[self.vocab.id_of(token)]

    @classmethod
    def random(cls, vocab: Vocabulary, d: int, seed: int = 0,
               scale: float = 0.05) -> "EmbeddingTable":
        """Uniform [-scale, scale] init with a zero PAD row."""
        rng = np.random.default_rng(seed)
        matrix = rng.uniform(-scale, scale, size=(len(vocab), d))
        matrix[PAD_ID] = 0.0
        return cls(vocab, matrix)


def load_embeddings(source, vocab: Vocabulary, d: int, seed: int = 0) -> EmbeddingTable:
    """Read textual word-vector lines ("token v1 ... vd") into a table.

    In-vocabulary tokens get their stream vectors; tokens absent from the
    stream are initialized uniformly in [-0.05, 0.05] from the seeded RNG;
    the PAD row is zero.  Lines with the wrong arity or non-numeric values
    raise :class:`EmbeddingLoadError` naming the offending line.
    """
    rng = np.random.default_rng(seed)
    matrix = rng.uniform(-0.05, 0.05, size=(len(vocab), d))
    if isinstance(source, str):
        source = source.splitlines()
    for lineno, line in enumerate(source, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        parts = line.split(" ")
        if len(parts) != d + 1:
            raise EmbeddingLoadError(
                f"line {lineno}: expected {d + 1} fields (token + {d} values), got {len(parts)}"
            )
        token = parts[0]
        try:
            values = [float(v) for v in parts[1:]]
        except ValueError as exc:
            raise EmbeddingLoadError(f"line {lineno}: non-numeric value ({exc})") from exc
        if token in vocab:
            matrix[vocab.id_of(token)] = values
    matrix[PAD_ID] = 0.0
    return EmbeddingTable(vocab, matrix)


def embed(tokens: list[str], vocab: Vocabulary, table: EmbeddingTable) -> np.ndarray:
    """Stack per-token embedding rows into a T x d matrix.

    Unknown tokens map to the UNK row; an empty token list gives a 0 x d
    matrix.
    """
    if table.vocab is not vocab and table.vocab.tokens != vocab.tokens:
        raise ValueError("embedding table was built over a different vocabulary")
    if not tokens:
        return np.zeros((0, table.dim))
    ids = [vocab.id_of(t) for t in tokens]
    return table.matrix[ids]
