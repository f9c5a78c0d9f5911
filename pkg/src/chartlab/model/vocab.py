"""Word-level vocabulary with per-character digits and reserved specials."""

from __future__ import annotations

from .. import textnorm

PAD, BOS, EOS, REASON_OPEN, REASON_CLOSE, SUMMARY_OPEN, SUMMARY_CLOSE = range(7)

SPECIAL_TOKENS = ("<pad>", "<bos>", "<eos>", "<reason>", "</reason>",
                  "<summary>", "</summary>")

DIGITS = tuple(str(d) for d in range(10))


class VocabError(ValueError):
    pass


class Vocabulary:
    """Bidirectional token <-> id map over normalized corpus text."""

    def __init__(self, tokens):
        tokens = tuple(tokens)
        if tokens[: len(SPECIAL_TOKENS)] != SPECIAL_TOKENS:
            raise VocabError("vocabulary must start with the reserved special tokens")
        if len(set(tokens)) != len(tokens):
            raise VocabError("duplicate tokens in vocabulary")
        self.tokens = tokens
        self.index = {t: i for i, t in enumerate(tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def encode(self, text: str) -> list[int]:
        ids = []
        for tok in textnorm.tokenize(text):
            if tok not in self.index:
                raise VocabError(f"out-of-vocabulary token {tok!r}")
            ids.append(self.index[tok])
        return ids

    def decode(self, ids) -> str:
        """Canonical text for content ids; special ids are skipped."""
        toks = []
        for i in ids:
            if not 0 <= i < len(self.tokens):
                raise VocabError(f"id {i} outside vocabulary of size {len(self.tokens)}")
            if i >= len(SPECIAL_TOKENS):
                toks.append(self.tokens[i])
        return textnorm.detokenize(toks)


def build_vocabulary(records) -> Vocabulary:
    """Vocabulary over every instruction, reasoning and summary in the corpus."""
    from ..chartgen.corpus import INSTRUCTION_TEMPLATES

    words = set()
    for text in INSTRUCTION_TEMPLATES:
        words.update(textnorm.tokenize(text))
    for r in records:
        words.update(textnorm.tokenize(r.reasoning))
        words.update(textnorm.tokenize(r.summary))
    words.update(DIGITS)
    ordered = SPECIAL_TOKENS + tuple(sorted(words))
    return Vocabulary(ordered)
