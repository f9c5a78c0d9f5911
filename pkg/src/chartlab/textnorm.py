"""Word-level text normalization shared by corpus, vocabulary and metrics.

Tokens are lowercase words, single digits, or single punctuation marks
(multi-digit numbers split into one token per digit so a model can copy
exact values). `detokenize` is the canonical inverse: digit runs are
re-joined, closing punctuation attaches to the previous token and hyphens
bind tightly, so normalize() is idempotent.
"""

from __future__ import annotations

_TIGHT_LEFT = frozenset(".,;:!?%)")
_TIGHT_RIGHT = frozenset("(")


def tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    word: list[str] = []
    for ch in text.lower():
        if ch.isalpha():
            word.append(ch)
            continue
        if word:
            tokens.append("".join(word))
            word = []
        if ch.isdigit():
            tokens.append(ch)
        elif not ch.isspace():
            tokens.append(ch)
    if word:
        tokens.append("".join(word))
    return tokens


def detokenize(tokens: list[str]) -> str:
    parts: list[str] = []
    prev: str | None = None
    for tok in tokens:
        if prev is None:
            parts.append(tok)
        elif tok.isdigit() and (prev.isdigit() or (prev == "." and len(parts) >= 2
                                                   and parts[-2] and parts[-2][-1].isdigit())):
            parts.append(tok)
        elif tok == "." and prev.isdigit():
            # decimal point vs sentence end is resolved on the next token:
            # a following digit glues, anything else leaves "42." attached
            parts.append(tok)
        elif tok in _TIGHT_LEFT or tok == "-" or prev == "-" or prev in _TIGHT_RIGHT:
            parts.append(tok)
        else:
            parts.append(" " + tok)
        prev = tok
    return "".join(parts)


def normalize(text: str) -> str:
    return detokenize(tokenize(text))


def token_count(text: str) -> int:
    return len(tokenize(text))


def sentence_count(text: str) -> int:
    """Number of non-empty '.'-terminated sentences."""
    return sum(1 for part in text.split(".") if part.strip())


def match_tokens(text: str) -> list[str]:
    """Tokens with digit runs (and decimals) re-merged into number tokens.

    Used for phrase and numeral matching, where "42" must not match inside
    "425" or "42.5".
    """
    tokens = tokenize(text)
    merged: list[str] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.isdigit():
            j = i
            num = []
            while j < len(tokens) and tokens[j].isdigit():
                num.append(tokens[j])
                j += 1
            if (j < len(tokens) - 1 and tokens[j] == "." and tokens[j + 1].isdigit()):
                num.append(".")
                j += 1
                while j < len(tokens) and tokens[j].isdigit():
                    num.append(tokens[j])
                    j += 1
            merged.append("".join(num))
            i = j
        else:
            merged.append(tok)
            i += 1
    return merged


def contains_phrase(text: str, phrase: str) -> bool:
    """Whole-token contiguous containment of `phrase` within `text`."""
    hay = match_tokens(text)
    needle = match_tokens(phrase)
    if not needle:
        return False
    n = len(needle)
    return any(hay[i:i + n] == needle for i in range(len(hay) - n + 1))


def extract_numerals(text: str) -> list[float]:
    """All numbers mentioned in the text (digit runs merged, decimals kept)."""
    out = []
    for tok in match_tokens(text):
        if tok and (tok[0].isdigit()):
            out.append(float(tok))
    return out
