"""Sentence-level BLEU, METEOR, and ROUGE-L over word token sequences.

All three metrics compare a candidate (generated) message against a single
reference (the original commit message) and return a float in [0, 1]. They
are deterministic pure functions and never raise on degenerate input: an
empty candidate or reference always scores 0.0.

Parameter choices, since the usual knobs matter for short texts:

- BLEU: geometric mean of modified n-gram precisions (n = 1..4) times the
  brevity penalty. Unigram precision is exact; for n >= 2 an order whose
  raw clipped count is zero gets add-one smoothing (``1 / (total + 1)``)
  so that short messages are not zeroed out by a missing high-order
  n-gram. Identical sequences score exactly 1.0; zero unigram overlap
  scores exactly 0.0.
- ROUGE-L: F1 (beta = 1) of LCS precision (``lcs / |candidate|``) and
  recall (``lcs / |reference|``).
- METEOR: exact-match unigram alignment only (no stemming or synonyms).
  P and R are match counts over candidate/reference length,
  ``fmean = 10PR / (R + 9P)``, fragmentation penalty
  ``0.5 * (chunks / matches)**3``. The alignment is the maximum-cardinality
  matching with the fewest chunks, found by branch-and-bound.
"""

from __future__ import annotations

import math
import unicodedata
from collections import Counter
from dataclasses import dataclass

# Exact chunk minimisation is equivalent to minimum common string partition,
# which has no polynomial algorithm; cap the search and keep the best
# decomposition found. Realistic commit messages never get near the cap.
_ALIGN_NODE_BUDGET = 200_000


@dataclass(frozen=True)
class MetricScores:
    """BLEU / METEOR / ROUGE-L for one (original, generated) pair."""

    bleu: float
    meteor: float
    rouge_l: float

    def as_dict(self) -> dict[str, float]:
        return {"bleu": self.bleu, "meteor": self.meteor, "rouge_l": self.rouge_l}


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[str]:
    """Split ``text`` into lowercase word tokens.

    Splits on Unicode whitespace, strips leading/trailing punctuation from
    each token (interior punctuation such as hyphens survives), lowercases,
    and drops tokens that end up empty.
    """
    tokens: list[str] = []
    for raw in text.split():
        start, end = 0, len(raw)
        while start < end and _is_punct(raw[start]):
            start += 1
        while end > start and _is_punct(raw[end - 1]):
            end -= 1
        token = raw[start:end].lower()
        if token:
            tokens.append(token)
    return tokens


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: list[str], reference: list[str], max_n: int = 4) -> float:
    """Sentence BLEU of ``candidate`` against ``reference``.

    See the module docstring for the smoothing rule. Returns 0.0 when either
    side is empty or when there is no unigram overlap.
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    if not candidate or not reference:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand_counts = _ngram_counts(candidate, n)
        ref_counts = _ngram_counts(reference, n)
        total = sum(cand_counts.values())
        clipped = sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
        if n == 1:
            if clipped == 0:
                return 0.0
            precision = clipped / total
        elif clipped > 0:
            precision = clipped / total
        else:
            precision = 1.0 / (total + 1)
        log_sum += math.log(precision)
    if len(candidate) > len(reference):
        brevity = 1.0
    else:
        brevity = math.exp(1.0 - len(reference) / len(candidate))
    return brevity * math.exp(log_sum / max_n)


def _lcs_length(a: list[str], b: list[str]) -> int:
    # Row-rolling DP, O(len(a) * len(b)) time, O(len(b)) space.
    if len(a) < len(b):
        a, b = b, a
    row = [0] * (len(b) + 1)
    for tok_a in a:
        prev = 0
        for j, tok_b in enumerate(b, start=1):
            cur = row[j]
            if tok_a == tok_b:
                row[j] = prev + 1
            elif row[j - 1] > row[j]:
                row[j] = row[j - 1]
            prev = cur
    return row[len(b)]


def rouge_l(candidate: list[str], reference: list[str]) -> float:
    """ROUGE-L F1 of ``candidate`` against ``reference``."""
    if not candidate or not reference:
        return 0.0
    lcs = _lcs_length(candidate, reference)
    if lcs == 0:
        return 0.0
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    return 2 * precision * recall / (precision + recall)


def _greedy_blocks(
    candidate: list[str],
    reference: list[str],
    need: dict[str, int],
    total: int,
) -> tuple[int, int]:
    """Longest-block-first greedy decomposition.

    Returns ``(blocks, longest)`` where ``blocks`` is an upper bound on the
    minimum chunk count and ``longest`` (the first block's length) bounds the
    length of any block in any decomposition.
    """
    used_c: set[int] = set()
    used_r: set[int] = set()
    remaining = dict(need)
    left = total
    blocks = 0
    longest = 1
    while left > 0:
        best_len, best_at = 0, (0, 0)
        for i in range(len(candidate)):
            if i in used_c or remaining.get(candidate[i], 0) <= 0:
                continue
            for j in range(len(reference)):
                if j in used_r or reference[j] != candidate[i]:
                    continue
                length = 0
                taken: Counter = Counter()
                while (
                    i + length < len(candidate)
                    and j + length < len(reference)
                    and i + length not in used_c
                    and j + length not in used_r
                    and candidate[i + length] == reference[j + length]
                    and taken[candidate[i + length]] < remaining.get(candidate[i + length], 0)
                ):
                    taken[candidate[i + length]] += 1
                    length += 1
                if length > best_len:
                    best_len, best_at = length, (i, j)
        i, j = best_at
        if blocks == 0:
            longest = best_len
        for k in range(best_len):
            used_c.add(i + k)
            used_r.add(j + k)
            remaining[candidate[i + k]] -= 1
        left -= best_len
        blocks += 1
    return blocks, longest


def _aligned_match_stats(candidate: list[str], reference: list[str]) -> tuple[int, int]:
    """Return ``(matches, chunks)`` of the preferred unigram alignment.

    ``matches`` is the maximum matching cardinality
    (``sum(min(count_c[t], count_r[t]))``). ``chunks`` is the fewest number
    of contiguous matched runs any maximum matching can be partitioned into,
    found by branch-and-bound over common blocks (longest-first, with an
    admissible remaining/longest-block bound and a fixed node budget).
    """
    cand_counts = Counter(candidate)
    ref_counts = Counter(reference)
    need = {t: min(c, ref_counts[t]) for t, c in cand_counts.items() if t in ref_counts}
    total = sum(need.values())
    if total == 0:
        return 0, 0

    best, longest_possible = _greedy_blocks(candidate, reference, need, total)
    if best == 1:
        return total, 1

    ref_pos: dict[str, list[int]] = {}
    for j, tok in enumerate(reference):
        if tok in need:
            ref_pos.setdefault(tok, []).append(j)
    suffix_counts: list[Counter] = [Counter() for _ in range(len(candidate) + 1)]
    for i in range(len(candidate) - 1, -1, -1):
        suffix_counts[i] = suffix_counts[i + 1].copy()
        suffix_counts[i][candidate[i]] += 1

    budget = [_ALIGN_NODE_BUDGET]
    used_c: set[int] = set()
    used_r: set[int] = set()
    remaining = dict(need)

    def search(from_i: int, left: int, blocks: int) -> None:
        nonlocal best
        if left == 0:
            best = min(best, blocks)
            return
        if blocks + 1 >= best or budget[0] <= 0:
            return
        if blocks + math.ceil(left / longest_possible) >= best:
            return
        budget[0] -= 1
        i = from_i
        while i < len(candidate) and (i in used_c or remaining.get(candidate[i], 0) <= 0):
            i += 1
        if i >= len(candidate):
            return
        tok = candidate[i]
        # every block starting at candidate position i, longest lengths first
        starts: list[tuple[int, int]] = []
        for j in ref_pos[tok]:
            if j in used_r:
                continue
            length = 0
            taken: Counter = Counter()
            while (
                i + length < len(candidate)
                and j + length < len(reference)
                and i + length not in used_c
                and j + length not in used_r
                and candidate[i + length] == reference[j + length]
                and taken[candidate[i + length]] < remaining.get(candidate[i + length], 0)
            ):
                taken[candidate[i + length]] += 1
                length += 1
            starts.append((length, j))
        starts.sort(key=lambda item: (-item[0], item[1]))
        for max_len, j in starts:
            for length in range(max_len, 0, -1):
                for k in range(length):
                    used_c.add(i + k)
                    used_r.add(j + k)
                    remaining[candidate[i + k]] -= 1
                search(i + length, left - length, blocks + 1)
                for k in range(length):
                    used_c.discard(i + k)
                    used_r.discard(j + k)
                    remaining[candidate[i + k]] += 1
        # leave candidate[i] unmatched when enough later occurrences remain
        if suffix_counts[i + 1][tok] >= remaining[tok]:
            used_c.add(i)
            search(i + 1, left, blocks)
            used_c.discard(i)

    search(0, total, 0)
    return total, best


def meteor(candidate: list[str], reference: list[str]) -> float:
    """Exact-match METEOR of ``candidate`` against ``reference``."""
    if not candidate or not reference:
        return 0.0
    matches, chunks = _aligned_match_stats(candidate, reference)
    if matches == 0:
        return 0.0
    precision = matches / len(candidate)
    recall = matches / len(reference)
    fmean = 10 * precision * recall / (recall + 9 * precision)
    penalty = 0.5 * (chunks / matches) ** 3
    return fmean * (1 - penalty)


def score_all(original: str, generated: str) -> MetricScores:
    """Tokenize both strings and score ``generated`` against ``original``."""
    reference = tokenize(original)
    candidate = tokenize(generated)
    return MetricScores(
        bleu=bleu(candidate, reference),
        meteor=meteor(candidate, reference),
        rouge_l=rouge_l(candidate, reference),
    )
