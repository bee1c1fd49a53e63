"""
Caption metrics: BLEU-4, CIDEr and an exact-match METEOR variant.

All three share one tokenizer: lowercase, punctuation removed, whitespace split.
"""
import math
import re
from collections import Counter
from typing import Dict, List, Sequence, Tuple

from src.core.exceptions import ArityError, ConfigError

MAX_N = 4
# Stand-in for a zero n-gram precision inside the BLEU geometric mean
BLEU_FLOOR = 1e-9
CIDER_SCALE = 10.0

_PUNCT = re.compile(r"[^\w\s]")


def tokenize(text: str) -> List[str]:
    return _PUNCT.sub(" ", text.lower()).split()


def precook(words: Sequence[str], n: int = MAX_N) -> Counter:
    """Counts of every k-gram, 1 <= k <= n."""
    counts = Counter()
    for k in range(1, n + 1):
        for i in range(len(words) - k + 1):
            counts[tuple(words[i:i + k])] += 1
    return counts


def bleu4(candidate: str, references: Sequence[str]) -> float:
    """
    Sentence BLEU-4 with uniform weights.

    Clipped n-gram precisions use the maximum count over the references; the
    brevity penalty uses the reference length closest to the candidate's.
    Zero precisions (including orders longer than the candidate) are floored
    at BLEU_FLOOR.
    """
    words = tokenize(candidate)
    if not words:
        return 0.0
    if not references:
        raise ArityError("bleu4 needs at least one reference")
    ref_words = [tokenize(r) for r in references]
    max_counts: Counter = Counter()
    for ref in ref_words:
        for gram, count in precook(ref).items():
            max_counts[gram] = max(max_counts[gram], count)

    counts = precook(words)
    correct = [0] * MAX_N
    for gram, count in counts.items():
        correct[len(gram) - 1] += min(count, max_counts.get(gram, 0))
    guess = [max(0, len(words) - k) for k in range(MAX_N)]

    log_total = 0.0
    for k in range(MAX_N):
        precision = correct[k] / guess[k] if guess[k] else 0.0
        log_total += math.log(max(precision, BLEU_FLOOR))

    c = len(words)
    r = min((abs(len(ref) - c), len(ref)) for ref in ref_words)[1]
    brevity = min(1.0, math.exp(1.0 - r / c))
    return brevity * math.exp(log_total / MAX_N)


def _tfidf(counts: Counter, doc_freq: Counter, log_n: float) -> List[Dict[tuple, float]]:
    """One TF-IDF vector per n-gram order."""
    vectors: List[Dict[tuple, float]] = [{} for _ in range(MAX_N)]
    for gram, tf in counts.items():
        vectors[len(gram) - 1][gram] = tf * (log_n - math.log(max(1.0, doc_freq[gram])))
    return vectors


def _cosine(a: Dict[tuple, float], b: Dict[tuple, float]) -> float:
    norm_a = math.sqrt(sum(v * v for v in a.values()))
    norm_b = math.sqrt(sum(v * v for v in b.values()))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    dot = sum(v * b[g] for g, v in a.items() if g in b)
    return dot / (norm_a * norm_b)


def cider_scores(candidates: Sequence[str], references: Sequence[Sequence[str]]) -> List[float]:
    """
    Per-candidate CIDEr in [0, 10].

    Document frequencies count the reference sets an n-gram occurs in; IDF is
    log(N / df) with N the number of reference sets.
    """
    if len(candidates) != len(references):
        raise ArityError(f"{len(candidates)} candidates for {len(references)} reference sets")
    if not references or not any(refs for refs in references):
        raise ConfigError("CIDEr needs a non-empty reference corpus")

    cooked_refs = [[precook(tokenize(r)) for r in refs] for refs in references]
    doc_freq: Counter = Counter()
    for refs in cooked_refs:
        for gram in set(g for counts in refs for g in counts):
            doc_freq[gram] += 1
    log_n = math.log(float(len(references)))

    scores = []
    for candidate, refs in zip(candidates, cooked_refs):
        if not refs:
            scores.append(0.0)
            continue
        cand_vec = _tfidf(precook(tokenize(candidate)), doc_freq, log_n)
        per_n = [0.0] * MAX_N
        for ref in refs:
            ref_vec = _tfidf(ref, doc_freq, log_n)
            for k in range(MAX_N):
                per_n[k] += _cosine(cand_vec[k], ref_vec[k])
        scores.append(CIDER_SCALE * sum(v / len(refs) for v in per_n) / MAX_N)
    return scores


def cider(candidates: Sequence[str], references: Sequence[Sequence[str]]) -> float:
    """Corpus CIDEr: mean of the per-candidate scores."""
    scores = cider_scores(candidates, references)
    return sum(scores) / len(scores)


def _free_run(candidate: Sequence[str], reference: Sequence[str], i: int, j: int, used: List[bool]) -> int:
    """Matches in a row from candidate[i] / reference[j] over free reference slots."""
    length = 0
    while (
        i + length < len(candidate)
        and j + length < len(reference)
        and not used[j + length]
        and candidate[i + length] == reference[j + length]
    ):
        length += 1
    return length


def align(candidate: Sequence[str], reference: Sequence[str]) -> Tuple[int, int]:
    """
    Exact unigram alignment with the most matches, then few chunks.

    A candidate word is matched whenever a reference slot of the same word is
    still free, so matches equal the summed per-word minimum counts. Slots are
    picked left to right over the candidate: extending the current chunk
    first, otherwise the slot that opens the longest free run (earliest on
    ties).

    Returns:
        (matches, chunks); a chunk is a run of matches adjacent in both sentences
    """
    positions: Dict[str, List[int]] = {}
    for j, word in enumerate(reference):
        positions.setdefault(word, []).append(j)

    used = [False] * len(reference)
    matches = chunks = 0
    # Reference slot of the previous candidate word, -2 when it is unmatched
    last = -2
    for i, word in enumerate(candidate):
        free = [j for j in positions.get(word, ()) if not used[j]]
        if not free:
            last = -2
            continue
        if last + 1 in free:
            j = last + 1
        else:
            j = max(free, key=lambda k: (_free_run(candidate, reference, i, k, used), -k))
            chunks += 1
        used[j] = True
        matches += 1
        last = j
    return matches, chunks


def meteor_lite(candidate: str, reference: str) -> float:
    """
    METEOR with exact matching only (no stemming or synonyms).

    F = 10PR / (R + 9P), penalty = 0.5 * (chunks / matches)^3.
    """
    cand, ref = tokenize(candidate), tokenize(reference)
    if not cand or not ref:
        return 0.0
    matches, chunks = align(cand, ref)
    if matches == 0:
        return 0.0
    precision = matches / len(cand)
    recall = matches / len(ref)
    f_mean = 10 * precision * recall / (recall + 9 * precision)
    penalty = 0.5 * (chunks / matches) ** 3
    return f_mean * (1.0 - penalty)


def meteor_lite_multi(candidate: str, references: Sequence[str]) -> float:
    """Best score over several references."""
    return max((meteor_lite(candidate, r) for r in references), default=0.0)
