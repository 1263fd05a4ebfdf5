"""Scoring/refinement backends.

The default backend is an add-one-smoothed n-gram language model over
the training corpus. Refinement proposes local edits: the unchanged
sequence, adjacent-duplicate deletion, and insertion of frequent
function tokens at the edit boundary; all proposals leave the locked
prefix untouched. A different model can be dropped in through the
``module:`` descriptor as long as it provides the same two methods.
"""

from __future__ import annotations

import importlib
import math
from collections import Counter
from typing import Sequence

BOS = "<s>"


class NgramBackend:
    def __init__(self, order: int = 2, train_path: str | None = None, function_tokens: int = 3):
        if order < 1:
            raise ValueError(f"order must be >= 1, got {order}")
        self.order = order
        self.vocab: set[str] = set()
        self.ngram_counts: Counter = Counter()
        self.context_counts: Counter = Counter()
        self.token_counts: Counter = Counter()
        self.function_list: list[str] = []
        self._function_tokens = function_tokens
        if train_path:
            with open(train_path, encoding="utf-8") as handle:
                self.train(line.split() for line in handle)

    def train(self, sentences) -> None:
        for sentence in sentences:
            self.vocab.update(sentence)
            self.token_counts.update(sentence)
            history = (BOS,) * (self.order - 1)
            for token in sentence:
                self.ngram_counts[history + (token,)] += 1
                self.context_counts[history] += 1
                if self.order > 1:
                    history = history[1:] + (token,)
        ranked = sorted(self.token_counts.items(), key=lambda item: (-item[1], item[0]))
        self.function_list = [token for token, _ in ranked[: self._function_tokens]]

    def score(self, tokens: Sequence[str]) -> float:
        if not self.vocab:
            raise ValueError("backend has no training data")
        vocab_size = len(self.vocab)
        logprob = 0.0
        history = (BOS,) * (self.order - 1)
        for token in tokens:
            count = self.ngram_counts[history + (token,)]
            context = self.context_counts[history]
            logprob += math.log((count + 1) / (context + vocab_size))
            if self.order > 1:
                history = history[1:] + (token,)
        return logprob

    def refine_proposals(self, target: Sequence[str], prefix_len: int) -> list[tuple[str, ...]]:
        """Ordered, deduplicated edit proposals honouring the prefix."""
        target = tuple(target)
        proposals = [target]
        collapsed = _collapse_adjacent(target, prefix_len)
        if collapsed != target:
            proposals.append(collapsed)
        for token in self.function_list:
            inserted = target[:prefix_len] + (token,) + target[prefix_len:]
            if inserted not in proposals:
                proposals.append(inserted)
        return proposals


def _collapse_adjacent(tokens: tuple[str, ...], prefix_len: int) -> tuple[str, ...]:
    out = list(tokens[:prefix_len])
    for token in tokens[prefix_len:]:
        if out and token == out[-1]:
            continue
        out.append(token)
    return tuple(out)


def load_backend(descriptor: str, order: int, train_path: str | None) -> object:
    """Build a backend from its CLI descriptor.

    ``ngram`` builds the default model; ``module:pkg.mod:attr`` imports a
    factory and calls it with (order, train_path).
    """
    if descriptor == "ngram":
        return NgramBackend(order=order, train_path=train_path)
    if descriptor.startswith("module:"):
        spec = descriptor[len("module:") :]
        module_name, _, attr = spec.partition(":")
        if not module_name or not attr:
            raise ValueError(f"bad backend descriptor: {descriptor!r}")
        factory = getattr(importlib.import_module(module_name), attr)
        return factory(order, train_path)
    raise ValueError(f"unknown backend: {descriptor!r}")
