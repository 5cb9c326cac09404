"""Canonical discourse relation labels and dialogue context kinds.

The 12-label taxonomy and the 3 context kinds have a fixed canonical
column order that every other module (co-occurrence assembly, embedding
export, dummy coding) relies on.  Serialization uses lower_snake_case
tokens with exact-match lookup only.
"""

from __future__ import annotations

import enum


class RelationLabel(enum.IntEnum):
    """Discourse relation label; the integer value is the canonical column index."""

    ACKNOWLEDGEMENT = 0
    BACKGROUND = 1
    CLARIFICATION_QUESTION = 2
    COMMENT = 3
    CONTINUATION = 4
    CONTRAST = 5
    ELABORATION = 6
    EXPLANATION = 7
    NARRATION = 8
    QUESTION_ANSWER_PAIR = 9
    RESULT = 10
    OTHER = 11

    @property
    def token(self) -> str:
        """Lower snake-case token used in JSONL/CSV files."""
        return self.name.lower()

    @classmethod
    def from_token(cls, token: str) -> "RelationLabel":
        try:
            return _LABEL_BY_TOKEN[token]
        except KeyError:
            raise ValueError(f"unknown relation label {token!r}") from None


class ContextKind(enum.IntEnum):
    """Dialogue context of a discourse-unit pair; value is the canonical index."""

    SINGLE_TURN = 0
    WITHIN_SPEAKER = 1
    CROSS_SPEAKER = 2

    @property
    def token(self) -> str:
        return self.name.lower()

    @classmethod
    def from_token(cls, token: str) -> "ContextKind":
        try:
            return _CONTEXT_BY_TOKEN[token]
        except KeyError:
            raise ValueError(f"unknown context kind {token!r}") from None


LABELS: tuple[RelationLabel, ...] = tuple(RelationLabel)
CONTEXTS: tuple[ContextKind, ...] = tuple(ContextKind)

N_LABELS = len(LABELS)
N_CONTEXTS = len(CONTEXTS)

LABEL_TOKENS: tuple[str, ...] = tuple(lab.token for lab in LABELS)
CONTEXT_TOKENS: tuple[str, ...] = tuple(ctx.token for ctx in CONTEXTS)

_LABEL_BY_TOKEN = {lab.token: lab for lab in LABELS}
_CONTEXT_BY_TOKEN = {ctx.token: ctx for ctx in CONTEXTS}
