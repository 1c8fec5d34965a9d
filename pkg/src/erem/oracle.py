"""Pluggable anchor oracle: chain-of-thought prompt construction and a
deterministic file-replay backend.

The engine never talks to a live model.  It emits :class:`OracleQuery`
values; any backend that maps those to :class:`OracleAnswer` (accept /
replace / none) can plug in.  :class:`ReplayOracle` answers from a
pre-recorded table so runs stay hermetic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np

from .errors import FormatError

log = logging.getLogger(__name__)

TASK_DESCRIPTION = "task_description"
INITIAL_RELATION_ALIGN = "initial_relation_align"
INITIAL_ENTITY_ALIGN = "initial_entity_align"
DESCRIBE_ENTITY_BY_RELATION = "describe_entity_by_relation"
RETHINK_ENTITY = "rethink_entity"
DESCRIBE_RELATION_BY_ENTITY = "describe_relation_by_entity"
RETHINK_RELATION = "rethink_relation"

STEPS = (
    TASK_DESCRIPTION,
    INITIAL_RELATION_ALIGN,
    INITIAL_ENTITY_ALIGN,
    DESCRIBE_ENTITY_BY_RELATION,
    RETHINK_ENTITY,
    DESCRIBE_RELATION_BY_ENTITY,
    RETHINK_RELATION,
)
_CHOICE_STEPS = (
    INITIAL_RELATION_ALIGN,
    INITIAL_ENTITY_ALIGN,
    RETHINK_ENTITY,
    RETHINK_RELATION,
)

ACCEPT = "accept"
REPLACE = "replace"
NONE = "none"

_TASK_DESCRIPTION_TEXT = (
    "You are a good assistant to perform entity alignment and relation alignment. "
    "I will give a question and a list of candidate answers to this question. "
    "You need to choose the best answer from the candidate list based on its given "
    "description information and your own knowledge. "
    "If no answer from the candidate list, please answer None."
)


@dataclass(frozen=True)
class OracleQuery:
    """One request to the external adviser, fully rendered with names."""

    step: str
    subject_id: str
    subject_name: str
    candidates: tuple[tuple[str, str], ...] = ()  # (identifier, name)
    counterpart_name: str = ""
    subject_triples: tuple[tuple[str, str, str], ...] = ()
    counterpart_triples: tuple[tuple[str, str, str], ...] = ()
    aligned_names: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if self.step not in STEPS:
            raise ValueError(f"unknown oracle step {self.step!r}")
        if self.step in _CHOICE_STEPS and not self.candidates:
            raise ValueError(f"step {self.step} requires a non-empty candidate list")

    def candidate_ids(self) -> tuple[str, ...]:
        return tuple(ident for ident, _ in self.candidates)


@dataclass(frozen=True)
class OracleAnswer:
    """The adviser's verdict: accept the pair, replace it, or abstain."""

    verdict: str
    target_id: str | None = None

    def __post_init__(self):
        if self.verdict not in (ACCEPT, REPLACE, NONE):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == REPLACE and self.target_id is None:
            raise ValueError("replace verdict needs a target identifier")


class AnchorOracle(Protocol):
    def answer(self, query: OracleQuery) -> OracleAnswer: ...


def top_k_candidates(cost_row, k: int = 10) -> list[int]:
    """Indices of the k lowest costs, ascending, ties broken by index."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    row = np.asarray(cost_row, dtype=np.float64)
    order = np.lexsort((np.arange(row.shape[0]), row))
    return [int(i) for i in order[:k]]


def _single_quoted(names) -> str:
    return ", ".join(f"'{n}'" for n in names)


def _double_quoted(names) -> str:
    return ", ".join(f'"{n}"' for n in names)


def _double_quoted_wide_first(names) -> str:
    # the entity rethink list runs the first separator with two spaces
    quoted = [f'"{n}"' for n in names]
    if len(quoted) == 1:
        return quoted[0]
    return quoted[0] + ",  " + ", ".join(quoted[1:])


def _triples(triples) -> str:
    return "、".join(f"(“{h}”, “{r}”, “{t}”)" for h, r, t in triples)


def _require(query: OracleQuery, *, counterpart=False, triples=False, aligned=False) -> None:
    if counterpart and not query.counterpart_name:
        raise ValueError(f"step {query.step} requires counterpart_name")
    if triples and not (query.subject_triples and query.counterpart_triples):
        raise ValueError(f"step {query.step} requires triples for both sides")
    if aligned and not query.aligned_names:
        raise ValueError(f"step {query.step} requires aligned name pairs")


def build_prompt(query: OracleQuery) -> str:
    """Instantiate the step's template; identical queries give identical bytes."""
    names = [name for _, name in query.candidates]
    if query.step == TASK_DESCRIPTION:
        return _TASK_DESCRIPTION_TEXT
    if query.step == INITIAL_RELATION_ALIGN:
        return (
            f"Given relation “{query.subject_name}”, please choose same relation "
            f"from the candidate list  [{_single_quoted(names)}]. You must respond "
            f"with one corresponding choice at most. If no answer from the candidate "
            f"list, please answer None."
        )
    if query.step == INITIAL_ENTITY_ALIGN:
        return (
            f"Given entity “{query.subject_name}”, please choose a same entity from "
            f"the candidate list [{_double_quoted(names)}]. You must respond with one "
            f"corresponding choice at most. If no answer from the candidate list, "
            f"please answer None."
        )
    if query.step == DESCRIBE_ENTITY_BY_RELATION:
        _require(query, counterpart=True, triples=True, aligned=True)
        lines = [
            f"For “{query.subject_name}”, contains triples: {_triples(query.subject_triples)}",
            f"For “{query.counterpart_name}”, contains triples: {_triples(query.counterpart_triples)}.",
        ]
        lines += [f"“{a}” and “{b}” are the same relation." for a, b in query.aligned_names]
        return "\n".join(lines)
    if query.step == RETHINK_ENTITY:
        _require(query, counterpart=True)
        return (
            f"Is the entity alignment pair (“{query.subject_name}”, "
            f"“{query.counterpart_name}”) satisfactory enough? (YES or NO ). "
            f"If response No, reselect entity from entity candid list "
            f"[{_double_quoted_wide_first(names)}]."
        )
    if query.step == DESCRIBE_RELATION_BY_ENTITY:
        _require(query, counterpart=True, triples=True, aligned=True)
        lines = [
            f"For “{query.subject_name}”, contains triples: {_triples(query.subject_triples)};",
            f"For “{query.counterpart_name}”, contains triples: {_triples(query.counterpart_triples)};",
        ]
        lines += [f"“{a}” and “{b}” are the same entity." for a, b in query.aligned_names]
        return "\n".join(lines)
    if query.step == RETHINK_RELATION:
        _require(query, counterpart=True)
        return (
            f"Is the relation alignment pair (“{query.subject_name}”, "
            f"“{query.counterpart_name}”) satisfactory enough? (YES or NO ). "
            f"If response No, reselect relation from relation candid list "
            f"[ {_single_quoted(names)}]."
        )
    raise ValueError(f"unknown oracle step {query.step!r}")


@dataclass(frozen=True)
class ReplayOracle:
    """Answers looked up from a pre-recorded ``(step, subject)`` table.

    Store lines are ``step<TAB>subject_id<TAB>verdict`` with verdict one
    of ``accept``, ``none``, or ``replace:<target_id>``.  Unknown keys
    answer ``none``; a replacement target outside the query's candidate
    list is dropped (with a warning) rather than violating the contract.
    """

    answers: dict[tuple[str, str], OracleAnswer] = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str | Path) -> "ReplayOracle":
        answers: dict[tuple[str, str], OracleAnswer] = {}
        with open(path, encoding="utf-8") as fh:
            for line_no, raw_line in enumerate(fh, start=1):
                line = raw_line.rstrip("\n").rstrip("\r")
                if not line:
                    continue
                cols = line.split("\t")
                if len(cols) != 3:
                    raise FormatError(f"{path}: line {line_no}: expected 3 columns, got {len(cols)}")
                step, subject, verdict = cols
                if step not in STEPS:
                    raise FormatError(f"{path}: line {line_no}: unknown step {step!r}")
                if verdict == ACCEPT:
                    answers[(step, subject)] = OracleAnswer(ACCEPT)
                elif verdict == NONE:
                    answers[(step, subject)] = OracleAnswer(NONE)
                elif verdict.startswith("replace:"):
                    answers[(step, subject)] = OracleAnswer(REPLACE, verdict[len("replace:"):])
                else:
                    raise FormatError(f"{path}: line {line_no}: unknown verdict {verdict!r}")
        return cls(answers)

    def answer(self, query: OracleQuery) -> OracleAnswer:
        reply = self.answers.get((query.step, query.subject_id))
        if reply is None:
            return OracleAnswer(NONE)
        if reply.verdict == REPLACE and reply.target_id not in query.candidate_ids():
            log.warning(
                "replay answer for (%s, %s) names %r outside the candidate list; ignoring",
                query.step, query.subject_id, reply.target_id,
            )
            return OracleAnswer(NONE)
        return reply


def replay_oracle_answer(store: ReplayOracle, query: OracleQuery) -> OracleAnswer:
    return store.answer(query)


def write_prompt_files(out_dir: str | Path, queries) -> list[dict]:
    """One UTF-8 prompt file per query; returns index records."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    index: list[dict] = []
    for pos, query in enumerate(queries):
        name = f"{pos:05d}_{query.step}.txt"
        (out / name).write_text(build_prompt(query) + "\n", encoding="utf-8")
        index.append(
            {
                "file": name,
                "step": query.step,
                "subject_id": query.subject_id,
                "subject_name": query.subject_name,
                "candidates": list(query.candidate_ids()),
            }
        )
    return index
