"""Prompt templates and demonstration ordering for many-shot inference.

The three built-in templates (summarization, multiple-choice, classification
with an inlined class list) are versioned text; golden-file tests pin them
byte-for-byte because silent prompt drift changes model behavior.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import SOURCE_HUMAN, SOURCE_PSEUDO, Sample
from .influence import SelectionResult
from .labeling import CandidatePool

TASK_SUMMARIZATION = "summarization"
TASK_MULTIPLE_CHOICE = "multiple_choice"
TASK_CLASSIFICATION = "classification"
TASK_KINDS = (TASK_SUMMARIZATION, TASK_MULTIPLE_CHOICE, TASK_CLASSIFICATION)

GROUP_LABELED_FIRST = "labeled_first"
GROUP_PSEUDO_FIRST = "pseudo_first"
WITHIN_BY_INFLUENCE_ASCENDING = "by_influence_ascending"
WITHIN_BY_ID = "by_id"


class PromptError(ValueError):
    pass


@dataclass(frozen=True)
class TaskTemplate:
    """Instruction header, per-demo block, and query lead-in for one task.

    ``demo_block`` has ``{text}``/``{label}`` slots; ``query_block`` has a
    ``{query}`` slot. For classification the class list is inlined into the
    lead-in at construction time.
    """

    task_kind: str
    header: str
    demo_block: str
    query_block: str
    classes: tuple[str, ...] | None = None


_SUMMARIZATION = TaskTemplate(
    task_kind=TASK_SUMMARIZATION,
    header=(
        "You are an expert in article summarization. I am going to give you "
        "some examples of article and its summary in fluent English. Here are "
        "several examples."
    ),
    demo_block="Article: {text}\nSummary: {label}",
    query_block=(
        "I am going to provide another article and I want you to summarize it. "
        "Give only the summary, and no extra commentary, formatting, or "
        "chattiness.\n\nArticle: {query}"
    ),
)

_MULTIPLE_CHOICE = TaskTemplate(
    task_kind=TASK_MULTIPLE_CHOICE,
    header=(
        "You are an expert in multiple-choice question answering tasks. I am "
        "going to give you some examples in a multiple-choice question "
        "answering format. Here are several examples."
    ),
    demo_block="Question: {text}\nAnswer: {label}",
    query_block=(
        "I am going to provide another question and I want you to predict its "
        "answer. Give only the choice the correct answer by selecting one of "
        "the options (e.g., '(A)', '(B)').\n\nQuestion: {query}"
    ),
)

_CLASSIFICATION_HEADER = (
    "Given a customer service query, please predict the intent of the query. "
    "Here are several examples."
)
_CLASSIFICATION_QUERY_BLOCK = (
    "I am going to provide another customer service query and I want you to "
    "predict the intent of the query. Give only the intent of the query, and "
    "no extra commentary, formatting, or chattiness. You can only make "
    "prediction from the following categories: {classes}\n\nservice query: {query}"
)


def default_template(task_kind: str, classes: tuple[str, ...] | None = None) -> TaskTemplate:
    if task_kind == TASK_SUMMARIZATION:
        return _SUMMARIZATION
    if task_kind == TASK_MULTIPLE_CHOICE:
        return _MULTIPLE_CHOICE
    if task_kind == TASK_CLASSIFICATION:
        if not classes:
            raise PromptError("classification template needs a class list")
        return TaskTemplate(
            task_kind=TASK_CLASSIFICATION,
            header=_CLASSIFICATION_HEADER,
            demo_block="service query: {text}\nintent category: {label}",
            query_block=_CLASSIFICATION_QUERY_BLOCK.replace("{classes}", ", ".join(classes)),
            classes=tuple(classes),
        )
    raise PromptError(f"unknown task kind {task_kind!r}; expected one of {TASK_KINDS}")


@dataclass(frozen=True)
class OrderPolicy:
    """How demonstrations are arranged in the prompt.

    The default puts human-labeled demos first and, within each group,
    ascending influence so the strongest demo sits closest to the query.
    """

    group_order: str = GROUP_LABELED_FIRST
    within_group: str = WITHIN_BY_INFLUENCE_ASCENDING


def order_demos(
    selection: SelectionResult, pool: CandidatePool, policy: OrderPolicy
) -> list[Sample]:
    """Arrange the selected pool entries for prompting.

    Entries without a per-query score (e.g. the fixed-demonstration mode)
    sort as score 0, so influence ordering degrades to id order there.
    """
    by_id = {entry.id: entry for entry in pool.entries}
    missing = [i for i in selection.chosen if i not in by_id]
    if missing:
        raise PromptError(f"selected ids not in pool: {', '.join(missing)}")
    chosen = [by_id[i] for i in selection.chosen]
    human = [e for e in chosen if e.source == SOURCE_HUMAN]
    pseudo = [e for e in chosen if e.source == SOURCE_PSEUDO]

    def arranged(group: list[Sample]) -> list[Sample]:
        if policy.within_group == WITHIN_BY_ID:
            return sorted(group, key=lambda e: e.id)
        if policy.within_group == WITHIN_BY_INFLUENCE_ASCENDING:
            def key(entry: Sample) -> tuple[float, str]:
                record = selection.scores.get(entry.id)
                return (record.score if record else 0.0, entry.id)
            return sorted(group, key=key)
        raise PromptError(f"unknown within-group order {policy.within_group!r}")

    if policy.group_order == GROUP_LABELED_FIRST:
        return arranged(human) + arranged(pseudo)
    if policy.group_order == GROUP_PSEUDO_FIRST:
        return arranged(pseudo) + arranged(human)
    raise PromptError(f"unknown group order {policy.group_order!r}")


def render_prompt(template: TaskTemplate, demos: list[Sample], query: str) -> str:
    """Instruction header, one block per demo, then the query lead-in."""
    parts = [template.header]
    for demo in demos:
        parts.append(
            template.demo_block.replace("{text}", demo.text).replace("{label}", demo.label or "")
        )
    parts.append(template.query_block.replace("{query}", query))
    return "\n\n".join(parts)
