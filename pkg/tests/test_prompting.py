import pytest
from helpers import demo_blocks, sample

from maple.influence import InfluenceRecord, SelectionResult
from maple.labeling import CandidatePool
from maple.prompting import (
    OrderPolicy,
    PromptError,
    default_template,
    order_demos,
    render_prompt,
)


@pytest.fixture(scope="module")
def pool():
    entries = (
        sample("h1", "human one", "y1", "human"),
        sample("h2", "human two", "y2", "human"),
        sample("p1", "pseudo one", "(A)", "pseudo"),
        sample("p2", "pseudo two", "(B)", "pseudo"),
        sample("p3", "pseudo three", "(C)", "pseudo"),
    )
    return CandidatePool(entries, {})


def selection_with_scores(pool, scores: dict[str, float]):
    records = {
        sid: InfluenceRecord(i, sid, score, None, None, 1)
        for i, (sid, score) in enumerate(scores.items())
    }
    chosen = sorted(scores, key=lambda s: (-scores[s], s))
    return SelectionResult(chosen, records, False)


class TestOrderDemos:
    def test_default_groups_human_before_pseudo(self, pool):
        selection = SelectionResult(["p2", "h2", "p1", "h1", "p3"], {}, False)
        ordered = order_demos(selection, pool, OrderPolicy())
        assert [d.source for d in ordered] == ["human", "human", "pseudo", "pseudo", "pseudo"]

    def test_pseudo_first_reverses_group_order(self, pool):
        selection = SelectionResult(["h1", "p1"], {}, False)
        ordered = order_demos(selection, pool, OrderPolicy(group_order="pseudo_first"))
        assert [d.id for d in ordered] == ["p1", "h1"]

    def test_empty_pseudo_group(self, pool):
        selection = SelectionResult(["h2", "h1"], {}, False)
        ordered = order_demos(selection, pool, OrderPolicy())
        assert [d.id for d in ordered] == ["h1", "h2"]

    def test_influence_ascending_puts_strongest_last(self, pool):
        selection = selection_with_scores(pool, {"p1": -0.2, "p2": -0.9, "p3": -0.5})
        ordered = order_demos(selection, pool, OrderPolicy())
        assert [d.id for d in ordered] == ["p2", "p3", "p1"]

    def test_by_id_ordering(self, pool):
        selection = selection_with_scores(pool, {"p3": -0.1, "p1": -0.9})
        ordered = order_demos(selection, pool, OrderPolicy(within_group="by_id"))
        assert [d.id for d in ordered] == ["p1", "p3"]

    def test_unknown_id_rejected(self, pool):
        with pytest.raises(PromptError, match="ghost"):
            order_demos(SelectionResult(["ghost"], {}, False), pool, OrderPolicy())

    def test_unknown_policy_values(self, pool):
        selection = SelectionResult(["h1"], {}, False)
        with pytest.raises(PromptError, match="group order"):
            order_demos(selection, pool, OrderPolicy(group_order="sideways"))
        with pytest.raises(PromptError, match="within-group"):
            order_demos(selection, pool, OrderPolicy(within_group="sideways"))


class TestRenderPrompt:
    def test_golden_files_byte_exact(self, golden_inputs, goldens_dir):
        cases = {
            "summarization": (
                default_template("summarization"),
                golden_inputs.SUMMARIZATION_DEMOS,
                golden_inputs.SUMMARIZATION_QUERY,
            ),
            "multiple_choice": (
                default_template("multiple_choice"),
                golden_inputs.MULTIPLE_CHOICE_DEMOS,
                golden_inputs.MULTIPLE_CHOICE_QUERY,
            ),
            "classification": (
                default_template("classification", golden_inputs.CLASSIFICATION_CLASSES),
                golden_inputs.CLASSIFICATION_DEMOS,
                golden_inputs.CLASSIFICATION_QUERY,
            ),
        }
        for name, (template, demos, query) in cases.items():
            for shots in (0, 3):
                rendered = render_prompt(template, demos[:shots], query)
                golden = (goldens_dir / f"prompt_{name}_{shots}shot.txt").read_bytes()
                assert rendered.encode("utf-8") == golden, f"{name} {shots}-shot drifted"

    def test_instruction_strings_present(self):
        summ = render_prompt(default_template("summarization"), [], "the article")
        assert "Give only the summary, and no extra commentary" in summ
        mc = render_prompt(default_template("multiple_choice"), [], "q?")
        assert "selecting one of the options (e.g., '(A)', '(B)')" in mc

    def test_classification_inlines_class_list(self):
        template = default_template("classification", ("alpha", "beta", "gamma"))
        prompt = render_prompt(template, [], "q")
        assert "only make prediction from the following categories: alpha, beta, gamma" in prompt

    def test_classification_requires_classes(self):
        with pytest.raises(PromptError, match="class list"):
            default_template("classification")

    def test_unknown_task_kind(self):
        with pytest.raises(PromptError, match="task kind"):
            default_template("poetry")

    def test_zero_demos_is_instruction_plus_query_only(self):
        template = default_template("multiple_choice")
        prompt = render_prompt(template, [], "Which way is up?")
        assert demo_blocks(prompt) == 0
        assert prompt.startswith(template.header)
        assert prompt.endswith("Question: Which way is up?")

    def test_demo_count_matches_selection(self, pool):
        template = default_template("multiple_choice")
        demos = list(pool.entries)
        for n in range(len(demos) + 1):
            assert demo_blocks(render_prompt(template, demos[:n], "q")) == n

    def test_rendering_is_injective_in_demo_order(self, pool):
        template = default_template("multiple_choice")
        a, b = pool.entries[0], pool.entries[2]
        assert render_prompt(template, [a, b], "q") != render_prompt(template, [b, a], "q")

    def test_one_demo_block_precedes_target(self):
        template = default_template("multiple_choice")
        prompt = render_prompt(template, [sample("d", "2+2?", "(B)")], "TARGET")
        first_block = prompt.index("Question: 2+2?\nAnswer: (B)")
        target = prompt.index("Question: TARGET")
        assert first_block < target
