"""VQA pair generation, distractor sampling, and dataset splits."""

from .generate import (
    VqaGenerator,
    derive_seed,
    gen_low_level_distractors,
    render_timestamp,
)
from .pools import AnnotationPools
from .split import Split, SplitSpec, build_split, materialize_media, split_manifest, write_dataset
from .templates import PROMPTS, SYMBOL_CODE_FORMAT, VISUAL_GUIDANCE_PROMPTS, numbered_subtasks
from .types import (
    BENCHMARK_TYPES,
    CLOSED_TYPES,
    OPEN_TYPES,
    OPTION_LETTERS,
    CotAnswer,
    QuestionType,
    VqaPair,
    letter_for,
    option_index,
    pair_from_dict,
    pair_to_dict,
    read_pairs_jsonl,
    write_pairs_jsonl,
)

__all__ = [
    "AnnotationPools",
    "BENCHMARK_TYPES",
    "CLOSED_TYPES",
    "CotAnswer",
    "OPEN_TYPES",
    "OPTION_LETTERS",
    "PROMPTS",
    "QuestionType",
    "SYMBOL_CODE_FORMAT",
    "Split",
    "SplitSpec",
    "VISUAL_GUIDANCE_PROMPTS",
    "VqaGenerator",
    "VqaPair",
    "build_split",
    "derive_seed",
    "gen_low_level_distractors",
    "letter_for",
    "materialize_media",
    "numbered_subtasks",
    "option_index",
    "pair_from_dict",
    "pair_to_dict",
    "read_pairs_jsonl",
    "render_timestamp",
    "split_manifest",
    "write_dataset",
    "write_pairs_jsonl",
]
