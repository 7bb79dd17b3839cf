"""Reserved wire-format glyphs shared by the tokenizer and the RAG layer.

The tokenizer must be able to encode retrieval calls and reference-augmented
prompts, so every glyph these formats can emit is reserved into the
vocabulary regardless of the training corpus.
"""

ELLIPSIS = "…"  # single reserved ellipsis character in truncated keys

RETRIEVE_PREFIX = "RETRIEVE("

REFERENCE_DELIMITER = "### REFERENCE ###"

KNOWLEDGE_TASK_TAGS = (
    "source-retrieval",
    "author-retrieval",
    "prev-sentence",
    "next-sentence",
    "entire-poem",
)

# Every character the retrieval-call grammar, task tags, or the reference
# delimiter can produce. Kept sorted for a deterministic vocabulary.
SENTINEL_GLYPHS = "".join(sorted(set(
    RETRIEVE_PREFIX + ");=" + ELLIPSIS + REFERENCE_DELIMITER + "\n"
    + "".join(KNOWLEDGE_TASK_TAGS)
)))
