"""Section-aware extractive summarization of scientific papers."""

__version__ = "0.1.0"

from .analysis import ContributionRow, heading_frequency, section_contribution
from .assemble import SummaryDraft, WeightConfig, assemble_longsumm, lead150_laysumm
from .budget import BudgetAllocation, SectionOverlap, allocate, compute_weights, overlap_source
from .extract import (
    ScoredSentence,
    ScorerSpec,
    greedy_oracle,
    load_external_scores,
    score_centrality,
    score_lead,
    select_topk,
)
from .ingest import Paper, Section, Sentence, normalize_heading, parse_paper, segment_sentences
from .postproc import CleanupReport, postprocess, strip_citations, strip_math, strip_noneng
from .rouge import RougeConfig, RougeScore, rouge_l, rouge_n, score_all, tokenize
