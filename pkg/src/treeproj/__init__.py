"""Cross-lingual treebank synthesis by dependency annotation projection."""

__version__ = "0.1.0"

from .alignment import AlignmentError, LinkClassification, SentenceAlignment, classify, parse_alignment_line
from .conllu import (ConlluError, DepSentence, Token, Treebank, Violation, parse_conllu, read_conllu,
                     validate, write_conllu)
from .constituency import ConstituencyNode, check_projectivity, dep_to_const, write_bracketed
from .evaluation import EvalReport, StatsReport, corpus_stats, sample_corpus, score
from .overlay import OverlayMode, concat_treebanks, delexicalize, overlay_tags
from .projection import (ProjectionConfig, ProjectionMode, ProjectionStats, collapse_dummy_rewrite,
                         project_corpus, project_sentence)
from .estimators import (AnnotationProjector, AttachmentScorer, CorpusSampler, Delexicalizer,
                         DepToConst, DummyCollapser, TagOverlay)
