"""scikit-learn style wrappers around the corpus transforms.

These make the steps usable with :class:`sklearn.pipeline.Pipeline`,
``get_params``/``set_params`` and ``clone``.  Hyperparameters are plain
constructor arguments and are only checked in :meth:`fit`.
"""
from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .constituency import NonProjectiveError, dep_to_const, write_bracketed
from .conllu import Treebank
from .evaluation import EvalReport, sample_corpus, score
from .overlay import OverlayMode, delexicalize, overlay_tags
from .projection import (ProjectionConfig, ProjectionMode, UNALIGNED_POLICIES,
                         collapse_dummy_rewrite, project_corpus, remove_dummy_sentences)
from .validation import check_bitext, check_choice, check_treebank


class AnnotationProjector(TransformerMixin, BaseEstimator):
    """Project source trees onto target sentences.

    ``transform`` takes a bitext (see :func:`treeproj.validation.check_bitext`)
    and returns a :class:`Treebank`; counters of the last run are in
    ``stats_``.
    """

    def __init__(self, mode="collapse_dummy", dummy_deprel="dummy",
                 unaligned_target_policy="attach_nearest", n_jobs=1):
        self.mode = mode
        self.dummy_deprel = dummy_deprel
        self.unaligned_target_policy = unaligned_target_policy
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        check_choice(self.unaligned_target_policy, UNALIGNED_POLICIES, "unaligned_target_policy")
        self.config_ = ProjectionConfig(ProjectionMode.coerce(self.mode), self.dummy_deprel,
                                        self.unaligned_target_policy)
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        items = check_bitext(X)
        tb, self.stats_ = project_corpus([i[0] for i in items], [i[1] for i in items],
                                         [i[2] for i in items], self.config_, threads=self.n_jobs)
        return tb


class DummyCollapser(TransformerMixin, BaseEstimator):
    """Collapse dummies; with ``drop_remaining`` also drop sentences that keep any."""

    def __init__(self, drop_remaining=False):
        self.drop_remaining = drop_remaining

    def fit(self, X=None, y=None):
        self.fitted_ = True
        return self

    def transform(self, X):
        check_is_fitted(self, "fitted_")
        tb = check_treebank(X)
        if self.drop_remaining:
            out, self.n_dropped_ = remove_dummy_sentences(tb)
            return out
        self.n_dropped_ = 0
        return Treebank([collapse_dummy_rewrite(s) for s in tb])


class TagOverlay(TransformerMixin, BaseEstimator):
    """Overlay tagger output; ``X`` is a ``(projected, tagged)`` pair."""

    def __init__(self, mode="morph_only", lenient=False):
        self.mode = mode
        self.lenient = lenient

    def fit(self, X=None, y=None):
        self.mode_ = OverlayMode.coerce(self.mode)
        return self

    def transform(self, X):
        check_is_fitted(self, "mode_")
        try:
            projected, tagged = X
        except (TypeError, ValueError):
            raise TypeError("X must be a (projected, tagged) pair of treebanks") from None
        out, self.n_skipped_ = overlay_tags(check_treebank(projected, "projected"),
                                            check_treebank(tagged, "tagged"), self.mode_, self.lenient)
        return out


class Delexicalizer(TransformerMixin, BaseEstimator):
    def fit(self, X=None, y=None):
        self.fitted_ = True
        return self

    def transform(self, X):
        check_is_fitted(self, "fitted_")
        return delexicalize(check_treebank(X))


class DepToConst(TransformerMixin, BaseEstimator):
    """Convert trees to constituency nodes (or bracketed strings).

    With ``skip_nonprojective`` non-projective sentences are left out and
    counted in ``n_skipped_``; otherwise they raise.
    """

    def __init__(self, skip_nonprojective=False, output="tree"):
        self.skip_nonprojective = skip_nonprojective
        self.output = output

    def fit(self, X=None, y=None):
        check_choice(self.output, ("tree", "bracketed"), "output")
        self.fitted_ = True
        return self

    def transform(self, X):
        check_is_fitted(self, "fitted_")
        out = []
        self.n_skipped_ = 0
        for sent in check_treebank(X):
            try:
                node = dep_to_const(sent)
            except NonProjectiveError:
                if not self.skip_nonprojective:
                    raise
                self.n_skipped_ += 1
                continue
            out.append(write_bracketed(node) if self.output == "bracketed" else node)
        return out


class CorpusSampler(TransformerMixin, BaseEstimator):
    def __init__(self, n=100_000, strategy="first_n", random_state=None):
        self.n = n
        self.strategy = strategy
        self.random_state = random_state

    def fit(self, X=None, y=None):
        check_choice(self.strategy, ("first_n", "random_seeded"), "strategy")
        if self.n < 0:
            raise ValueError("n must be >= 0")
        self.fitted_ = True
        return self

    def transform(self, X):
        check_is_fitted(self, "fitted_")
        return sample_corpus(X, self.n, self.strategy, self.random_state)


class AttachmentScorer(BaseEstimator):
    """``score(system, gold)`` returns LAS; ``report`` gives the full breakdown."""

    def __init__(self, include_punct=True, universal_deprels=False, match="order"):
        self.include_punct = include_punct
        self.universal_deprels = universal_deprels
        self.match = match

    def report(self, X, y) -> EvalReport:
        return score(check_treebank(X, "system"), check_treebank(y, "gold"), self.include_punct,
                     self.universal_deprels, self.match)

    def score(self, X, y) -> float:
        return self.report(X, y).las
