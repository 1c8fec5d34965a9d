"""Scikit-learn style front door for the alignment engine.

The estimator stores its constructor parameters verbatim (so
``get_params``/``set_params``/``clone`` behave normally), validates them
into an :class:`~erem.em.EremConfig` at fit time, and exposes the run's
outputs as fitted attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .em import EremConfig, GraphBundle, run_alignment
from .metrics import GroundTruth, rank_targets
from .oracle import AnchorOracle


class EntityRelationAligner(BaseEstimator):
    """Joint entity/relation aligner over a pair of graph bundles.

    Parameters mirror the run configuration.  After :meth:`fit`, the
    final anchor sets, transport plans, assembled costs, and the
    per-iteration trace are available as ``*_`` attributes.
    """

    def __init__(
        self,
        iterations: int = 8,
        sinkhorn_reg: float = 0.1,
        epsilon: float = 1e-5,
        lam: float = 1.0,
        alpha: float = 2.0,
        init_threshold: float = 0.3,
        disable_e_enhancement: bool = False,
        disable_m_enhancement: bool = False,
        max_sinkhorn_iters: int = 1000,
        sinkhorn_tol: float = 1e-9,
    ):
        self.iterations = iterations
        self.sinkhorn_reg = sinkhorn_reg
        self.epsilon = epsilon
        self.lam = lam
        self.alpha = alpha
        self.init_threshold = init_threshold
        self.disable_e_enhancement = disable_e_enhancement
        self.disable_m_enhancement = disable_m_enhancement
        self.max_sinkhorn_iters = max_sinkhorn_iters
        self.sinkhorn_tol = sinkhorn_tol

    def _config(self) -> EremConfig:
        return EremConfig(**self.get_params())

    def fit(
        self,
        source: GraphBundle,
        target: GraphBundle,
        oracle: AnchorOracle | None = None,
        entity_truth: GroundTruth | None = None,
        relation_truth: GroundTruth | None = None,
    ) -> "EntityRelationAligner":
        result = run_alignment(
            self._config(), source, target,
            oracle=oracle, entity_truth=entity_truth, relation_truth=relation_truth,
        )
        self.result_ = result
        self.entity_anchors_ = result.entity_anchors
        self.relation_anchors_ = result.relation_anchors
        self.entity_plan_ = result.entity_plan
        self.relation_plan_ = result.relation_plan
        self.entity_cost_ = result.entity_cost
        self.relation_cost_ = result.relation_cost
        self.trace_ = result.trace
        self.n_iter_ = len(result.trace)
        return self

    def _best_targets(self, plan, cost) -> np.ndarray:
        return np.array(
            [rank_targets(plan, cost, i)[0] for i in range(plan.shape[0])],
            dtype=np.int64,
        )

    def predict_entities(self) -> np.ndarray:
        """Best target entity index for every source entity."""
        check_is_fitted(self, "entity_plan_")
        return self._best_targets(self.entity_plan_, self.entity_cost_)

    def predict_relations(self) -> np.ndarray:
        """Best target relation index for every source relation."""
        check_is_fitted(self, "relation_plan_")
        return self._best_targets(self.relation_plan_, self.relation_cost_)
