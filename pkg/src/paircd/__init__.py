"""paircd: causal discovery from incomplete data.

A conditional-independence test that combines multiple imputation with a
paired, cross-validated model comparison; a PC search that uses it as a
cached-imputation oracle; Fisher-Z baselines; and a synthetic benchmark
harness (data generators, missingness injectors, graph metrics).
"""

from .ci_test import (CITestConfig, CITestResult, EarlyStopConfig, FoldLoss,
                      VarianceEstimator, barnard_rubin_df, bayle_variance,
                      fast_config, general_config, nadeau_bengio_variance,
                      pair_ci)
from .data_model import (ColumnKind, ImputedStack, ImputerId,
                         IncompleteDataset, from_array, infer_kinds,
                         load_csv, save_csv)
from .discovery import (DiscoveryConfig, DISCOVERY_METHODS, dag_to_cpdag,
                        discover, meek_rules, orient_v_structures, pc_skeleton)
from .graphs import MixedGraph, d_separated, load_graph, save_graph
from .imputation import (BayesianRidgeFit, MiceConfig, build_cache,
                         marginal_impute, mean_impute, mice_impute)
from .learners import LearnerConfig, Variant, derive_max_features, fit, loss, predict
from .permutation import PermutationPlan, build_plan, compute_knn, conditional_permute

__all__ = [
    "CITestConfig", "CITestResult", "ColumnKind", "DiscoveryConfig",
    "DISCOVERY_METHODS", "EarlyStopConfig", "FoldLoss", "ImputedStack",
    "ImputerId", "IncompleteDataset", "BayesianRidgeFit", "LearnerConfig",
    "MiceConfig", "MixedGraph", "PermutationPlan", "Variant",
    "VarianceEstimator", "barnard_rubin_df", "bayle_variance", "build_cache",
    "build_plan", "compute_knn", "conditional_permute", "d_separated",
    "dag_to_cpdag", "derive_max_features", "discover", "fast_config", "fit",
    "from_array", "general_config", "infer_kinds", "load_csv", "load_graph",
    "loss", "marginal_impute", "mean_impute", "meek_rules", "mice_impute",
    "nadeau_bengio_variance", "orient_v_structures", "pair_ci", "pc_skeleton",
    "predict", "save_csv", "save_graph",
]

__version__ = "0.1.0"
