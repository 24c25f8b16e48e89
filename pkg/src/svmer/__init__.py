"""Kernel SVM, Gaussian Naive Bayes and evidential-reasoning risk fusion."""

from .assess import BeliefMapping, IndexInput, RiskAssessment, SvmErPipeline, assess, map_decision_to_beliefs
from .data import (
    CsvSchema, Dataset, Sample, ScalingParams, SplitSpec, apply_scaling, fit_scaling, load_csv,
    load_dataset, split,
)
from .er import (
    AssessmentIndex, GradeSet, MassDistribution, assign_masses, combine, final_beliefs, risk_score,
)
from .evaluation import ConfusionMatrix, MetricsReport, confusion, metrics, run_overhead, run_table1
from .kernels import GramMatrix, KernelSpec, eval_kernel, gram_matrix
from .naive_bayes import GaussianNbModel, nb_fit, nb_predict
from .svm import SvmModel, TrainConfig, TrainTrace, decision_value, geometric_margin, predict, train

__version__ = "0.1.0"
