"""Granular-ball fuzzy SVM: purity-constrained ball covers of labeled data,
fuzzy memberships, and linear classifiers trained on balls instead of points
by a particle-swarm solver, with a chance-constrained fuzzy-label variant.

The HTTP layer lives in gbfsvm.service and is imported on demand so that
library use stays light.
"""

__version__ = "0.1.0"

from .data_io import (Dataset, DatasetError, NoiseSpec, inject_label_noise,  # noqa: F401
                      load_csv, normalize_minmax, split)
from .membership import (ClassGeometry, fit_class_geometry, fuzzify_dataset,  # noqa: F401
                         membership_value, membership_values)
from .granular_ball import (BallGenConfig, FuzzyBallSet, GranularBall,  # noqa: F401
                            attach_membership_from_function,
                            attach_membership_from_samples, generate_balls)
from .pso import PsoConfig, PsoResult, best_of_runs, optimize  # noqa: F401
from .svm_core import (BallTrainingSet, DegenerateSolution, DualSolution,  # noqa: F401
                       ModelConfig, SolverFailure, accuracy, gbfsvm_dual_objective,
                       make_pso_config, predict, predict_batch, train)
from .tfn import (TfnBallTrainingSet, TfnDualSolution, TriangularFuzzyNumber,  # noqa: F401
                  chance_leq_zero, clear_constraint_coefficient,
                  fuzzy_label_from_membership, make_tfn_pso_config, pos_leq_zero,
                  tfn_dual_objective, train_tfn)
from .bench import (CellResult, ExperimentConfig, ExperimentReport,  # noqa: F401
                    load_dataset, render_csv, render_markdown, run_experiment)
from .pipeline import make_balls, train_model  # noqa: F401
from . import synth  # noqa: F401
