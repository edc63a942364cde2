"""Post-processing of privacy-perturbed peer-review histograms using public
per-paper weight multisets."""

from .bounds import BoundsVector, compute_bounds, enumerate_tuples, chain_lengths
from .core import TransformMode, apply_weight_transform, sorted_mean_weights, sse
from .estimator import BaselineProjector, BoundsProjector, check_public_weights
from .exceptions import BoundsError, ConvergenceError, InstanceError, InstanceTooLargeError
from .instance import Assignment, PublicWeights, public_view, sample_assignment, validate_instance
from .privacy import NoiseMechanism, noisy_release
from .project import ProjectionProblem, isotonic_project, project_baseline, project_intersection

__version__ = "0.1.0"

__all__ = [
    "Assignment", "BaselineProjector", "BoundsError", "BoundsProjector", "BoundsVector",
    "ConvergenceError", "InstanceError", "InstanceTooLargeError", "NoiseMechanism",
    "ProjectionProblem", "PublicWeights", "TransformMode", "apply_weight_transform",
    "chain_lengths", "check_public_weights", "compute_bounds", "enumerate_tuples",
    "isotonic_project", "noisy_release", "project_baseline", "project_intersection",
    "public_view", "sample_assignment", "sorted_mean_weights", "sse", "validate_instance",
]
