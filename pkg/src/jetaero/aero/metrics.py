"""Accuracy metrics shared by fitting, training and evaluation."""
import numpy as np

from jetaero.errors import DimensionMismatchError


def rel_err(predicted: np.ndarray, reference: np.ndarray) -> float:
    """
    Relative error ||P - Y||_F / ||Y||_F over a whole sample set.

    Returns 0 when both are zero and inf when only the reference is zero.
    """
    predicted = np.asarray(predicted, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if predicted.shape != reference.shape:
        raise DimensionMismatchError(f"shape mismatch: {predicted.shape} vs {reference.shape}")
    denominator = np.linalg.norm(reference)
    numerator = np.linalg.norm(predicted - reference)
    if denominator == 0.0:
        return 0.0 if numerator == 0.0 else float("inf")
    return float(numerator / denominator)
