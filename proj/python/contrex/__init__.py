"""Contrastive explanations along latent attribute paths.

Images are 2-D float64 numpy arrays in [0, 1]; latents are 1-D arrays.
"""

from ._core import (
    AttributeVector,
    Classifier,
    Generator,
    PlantedGenerator,
    SicCurve,
    TraversalPath,
    build_path,
    classify,
    contrastive_saliency,
    directional_diff,
    gaussian_blur,
    generate,
    input_gradient,
    integrated_gradients,
    make_lesion_dataset,
    make_planted_generator,
    mean_threshold,
    plain_gradient,
    retrieve_contrastives,
    sefa_directions,
    select_attribute,
    sic_curve,
    smoothgrad,
    train_classifier,
)

__all__ = [
    "AttributeVector",
    "Classifier",
    "Generator",
    "PlantedGenerator",
    "SicCurve",
    "TraversalPath",
    "build_path",
    "classify",
    "contrastive_saliency",
    "directional_diff",
    "gaussian_blur",
    "generate",
    "input_gradient",
    "integrated_gradients",
    "make_lesion_dataset",
    "make_planted_generator",
    "mean_threshold",
    "plain_gradient",
    "retrieve_contrastives",
    "sefa_directions",
    "select_attribute",
    "sic_curve",
    "smoothgrad",
    "train_classifier",
]
