"""Synthetic labelled scenes: raycast rendering, sequences, dataset builds."""

from .dataset import build_dataset, generate_sample
from .primitives import FAMILIES, bounding_radius, intersect
from .render import Sample, SequenceRender, object_hit_maps, render, render_sequence
from .scene import (FAR_PLANE, TEXTURES, ObjectSpec, SceneSpec, SequenceSpec,
                    random_object, random_scene, random_trajectory,
                    sample_params, texture_pattern, value_noise)

__all__ = [
    "FAMILIES", "TEXTURES", "FAR_PLANE",
    "ObjectSpec", "SceneSpec", "SequenceSpec", "Sample", "SequenceRender",
    "intersect", "bounding_radius", "sample_params", "texture_pattern",
    "value_noise", "random_object", "random_scene", "random_trajectory",
    "render", "render_sequence", "object_hit_maps",
    "build_dataset", "generate_sample",
]
