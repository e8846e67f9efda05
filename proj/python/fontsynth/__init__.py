"""Dataset synthesis and font-fidelity evaluation for image-conditioned font customization."""

from ._core import (
    FontAsset,
    FontsynthError,
    align_max_iou,
    augment_prompt,
    build_dataset,
    clip_score,
    compose_scene,
    cosine_similarity,
    evaluate,
    fit_quad_transform,
    font_similarity,
    hog_descriptor,
    hog_similarity,
    iou,
    levenshtein,
    load_font,
    ms_ssim,
    ned,
    quality_filter,
    render_word,
    sample_color,
    sample_words,
    siglip_score,
    tight_bbox,
    word_acc,
)


def error_code(exc: FontsynthError) -> str:
    """The error kind, e.g. "MissingGlyph"."""
    return str(exc).split(":", 1)[0]


__all__ = [name for name in dir() if not name.startswith("_")]
