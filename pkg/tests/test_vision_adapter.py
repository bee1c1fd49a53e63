"""
Tests for patch projection, per-view compression and sequence assembly.
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src.core.exceptions import ArityError, ConfigError, IndexRangeError
from src.domain.vocabulary import VIEW_ORDER, View
from src.simworld.rasterizer import C_VIS, N_PATCHES, rasterize_views
from src.vision_adapter.adapter import (
    TEXT_TAG,
    assemble_multiview_sequence,
    attention_weights,
    compress_view_tokens,
    encode_views,
    project_patch_features,
    sequence_tags,
)
from src.vision_adapter.params import M_IMG_GRID, AdapterConfig, AdapterParams
from tests.helpers import make_agent, make_scene


@pytest.fixture(scope="module")
def params():
    return AdapterParams.initialize(AdapterConfig(width=64, heads=4, m_img=8), seed=0)


def _projected(params, seed=0):
    rng = np.random.default_rng(seed)
    return project_patch_features(rng.normal(size=(N_PATCHES, C_VIS)), params)


def test_zero_patches_compress_to_zero_tokens(params):
    projected = project_patch_features(np.zeros((N_PATCHES, C_VIS)), params)
    assert_array_equal(projected, np.zeros((N_PATCHES, 64)))
    tokens = compress_view_tokens(0, projected, params)
    assert_allclose(tokens, np.zeros((8, 64)), atol=1e-12)


def test_projection_shape(params):
    grid = rasterize_views(make_scene(agents=[make_agent(1)]))[0]
    assert project_patch_features(grid, params).shape == (N_PATCHES, 64)


def test_compression_cannot_expand():
    with pytest.raises(ConfigError):
        AdapterConfig(m_img=N_PATCHES + 1)


def test_compression_rejects_bad_view_index(params):
    with pytest.raises(IndexRangeError):
        compress_view_tokens(6, _projected(params), params)


def test_identical_patches_give_identical_tokens(params):
    projected = np.tile(_projected(params)[:1], (N_PATCHES, 1))
    tokens = compress_view_tokens(2, projected, params)
    weights = attention_weights(2, projected, params)
    assert tokens.shape == (8, 64)
    assert_allclose(tokens, np.tile(tokens[:1], (8, 1)))
    assert_allclose(weights, np.full(weights.shape, 1.0 / N_PATCHES))


def test_compression_ignores_patch_order(params):
    projected = _projected(params)
    order = np.random.default_rng(5).permutation(N_PATCHES)
    assert_array_equal(compress_view_tokens(1, projected, params), compress_view_tokens(1, projected[order], params))


def test_attention_rows_sum_to_one(params):
    weights = attention_weights(0, _projected(params), params)
    assert weights.shape == (4, 8, N_PATCHES)
    assert_allclose(weights.sum(axis=-1), np.ones((4, 8)))


def test_views_use_their_own_queries(params):
    projected = _projected(params)
    assert not np.allclose(compress_view_tokens(0, projected, params), compress_view_tokens(3, projected, params))


def test_sequence_layout_and_length():
    params = AdapterParams.initialize(AdapterConfig(width=32, heads=4, m_img=16), seed=1)
    rng = np.random.default_rng(0)
    seq = assemble_multiview_sequence(rng.normal(size=(6, 16, 32)), rng.normal(size=(4, 32)), params)
    assert len(seq) == 106
    assert seq.tokens.shape == (106, 32)
    assert seq.tags[0] == "view:FRONT"
    assert seq.tags[1:17] == ("image:FRONT",) * 16
    assert seq.tags[-4:] == (TEXT_TAG,) * 4


def test_view_tags_are_distinct(params):
    rng = np.random.default_rng(0)
    seq = assemble_multiview_sequence(np.zeros((6, 8, 64)), rng.normal(size=(1, 64)), params)
    tag_rows = seq.tokens[[i * 9 for i in range(6)]]
    assert len({row.tobytes() for row in tag_rows}) == 6


def test_swapping_views_changes_sequence(params):
    rng = np.random.default_rng(2)
    blocks = rng.normal(size=(6, 8, 64))
    text = rng.normal(size=(2, 64))
    original = assemble_multiview_sequence(blocks, text, params)
    swapped = assemble_multiview_sequence(blocks[[1, 0, 2, 3, 4, 5]], text, params)
    assert not np.array_equal(original.tokens, swapped.tokens)


def test_front_only_sequence(params):
    rng = np.random.default_rng(2)
    seq = assemble_multiview_sequence(rng.normal(size=(1, 8, 64)), rng.normal(size=(1, 64)), params, views=[View.FRONT])
    assert len(seq) == 1 + 8 + 1


def test_missing_view_blocks_raise(params):
    with pytest.raises(ArityError):
        assemble_multiview_sequence(np.zeros((5, 8, 64)), np.zeros((1, 64)), params)


@pytest.mark.parametrize("m_img", M_IMG_GRID)
def test_token_budget_grid(m_img):
    params = AdapterParams.initialize(AdapterConfig(width=16, heads=2, m_img=m_img), seed=0)
    grids = rasterize_views(make_scene(agents=[make_agent(1), make_agent(2, x=-12.0, y=4.0)]))
    views = np.stack([g.patches for g in grids])[None]
    tokens = encode_views(views, list(range(len(VIEW_ORDER))), params)
    assert tokens.shape == (1, 6 * (1 + m_img), 16)
    image_tokens = sum(1 for tag in sequence_tags(VIEW_ORDER, m_img, 0) if tag.startswith("image"))
    assert image_tokens == 6 * m_img
