import math

import numpy as np
import pytest

import maskopt


def blob(h=24, w=24, cy=12, cx=10, r=5):
    yy, xx = np.mgrid[:h, :w]
    return (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r


def test_distance_matches_scipy():
    ndimage = pytest.importorskip("scipy.ndimage")
    rng = np.random.default_rng(0)
    m = rng.random((40, 33)) < 0.05
    m[3, 4] = True
    ref = ndimage.distance_transform_edt(~m)
    np.testing.assert_allclose(maskopt.euclidean_distance_to(m), ref, atol=1e-12)


def test_signed_distance_and_dilation():
    m = np.zeros((1, 5), dtype=bool)
    m[0, 2] = True
    phi, scale = maskopt.signed_distance(m)
    np.testing.assert_allclose(phi[0], [2, 1, -1, 1, 2])
    assert scale == 1.0
    b = blob()
    phi, _ = maskopt.signed_distance(b)
    for r in (1, 2, 3.5):
        np.testing.assert_array_equal(phi <= r, maskopt.dilate(b, r))
    np.testing.assert_array_equal(maskopt.rescale_mask(b, -2), maskopt.erode(b, 2))


def test_expansion_loss_and_optimizer():
    phi = np.array([[2.0, 1.0, -1.0, 1.0, 2.0]])
    value, grad = maskopt.mask_expansion_loss(phi, np.full_like(phi, 0.5), 1.5)
    assert value == pytest.approx(-1.25)
    np.testing.assert_allclose(grad, phi - 1.5)
    out = maskopt.optimize_soft_mask(phi, np.full_like(phi, 0.5), 1.5, 10, 1.0)
    np.testing.assert_array_equal(out[0], [0, 1, 1, 1, 0])


def test_expand_segment_units():
    b = blob()
    mask, radius = maskopt.expand_segment(b, 2.0, "pixels")
    assert radius == 2.0
    np.testing.assert_array_equal(mask, maskopt.dilate(b, 2.0))
    mask, radius = maskopt.expand_segment(b, 0.03)
    assert radius > 0 and mask.sum() >= b.sum()
    with pytest.raises(maskopt.MaskoptError):
        maskopt.expand_segment(b, 0.03, "furlongs")


@pytest.mark.parametrize("backend", ["diffusion", "fmm"])
def test_inpaint_restores_flat_image(backend):
    img = np.full((20, 20, 3), 0.25, dtype=np.float32)
    hole = blob(20, 20, 10, 10, 4)
    out = maskopt.inpaint(img, hole, backend=backend)
    assert out.shape == img.shape
    np.testing.assert_allclose(out, img, atol=1e-4)
    np.testing.assert_array_equal(out[~hole], img[~hole])


def test_metrics():
    a = np.zeros((16, 16), dtype=np.float32)
    b = a + 0.1
    assert maskopt.psnr(a, b) == pytest.approx(20.0, abs=1e-5)
    assert math.isinf(maskopt.psnr(a, a))
    rng = np.random.default_rng(1)
    x = rng.random((24, 24)).astype(np.float32)
    assert maskopt.ssim(x, x) == 1.0
    assert maskopt.ssim(x, rng.random((24, 24)).astype(np.float32)) < 0.5


def test_generators_are_deterministic():
    m1 = maskopt.random_irregular_mask(64, 64, 20.0, 7)
    m2 = maskopt.random_irregular_mask(64, 64, 20.0, 7)
    np.testing.assert_array_equal(m1, m2)
    assert abs(100.0 * m1.mean() - 20.0) <= 2.0
    img, ids, classes = maskopt.procedural_scene(32, 32, 5)
    assert img.shape == (32, 32, 3) and ids.shape == (32, 32)
    assert set(np.unique(ids)) <= set(classes)
    assert 1 in classes.values()


def test_canny_finds_step_edge():
    img = np.zeros((20, 20), dtype=np.float32)
    img[:, 10:] = 1.0
    edges = maskopt.canny(img)
    assert edges[5:15, 8:12].any()
    assert not edges[:, :5].any()
