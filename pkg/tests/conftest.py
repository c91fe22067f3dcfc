import numpy as np
import pytest

from pcaanon import Dataset, GrayImage


def make_correlated_dataset(n=200, seed=42, means=(10.0, -5.0, 2.0)):
    """Correlated 3-column Gaussian sample with distinct eigenvalues."""
    rng = np.random.default_rng(seed)
    cov = np.array([[4.0, 2.0, 0.5],
                    [2.0, 3.0, 0.3],
                    [0.5, 0.3, 1.0]])
    chol = np.linalg.cholesky(cov)
    rows = rng.standard_normal((n, 3)) @ chol.T + np.asarray(means)
    return Dataset(column_names=("height", "income", "age"), rows=rows)


def make_wide_dataset(n=120, p=5, seed=11):
    """Correlated p-column sample; eigenvalues spread over a decade."""
    rng = np.random.default_rng(seed)
    base = rng.standard_normal((p, p))
    cov = base @ base.T + p * np.eye(p)
    chol = np.linalg.cholesky(cov)
    rows = rng.standard_normal((n, p)) @ chol.T + rng.uniform(-5, 5, p)
    names = tuple(f"v{j}" for j in range(p))
    return Dataset(column_names=names, rows=rows)


def synth_natural_image(n=512, m=512, seed=2024, power=1.5):
    """Smooth random field with a natural-image-like eigenvalue decay.

    White noise shaped by a 1/f^power amplitude spectrum; dominant
    eigenvalues land in the 1e4..1e5 range like a photographic image.
    """
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((n, m))
    fy = np.fft.fftfreq(n)[:, None]
    fx = np.fft.fftfreq(m)[None, :]
    radius = np.sqrt(fx ** 2 + fy ** 2)
    radius[0, 0] = radius[0, 1]
    field = np.real(np.fft.ifft2(np.fft.fft2(noise) / radius ** power))
    field = (field - field.min()) / (field.max() - field.min()) * 255.0
    return GrayImage(pixels=np.floor(field + 0.5))


@pytest.fixture
def gaussian_dataset():
    return make_correlated_dataset()


@pytest.fixture(scope="session")
def natural_image():
    return synth_natural_image()


@pytest.fixture(scope="session")
def small_image():
    return synth_natural_image(n=32, m=16, seed=7)
