"""Database-as-image representation and image-quality tooling.

A numeric table can be rendered as an 8-bit greyscale raster (record x
becomes pixel row x, attribute y becomes pixel column y), which lets the
compression-style quality indices MSE/PSNR/SSIM quantify how much a
principal-component removal degrades it.  The eigenvalue decay of an
image's column covariance is summarized by a four-parameter symmetric
sigmoid whose shape factor measures how fast the dominant eigenvalues
fall off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import (
    ConfigError,
    DataError,
    PgmFormatError,
    ShapeMismatchError,
    SigmoidFitError,
    ZeroRangeError,
)
from .pca import eig_sym

#: Conventional SSIM stabilizers for 8-bit data.
SSIM_C1 = (0.01 * 255.0) ** 2
SSIM_C2 = (0.03 * 255.0) ** 2
SSIM_C3 = SSIM_C2 / 2.0

#: Sentinel returned by psnr() for identical images; serialized as "inf".
PSNR_INFINITE = math.inf


@dataclass(frozen=True)
class GrayImage:
    """An 8-bit greyscale raster, at least 2x2."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise DataError(f"image must be 2-D, got ndim={px.ndim}")
        if px.shape[0] < 2 or px.shape[1] < 2:
            raise DataError(f"image must be at least 2x2, got {px.shape}")
        if not np.issubdtype(px.dtype, np.integer):
            if not np.all(px == np.floor(px)):
                raise DataError("pixel values must be integers")
        if px.size and (px.min() < 0 or px.max() > 255):
            raise DataError("pixel values must lie in [0, 255]")
        px = px.astype(np.uint8)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def shape(self):
        return self.pixels.shape


@dataclass(frozen=True)
class ImageScaling:
    """Affine map parameters used to render a dataset as pixels."""

    mode: str
    mins: np.ndarray
    maxs: np.ndarray


def _round_half_up(x: np.ndarray) -> np.ndarray:
    return np.floor(x + 0.5)


def dataset_to_image(d: Dataset, scaling: str = "per_column"):
    """Render a dataset as a greyscale image; returns (image, scaling).

    ``per_column`` maps each column's [min, max] to [0, 255] on its own;
    ``global`` uses the dataset-wide range.  Values are rounded half-up.
    """
    if scaling not in ("per_column", "global"):
        raise ConfigError(
            f"scaling must be 'per_column' or 'global', got {scaling!r}")
    rows = d.rows
    if scaling == "per_column":
        mins = rows.min(axis=0)
        maxs = rows.max(axis=0)
        spans = maxs - mins
        for j, span in enumerate(spans):
            if span == 0.0:
                raise ZeroRangeError(
                    f"column {d.column_names[j]!r} is constant; "
                    "per-column scaling has zero range")
    else:
        mins = np.full(d.n_cols, rows.min())
        maxs = np.full(d.n_cols, rows.max())
        spans = maxs - mins
        if spans[0] == 0.0:
            raise ZeroRangeError(
                "dataset is constant; global scaling has zero range")
    scaled = (rows - mins) / spans * 255.0
    image = GrayImage(pixels=_round_half_up(scaled))
    return image, ImageScaling(mode=scaling, mins=mins, maxs=maxs)


def mse(f: GrayImage, g: GrayImage) -> float:
    """Mean squared pixel error between two equally sized images."""
    if f.shape != g.shape:
        raise ShapeMismatchError(f"shapes differ: {f.shape} vs {g.shape}")
    df = f.pixels.astype(np.float64) - g.pixels.astype(np.float64)
    return float(np.mean(df ** 2))


def psnr(f: GrayImage, g: GrayImage) -> float:
    """Peak signal-to-noise ratio 10*log10(255^2 / MSE), in dB.

    Identical images have zero MSE; the return value is then the
    PSNR_INFINITE sentinel rather than any finite dB figure.
    """
    err = mse(f, g)
    if err == 0.0:
        return PSNR_INFINITE
    return 10.0 * math.log10(255.0 ** 2 / err)


def ssim(f: GrayImage, g: GrayImage, c1: float = SSIM_C1,
         c2: float = SSIM_C2, c3: float = SSIM_C3) -> float:
    """Single-window structural similarity: correlation x luminance x contrast.

    All three factors are computed from whole-image moments; the positive
    constants keep denominators away from zero for flat images.
    """
    if f.shape != g.shape:
        raise ShapeMismatchError(f"shapes differ: {f.shape} vs {g.shape}")
    if c1 <= 0 or c2 <= 0 or c3 <= 0:
        raise ConfigError("SSIM constants must be positive")
    a = f.pixels.astype(np.float64)
    b = g.pixels.astype(np.float64)
    mu_f = a.mean()
    mu_g = b.mean()
    da = a - mu_f
    db = b - mu_g
    var_f = float(np.mean(da ** 2))
    var_g = float(np.mean(db ** 2))
    sigma_f = math.sqrt(var_f)
    sigma_g = math.sqrt(var_g)
    sigma_fg = float(np.mean(da * db))

    s = (sigma_fg + c3) / (sigma_f * sigma_g + c3)
    lum = (2.0 * mu_f * mu_g + c1) / (mu_f ** 2 + mu_g ** 2 + c1)
    con = (2.0 * sigma_f * sigma_g + c2) / (var_f + var_g + c2)
    return float(s * lum * con)


def shuffle_rows(img: GrayImage, seed: int) -> GrayImage:
    """Uniform random row permutation, deterministic for a given seed.

    Fisher-Yates driven by a PCG64 generator, so the same seed yields the
    same permutation on every platform.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    n = img.pixels.shape[0]
    order = np.arange(n)
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        order[i], order[j] = order[j], order[i]
    return GrayImage(pixels=img.pixels[order])


def _column_eigensystem(pixels: np.ndarray):
    """Eigensystem of the column covariance of a centered image."""
    x = pixels.astype(np.float64)
    means = x.mean(axis=0)
    y = x - means
    cov = y.T @ y / x.shape[0]
    cov = (cov + cov.T) / 2.0
    return eig_sym(cov), y, means


def image_pca_remove(img: GrayImage, k: int) -> GrayImage:
    """Remove the k largest column-covariance components from an image.

    Rows are treated as observations and columns as variables, matching
    the records-by-attributes database convention.  Pixels are centered
    (no unit-variance scaling), projected onto the retained components,
    shifted back, then clamped to [0, 255] and rounded half-up.
    """
    m = img.pixels.shape[1]
    if not 0 <= k <= m - 1:
        raise DataError(f"k={k} out of range; must satisfy 0 <= k <= {m - 1}")
    if k == 0:
        return img
    es, centered, means = _column_eigensystem(img.pixels)
    w_r = es.eigenvectors[:, k:]
    reduced = centered @ w_r @ w_r.T + means
    return GrayImage(pixels=_round_half_up(np.clip(reduced, 0.0, 255.0)))


def eigen_decay(img: GrayImage, count: int) -> np.ndarray:
    """Top ``count`` eigenvalues of the centered column covariance."""
    m = img.pixels.shape[1]
    if not 0 <= count <= m:
        raise DataError(
            f"count={count} out of range; must satisfy 0 <= count <= {m}")
    es, _, _ = _column_eigensystem(img.pixels)
    return es.eigenvalues[:count].copy()


@dataclass(frozen=True)
class SigmoidFit:
    """Fitted y = d + (a - d) / (1 + (x/c)^b) plus goodness of fit.

    ``c`` scales the abscissa and ``b`` shapes how fast the curve falls;
    ``residuals`` are y_i minus the fitted curve at the input abscissas,
    and ``ssr_trace`` records the squared-residual sum at every accepted
    iteration (non-increasing by construction).
    """

    a: float
    b: float
    c: float
    d: float
    r_squared: float
    residuals: np.ndarray
    ssr_trace: tuple

    def __post_init__(self):
        if not (self.b > 0 and self.c > 0):
            raise SigmoidFitError(
                f"fit left the valid region (b={self.b}, c={self.c})")

    def predict(self, x) -> np.ndarray:
        return _sigmoid(np.asarray(x, dtype=np.float64),
                        self.a, self.b, self.c, self.d)

    def to_json_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d,
                "r_squared": self.r_squared}


def _sigmoid(x, a, b, c, d):
    return d + (a - d) / (1.0 + (x / c) ** b)


def _sigmoid_jacobian(x, a, b, c, d):
    u = (x / c) ** b
    s = 1.0 / (1.0 + u)
    j = np.empty((x.shape[0], 4))
    j[:, 0] = s                                       # d/da
    j[:, 1] = -(a - d) * s * s * u * np.log(x / c)    # d/db
    j[:, 2] = (a - d) * s * s * u * b / c             # d/dc
    j[:, 3] = 1.0 - s                                 # d/dd
    return j


def fit_sigmoid(points) -> SigmoidFit:
    """Least-squares fit of the four-parameter symmetric sigmoid.

    Damped (Levenberg-Marquardt) iteration from a = max y, d = min y,
    c = median x, b = 2; stops when the relative change of the squared
    residual sum drops below 1e-10 or after 500 iterations.  R-squared
    is reported as 0 by convention when the ordinates are constant.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 4:
        raise SigmoidFitError(
            f"need at least 4 points for 4 parameters, got {len(pts)}")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.any(x <= 0):
        raise SigmoidFitError("abscissas must be positive")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise SigmoidFitError("points must be finite")

    theta = np.array([y.max(), 2.0, float(np.median(x)), y.min()])
    residuals = y - _sigmoid(x, *theta)
    ssr = float(residuals @ residuals)
    trace = [ssr]
    lam = 1e-3

    for _ in range(500):
        if ssr == 0.0:
            break
        jac = _sigmoid_jacobian(x, *theta)
        jtj = jac.T @ jac
        jtr = jac.T @ residuals
        accepted = False
        while lam < 1e150:
            damped = jtj + lam * np.diag(np.diag(jtj))
            try:
                step = np.linalg.solve(damped, jtr)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = theta + step
            if not np.all(np.isfinite(trial)) or trial[1] <= 0 \
                    or trial[2] <= 0:
                lam *= 10.0
                continue
            trial_res = y - _sigmoid(x, *trial)
            trial_ssr = float(trial_res @ trial_res)
            if not math.isfinite(trial_ssr) or trial_ssr > ssr:
                lam *= 10.0
                continue
            accepted = True
            break
        if not accepted:
            break  # damping exhausted: gradient is numerically zero
        theta = trial
        residuals = trial_res
        rel_change = (ssr - trial_ssr) / max(ssr, np.finfo(float).tiny)
        ssr = trial_ssr
        trace.append(ssr)
        lam = max(lam / 10.0, 1e-12)
        if rel_change < 1e-10:
            break

    if not np.all(np.isfinite(theta)):
        raise SigmoidFitError("iteration diverged to non-finite parameters")

    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 0.0 if ss_tot == 0.0 else 1.0 - ssr / ss_tot
    return SigmoidFit(a=float(theta[0]), b=float(theta[1]),
                      c=float(theta[2]), d=float(theta[3]),
                      r_squared=r_squared, residuals=residuals,
                      ssr_trace=tuple(trace))


def load_image(path) -> GrayImage:
    """Read a binary PGM (P5, maxval 255) file."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic, pos = _next_token(data, 0)
    if magic != b"P5":
        raise PgmFormatError(
            f"unsupported magic {magic!r}; only binary P5 is accepted")
    width, pos = _header_int(data, pos, "width")
    height, pos = _header_int(data, pos, "height")
    maxval, pos = _header_int(data, pos, "maxval")
    if maxval != 255:
        raise PgmFormatError(f"maxval must be 255, got {maxval}")
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(data) or data[pos:pos + 1] not in b" \t\r\n":
        raise PgmFormatError("missing whitespace after header")
    pos += 1
    raster = data[pos:]
    if len(raster) != width * height:
        raise PgmFormatError(
            f"expected {width * height} raster bytes, got {len(raster)}")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return GrayImage(pixels=pixels)


def _next_token(data: bytes, pos: int):
    """Next whitespace-delimited header token, skipping '#' comments."""
    while pos < len(data):
        byte = data[pos:pos + 1]
        if byte == b"#":
            end = data.find(b"\n", pos)
            if end < 0:
                raise PgmFormatError("unterminated comment in header")
            pos = end + 1
        elif byte in b" \t\r\n":
            pos += 1
        else:
            break
    if pos >= len(data):
        raise PgmFormatError("truncated header")
    start = pos
    while pos < len(data) and data[pos:pos + 1] not in b" \t\r\n#":
        pos += 1
    return data[start:pos], pos


def _header_int(data: bytes, pos: int, what: str):
    token, pos = _next_token(data, pos)
    try:
        value = int(token)
    except ValueError:
        raise PgmFormatError(
            f"invalid {what} token {token!r} in header") from None
    if value <= 0:
        raise PgmFormatError(f"{what} must be positive, got {value}")
    return value, pos


def write_image(img: GrayImage, path) -> None:
    """Write a binary PGM (P5, maxval 255) file; round-trips bit-exactly."""
    height, width = img.pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(img.pixels.tobytes())
