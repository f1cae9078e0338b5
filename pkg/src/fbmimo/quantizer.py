"""Random vector quantization of channel directions.

A B-bit quantizer holds ``2**B`` codewords drawn independently and
isotropically from the unit sphere in C^M.  A receiver feeds back the index
of the codeword closest in angle to its channel direction; the figure of
merit is the squared angular error ``Z = sin^2(angle(h, h_hat))``, which is
the minimum of ``2**B`` independent Beta(M-1, 1) variables.

Closed-form statistics of ``Z`` are exposed alongside a direct sampler that
inverts the CCDF, which is what makes large-B experiments affordable: the
decomposition ``h_dir = sqrt(1-Z) h_hat + sqrt(Z) s`` (``s`` isotropic in
the nullspace of ``h_hat``, independent of ``Z``) reproduces the joint law
of the quantized pair without enumerating a codebook.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma

from .errors import CapacityError, DomainError
from .numerics import LOG2E, ln_gamma, sample_complex_gaussian, sample_isotropic_unit

MAX_CODEBOOK_BITS = 30

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class Codebook:
    """``2**B`` unit-norm codewords in C^M, one per row of ``words``."""

    M: int
    B: int
    words: np.ndarray


@dataclass(frozen=True)
class QuantizationOutcome:
    index: int
    h_hat: np.ndarray
    error_z: float


def _check_m(M: int) -> None:
    if M < 2:
        raise DomainError(f"M must be >= 2, got {M}")


def _check_bits(B: float) -> None:
    if B < 0:
        raise DomainError(f"B must be >= 0, got {B}")


def generate_codebook(M: int, B: int, rng: np.random.Generator) -> Codebook:
    """Draw a fresh random codebook of ``2**B`` isotropic unit vectors."""
    _check_m(M)
    if B != int(B) or B < 0:
        raise DomainError(f"codebook bits must be a nonnegative integer, got {B}")
    B = int(B)
    if B > MAX_CODEBOOK_BITS:
        raise CapacityError(f"B={B} exceeds the enumerable budget of {MAX_CODEBOOK_BITS} bits")
    words = sample_isotropic_unit(M, rng, size=1 << B)
    return Codebook(M=M, B=B, words=words)


def quantize(h: np.ndarray, codebook: Codebook) -> QuantizationOutcome:
    """Pick the codeword maximizing |h^H w|; ties resolve to the lowest index."""
    h = np.asarray(h, dtype=complex)
    norm2 = float(np.real(np.vdot(h, h)))
    if norm2 == 0.0:
        raise DomainError("cannot quantize the zero vector")
    cos2 = np.abs(codebook.words @ h.conj()) ** 2 / norm2
    index = int(np.argmax(cos2))
    error_z = min(max(1.0 - float(cos2[index]), 0.0), 1.0)
    return QuantizationOutcome(index=index, h_hat=codebook.words[index], error_z=error_z)


def error_ccdf(z, M: int, B: float):
    """Pr(Z >= z) = (1 - z^(M-1))^(2^B) for the minimum-angle error Z."""
    _check_m(M)
    _check_bits(B)
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0.0) or np.any(z_arr > 1.0):
        raise DomainError("z must lie in [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp((2.0 ** B) * np.log1p(-(z_arr ** (M - 1))))
    out = np.where(z_arr >= 1.0, 0.0, out)
    return float(out) if np.isscalar(z) else out


def expected_error(M: int, B: float) -> float:
    """E[Z] = 2^B * beta(2^B, M/(M-1)), evaluated in log space.

    For M = 2 this collapses to 1 / (2^B + 1) exactly.
    """
    _check_m(M)
    _check_bits(B)
    c = M / (M - 1.0)
    if B > 500.0:
        # beta(n, c) ~ Gamma(c) n^(-c) for huge n; avoids inf - inf in lgamma
        return math.exp(ln_gamma(c) - (c - 1.0) * B * _LN2)
    n = 2.0 ** B
    return math.exp(B * _LN2 + ln_gamma(n) + ln_gamma(c) - ln_gamma(n + c))


def error_upper_bound(M: int, B: float) -> float:
    """Closed-form bound E[Z] <= 2^(-B/(M-1))."""
    _check_m(M)
    _check_bits(B)
    return 2.0 ** (-B / (M - 1.0))


def expected_neg_log2_error(M: int, B: float) -> float:
    """E[-log2 Z] = (log2 e / (M-1)) * H(2^B) with H the harmonic number.

    The harmonic number is evaluated through the digamma identity
    H(n) = psi(n + 1) + gamma, which is exact and extends smoothly to
    non-integer 2^B.
    """
    _check_m(M)
    _check_bits(B)
    harmonic = float(digamma(2.0 ** B + 1.0)) + np.euler_gamma
    return LOG2E * harmonic / (M - 1.0)


def neg_log2_error_bounds(M: int, B: float) -> tuple[float, float]:
    """Sandwich B/(M-1) <= E[-log2 Z] <= (B + log2 e)/(M-1)."""
    _check_m(M)
    _check_bits(B)
    return B / (M - 1.0), (B + LOG2E) / (M - 1.0)


def sample_error(M: int, B: float, rng: np.random.Generator, size: int | None = None):
    """Draw Z by inverting the CCDF: Z = (1 - U^(2^-B))^(1/(M-1)).

    The inner factor is computed as -expm1(2^-B * ln U), which keeps
    precision when B is large and U^(2^-B) approaches 1.
    """
    _check_m(M)
    _check_bits(B)
    u = rng.random(size)
    with np.errstate(divide="ignore"):
        inner = -np.expm1((2.0 ** (-B)) * np.log(u))
    z = inner ** (1.0 / (M - 1.0))
    return float(z) if size is None else z


def sample_quantized_pair(M: int, B: float, rng: np.random.Generator, size: int | None = None):
    """Draw (h_dir, h_hat, z) with the same joint law as quantizing an
    isotropic direction against a fresh random codebook.

    Returns arrays of shape ``(size, M)`` (or single vectors when ``size``
    is None).  Works for any real B >= 0 since no codebook is enumerated.
    At M = 2 the nullspace of h_hat is one-dimensional and ``s`` reduces to
    the unique orthogonal direction carrying a uniform phase.
    """
    n = 1 if size is None else size
    h_hat = sample_isotropic_unit(M, rng, size=n)
    z = np.atleast_1d(sample_error(M, B, rng, size=n))
    g = sample_complex_gaussian(M, rng, size=n)
    proj = np.einsum("nm,nm->n", h_hat.conj(), g)
    perp = g - proj[:, None] * h_hat
    norms = np.linalg.norm(perp, axis=1, keepdims=True)
    while np.any(norms == 0.0):  # probability-zero guard
        g = sample_complex_gaussian(M, rng, size=n)
        proj = np.einsum("nm,nm->n", h_hat.conj(), g)
        perp = g - proj[:, None] * h_hat
        norms = np.linalg.norm(perp, axis=1, keepdims=True)
    s = perp / norms
    h_dir = np.sqrt(1.0 - z)[:, None] * h_hat + np.sqrt(z)[:, None] * s
    if size is None:
        return h_dir[0], h_hat[0], float(z[0])
    return h_dir, h_hat, z


def sample_errors_brute(M: int, B: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Quantization errors from n independent brute-force trials.

    Each trial draws an isotropic direction and a fresh ``2**B``-word
    codebook and takes the argmax inner product, exactly as quantize()
    does; trials are batched for throughput.
    """
    _check_m(M)
    if B != int(B) or B < 0:
        raise DomainError(f"brute-force bits must be a nonnegative integer, got {B}")
    B = int(B)
    if B > MAX_CODEBOOK_BITS:
        raise CapacityError(f"B={B} exceeds the enumerable budget of {MAX_CODEBOOK_BITS} bits")
    n_words = 1 << B
    chunk = max(1, int(4_000_000 / (n_words * M)))
    out = np.empty(n)
    pos = 0
    while pos < n:
        c = min(chunk, n - pos)
        h = sample_isotropic_unit(M, rng, size=c)
        words = sample_isotropic_unit(M, rng, size=c * n_words).reshape(c, n_words, M)
        cos2 = np.abs(np.einsum("ckm,cm->ck", words, h.conj())) ** 2
        out[pos:pos + c] = 1.0 - cos2.max(axis=1)
        pos += c
    np.clip(out, 0.0, 1.0, out=out)
    return out


def optimal_error_cdf(z, M: int, B: float):
    """CDF min(2^B z^(M-1), 1) of the error of an idealized quantizer whose
    codewords never overlap; lower-bounds any realizable B-bit quantizer."""
    _check_m(M)
    _check_bits(B)
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0.0) or np.any(z_arr > 1.0):
        raise DomainError("z must lie in [0, 1]")
    with np.errstate(divide="ignore"):
        out = np.minimum(1.0, np.exp(B * _LN2 + (M - 1) * np.log(z_arr)))
    return float(out) if np.isscalar(z) else out


def expected_optimal_error(M: int, B: float) -> float:
    """Mean error ((M-1)/M) * 2^(-B/(M-1)) of the idealized quantizer."""
    _check_m(M)
    _check_bits(B)
    return (M - 1.0) / M * 2.0 ** (-B / (M - 1.0))
