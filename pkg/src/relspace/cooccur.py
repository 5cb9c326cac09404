"""Confidence/context-weighted co-occurrence matrices and their factorization.

Each annotation contributes one row to the annotation matrix ``A``: a 0/1
bag over the 12 relation labels, optionally concatenated with a one-hot
context indicator, optionally scaled by the record's confidence score.
The feature co-occurrence matrix is the Gram matrix ``O = A.T @ A``
(features x features), accumulated in integer arithmetic so results are
independent of record order.

``O`` is factorized by uncentered PCA: an eigendecomposition without mean
subtraction, with each feature represented as ``U_d * sqrt(L_d)`` so that
the embedding Gram matrix reconstructs ``O`` at full rank.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .labels import CONTEXT_TOKENS, LABEL_TOKENS, N_CONTEXTS, N_LABELS


@dataclass(frozen=True)
class AssemblyConfig:
    """Switches for annotation-matrix assembly and factorization depth."""

    weight_by_confidence: bool = True
    include_context: bool = True
    pca_dims: int = 10

    def __post_init__(self):
        m = self.n_features
        if not 1 <= self.pca_dims <= m:
            raise ValueError(
                f"pca_dims must be in [1, {m}] for "
                f"include_context={self.include_context}, got {self.pca_dims}"
            )

    @property
    def n_features(self) -> int:
        return N_LABELS + N_CONTEXTS if self.include_context else N_LABELS

    @property
    def variant(self) -> str:
        """Short human-readable tag for output provenance."""
        w = "weighted" if self.weight_by_confidence else "unweighted"
        c = "context" if self.include_context else "nocontext"
        return f"{w}+{c}"


@dataclass(frozen=True)
class CooccurrenceResult:
    """Annotation matrix ``A``, Gram matrix ``O`` and their feature names."""

    A: np.ndarray
    O: np.ndarray
    feature_names: tuple[str, ...]
    config: AssemblyConfig


@dataclass(frozen=True)
class EmbeddingSet:
    """Per-feature vectors ``U_d * sqrt(L_d)`` with eigenvalues descending."""

    vectors: np.ndarray
    eigenvalues: np.ndarray
    feature_names: tuple[str, ...]


def feature_names(include_context: bool) -> tuple[str, ...]:
    names = LABEL_TOKENS
    if include_context:
        names = names + CONTEXT_TOKENS
    return tuple(names)


def assemble(ds: Dataset, cfg: AssemblyConfig) -> CooccurrenceResult:
    """Build ``A`` (one row per record) and accumulate ``O = A.T @ A``.

    Row i is ``c_i * (r_i | d_i)`` when weighting by confidence, else
    ``(r_i | d_i)``; the context block is omitted when
    ``cfg.include_context`` is false.  Entries are int64, so accumulation
    is exact and order-independent.
    """
    m = cfg.n_features
    A = np.zeros((len(ds), m), dtype=np.int64)
    for i, r in enumerate(ds):
        for lab in r.labels:
            A[i, int(lab)] = 1
        if cfg.include_context:
            A[i, N_LABELS + int(r.context)] = 1
        if cfg.weight_by_confidence:
            A[i] *= r.confidence
    O = A.T @ A
    return CooccurrenceResult(A=A, O=O, feature_names=feature_names(cfg.include_context), config=cfg)


def jacobi_eigh(S: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues descending and
    eigenvectors in columns.  Deterministic: rotations are applied in fixed
    row-major order of the upper triangle, and each eigenvector's
    largest-magnitude entry is made non-negative.  Intended for the small
    (m <= 15) matrices this package produces.
    """
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(S)):
        raise ValueError("matrix contains non-finite entries")
    m = S.shape[0]
    Amat = S.copy()
    V = np.eye(m)
    scale = np.linalg.norm(S) or 1.0
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(Amat, -1) ** 2) * 2)
        if off <= tol * scale:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = Amat[p, q]
                if abs(apq) <= tol * scale / m:
                    continue
                # classical 2x2 symmetric Schur rotation
                tau = (Amat[q, q] - Amat[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot_p = c * Amat[:, p] - s * Amat[:, q]
                rot_q = s * Amat[:, p] + c * Amat[:, q]
                Amat[:, p], Amat[:, q] = rot_p, rot_q
                rot_p = c * Amat[p, :] - s * Amat[q, :]
                rot_q = s * Amat[p, :] + c * Amat[q, :]
                Amat[p, :], Amat[q, :] = rot_p, rot_q
                Amat[p, q] = Amat[q, p] = 0.0
                rot_p = c * V[:, p] - s * V[:, q]
                rot_q = s * V[:, p] + c * V[:, q]
                V[:, p], V[:, q] = rot_p, rot_q
    evals = np.diag(Amat).copy()
    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    V = V[:, order]
    for j in range(m):
        k = int(np.argmax(np.abs(V[:, j])))
        if V[k, j] < 0:
            V[:, j] = -V[:, j]
    return evals, V


def factorize(co: CooccurrenceResult, d: int | None = None) -> EmbeddingSet:
    """Uncentered PCA of ``O``: top-d eigenpairs, vectors ``U_d * sqrt(L_d)``.

    No mean-centering is applied.  Eigenvalues are returned descending with
    small negative round-off clamped to zero; the sign of each eigenvector
    is fixed by making its largest-magnitude entry non-negative.
    """
    if d is None:
        d = co.config.pca_dims
    m = co.O.shape[0]
    if not 1 <= d <= m:
        raise ValueError(f"d must be in [1, {m}], got {d}")
    O = np.asarray(co.O, dtype=np.float64)
    if not np.all(np.isfinite(O)):
        raise ValueError("co-occurrence matrix contains non-finite entries")
    evals, V = jacobi_eigh(O)
    evals = np.clip(evals[:d], 0.0, None)
    vectors = V[:, :d] * np.sqrt(evals)
    return EmbeddingSet(vectors=vectors, eigenvalues=evals, feature_names=co.feature_names)


def relation_rows(e: EmbeddingSet) -> EmbeddingSet:
    """Restrict an embedding set to the 12 relation features.

    Context rows, when present, are dropped; relation rows keep the
    canonical label order.  A 12-feature set is returned unchanged.
    """
    if e.vectors.shape[0] == N_LABELS:
        return e
    return EmbeddingSet(
        vectors=e.vectors[:N_LABELS].copy(),
        eigenvalues=e.eigenvalues,
        feature_names=e.feature_names[:N_LABELS],
    )


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------


def write_cooccurrence_csv(co: CooccurrenceResult, path, header_comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["feature", *co.feature_names])
        for name, row in zip(co.feature_names, co.O):
            writer.writerow([name, *(int(v) for v in row)])


def cooccurrence_to_json(co: CooccurrenceResult) -> dict:
    return {
        "feature_names": list(co.feature_names),
        "matrix": co.O.tolist(),
        "config": {
            "weight_by_confidence": co.config.weight_by_confidence,
            "include_context": co.config.include_context,
            "pca_dims": co.config.pca_dims,
            "variant": co.config.variant,
        },
    }


def write_embeddings_csv(e: EmbeddingSet, path, header_comment: str | None = None) -> None:
    d = e.vectors.shape[1]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["feature", *(f"dim{j}" for j in range(d))])
        for name, row in zip(e.feature_names, e.vectors):
            writer.writerow([name, *(repr(float(v)) for v in row)])


def embeddings_to_json(e: EmbeddingSet) -> dict:
    return {
        "feature_names": list(e.feature_names),
        "eigenvalues": [float(v) for v in e.eigenvalues],
        "vectors": e.vectors.tolist(),
    }


def write_json(obj: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")
