"""
Potenciales relacionales entre embeddings de un lote y sus pérdidas Huber.

- ψ_D(i, j) = ‖t_i − t_j‖ / μ, con μ = media de las distancias del mismo
  conjunto de pares (un μ por conjunto de features, constante para el
  gradiente). μ = 0 → todos los potenciales valen 0.
- ψ_A(i, j, k) = cos del ángulo en el vértice t_j entre los rayos hacia
  t_i y t_k, recortado a [-1, 1]. Un rayo de longitud 0 → potencial 0.

Las normas se calculan como sqrt(s + m) − m con m = 1 donde s = 0, así
la norma de un vector nulo es 0 con gradiente finito (cero).
"""

import numpy as np

import autodiff as ad
from autodiff import Tensor
from errors import InvalidInputError


def _as_matrix(x, name: str) -> Tensor:
    t = x if isinstance(x, Tensor) else Tensor(x)
    if t.ndim != 2:
        raise InvalidInputError(f"{name} debe ser una matriz m×d, shape={t.shape}")
    return t


def _check_indices(indices, width: int, m: int, what: str) -> np.ndarray:
    idx = np.asarray(indices, dtype=np.int64).reshape(-1, width)
    if idx.size == 0:
        raise InvalidInputError(f"Lista de {what} vacía")
    if idx.min() < 0 or idx.max() >= m:
        raise InvalidInputError(f"Índices de {what} fuera de rango [0, {m})")
    for a in range(width):
        for b in range(a + 1, width):
            if np.any(idx[:, a] == idx[:, b]):
                raise InvalidInputError(f"Los {what} deben tener índices distintos")
    return idx


def _safe_norm(vectors: Tensor) -> Tensor:
    squared = ad.sum_(vectors * vectors, axis=1)
    mask = (squared.values == 0.0).astype(np.float64)
    return ad.sqrt(squared + mask) - mask


def _unit_rows(vectors: Tensor) -> Tensor:
    norms = _safe_norm(vectors)
    mask = (norms.values == 0.0).astype(np.float64)
    return ad.scale_rows(vectors, ad.reciprocal(norms + mask))


def pair_distances(embeddings, pairs) -> Tensor:
    """Distancias euclídeas crudas por par (sin normalizar)."""
    emb = _as_matrix(embeddings, "embeddings")
    if emb.shape[0] < 2:
        raise InvalidInputError(f"Se necesitan al menos 2 ejemplos (m={emb.shape[0]})")
    idx = _check_indices(pairs, 2, emb.shape[0], "pares")
    diff = ad.take_rows(emb, idx[:, 0]) - ad.take_rows(emb, idx[:, 1])
    return _safe_norm(diff)


def distance_potentials(embeddings, pairs, mu: float | None = None) -> Tensor:
    """
    ψ_D por par.

    Args:
        mu: normalizador fijo; None = media de las distancias del lote
    """
    distances = pair_distances(embeddings, pairs)
    if mu is None:
        mu = float(distances.values.mean())
    if mu == 0.0:
        return ad.scale(distances, 0.0)
    return ad.scale(distances, 1.0 / mu)


def mean_distance(embeddings, pairs) -> float:
    """μ de un conjunto de features; útil para congelarlo en verificaciones."""
    emb = embeddings.values if isinstance(embeddings, Tensor) else embeddings
    return float(pair_distances(np.asarray(emb, dtype=np.float64), pairs).values.mean())


def angle_potentials(embeddings, triplets) -> Tensor:
    """ψ_A por tripleta (i, j, k) con vértice j."""
    emb = _as_matrix(embeddings, "embeddings")
    if emb.shape[0] < 3:
        raise InvalidInputError(f"Se necesitan al menos 3 ejemplos (m={emb.shape[0]})")
    idx = _check_indices(triplets, 3, emb.shape[0], "tripletas")

    vertex = ad.take_rows(emb, idx[:, 1])
    ray_i = _unit_rows(ad.take_rows(emb, idx[:, 0]) - vertex)
    ray_k = _unit_rows(ad.take_rows(emb, idx[:, 2]) - vertex)
    # El producto de vectores unitarios puede pasarse de ±1 por un ulp
    return ad.clip(ad.sum_(ray_i * ray_k, axis=1), -1.0, 1.0)


def distance_loss(
    teacher_features,
    student_features,
    pairs,
    delta: float,
    teacher_mu: float | None = None,
    student_mu: float | None = None,
) -> Tensor:
    """L_D: media sobre pares de huber(ψ_D^T − ψ_D^S, δ)."""
    psi_t = distance_potentials(teacher_features, pairs, teacher_mu)
    psi_s = distance_potentials(student_features, pairs, student_mu)
    return ad.mean(ad.huber(psi_t - psi_s, delta))


def angle_loss(teacher_features, student_features, triplets, delta: float) -> Tensor:
    """L_A: media sobre tripletas de huber(ψ_A^T − ψ_A^S, δ)."""
    psi_t = angle_potentials(teacher_features, triplets)
    psi_s = angle_potentials(student_features, triplets)
    return ad.mean(ad.huber(psi_t - psi_s, delta))


# =========================================================================
# MUESTREO DE RELACIONES
# =========================================================================
# Las poblaciones se numeran sin materializarlas: el rango r de un par o
# tripleta es su posición en el orden de all_pairs / all_triplets, y solo
# se decodifican los rangos sorteados.


def pair_count(m: int) -> int:
    return m * (m - 1) // 2


def triplet_count(m: int) -> int:
    return m * (m - 1) * (m - 2) // 2


def all_pairs(m: int) -> np.ndarray:
    """Pares no ordenados (i, j), i < j, en orden lexicográfico."""
    i, j = np.triu_indices(m, k=1)
    return np.stack([i, j], axis=1).astype(np.int64)


def all_triplets(m: int) -> np.ndarray:
    """
    Tripletas (i, j, k) con vértice j e i < k, ambos distintos de j.

    Población: m · C(m − 1, 2), ordenada por vértice y luego por par.
    """
    if m < 3:
        return np.zeros((0, 3), dtype=np.int64)
    return unrank_triplets(np.arange(triplet_count(m), dtype=np.int64), m)


def unrank_pairs(ranks, m: int) -> np.ndarray:
    """
    Pares (i, j) de rango `ranks` en el orden lexicográfico de all_pairs(m).

    La fila i arranca en el rango i·m − i·(i + 1)/2.
    """
    ranks = np.asarray(ranks, dtype=np.int64).reshape(-1)
    row_lengths = np.arange(m - 1, 0, -1, dtype=np.int64)
    starts = np.concatenate([np.zeros(1, dtype=np.int64), np.cumsum(row_lengths)])
    i = np.searchsorted(starts, ranks, side="right") - 1
    j = i + 1 + (ranks - starts[i])
    return np.stack([i, j], axis=1).astype(np.int64)


def unrank_triplets(ranks, m: int) -> np.ndarray:
    """Tripletas de rango `ranks` en el orden de all_triplets(m)."""
    ranks = np.asarray(ranks, dtype=np.int64).reshape(-1)
    per_vertex = pair_count(m - 1)
    vertex = ranks // per_vertex
    others = unrank_pairs(ranks % per_vertex, m - 1)
    # Los índices de la población sin el vértice saltan el propio vértice
    first = others[:, 0] + (others[:, 0] >= vertex)
    last = others[:, 1] + (others[:, 1] >= vertex)
    return np.stack([first, vertex, last], axis=1).astype(np.int64)


def _sample(count: int, limit: int, rng, unrank, m: int) -> np.ndarray:
    ranks = np.arange(count, dtype=np.int64)
    if count > limit:
        ranks = np.sort(rng.choice(count, size=limit, replace=False))
    return unrank(ranks, m)


def sample_relations(m: int, pair_limit: int, triplet_limit: int, seed) -> tuple:
    """
    Muestra uniforme sin reemplazo de pares y tripletas de un lote.

    Si la población no supera el límite se enumera completa. La misma
    semilla produce siempre la misma muestra. Memoria proporcional a los
    límites, no a m³.

    Args:
        seed: entero o secuencia de enteros para numpy.random.default_rng

    Returns:
        tuple: (pairs (P, 2), triplets (Q, 3)) como arrays int64

    Raises:
        InvalidInputError: Si algún límite es < 1 o m < 3
    """
    m = int(m)
    if pair_limit < 1 or triplet_limit < 1:
        raise InvalidInputError(
            f"Los límites deben ser ≥ 1 (pair_limit={pair_limit}, triplet_limit={triplet_limit})"
        )
    if m < 2:
        raise InvalidInputError(f"Se necesitan al menos 2 ejemplos para pares (m={m})")
    if m < 3:
        raise InvalidInputError(f"Se necesitan al menos 3 ejemplos para tripletas (m={m})")

    rng = np.random.default_rng(seed)
    pairs = _sample(pair_count(m), int(pair_limit), rng, unrank_pairs, m)
    triplets = _sample(triplet_count(m), int(triplet_limit), rng, unrank_triplets, m)
    return pairs, triplets
