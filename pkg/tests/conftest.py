"""Shared fixture builders: toy taxonomies, embedding files, planted clusters."""

import json
from pathlib import Path

import numpy as np
import pytest

from taxoenrich.taxonomy import PartOfSpeech, Synset, Taxonomy


def make_taxonomy(spec: dict) -> Taxonomy:
    """Build a taxonomy from {id: (pos, [lemmas], [hypernyms])}."""
    synsets = {}
    edges = {}
    for sid, (pos, lemmas, hypernyms) in spec.items():
        synsets[sid] = Synset(id=sid, pos=PartOfSpeech.parse(pos), lemmas=tuple(lemmas))
        edges[sid] = set(hypernyms)
    return Taxonomy(synsets, edges)


def write_taxonomy_file(path: Path, spec: dict) -> Path:
    lines = []
    for sid, (pos, lemmas, hypernyms) in spec.items():
        lines.append(json.dumps({"id": sid, "pos": pos, "lemmas": list(lemmas),
                                 "hypernyms": list(hypernyms)}))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_embeddings_file(path: Path, rows: list[tuple[str, list[float]]]) -> Path:
    dim = len(rows[0][1])
    lines = [f"{len(rows)} {dim}"]
    for token, values in rows:
        lines.append(token + " " + " ".join(repr(float(v)) for v in values))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


CHAIN = {
    "A": ("n", ["a"], []),
    "B": ("n", ["b"], ["A"]),
    "C": ("n", ["c"], ["B"]),
}


@pytest.fixture
def chain_taxonomy():
    return make_taxonomy(CHAIN)


def random_dag_spec(rng: np.random.Generator, n_nodes: int, edge_prob: float = 0.25):
    """Random DAG: edges only from higher-numbered to lower-numbered nodes."""
    spec = {}
    for i in range(n_nodes):
        parents = [f"n{j}" for j in range(i) if rng.random() < edge_prob]
        spec[f"n{i}"] = ("n", [f"lemma{i}"], parents)
    return spec


def build_planted_fixture(tmp_dir: Path, n_clusters: int = 5,
                          leaves_per_cluster: int = 10,
                          orphans_per_cluster: int = 4,
                          dim: int = 16, seed: int = 7):
    """Synthetic taxonomy + embeddings in which each orphan's true cluster
    co-hyponyms are guaranteed to dominate its nearest neighbors.

    Returns (taxonomy_path, embeddings_path, dataset_rows) where dataset_rows
    is [(orphan word, gold synset ids)].
    """
    rng = np.random.default_rng(seed)
    spec = {}
    rows = []
    dataset_rows = []
    for c in range(n_clusters):
        base = np.zeros(dim)
        base[c] = 1.0
        gid, pid = f"G{c}", f"P{c}"
        spec[gid] = ("n", [f"granny{c}"], [])
        spec[pid] = ("n", [f"parent{c}"], [gid])
        rows.append((f"granny{c}", list(base + 0.01 * rng.normal(size=dim))))
        rows.append((f"parent{c}", list(base + 0.01 * rng.normal(size=dim))))
        member_vecs = []
        for j in range(leaves_per_cluster):
            vec = base + 0.02 * rng.normal(size=dim)
            member_vecs.append(vec)
            spec[f"L{c}_{j}"] = ("n", [f"w{c}_{j}"], [pid])
            rows.append((f"w{c}_{j}", list(vec)))
        centroid = np.mean(member_vecs, axis=0)
        for i in range(orphans_per_cluster):
            orphan = f"orph{c}_{i}"
            rows.append((orphan, list(centroid + 0.01 * rng.normal(size=dim))))
            dataset_rows.append((orphan, {pid, gid}))
    taxonomy_path = write_taxonomy_file(tmp_dir / "planted_taxonomy.jsonl", spec)
    embeddings_path = write_embeddings_file(tmp_dir / "planted_vectors.txt", rows)
    return taxonomy_path, embeddings_path, dataset_rows
