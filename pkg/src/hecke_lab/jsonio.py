"""Canonical JSON export and import.

Integers are written as decimal strings, keys are sorted and separators are
fixed, so equal objects always serialize to identical bytes.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .cosets import build_index_table
from .formal import FormalSum
from .gl2 import DomainError, Mat2
from .hecke import CosetSum, h_hat_coset_sum
from .stern import farey_path, psi_vector

ENTITIES = ("table", "psi", "farey", "cosetsum", "weights")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def dumps_pretty(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2)


def weights_to_json(weights) -> list:
    return [w.to_json() for w in weights]


def weights_from_json(data) -> tuple[FormalSum, ...]:
    return tuple(FormalSum.from_json(w) for w in data)


def export(entity: str, **params) -> dict | list:
    """Serializable form of a named entity.

    ``table``, ``psi`` and ``cosetsum`` take ``n``; ``cosetsum`` also takes
    ``m``; ``farey`` takes ``q``; ``weights`` takes a sequence of FormalSums.
    """
    if entity == "table":
        return build_index_table(params["n"]).to_dict()
    if entity == "psi":
        return weights_to_json(psi_vector(params["n"]))
    if entity == "farey":
        return farey_path(params["q"]).to_dict()
    if entity == "cosetsum":
        return h_hat_coset_sum(params["n"], params["m"]).to_dict()
    if entity == "weights":
        return weights_to_json(params["weights"])
    raise DomainError(f"unknown entity {entity!r}; expected one of {', '.join(ENTITIES)}")


def import_(entity: str, data):
    """Inverse of ``export`` for the entities that carry their own content."""
    if entity in ("psi", "weights"):
        return weights_from_json(data)
    if entity == "table":
        return build_index_table(int(data["n"]))
    if entity == "farey":
        return farey_path(Fraction(data["q"]))
    if entity == "cosetsum":
        return CosetSum.from_dict(data)
    raise DomainError(f"unknown entity {entity!r}; expected one of {', '.join(ENTITIES)}")


def matrix_from_json(rows) -> Mat2:
    return Mat2.from_json(rows)
