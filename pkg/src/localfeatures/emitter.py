"""Emission of the derivation configuration.

emit() serializes a resolved product to JSON deterministically: object keys
sorted at every level, arrays in declaration order except feature lists
(sorted), 2-space indent, LF newlines, UTF-8-safe text. Two emissions of the
same resolved product are byte-identical. Emission refuses while any
error-severity diagnostic is present.

verify_schema() checks a JSON text against the closed derivation-config
schema shipped with the package (and at schema/ in the repository).
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

from .errors import UnresolvedErrors
from .resolver import ResolvedProduct
from .syntax import EntityDecl, LayerDecl, MapDecl, PropertyDecl

SCHEMA_VERSION = 1


def emit(resolved: ResolvedProduct) -> str:
    """The derivation configuration of a cleanly resolved product, as JSON."""
    errors = resolved.errors
    if errors:
        raise UnresolvedErrors(
            f"cannot emit: {len(errors)} error diagnostics pending, first: "
            f"{errors[0].message}")
    config = derivation_config(resolved)
    return json.dumps(config, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def derivation_config(resolved: ResolvedProduct) -> dict:
    """The emitted structure, before serialization."""
    spec = resolved.spec
    return {
        "schemaVersion": SCHEMA_VERSION,
        "product": spec.product.name,
        "features": list(resolved.included),
        "data": {
            "entities": [_entity(e) for e in spec.entities],
        },
        "visualization": {
            "layers": [_layer(l) for l in spec.layers],
            "maps": [_map(m) for m in spec.maps],
        },
        "bindings": {
            element: sorted(config)
            for element, config in resolved.effective.items()
        },
    }


def _entity(decl: EntityDecl) -> dict:
    return {
        "name": decl.name,
        "properties": [_property(p) for p in decl.properties],
    }


def _property(prop: PropertyDecl) -> dict:
    out: dict = {
        "name": prop.name,
        "type": prop.type_name,
        "flags": list(prop.flags),
    }
    rel = prop.relationship
    if rel is not None:
        if rel.mapped_by is not None:
            out["relationship"] = {"mappedBy": rel.mapped_by}
        else:
            out["relationship"] = {
                "cardinalities": [str(c) for c in rel.cardinalities],
                "bidirectional": rel.bidirectional,
            }
    return out


def _layer(decl: LayerDecl) -> dict:
    return {
        "name": decl.name,
        "displayName": decl.display_name,
        "entity": decl.entity,
        "source": decl.source_kind,
        "styles": [{"name": s.name, "default": s.is_default} for s in decl.styles],
    }


def _map(decl: MapDecl) -> dict:
    out: dict = {
        "name": decl.name,
        "displayName": decl.display_name,
        "layers": [{"layer": r.name, "flags": list(r.flags)} for r in decl.layers],
    }
    if decl.center is not None:
        out["center"] = [list(pair) for pair in decl.center.corners]
    return out


@lru_cache(maxsize=1)
def _schema() -> dict:
    text = (resources.files("localfeatures") / "schema"
            / "derivation-config.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def verify_schema(text: str) -> bool:
    """True iff the text is JSON conforming to the derivation-config schema."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError:
        return False
    validator = jsonschema.Draft7Validator(_schema())
    return not any(validator.iter_errors(document))
