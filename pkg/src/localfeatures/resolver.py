"""Resolution of a product specification against a product line definition.

resolve() builds the multimodel (viewpoint elements, applied-to declarations,
local bindings, global selection), validates everything, and computes each
covered element's effective configuration plus the product's included-feature
set. Semantic problems never raise: they become Diagnostics and resolution
continues, so one run reports as much as possible. Error-severity diagnostics
block emission downstream.

The specification's syntactic positions route feature clauses: an entity
clause binds through the local model applied to data.Entity, a map clause
through visualization.Map, a layer reference clause through
visualization.LayerInMap. A clause feature that lives in a different local
tree is an error, never silently promoted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

from .errors import DuplicateBinding, InvalidSelection, KindMismatch, UnknownElement
from .features import Configuration, close_selection, close_selection_traced, validate_configuration
from .multimodel import (
    ModelEntity,
    ModelRelationship,
    Multimodel,
    ViewpointModel,
)
from .spldef import SplDefinition
from .syntax import (
    BUILTIN_TYPES,
    EntityDecl,
    FeatureClause,
    MapDecl,
    ProductSpec,
    Span,
)

DATA_VIEWPOINT = "data"
VISUALIZATION_VIEWPOINT = "visualization"
ENTITY_METACLASS = "Entity"
MAP_METACLASS = "Map"
LAYER_METACLASS = "Layer"
LAYER_IN_MAP_METACLASS = "LayerInMap"


@dataclass(frozen=True)
class Diagnostic:
    severity: Literal["error", "warning"]
    code: str
    message: str
    span: Span | None = None
    source: str = "<spec>"

    def sort_key(self) -> tuple:
        line = self.span.line if self.span else 0
        column = self.span.column if self.span else 0
        return (self.source, line, column, self.code)


@dataclass(frozen=True)
class Provenance:
    """Why one feature is part of an element's effective configuration."""

    feature: str
    origin: str  # "local", "global-default", or "closure(<rule>)"
    detail: str | None = None
    span: Span | None = None
    source: str = "<spec>"


@dataclass(frozen=True)
class ResolvedProduct:
    multimodel: Multimodel
    effective: dict[str, Configuration]
    included: tuple[str, ...]
    diagnostics: tuple[Diagnostic, ...]
    # carried along for explain and emission
    spec: ProductSpec = field(repr=False, compare=False, default=None)
    definition: SplDefinition = field(repr=False, compare=False, default=None)
    provenance: dict[str, dict[str, Provenance]] = field(
        repr=False, compare=False, default_factory=dict)

    @property
    def errors(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity == "error")

    @property
    def warnings(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity == "warning")


def resolve(spec: ProductSpec, definition: SplDefinition) -> ResolvedProduct:
    return _Resolution(spec, definition).run()


def explain(resolved: ResolvedProduct, element: str) -> tuple[Provenance, ...]:
    """Per-feature origin of an element's effective configuration, sorted by
    feature name. The element must be covered by some applied-to declaration."""
    if element not in resolved.effective:
        raise UnknownElement(f"no covered element {element!r} in the resolved product")
    rows = resolved.provenance.get(element, {})
    return tuple(rows[name] for name in sorted(rows))


class _Resolution:

    def __init__(self, spec: ProductSpec, definition: SplDefinition):
        self.spec = spec
        self.definition = definition
        self.diagnostics: list[Diagnostic] = []
        self.provenance: dict[str, dict[str, Provenance]] = {}
        self.route: dict[str, str] = {}  # viewpoint.metaclass -> local model
        for decl in definition.applied_to:
            self.route.setdefault(f"{decl.viewpoint}.{decl.metaclass}", decl.local_model)

    # -- diagnostics ----------------------------------------------------------

    def error(self, code: str, message: str, span: Span | None,
              source: str | None = None) -> None:
        self.diagnostics.append(Diagnostic(
            "error", code, message, span, source or self.spec.source_name))

    def warning(self, code: str, message: str, span: Span | None,
                source: str | None = None) -> None:
        self.diagnostics.append(Diagnostic(
            "warning", code, message, span, source or self.spec.source_name))

    # -- pipeline -------------------------------------------------------------

    def run(self) -> ResolvedProduct:
        self.check_names()
        global_selection = self.global_selection()
        mm = Multimodel(self.definition.functional,
                        self.build_viewpoints(),
                        global_selection,
                        validate=False)
        for decl in self.definition.applied_to:
            mm.declare_applied_to(decl.local_model, decl.viewpoint, decl.metaclass)
        self.bind_all(mm)
        self.check_defaults(mm)

        effective: dict[str, Configuration] = {}
        for qname, local_model in mm.covered_elements():
            config = mm.effective_configuration(qname, local_model)
            if qname in effective:
                effective[qname] = effective[qname] | config
            else:
                effective[qname] = config
            if qname not in self.provenance:
                self.default_provenance(qname, config)

        self.diagnostics.sort(key=Diagnostic.sort_key)
        return ResolvedProduct(mm, effective, mm.included_features(),
                               tuple(self.diagnostics),
                               spec=self.spec, definition=self.definition,
                               provenance=self.provenance)

    # -- step 1: name resolution ----------------------------------------------

    def check_names(self) -> None:
        spec = self.spec
        self.skip_entities: set[int] = set()
        self.skip_maps: set[int] = set()

        entities: dict[str, EntityDecl] = {}
        for decl in spec.entities:
            if decl.name in entities:
                self.error("duplicate-name",
                           f"entity {decl.name!r} is declared twice", decl.span)
                self.skip_entities.add(id(decl))
                continue
            entities[decl.name] = decl
        self.entities = entities

        for decl in spec.entities:
            for prop in decl.properties:
                rel = prop.relationship
                if rel is None:
                    if prop.type_name not in BUILTIN_TYPES and prop.type_name not in entities:
                        self.error("unknown-type",
                                   f"property {prop.name!r} of entity {decl.name!r} has "
                                   f"unknown type {prop.type_name!r}", prop.span)
                    continue
                target = entities.get(prop.type_name)
                if target is None:
                    self.error("unknown-entity",
                               f"relationship {prop.name!r} of entity {decl.name!r} "
                               f"targets unknown entity {prop.type_name!r}", prop.span)
                    continue
                if rel.mapped_by is not None:
                    inverse = next((p for p in target.properties
                                    if p.name == rel.mapped_by), None)
                    if inverse is None:
                        self.error("invalid-mapped-by",
                                   f"MAPPED_BY {rel.mapped_by!r} names no property of "
                                   f"entity {prop.type_name!r}", prop.span)
                    elif (inverse.relationship is None
                          or not inverse.relationship.bidirectional):
                        self.error("invalid-mapped-by",
                                   f"MAPPED_BY target {prop.type_name}.{rel.mapped_by} is "
                                   "not a BIDIRECTIONAL relationship", prop.span)
                    elif inverse.type_name != decl.name:
                        self.error("invalid-mapped-by",
                                   f"MAPPED_BY target {prop.type_name}.{rel.mapped_by} "
                                   f"relates {inverse.type_name!r}, not {decl.name!r}",
                                   prop.span)

        layers: dict[str, object] = {}
        for layer in spec.layers:
            if layer.name in layers:
                self.error("duplicate-name",
                           f"layer {layer.name!r} is declared twice", layer.span)
                continue
            layers[layer.name] = layer
            if layer.entity not in entities:
                self.error("unknown-entity",
                           f"layer {layer.name!r} is FOR unknown entity {layer.entity!r}",
                           layer.span)
            seen_styles: set[str] = set()
            for style in layer.styles:
                if style.name in seen_styles:
                    self.error("duplicate-style",
                               f"layer {layer.name!r} declares style {style.name!r} twice",
                               layer.span)
                seen_styles.add(style.name)
        self.layers = layers

        maps: dict[str, MapDecl] = {}
        for map_decl in spec.maps:
            if map_decl.name in maps:
                self.error("duplicate-name",
                           f"map {map_decl.name!r} is declared twice", map_decl.span)
                self.skip_maps.add(id(map_decl))
                continue
            maps[map_decl.name] = map_decl
            seen_refs: set[str] = set()
            for ref in map_decl.layers:
                if ref.name in seen_refs:
                    self.error("duplicate-name",
                               f"map {map_decl.name!r} references layer {ref.name!r} twice",
                               ref.span)
                seen_refs.add(ref.name)
                # base layers are built-in tile sources, not declared data layers
                if not ref.is_base_layer and ref.name not in layers:
                    self.error("unknown-layer",
                               f"map {map_decl.name!r} references undeclared layer "
                               f"{ref.name!r}", ref.span)
        self.maps = maps

    # -- step 2: viewpoints and elements ---------------------------------------

    def build_viewpoints(self) -> dict[str, ViewpointModel]:
        viewpoints = {
            name: ViewpointModel(name, frozenset(metaclasses))
            for name, metaclasses in self.definition.viewpoints.items()}

        def place(viewpoint: str, metaclass: str, entity: ModelEntity, span: Span) -> bool:
            vp = viewpoints.get(viewpoint)
            if vp is None or metaclass not in vp.metaclasses:
                self.error("no-metaclass",
                           f"definition declares no {viewpoint}.{metaclass}; cannot "
                           f"place element {entity.name!r}", span,
                           source=self.definition.source_name)
                return False
            vp.entities[entity.name] = entity
            return True

        relationships: dict[str, list[ModelRelationship]] = {}

        for decl in self.spec.entities:
            if id(decl) in self.skip_entities:
                continue
            place(DATA_VIEWPOINT, ENTITY_METACLASS,
                  ModelEntity(decl.name, ENTITY_METACLASS), decl.span)
            for prop in decl.properties:
                if prop.relationship is not None and prop.type_name in self.entities:
                    relationships.setdefault(DATA_VIEWPOINT, []).append(
                        ModelRelationship(prop.name, decl.name, prop.type_name))

        for layer in self.layers.values():
            place(VISUALIZATION_VIEWPOINT, LAYER_METACLASS,
                  ModelEntity(layer.name, LAYER_METACLASS, {
                      "display_name": layer.display_name,
                      "entity": layer.entity,
                      "source": layer.source_kind,
                  }), layer.span)

        for map_decl in self.spec.maps:
            if id(map_decl) in self.skip_maps:
                continue
            place(VISUALIZATION_VIEWPOINT, MAP_METACLASS,
                  ModelEntity(map_decl.name, MAP_METACLASS, {
                      "display_name": map_decl.display_name,
                  }), map_decl.span)
            seen: set[str] = set()
            for ref in map_decl.layers:
                if ref.name in seen:
                    continue
                seen.add(ref.name)
                qname = f"{map_decl.name}.{ref.name}"
                if place(VISUALIZATION_VIEWPOINT, LAYER_IN_MAP_METACLASS,
                         ModelEntity(qname, LAYER_IN_MAP_METACLASS, {
                             "map": map_decl.name,
                             "layer": ref.name,
                         }), ref.span):
                    relationships.setdefault(VISUALIZATION_VIEWPOINT, []).append(
                        ModelRelationship("in", qname, map_decl.name))

        return {
            name: ViewpointModel(vp.name, vp.metaclasses, vp.entities,
                                 tuple(relationships.get(name, ())))
            for name, vp in viewpoints.items()}

    # -- step 3: global selection ----------------------------------------------

    def global_selection(self) -> Configuration:
        global_model = self.definition.functional.global_model
        product = self.spec.product
        seeds = set(self.definition.defaults)
        if product.features is not None:
            span = product.features.span
            for name in product.features.names:
                if name not in global_model:
                    self.error("unknown-feature",
                               f"product selects {name!r}, which is not a feature of "
                               f"the global model {global_model.name!r}", span)
                else:
                    seeds.add(name)
        selection = close_selection(global_model, seeds)
        report = validate_configuration(global_model, selection)
        if not report.valid:
            for violation in report.violations:
                self.error("invalid-global-selection",
                           f"global selection is invalid: {violation.message}",
                           product.span)
        return selection

    # -- step 4: bindings --------------------------------------------------------

    def bind_all(self, mm: Multimodel) -> None:
        for decl in self.spec.entities:
            if decl.features is not None and id(decl) not in self.skip_entities:
                self.bind(mm, f"{DATA_VIEWPOINT}.{decl.name}",
                          f"{DATA_VIEWPOINT}.{ENTITY_METACLASS}",
                          decl.features, f"entity {decl.name!r}")
        for map_decl in self.spec.maps:
            if id(map_decl) in self.skip_maps:
                continue
            if map_decl.features is not None:
                self.bind(mm, f"{VISUALIZATION_VIEWPOINT}.{map_decl.name}",
                          f"{VISUALIZATION_VIEWPOINT}.{MAP_METACLASS}",
                          map_decl.features, f"map {map_decl.name!r}")
            seen: set[str] = set()
            for ref in map_decl.layers:
                if ref.name in seen:
                    continue
                seen.add(ref.name)
                if ref.features is not None:
                    self.bind(mm,
                              f"{VISUALIZATION_VIEWPOINT}.{map_decl.name}.{ref.name}",
                              f"{VISUALIZATION_VIEWPOINT}.{LAYER_IN_MAP_METACLASS}",
                              ref.features,
                              f"layer {ref.name!r} in map {map_decl.name!r}")

    def bind(self, mm: Multimodel, element: str, route: str,
             clause: FeatureClause, described: str) -> None:
        local_name = self.route.get(route)
        if local_name is None:
            self.error("no-local-model",
                       f"{described} has a feature clause, but no local model is "
                       f"applied to {route}", clause.span)
            return
        local = self.definition.functional.locals[local_name]

        known: list[str] = []
        bad = False
        for name in clause.names:
            if name in local:
                known.append(name)
                continue
            bad = True
            owner = self.owning_model(name)
            hint = f"; it belongs to {owner}" if owner else ""
            self.error("unknown-feature",
                       f"{described} selects {name!r}, which is not a feature of "
                       f"local model {local_name!r}{hint}", clause.span)
        if bad:
            return

        try:
            mm.bind_local(element, local_name, frozenset(known))
        except DuplicateBinding:
            self.error("duplicate-binding",
                       f"{described} is bound more than once", clause.span)
            return
        except InvalidSelection as exc:
            self.error("invalid-selection", str(exc), clause.span)
            return
        except (UnknownElement, KindMismatch):
            # the element was never placed; a no-metaclass error already says why
            return
        self.record_binding_provenance(element, local, known, clause.span)

    def owning_model(self, feature: str) -> str | None:
        for name, local in self.definition.functional.locals.items():
            if feature in local:
                return f"local model {name!r}"
        if feature in self.definition.functional.global_model:
            return "the global model"
        return None

    def record_binding_provenance(self, element: str, local, seeds: list[str],
                                  span: Span) -> None:
        _, steps = close_selection_traced(local, frozenset(seeds))
        rows: dict[str, Provenance] = {}
        source = self.spec.source_name
        for feature, step in steps.items():
            if step.cause == "seed":
                rows[feature] = Provenance(feature, "local", None, span, source)
            elif step.cause == "root":
                rows[feature] = Provenance(feature, "local", "bound local root",
                                           span, source)
            elif step.cause == "parent":
                rows[feature] = Provenance(feature, "closure(parent)",
                                           f"parent of {step.of}", span, source)
            elif step.cause == "mandatory":
                rows[feature] = Provenance(feature, "closure(mandatory)",
                                           f"mandatory child of {step.of}", span, source)
            else:
                rows[feature] = Provenance(feature, "closure(requires)",
                                           f"required by {step.of}", span, source)
        self.provenance[element] = rows

    def default_provenance(self, element: str, config: Configuration) -> None:
        span = self.spec.product.span
        self.provenance[element] = {
            feature: Provenance(feature, "global-default", "no binding exists",
                                span, self.spec.source_name)
            for feature in config}

    # -- step 5: default sanity ---------------------------------------------------

    def check_defaults(self, mm: Multimodel) -> None:
        fallers: dict[str, list[str]] = {}
        for qname, local_model in mm.covered_elements():
            if mm.binding(qname, local_model) is None:
                fallers.setdefault(local_model, []).append(qname)

        for name, local in self.definition.functional.locals.items():
            default = mm.global_default(name)
            report = validate_configuration(local, default)
            if report.valid:
                continue
            detail = "; ".join(v.message for v in report.violations)
            falling = fallers.get(name)
            span = self.definition.defaults_span
            if falling:
                shown = ", ".join(sorted(falling)[:3])
                more = "" if len(falling) <= 3 else f" (and {len(falling) - 3} more)"
                self.error("invalid-global-default",
                           f"global default for local model {name!r} is invalid "
                           f"({detail}) and {shown}{more} fall back to it",
                           span, source=self.definition.source_name)
            else:
                self.warning("invalid-global-default",
                             f"global default for local model {name!r} is invalid "
                             f"({detail}); no element falls back to it",
                             span, source=self.definition.source_name)
